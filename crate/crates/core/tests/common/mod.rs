#![allow(dead_code)]

use mch::analysis::mixing_condition;
use mch::{Graph, ModelParams};
use rand::Rng;

/// One representative of every isomorphism class of graphs on `n` vertices.
pub fn nonisomorphic_graphs(n: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let mut index = vec![vec![0usize; n]; n];
    for (i, &(u, v)) in pairs.iter().enumerate() {
        index[u][v] = i;
        index[v][u] = i;
    }
    let perms = permutations(n);
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for mask in 0u32..(1 << pairs.len()) {
        let canonical = perms
            .iter()
            .map(|perm| {
                pairs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .fold(0u32, |acc, (_, &(u, v))| acc | 1 << index[perm[u]][perm[v]])
            })
            .min()
            .unwrap_or(0);
        if seen.insert(canonical) {
            let edges: Vec<_> = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
            out.push(Graph::from_edges(n, &edges).unwrap());
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Random `λ ∈ [0.5, 2]` and `p`, with `p` scaled so that the mixing margin
/// `β` lands uniformly in `[beta_lo, beta_hi]` when the graph has edges.
/// `p` stays below 0.95 so the chain is irreducible.
pub fn random_params_with_margin(
    g: &Graph,
    colours: u16,
    beta_lo: f64,
    beta_hi: f64,
    rng: &mut impl Rng,
) -> ModelParams {
    let n = g.n();
    let lambda: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
    let p: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..0.95)).collect();
    let params = ModelParams::new(colours, lambda.clone(), p.clone()).unwrap();
    let report = mixing_condition(g, &params).unwrap();
    let max_load = 1.0 - report.beta;
    if max_load == 0.0 {
        return params;
    }
    let target = 1.0 - rng.random_range(beta_lo..beta_hi);
    let scale = (target / max_load).min(0.95 / p.iter().cloned().fold(0.0, f64::max));
    ModelParams::new(colours, lambda, p.iter().map(|x| x * scale).collect()).unwrap()
}
