//! Closed-form quantities: the mixing condition, the mixing-time bound, the
//! queue-length bounds and the heuristic mean service rate on a regular graph.
//!
//! ```text
//! cargo run --example bounds -- [n] [degree] [colours]
//! ```

use mch::analysis::{heuristic_sbar, mixing_condition, tmix_bound};
use mch::model::{critical_threshold, heuristic_params, HeuristicVariant};
use mch::queueing::{heuristic_queue_bound, queue_length_bound};
use mch::{degree_stats, Graph};

fn main() -> mch::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).map(|a| a.parse().expect("integer")).collect();
    let (n, d, k) =
        (args.first().copied().unwrap_or(12), args.get(1).copied().unwrap_or(4), args.get(2).copied().unwrap_or(4));
    // Circulant graph: vertex i joined to i±1, ..., i±d/2.
    let edges: Vec<(usize, usize)> = (0..n).flat_map(|i| (1..=d / 2).map(move |j| (i, (i + j) % n))).collect();
    let g = Graph::from_edges(n, &edges)?;
    let stats = degree_stats(&g);

    let params = heuristic_params(&stats, k as u16, HeuristicVariant::TwoThirds, None)?;
    let report = mixing_condition(&g, &params)?;
    println!("{report}");
    println!("critical p (eK/Δ) = {:.4}", critical_threshold(stats.max_degree, k as u16));
    if let Ok(t) = tmix_bound(&report, 0.01) {
        println!("t_mix(0.01) <= {t:.4}");
    }

    let p = params.p[0];
    let s = heuristic_sbar(p, d as f64, k as f64, false);
    let refined = heuristic_sbar(p, d as f64, k as f64, true);
    println!("p = {p:.4}, heuristic s = {s:.4}, refined {refined:.4}");
    for ratio in [0.2, 0.5] {
        let nu = ratio * s;
        let b = queue_length_bound(n, report.beta, report.lambda_min, s, nu)?;
        let c = heuristic_queue_bound(n, stats.mean_degree, stats.min_degree, s, nu)?;
        println!("nu = {nu:.4}: mean queue <= {:.2} (degree-heuristic form {c:.2})", b.bound);
    }
    Ok(())
}
