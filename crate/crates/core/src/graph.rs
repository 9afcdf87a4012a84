//! Undirected simple graphs on dense vertex sets `0..n`, random generators and
//! the plain-text edge-list format.
//!
//! The edge-list format is a header line `n <count>` followed by one edge per
//! line as two whitespace-separated 0-indexed vertices. Writers emit each edge
//! once as `u v` with `u < v`, in ascending lexicographic order.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Restarts allowed by [`generate_random_regular`] before giving up.
pub const DEFAULT_REGULAR_RETRIES: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Graph {
    /// Graph on `n` vertices with no edges.
    pub fn empty(n: usize) -> Self {
        Graph { adjacency: vec![Vec::new(); n], edge_count: 0 }
    }

    /// Builds a graph from an edge list, rejecting self-loops, duplicates and
    /// out-of-range endpoints.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidParameter(format!("edge ({u},{v}) out of range for n={n}")));
            }
            if u == v {
                return Err(Error::InvalidParameter(format!("self-loop at {u}")));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for (v, nbrs) in adjacency.iter_mut().enumerate() {
            nbrs.sort_unstable();
            if nbrs.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidParameter(format!("duplicate edge at vertex {v}")));
            }
        }
        Ok(Graph { adjacency, edge_count: edges.len() })
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Self::from_edges(n, &edges).expect("complete graph is simple")
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        Self::from_edges(n, &edges).expect("path is simple")
    }

    /// Cycle on `n >= 3` vertices.
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParameter(format!("cycle needs n >= 3, got {n}")));
        }
        let edges: Vec<_> = (0..n).map(|v| (v, (v + 1) % n)).collect();
        Self::from_edges(n, &edges)
    }

    /// Star with centre 0 and `leaves` leaves.
    pub fn star(leaves: usize) -> Self {
        let edges: Vec<_> = (1..=leaves).map(|v| (0, v)).collect();
        Self::from_edges(leaves + 1, &edges).expect("star is simple")
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Sorted neighbours of `v`.
    pub fn neighbours(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn is_adjacent(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Edges `(u, v)` with `u < v` in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, nbrs)| nbrs.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Exhaustive symmetry and simplicity scan.
    pub fn check_invariants(&self) -> bool {
        let mut half_edges = 0;
        for (u, nbrs) in self.adjacency.iter().enumerate() {
            if nbrs.windows(2).any(|w| w[0] >= w[1]) {
                return false;
            }
            for &v in nbrs {
                if v == u || v >= self.n() || !self.is_adjacent(v, u) {
                    return false;
                }
            }
            half_edges += nbrs.len();
        }
        half_edges == 2 * self.edge_count
    }

    pub fn to_edge_list_string(&self) -> String {
        let mut out = format!("n {}\n", self.n());
        for (u, v) in self.edges() {
            writeln!(out, "{u} {v}").expect("write to String");
        }
        out
    }

    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        let n = loop {
            let Some((line, content)) = lines.next() else {
                return Err(Error::Parse { line: 1, msg: "missing header `n <count>`".into() });
            };
            if content.is_empty() {
                continue;
            }
            let mut parts = content.split_whitespace();
            match (parts.next(), parts.next(), parts.next()) {
                (Some("n"), Some(count), None) => {
                    break count
                        .parse::<usize>()
                        .map_err(|e| Error::Parse { line, msg: format!("bad vertex count: {e}") })?;
                }
                _ => return Err(Error::Parse { line, msg: "expected header `n <count>`".into() }),
            }
        };
        if n == 0 {
            return Err(Error::Parse { line: 1, msg: "vertex count must be positive".into() });
        }

        let mut adjacency = vec![Vec::new(); n];
        let mut edge_count = 0;
        for (line, content) in lines {
            if content.is_empty() {
                continue;
            }
            let fields: Vec<&str> = content.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(Error::Parse { line, msg: format!("expected `u v`, got {content:?}") });
            }
            let parse =
                |s: &str| s.parse::<usize>().map_err(|e| Error::Parse { line, msg: format!("bad vertex {s:?}: {e}") });
            let (u, v) = (parse(fields[0])?, parse(fields[1])?);
            if u >= n || v >= n {
                return Err(Error::Parse { line, msg: format!("vertex index out of range (n={n}): {content}") });
            }
            if u == v {
                return Err(Error::Parse { line, msg: format!("self-loop at vertex {u}") });
            }
            if adjacency[u].contains(&v) {
                return Err(Error::Parse { line, msg: format!("duplicate edge {u} {v}") });
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
            edge_count += 1;
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        Ok(Graph { adjacency, edge_count })
    }

    pub fn read_edge_list(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse_edge_list(&fs::read_to_string(path)?)
    }

    pub fn write_edge_list(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_edge_list_string())?;
        Ok(())
    }
}

/// Degree statistics. `neighbourhood_max[v]` is the largest degree over the
/// closed neighbourhood of `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeStats {
    pub degrees: Vec<usize>,
    /// Sum of degrees, so that the mean is exactly `degree_sum / n`.
    pub degree_sum: usize,
    pub mean_degree: f64,
    pub min_degree: usize,
    pub max_degree: usize,
    pub neighbourhood_max: Vec<usize>,
}

pub fn degree_stats(g: &Graph) -> DegreeStats {
    let degrees: Vec<usize> = (0..g.n()).map(|v| g.degree(v)).collect();
    let degree_sum: usize = degrees.iter().sum();
    let neighbourhood_max =
        (0..g.n()).map(|v| g.neighbours(v).iter().map(|&u| degrees[u]).fold(degrees[v], usize::max)).collect();
    DegreeStats {
        mean_degree: degree_sum as f64 / g.n().max(1) as f64,
        min_degree: degrees.iter().copied().min().unwrap_or(0),
        max_degree: degrees.iter().copied().max().unwrap_or(0),
        degrees,
        degree_sum,
        neighbourhood_max,
    }
}

/// G(n, p): every unordered pair is an edge independently with probability
/// `edge_prob`.
pub fn generate_erdos_renyi(n: usize, edge_prob: f64, seed: u64) -> Result<Graph> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    if !(0.0..=1.0).contains(&edge_prob) {
        return Err(Error::InvalidParameter(format!("edge probability {edge_prob} not in [0,1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(edge_prob) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges)
}

/// Random `d`-regular graph on `n` vertices with the default retry budget.
pub fn generate_random_regular(n: usize, d: usize, seed: u64) -> Result<Graph> {
    generate_random_regular_with_retries(n, d, seed, DEFAULT_REGULAR_RETRIES)
}

/// Pairing-model sampler. Half-edges ("points") are matched one random pair at
/// a time, skipping pairs that would create a loop or a repeated edge; when no
/// admissible pair remains the whole attempt is discarded and restarted. The
/// output is approximately, not exactly, uniform over `d`-regular graphs.
pub fn generate_random_regular_with_retries(n: usize, d: usize, seed: u64, max_attempts: usize) -> Result<Graph> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    if (n * d) % 2 == 1 {
        return Err(Error::OddDegreeSum { n, d });
    }
    if d >= n {
        return Err(Error::InvalidParameter(format!("degree {d} must be below n={n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..max_attempts {
        if let Some(edges) = try_pairing(n, d, &mut rng) {
            return Graph::from_edges(n, &edges);
        }
    }
    Err(Error::RegularRetriesExhausted { n, d, attempts: max_attempts })
}

fn try_pairing(n: usize, d: usize, rng: &mut impl Rng) -> Option<Vec<(usize, usize)>> {
    let mut points: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    points.shuffle(rng);
    let mut adjacent = vec![false; n * n];
    let mut edges = Vec::with_capacity(n * d / 2);

    while !points.is_empty() {
        let len = points.len();
        let mut matched = false;
        // Random proposals first; fall back to a full scan to detect dead ends.
        for _ in 0..64 {
            let i = rng.random_range(0..len);
            let j = rng.random_range(0..len);
            let (u, v) = (points[i], points[j]);
            if i != j && u != v && !adjacent[u * n + v] {
                take_pair(&mut points, i, j);
                adjacent[u * n + v] = true;
                adjacent[v * n + u] = true;
                edges.push((u.min(v), u.max(v)));
                matched = true;
                break;
            }
        }
        if matched {
            continue;
        }
        let admissible: Vec<(usize, usize)> = (0..len)
            .flat_map(|i| (i + 1..len).map(move |j| (i, j)))
            .filter(|&(i, j)| {
                let (u, v) = (points[i], points[j]);
                u != v && !adjacent[u * n + v]
            })
            .collect();
        if admissible.is_empty() {
            return None;
        }
        let (i, j) = admissible[rng.random_range(0..admissible.len())];
        let (u, v) = (points[i], points[j]);
        take_pair(&mut points, i, j);
        adjacent[u * n + v] = true;
        adjacent[v * n + u] = true;
        edges.push((u.min(v), u.max(v)));
    }
    Some(edges)
}

fn take_pair(points: &mut Vec<usize>, i: usize, j: usize) {
    let (hi, lo) = if i > j { (i, j) } else { (j, i) };
    points.swap_remove(hi);
    points.swap_remove(lo);
}
