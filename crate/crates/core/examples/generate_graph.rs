//! Generates an Erdős–Rényi graph and a random regular graph, prints their
//! degree statistics and writes both as edge lists.
//!
//! ```text
//! cargo run --example generate_graph -- [n] [mean-degree] [out-dir]
//! ```

use std::path::PathBuf;

use mch::graph::{generate_erdos_renyi, generate_random_regular};
use mch::{degree_stats, Graph};

fn describe(name: &str, g: &Graph) {
    let s = degree_stats(g);
    println!(
        "{name}: n={} edges={} mean degree={:.3} min={} max={}",
        g.n(),
        g.edge_count(),
        s.mean_degree,
        s.min_degree,
        s.max_degree
    );
}

fn main() -> mch::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map_or(500, |a| a.parse().expect("n"));
    let d: usize = args.get(1).map_or(40, |a| a.parse().expect("degree"));
    let out = PathBuf::from(args.get(2).map_or("out/graphs", String::as_str));
    std::fs::create_dir_all(&out)?;

    let er = generate_erdos_renyi(n, d as f64 / n as f64, 1)?;
    describe("erdos-renyi", &er);
    er.write_edge_list(out.join("er.txt"))?;

    let rr = generate_random_regular(n, d, 1)?;
    describe("random-regular", &rr);
    rr.write_edge_list(out.join("rr.txt"))?;

    // Round trip through the edge-list format.
    assert_eq!(Graph::read_edge_list(out.join("rr.txt"))?, rr);
    println!("wrote {}", out.display());
    Ok(())
}
