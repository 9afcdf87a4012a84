//! Grand coupling on a random graph: coalescence times from the all-zero and
//! a greedy maximal start, the resulting TV upper bound, and an exact check
//! of the one-step contraction on a small graph.
//!
//! ```text
//! cargo run --release --example coupling -- [replicas]
//! ```

use mch::analysis::{mixing_condition, tmix_bound};
use mch::coupling::{coupled_replicas, exact_contraction_check, tv_upper_curve};
use mch::graph::generate_erdos_renyi;
use mch::rng::rng_from_seed;
use mch::{Configuration, Graph, ModelParams};

fn main() -> mch::Result<()> {
    let replicas: u64 = std::env::args().nth(1).map_or(200, |a| a.parse().expect("replicas"));
    let g = generate_erdos_renyi(100, 0.2, 5)?;
    let params = ModelParams::uniform(g.n(), 5, 1.0, 0.2)?;
    let report = mixing_condition(&g, &params)?;
    println!("beta = {:.4} (condition {})", report.beta, if report.satisfied { "holds" } else { "fails" });

    let x0 = Configuration::all_zero(g.n());
    let y0 = Configuration::greedy_maximal(&g, 5, &mut rng_from_seed(3));
    let runs = coupled_replicas(&g, &params, &x0, &y0, 200.0, 17, replicas)?;
    let samples: Vec<_> = runs.iter().map(|(s, _)| *s).collect();
    let mut times: Vec<f64> = samples.iter().filter_map(|s| s.time).collect();
    times.sort_by(f64::total_cmp);
    println!(
        "{} of {} coupled pairs coalesced; median time {:.3}",
        times.len(),
        samples.len(),
        times.get(times.len() / 2).copied().unwrap_or(f64::NAN)
    );
    if let Ok(t) = tmix_bound(&report, 0.25) {
        println!("mixing-time bound at 1/4: {t:.3}");
    }
    for p in tv_upper_curve(&samples, &[1.0, 2.0, 4.0, 8.0])? {
        println!("  P(T > {:>3}) = {:.3}  [{:.3}, {:.3}]", p.time, p.estimate, p.lower, p.upper);
    }

    let small = Graph::cycle(5)?;
    let params = ModelParams::new(2, vec![1.0, 2.0, 1.0, 0.5, 1.5], vec![0.3, 0.2, 0.4, 0.5, 0.1])?;
    for v in 0..small.n() {
        let c = exact_contraction_check(&small, &params, v, 1_000_000)?;
        println!(
            "C5 vertex {v}: worst drift {:+.4} <= {:+.4} over {} pairs: {}",
            c.worst_drift, c.bound, c.pairs, c.passes
        );
    }
    Ok(())
}
