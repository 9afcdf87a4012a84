//! Simulates the dynamics on a triangle with two colours and compares the
//! long-run fraction of time each vertex is active with the exact value.
//!
//! ```text
//! cargo run --release --example simulate -- [events]
//! ```

use mch::dynamics::{simulate, RunLimit, StateHistogram};
use mch::oracle::{tv_distance, ExactModel};
use mch::{Configuration, Graph, ModelParams};

fn main() -> mch::Result<()> {
    let events: u64 = std::env::args().nth(1).map_or(1_000_000, |a| a.parse().expect("events"));
    let g = Graph::complete(3);
    let params = ModelParams::uniform(3, 2, 1.0, 0.4)?;
    let exact = ExactModel::build(&g, &params)?;

    let mut hist = StateHistogram::default();
    let traj = simulate(&g, &params, &Configuration::all_zero(3), RunLimit::events(events), 11, &mut hist)?;
    let occupancy = traj.occupancy();

    println!("{events} events over time {:.1}", traj.end_time);
    println!("vertex  simulated  exact");
    for (v, (sim, s)) in occupancy.iter().zip(&exact.service_rates).enumerate() {
        println!("{v:>6}  {sim:.6}   {s:.6}");
    }

    let empirical = hist.distribution();
    let dist: Vec<f64> = exact.states.iter().map(|s| empirical.get(s).copied().unwrap_or(0.0)).collect();
    println!("TV(empirical, exact) = {:.5}", tv_distance(&dist, &exact.pi));
    Ok(())
}
