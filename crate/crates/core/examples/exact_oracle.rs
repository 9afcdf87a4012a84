//! Exact stationary law, service rates and distance to stationarity on a
//! small graph, next to the coupling bound.
//!
//! ```text
//! cargo run --release --example exact_oracle
//! ```

use mch::analysis::mixing_condition;
use mch::model::{heuristic_params, HeuristicVariant};
use mch::oracle::{tv_worst_case_curve, ExactModel};
use mch::{degree_stats, Graph};

fn main() -> mch::Result<()> {
    let g = Graph::cycle(5)?;
    let variant = HeuristicVariant::TwoThirds;
    let params = heuristic_params(&degree_stats(&g), 2, variant, Some(variant.default_cap()))?;
    let model = ExactModel::build(&g, &params)?;
    println!("{} proper states on C5 with K=2", model.len());
    println!("p = {:?}", params.p);
    println!("s = {:?}", model.service_rates);

    let mut ranked: Vec<_> = model.states.iter().zip(&model.pi).collect();
    ranked.sort_by(|a, b| b.1.total_cmp(a.1));
    for (state, pi) in ranked.iter().take(5) {
        println!("  pi({}) = {pi:.6}", state.label());
    }

    let report = mixing_condition(&g, &params)?;
    let grid: Vec<f64> = (0..=10).map(|i| i as f64).collect();
    let worst = tv_worst_case_curve(&model, &grid)?;
    println!("beta = {:.4}", report.beta);
    println!("   t   worst TV   bound");
    for (t, tv) in grid.iter().zip(&worst) {
        println!("{t:>4}   {tv:.6}   {:.6}", report.bound_curve(*t));
    }
    Ok(())
}
