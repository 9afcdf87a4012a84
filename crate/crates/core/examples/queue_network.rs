//! Queues served only while their vertex is active. A stable load keeps the
//! Lyapunov function flat; an overloaded vertex makes it grow.
//!
//! ```text
//! cargo run --release --example queue_network
//! ```

use mch::oracle::ExactModel;
use mch::queueing::{drift_estimate, simulate_queue, QueueParams, QueueRunOptions};
use mch::{Configuration, Graph, ModelParams};

fn run(label: &str, g: &Graph, params: &ModelParams, nu: Vec<f64>) -> mch::Result<()> {
    let n = g.n();
    let qparams = QueueParams::new(nu, vec![1.0; n])?;
    let mut options = QueueRunOptions::new(5_000.0);
    options.tracked = (0..n).collect();
    let run = simulate_queue(g, params, &qparams, &Configuration::all_zero(n), &vec![0; n], &options, 9)?;
    let windows = drift_estimate(&run.lyapunov, 1_000.0)?;
    println!("{label}");
    println!(
        "  final rolling Q = {:?}",
        run.final_q_hat.iter().map(|q| (q * 100.0).round() / 100.0).collect::<Vec<_>>()
    );
    println!("  final rolling s = {:?}", run.final_s_hat.iter().map(|s| (s * 1e4).round() / 1e4).collect::<Vec<_>>());
    for w in windows {
        println!("  L drift on [{:>5.0}, {:>5.0}]: {:+.3}", w.start, w.end, w.slope);
    }
    Ok(())
}

fn main() -> mch::Result<()> {
    let g = Graph::path(4);
    let params = ModelParams::uniform(4, 2, 1.0, 0.5)?;
    let s = ExactModel::build(&g, &params)?.service_rates;
    println!("exact service rates {s:?}");
    run("nu = s / 2", &g, &params, s.iter().map(|x| x / 2.0).collect())?;
    let mut overloaded: Vec<f64> = s.iter().map(|x| x / 2.0).collect();
    overloaded[1] = 1.5 * s[1];
    run("vertex 1 overloaded (nu = 1.5 s)", &g, &params, overloaded)
}
