//! Drives the runner from an inline TOML config, the same format the `mch`
//! binary reads with `--config`.
//!
//! ```text
//! cargo run --release --example config_experiment -- [out-dir]
//! ```

use std::path::{Path, PathBuf};

use mch::runner::{run, Experiment, ExperimentConfig};

const CONFIG: &str = r#"
seed = 2024
replicas = 8
horizon = 500.0
initial_state = "greedy-maximal"

[graph]
kind = "random-regular"
n = 60
degree = 6

[params]
colours = 4
kind = "heuristic"
variant = "two-thirds"

[queue]
nu_ratio = 0.2
"#;

fn main() {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out/config_experiment".into()));
    let mut config = ExperimentConfig::from_toml(CONFIG).expect("valid config");
    for experiment in [Experiment::Bounds, Experiment::Simulate, Experiment::Couple, Experiment::Queue] {
        config.output_dir = out.join(experiment.name());
        let report = run(experiment, &config, Path::new("."), None).unwrap_or_else(|e| {
            eprintln!("{e}");
            std::process::exit(e.exit_code())
        });
        println!("[{}] {}", experiment.name(), report.summary.lines().last().unwrap_or(""));
    }
}
