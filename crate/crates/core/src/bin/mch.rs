use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mch::runner::{self, Experiment, Figure, Overrides, RunError};

#[derive(Parser)]
#[command(name = "mch", version, about = "Multicoloured hardcore model experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Master seed, overriding the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory, overriding the config.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    replicas: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct WithConfig {
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
enum Command {
    /// Build the configured graph and write it as an edge list.
    GenerateGraph(WithConfig),
    /// Mixing condition, mixing-time bound and related closed forms.
    Bounds(WithConfig),
    /// Simulate the dynamics and record occupancy.
    Simulate(WithConfig),
    /// Run grand-coupled pairs and estimate coalescence times.
    Couple(WithConfig),
    /// Exact stationary law and TV curves on a small graph.
    Exact(WithConfig),
    /// Simulate the queueing network.
    Queue(WithConfig),
    /// Regenerate the large-graph queue experiment.
    ReproduceFig {
        #[arg(value_enum)]
        which: Which,
        /// Fraction of the full 500-vertex size.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Er,
    Rr,
}

fn overrides(c: Common) -> Overrides {
    Overrides { seed: c.seed, output_dir: c.out, replicas: c.replicas, threads: c.threads }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (experiment, args) = match cli.command {
        Command::GenerateGraph(a) => (Experiment::GenerateGraph, a),
        Command::Bounds(a) => (Experiment::Bounds, a),
        Command::Simulate(a) => (Experiment::Simulate, a),
        Command::Couple(a) => (Experiment::Couple, a),
        Command::Exact(a) => (Experiment::Exact, a),
        Command::Queue(a) => (Experiment::Queue, a),
        Command::ReproduceFig { which, scale, common } => {
            let figure = match which {
                Which::Er => Figure::ErdosRenyi,
                Which::Rr => Figure::RandomRegular,
            };
            return finish(runner::reproduce_fig(figure, scale, &overrides(common)));
        }
    };
    finish(runner::run_file(experiment, &args.config, &overrides(args.common)))
}

fn finish(result: Result<runner::RunReport, RunError>) -> ExitCode {
    match result {
        Ok(report) => {
            println!("{}", report.summary);
            println!("output: {}", report.output_dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
