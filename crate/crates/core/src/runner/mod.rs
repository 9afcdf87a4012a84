//! Experiment orchestration: builds the graph and parameters from a config,
//! fans replicas out over a thread pool and writes CSV artifacts plus a
//! `metadata.json` into the output directory.
//!
//! CSV bodies depend only on the config and master seed. Replica `r` always
//! uses [`replica_seed`]`(seed, r)` and results are written in replica order,
//! whatever the thread count.

pub mod config;

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde_json::json;

pub use config::ExperimentConfig;
use config::{GraphSpec, ParamRule, ParamSpec, QueueSpec, TimeUnits, VariantName};

use crate::analysis::{mixing_condition, service_rate_check, tmix_bound, ServiceEstimate};
use crate::coupling::{coupled_replicas, tv_upper_curve, write_coalescence_csv, write_trace_csv};
use crate::dynamics::{simulate, write_occupancy_csv, EventLog, RunLimit};
use crate::error::Error;
use crate::graph::{degree_stats, Graph};
use crate::model::{critical_threshold, ModelParams};
use crate::oracle::{tv_exact_curve, tv_worst_case_curve, Budget, ExactModel};
use crate::queueing::{
    drift_estimate, normalized_difference, simulate_queue, time_normalisation, write_summary_csv, QueueRunOptions,
};
use crate::rng::{replica_seed, rng_from_seed, stream_seed};
use crate::stats::{mean_and_se, quarter_change};

/// Largest state space for which the exact worst-case TV curve is computed.
const WORST_CASE_TV_STATES: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    GenerateGraph,
    Bounds,
    Simulate,
    Couple,
    Exact,
    Queue,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::GenerateGraph => "generate-graph",
            Experiment::Bounds => "bounds",
            Experiment::Simulate => "simulate",
            Experiment::Couple => "couple",
            Experiment::Exact => "exact",
            Experiment::Queue => "queue",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(String),
    #[error("infeasible: {0}")]
    Infeasible(Error),
    #[error(transparent)]
    Failed(Error),
}

impl RunError {
    /// 2 for config errors, 3 for runtime infeasibility, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Infeasible(_) => 3,
            RunError::Failed(_) => 1,
        }
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded { .. }
            | Error::Reducible(_)
            | Error::ConditionUnsatisfied { .. }
            | Error::Infeasible { .. }
            | Error::RegularRetriesExhausted { .. } => RunError::Infeasible(e),
            Error::InvalidParameter(_)
            | Error::Dimension { .. }
            | Error::OddDegreeSum { .. }
            | Error::Parse { .. }
            | Error::NotProper { .. }
            | Error::ColourRange { .. } => RunError::Config(e.to_string()),
            other => RunError::Failed(other),
        }
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Failed(Error::Io(e))
    }
}

/// Command-line overrides applied on top of a config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub replicas: Option<u64>,
    pub threads: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, config: &mut ExperimentConfig) {
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(dir) = &self.output_dir {
            config.output_dir = dir.clone();
        }
        if let Some(r) = self.replicas {
            config.replicas = r;
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub output_dir: PathBuf,
    pub files: Vec<PathBuf>,
    /// Human-readable summary for standard output.
    pub summary: String,
    pub metadata: serde_json::Value,
}

/// Reads and validates a config file; relative paths inside it resolve
/// against the file's directory.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, RunError> {
    let text =
        fs::read_to_string(path).map_err(|e| RunError::Config(format!("cannot read {}: {e}", path.display())))?;
    ExperimentConfig::from_toml(&text).map_err(RunError::Config)
}

pub fn run_file(experiment: Experiment, path: &Path, overrides: &Overrides) -> Result<RunReport, RunError> {
    let mut config = load_config(path)?;
    overrides.apply(&mut config);
    config.validate().map_err(RunError::Config)?;
    let base = path.parent().unwrap_or(Path::new("."));
    run(experiment, &config, base, overrides.threads)
}

pub fn run(
    experiment: Experiment,
    config: &ExperimentConfig,
    base_dir: &Path,
    threads: Option<usize>,
) -> Result<RunReport, RunError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| RunError::Config(format!("thread pool: {e}")))?;
    pool.install(|| run_inner(experiment, config, base_dir))
}

struct Context<'a> {
    config: &'a ExperimentConfig,
    out: PathBuf,
    files: Vec<PathBuf>,
    extra: serde_json::Map<String, serde_json::Value>,
    summary: String,
}

impl Context<'_> {
    fn create(&mut self, name: &str) -> Result<BufWriter<File>, RunError> {
        let path = self.out.join(name);
        let file = File::create(&path)?;
        self.files.push(path);
        Ok(BufWriter::new(file))
    }
}

fn run_inner(experiment: Experiment, config: &ExperimentConfig, base_dir: &Path) -> Result<RunReport, RunError> {
    let started = Instant::now();
    let g = config.graph.build(config.seed, base_dir)?;
    fs::create_dir_all(&config.output_dir)?;
    let mut ctx = Context {
        config,
        out: config.output_dir.clone(),
        files: Vec::new(),
        extra: serde_json::Map::new(),
        summary: String::new(),
    };

    let params = if experiment == Experiment::GenerateGraph { None } else { Some(config.params.build(&g)?) };
    let displayed = display_subset(&g, config.display_vertices, config.seed);
    match (experiment, &params) {
        (Experiment::GenerateGraph, _) => {
            let path = ctx.out.join("graph.txt");
            g.write_edge_list(&path)?;
            ctx.files.push(path);
            ctx.summary = format!("wrote graph with {} vertices and {} edges", g.n(), g.edge_count());
        }
        (Experiment::Bounds, Some(p)) => run_bounds(&mut ctx, &g, p)?,
        (Experiment::Simulate, Some(p)) => run_simulate(&mut ctx, &g, p)?,
        (Experiment::Couple, Some(p)) => run_couple(&mut ctx, &g, p)?,
        (Experiment::Exact, Some(p)) => run_exact(&mut ctx, &g, p)?,
        (Experiment::Queue, Some(p)) => run_queue(&mut ctx, &g, p, &displayed)?,
        _ => unreachable!("parameters are built for every model experiment"),
    }

    let stats = degree_stats(&g);
    let metadata = json!({
        "experiment": experiment.name(),
        "version": env!("CARGO_PKG_VERSION"),
        "config": config.to_toml(),
        "seed": config.seed,
        "replicas": config.replicas,
        "initial_state": config.initial_state.name(),
        "graph": {
            "n": g.n(),
            "edges": g.edge_count(),
            "mean_degree": stats.mean_degree,
            "min_degree": stats.min_degree,
            "max_degree": stats.max_degree,
        },
        "displayed_vertices": displayed,
        "results": serde_json::Value::Object(ctx.extra.clone()),
        "wall_time_seconds": started.elapsed().as_secs_f64(),
    });
    let meta_path = ctx.out.join("metadata.json");
    fs::write(&meta_path, serde_json::to_string_pretty(&metadata).expect("json"))?;
    ctx.files.push(meta_path);
    Ok(RunReport { output_dir: ctx.out, files: ctx.files, summary: ctx.summary, metadata })
}

/// `count` vertices drawn at random among those whose degree lies in the
/// interquartile range, sorted.
pub fn display_subset(g: &Graph, count: usize, seed: u64) -> Vec<usize> {
    let mut degrees: Vec<usize> = (0..g.n()).map(|v| g.degree(v)).collect();
    degrees.sort_unstable();
    let (lo, hi) = (degrees[degrees.len() / 4], degrees[(3 * degrees.len()) / 4]);
    let mut typical: Vec<usize> = (0..g.n()).filter(|&v| (lo..=hi).contains(&g.degree(v))).collect();
    let mut rng = rng_from_seed(stream_seed(seed, "display"));
    typical.shuffle(&mut rng);
    typical.truncate(count);
    typical.sort_unstable();
    typical
}

fn run_bounds(ctx: &mut Context<'_>, g: &Graph, params: &ModelParams) -> Result<(), RunError> {
    let report = mixing_condition(g, params)?;
    report.write_csv(ctx.create("mixing.csv")?)?;
    let stats = degree_stats(g);
    let mut rows: Vec<(&str, String)> = vec![
        ("n", g.n().to_string()),
        ("colours", params.colours.to_string()),
        ("beta", report.beta.to_string()),
        ("lambda_min", report.lambda_min.to_string()),
        ("satisfied", report.satisfied.to_string()),
        ("tmix_quarter", tmix_bound(&report, 0.25).map(|t| t.to_string()).unwrap_or_default()),
        ("mean_degree", stats.mean_degree.to_string()),
        ("min_degree", stats.min_degree.to_string()),
        ("max_degree", stats.max_degree.to_string()),
        ("critical_threshold", critical_threshold(stats.max_degree, params.colours).to_string()),
    ];
    let regular = stats.min_degree == stats.max_degree;
    let uniform_p = params.p.iter().all(|&p| p == params.p[0]);
    if regular && uniform_p && g.n() > 0 {
        let (p, d, k) = (params.p[0], stats.max_degree as f64, params.colours as f64);
        rows.push(("sbar_heuristic", crate::analysis::heuristic_sbar(p, d, k, false).to_string()));
        rows.push(("sbar_heuristic_refined", crate::analysis::heuristic_sbar(p, d, k, true).to_string()));
    }
    let mut w = csv::Writer::from_writer(ctx.create("bounds.csv")?);
    w.write_record(["quantity", "value"]).map_err(Error::from)?;
    for (name, value) in &rows {
        w.write_record([name, value.as_str()]).map_err(Error::from)?;
    }
    w.flush()?;
    ctx.extra.insert("beta".into(), json!(report.beta));
    ctx.summary = report.to_string();
    Ok(())
}

fn run_simulate(ctx: &mut Context<'_>, g: &Graph, params: &ModelParams) -> Result<(), RunError> {
    let config = ctx.config;
    let runs: Vec<(Vec<f64>, Option<EventLog>)> = (0..config.replicas)
        .into_par_iter()
        .map(|r| {
            let seed = replica_seed(config.seed, r);
            let start = config.initial_state.build(g, params.colours, seed);
            let mut log = config.event_log.then(EventLog::default);
            let traj = match log.as_mut() {
                Some(log) => simulate(g, params, &start, RunLimit::horizon(config.horizon), seed, log)?,
                None => simulate(g, params, &start, RunLimit::horizon(config.horizon), seed, ())?,
            };
            Ok((traj.occupancy(), log))
        })
        .collect::<Result<_, Error>>()?;

    let n = g.n();
    let per_vertex: Vec<(f64, f64)> =
        (0..n).map(|v| mean_and_se(&runs.iter().map(|(occ, _)| occ[v]).collect::<Vec<_>>())).collect();
    let mean: Vec<f64> = per_vertex.iter().map(|&(m, _)| m).collect();
    write_occupancy_csv(&mean, ctx.create("occupancy.csv")?)?;
    for (r, (_, log)) in runs.iter().enumerate() {
        if let Some(log) = log {
            log.write_csv(ctx.create(&format!("events_r{r}.csv"))?)?;
        }
    }

    let estimates: Vec<ServiceEstimate> = per_vertex
        .iter()
        .map(|&(m, se)| if se.is_finite() { ServiceEstimate::estimated(m, se, n) } else { ServiceEstimate::exact(m) })
        .collect();
    let checks = service_rate_check(g, params, &estimates)?;
    let mut w = csv::Writer::from_writer(ctx.create("service_check.csv")?);
    w.write_record(["vertex", "estimate", "lower", "upper", "p", "hypothesis_met", "sandwich"]).map_err(Error::from)?;
    for (c, e) in checks.iter().zip(&estimates) {
        let (lo, hi) = e.interval.unwrap_or((e.value, e.value));
        w.write_record([
            c.vertex.to_string(),
            e.value.to_string(),
            lo.to_string(),
            hi.to_string(),
            params.p[c.vertex].to_string(),
            c.hypothesis_met.to_string(),
            c.sandwich.map(|s| s.to_string()).unwrap_or_default(),
        ])
        .map_err(Error::from)?;
    }
    w.flush()?;
    let mean_activity = mean.iter().sum::<f64>() / n as f64;
    ctx.extra.insert("mean_occupancy".into(), json!(mean_activity));
    ctx.summary = format!("{} replica(s), mean active fraction {mean_activity:.6}", config.replicas);
    Ok(())
}

fn run_couple(ctx: &mut Context<'_>, g: &Graph, params: &ModelParams) -> Result<(), RunError> {
    let config = ctx.config;
    let x0 = config.couple.start_x.build(g, params.colours, stream_seed(config.seed, "start-x"));
    let y0 = config.couple.start_y.build(g, params.colours, stream_seed(config.seed, "start-y"));
    let results = coupled_replicas(g, params, &x0, &y0, config.horizon, config.seed, config.replicas)?;
    let samples: Vec<_> = results.iter().map(|(s, _)| *s).collect();
    write_coalescence_csv(&samples, ctx.create("coalescence.csv")?)?;
    let traces: Vec<_> = results.iter().map(|(s, run)| (s.replica, run)).collect();
    write_trace_csv(&traces, ctx.create("distance_trace.csv")?)?;

    let points = config.couple.tv_points.max(2);
    let grid: Vec<f64> = (0..points).map(|i| config.horizon * i as f64 / (points - 1) as f64).collect();
    let curve = tv_upper_curve(&samples, &grid)?;
    let report = mixing_condition(g, params)?;
    let mut w = csv::Writer::from_writer(ctx.create("tv_upper.csv")?);
    w.write_record(["time", "estimate", "lower", "upper", "bound"]).map_err(Error::from)?;
    for p in &curve {
        let bound = if report.satisfied { report.bound_curve(p.time).to_string() } else { String::new() };
        w.write_record([p.time.to_string(), p.estimate.to_string(), p.lower.to_string(), p.upper.to_string(), bound])
            .map_err(Error::from)?;
    }
    w.flush()?;

    let mut times: Vec<f64> = samples.iter().filter_map(|s| s.time).collect();
    times.sort_by(f64::total_cmp);
    let censored = samples.len() - times.len();
    // Censored runs sort after every observed time.
    let median = if 2 * censored < samples.len() { Some(times[(samples.len() - 1) / 2]) } else { None };
    ctx.extra.insert("median_coalescence".into(), json!(median));
    ctx.extra.insert("censored".into(), json!(censored));
    ctx.extra.insert("beta".into(), json!(report.beta));
    ctx.summary = format!(
        "{} coupled replicas, {censored} censored, median coalescence {}",
        samples.len(),
        median.map_or("censored".to_string(), |m| format!("{m:.6}"))
    );
    Ok(())
}

fn run_exact(ctx: &mut Context<'_>, g: &Graph, params: &ModelParams) -> Result<(), RunError> {
    let config = ctx.config;
    let budget = Budget { states: config.exact.max_states, dense: config.exact.dense_budget };
    let model = ExactModel::build_with_budget(g, params, budget)?;
    model.write_pi_csv(ctx.create("pi.csv")?)?;

    let estimates: Vec<_> = model.service_rates.iter().map(|&s| ServiceEstimate::exact(s)).collect();
    let checks = service_rate_check(g, params, &estimates)?;
    let mut w = csv::Writer::from_writer(ctx.create("service_rates.csv")?);
    w.write_record(["vertex", "s", "p", "p_third", "hypothesis_met", "sandwich"]).map_err(Error::from)?;
    for c in &checks {
        let p = params.p[c.vertex];
        w.write_record([
            c.vertex.to_string(),
            model.service_rates[c.vertex].to_string(),
            p.to_string(),
            (p / 3.0).to_string(),
            c.hypothesis_met.to_string(),
            c.sandwich.map(|s| s.to_string()).unwrap_or_default(),
        ])
        .map_err(Error::from)?;
    }
    w.flush()?;

    let report = mixing_condition(g, params)?;
    let points = config.exact.tv_points.max(2);
    let grid: Vec<f64> = (0..points).map(|i| config.exact.tv_end * i as f64 / (points - 1) as f64).collect();
    let start = config.initial_state.build(g, params.colours, config.seed);
    let from_start = tv_exact_curve(&model, &start, &grid)?;
    let worst = if model.len() <= WORST_CASE_TV_STATES { Some(tv_worst_case_curve(&model, &grid)?) } else { None };
    let mut w = csv::Writer::from_writer(ctx.create("tv_exact.csv")?);
    w.write_record(["time", "tv_start", "tv_worst", "bound"]).map_err(Error::from)?;
    for (i, &t) in grid.iter().enumerate() {
        w.write_record([
            t.to_string(),
            from_start[i].to_string(),
            worst.as_ref().map(|c| c[i].to_string()).unwrap_or_default(),
            if report.satisfied { report.bound_curve(t).to_string() } else { String::new() },
        ])
        .map_err(Error::from)?;
    }
    w.flush()?;
    report.write_csv(ctx.create("mixing.csv")?)?;

    ctx.extra.insert("states".into(), json!(model.len()));
    ctx.extra.insert("service_rates".into(), json!(model.service_rates));
    ctx.summary = format!(
        "{} proper states; s = {:?}",
        model.len(),
        model.service_rates.iter().map(|s| (s * 1e6).round() / 1e6).collect::<Vec<_>>()
    );
    Ok(())
}

/// Exact service rates when the instance is small enough to enumerate.
fn exact_rates_if_small(g: &Graph, params: &ModelParams) -> Option<Vec<f64>> {
    let budget = Budget { states: 5_000, dense: 5_000 };
    ExactModel::build_with_budget(g, params, budget).ok().map(|m| m.service_rates)
}

fn run_queue(ctx: &mut Context<'_>, g: &Graph, params: &ModelParams, displayed: &[usize]) -> Result<(), RunError> {
    let config = ctx.config;
    let spec: &QueueSpec =
        config.queue.as_ref().ok_or_else(|| RunError::Config("queue experiment needs a [queue] section".into()))?;
    let qparams = spec.build(params)?;
    let factor = time_normalisation(params, &qparams);
    let horizon = match config.horizon_units {
        TimeUnits::Model => config.horizon,
        TimeUnits::Normalised => config.horizon / factor,
    };

    let mut warnings = Vec::new();
    if let Some(s) = exact_rates_if_small(g, params) {
        for (v, (&sv, &nu)) in s.iter().zip(&qparams.nu).enumerate() {
            if nu >= sv {
                let msg = format!("vertex {v}: nu = {nu} >= exact s = {sv}; queue is not expected to be stable");
                log::warn!("{msg}");
                warnings.push(msg);
            }
        }
    }

    let options = QueueRunOptions {
        horizon,
        grid_spacing: config.grid_spacing,
        tracked: displayed.to_vec(),
        record_events: false,
    };
    let q0 = vec![spec.initial_queue; g.n()];
    let runs = (0..config.replicas)
        .into_par_iter()
        .map(|r| {
            let seed = replica_seed(config.seed, r);
            let start = config.initial_state.build(g, params.colours, seed);
            simulate_queue(g, params, &qparams, &start, &q0, &options, seed).map(|run| (seed, run))
        })
        .collect::<Result<Vec<_>, Error>>()?;

    let (_, first) = &runs[0];
    first.rolling.write_csv(factor, ctx.create("timeseries.csv")?)?;
    first.rolling.write_csv(1.0, ctx.create("timeseries_raw.csv")?)?;
    first.lyapunov.write_csv(ctx.create("lyapunov.csv")?)?;
    let mut w = csv::Writer::from_writer(ctx.create("drift.csv")?);
    w.write_record(["start", "end", "slope", "mean_L"]).map_err(Error::from)?;
    if let Ok(windows) = drift_estimate(&first.lyapunov, spec.drift_window) {
        for d in windows {
            w.write_record([d.start.to_string(), d.end.to_string(), d.slope.to_string(), d.mean_l.to_string()])
                .map_err(Error::from)?;
        }
    }
    w.flush()?;

    // Replica-averaged per-vertex summary.
    let n = g.n();
    let replicas = runs.len() as f64;
    let mut merged = first.clone();
    for v in 0..n {
        merged.final_q_hat[v] = runs.iter().map(|(_, r)| r.final_q_hat[v]).sum::<f64>() / replicas;
        merged.final_s_hat[v] = runs.iter().map(|(_, r)| r.final_s_hat[v]).sum::<f64>() / replicas;
    }
    write_summary_csv(&merged, &qparams, params, ctx.create("summary.csv")?)?;

    let mut w = csv::Writer::from_writer(ctx.create("replicas.csv")?);
    w.write_record([
        "replica",
        "seed",
        "mean_rolling_Q",
        "mean_rolling_s",
        "q_quarter_change",
        "s_quarter_change",
        "normalized_diff",
        "first_empty",
    ])
    .map_err(Error::from)?;
    let mut q_changes = Vec::new();
    let mut s_changes = Vec::new();
    for (r, (seed, run)) in runs.iter().enumerate() {
        let qc = quarter_change(&run.rolling.mean_q_hat);
        let sc = quarter_change(&run.rolling.mean_s_hat);
        q_changes.push(qc);
        s_changes.push(sc);
        w.write_record([
            r.to_string(),
            seed.to_string(),
            run.rolling.mean_q_hat.last().copied().unwrap_or(f64::NAN).to_string(),
            run.rolling.mean_s_hat.last().copied().unwrap_or(f64::NAN).to_string(),
            qc.to_string(),
            sc.to_string(),
            normalized_difference(&run.final_s_hat, &params.p).to_string(),
            run.first_empty.map(|t| t.to_string()).unwrap_or_default(),
        ])
        .map_err(Error::from)?;
    }
    w.flush()?;

    let nd = normalized_difference(&merged.final_s_hat, &params.p);
    let mean_s = merged.final_s_hat.iter().sum::<f64>() / n as f64;
    let mean_q = merged.final_q_hat.iter().sum::<f64>() / n as f64;
    let q_change = crate::stats::median(&q_changes);
    let s_change = crate::stats::median(&s_changes);
    let mut w = csv::Writer::from_writer(ctx.create("statistics.csv")?);
    w.write_record(["statistic", "value"]).map_err(Error::from)?;
    for (name, value) in [
        ("normalized_difference", nd),
        ("mean_s_hat", mean_s),
        ("mean_q_hat", mean_q),
        ("median_q_quarter_change", q_change),
        ("median_s_quarter_change", s_change),
        ("time_normalisation", factor),
        ("horizon_model_time", horizon),
    ] {
        w.write_record([name.to_string(), value.to_string()]).map_err(Error::from)?;
    }
    w.flush()?;

    ctx.extra.insert("normalisation_factor".into(), json!(factor));
    ctx.extra.insert("horizon_model_time".into(), json!(horizon));
    ctx.extra.insert("normalized_difference".into(), json!(nd));
    ctx.extra.insert("mean_s_hat".into(), json!(mean_s));
    ctx.extra.insert("median_q_quarter_change".into(), json!(q_change));
    ctx.extra.insert("median_s_quarter_change".into(), json!(s_change));
    ctx.extra.insert("warnings".into(), json!(warnings));
    ctx.summary = format!(
        "{} replica(s); mean s_hat {mean_s:.4}; mean |s_hat - p|/p {nd:.4}; mean Q_hat {mean_q:.3}",
        runs.len()
    );
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// Erdős–Rényi graph, mean degree 40 at full scale.
    ErdosRenyi,
    /// 40-regular graph at full scale.
    RandomRegular,
}

/// Config of the large-graph queue experiment at `scale` of the full size
/// (`n = 500`, degree 40, `K = 10`, simulation-variant parameters,
/// `ν_v = p_v / 3`, horizon 2000 in normalised time). Smaller scales shrink
/// `n` and the degree in proportion.
pub fn figure_config(which: Figure, scale: f64, seed: u64, output_dir: PathBuf) -> Result<ExperimentConfig, RunError> {
    if !(scale > 0.0 && scale <= 1.0) {
        return Err(RunError::Config(format!("scale {scale} not in (0, 1]")));
    }
    let n = (500.0 * scale).round() as usize;
    if n < 10 {
        return Err(RunError::Config(format!("scale {scale} gives n = {n} < 10")));
    }
    let degree = ((40.0 * scale).round() as usize).max(1);
    let graph = match which {
        Figure::ErdosRenyi => GraphSpec::ErdosRenyi { n, edge_prob: degree as f64 / n as f64, seed: None },
        Figure::RandomRegular => {
            let degree = if (n * degree) % 2 == 1 { degree + 1 } else { degree };
            GraphSpec::RandomRegular { n, degree, seed: None }
        }
    };
    let config = ExperimentConfig {
        seed,
        replicas: 1,
        horizon: 2000.0,
        horizon_units: TimeUnits::Normalised,
        output_dir,
        grid_spacing: 1.0,
        initial_state: config::InitialState::AllZero,
        display_vertices: 10,
        event_log: false,
        graph,
        params: ParamSpec {
            colours: 10,
            rule: ParamRule::Heuristic { variant: VariantName::Simulation, c: None, cap: None },
            normalise: false,
        },
        queue: Some(QueueSpec { nu_ratio: Some(1.0 / 3.0), nu: None, mu: None, drift_window: 50.0, initial_queue: 0 }),
        exact: Default::default(),
        couple: Default::default(),
    };
    config.validate().map_err(RunError::Config)?;
    Ok(config)
}

pub fn reproduce_fig(which: Figure, scale: f64, overrides: &Overrides) -> Result<RunReport, RunError> {
    let mut config = figure_config(which, scale, 0, PathBuf::from("out"))?;
    overrides.apply(&mut config);
    fs::create_dir_all(&config.output_dir)?;
    fs::write(config.output_dir.join("config.toml"), config.to_toml())?;
    let mut report = run(Experiment::Queue, &config, Path::new("."), overrides.threads)?;
    report.files.push(config.output_dir.join("config.toml"));
    Ok(report)
}
