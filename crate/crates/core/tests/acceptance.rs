//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.
//!
//! ```text
//! cargo test --release --test acceptance
//! ```

mod common;

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use mch::analysis::{heuristic_sbar, mixing_condition, service_rate_check, tmix_bound, ServiceEstimate};
use mch::coupling::exact_contraction_checks;
use mch::dynamics::{simulate, BatchOccupancy, RunLimit, StateHistogram};
use mch::graph::{generate_erdos_renyi, generate_random_regular};
use mch::model::{heuristic_params, HeuristicVariant};
use mch::oracle::{tv_distance, tv_worst_case_curve, ExactModel};
use mch::queueing::{
    heuristic_queue_bound, drift_estimate, queue_length_bound, simulate_queue, QueueParams, QueueRunOptions,
};
use mch::runner::{self, figure_config, Experiment, ExperimentConfig, Figure};
use mch::stats::{mean_and_se, quarter_change};
use mch::{degree_stats, Configuration, Graph, ModelParams};
use rand::Rng;

use common::{nonisomorphic_graphs, random_params_with_margin};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn product_form() -> Outcome {
    let mut rng = mch::rng::rng_from_seed(101);
    let mut worst = 0.0f64;
    for i in 0..20 {
        let n = rng.random_range(2..=6);
        let g = generate_erdos_renyi(n, rng.random_range(0.2..0.8), 1000 + i).unwrap();
        let lambda: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
        let p: Vec<f64> = (0..n).map(|_| rng.random_range(0.001..0.8)).collect();
        let params = ModelParams::new(1, lambda, p.clone()).unwrap();
        let model = ExactModel::build(&g, &params).unwrap();
        let weights: Vec<f64> = model
            .states
            .iter()
            .map(|s| (0..n).filter(|&v| s.is_active(v)).map(|v| p[v] / (1.0 - p[v])).product())
            .collect();
        let z: f64 = weights.iter().sum();
        for (w, pi) in weights.iter().zip(&model.pi) {
            worst = worst.max((w / z - pi).abs());
        }
    }
    check(worst <= 1e-9, format!("20 graphs, max |pi - product form| = {worst:.2e} (tol 1e-9)"))
}

fn simulation_bridge() -> Outcome {
    let g = Graph::complete(3);
    let params = ModelParams::uniform(3, 2, 1.0, 0.4).unwrap();
    let model = ExactModel::build(&g, &params).unwrap();
    let events = 10_000_000;
    let batch_len = events as f64 / params.total_rate() / 100.0;
    let mut hist = StateHistogram::default();
    let mut batches = BatchOccupancy::new(batch_len);
    let traj =
        simulate(&g, &params, &Configuration::all_zero(3), RunLimit::events(events), 2024, (&mut hist, &mut batches))
            .unwrap();
    let empirical = hist.distribution();
    let dist: Vec<f64> = model.states.iter().map(|s| empirical.get(s).copied().unwrap_or(0.0)).collect();
    let tv = tv_distance(&dist, &model.pi);
    let occupancy = traj.occupancy();
    let mut worst_z = 0.0f64;
    for v in 0..3 {
        let per_batch: Vec<f64> = batches.batches.iter().map(|b| b[v]).collect();
        let (_, se) = mean_and_se(&per_batch);
        worst_z = worst_z.max((occupancy[v] - model.service_rates[v]).abs() / se);
    }
    check(
        tv <= 0.005 && worst_z <= 3.0,
        format!(
            "TV = {tv:.5} (tol 0.005), max |occupancy - s|/SE = {worst_z:.2} (tol 3) over {} batches",
            batches.batches.len()
        ),
    )
}

fn contraction() -> Outcome {
    let mut rng = mch::rng::rng_from_seed(303);
    let (mut instances, mut checks, mut pairs) = (0, 0, 0usize);
    let mut failures = Vec::new();
    let mut tightest = f64::INFINITY;
    for n in 1..=6 {
        for g in nonisomorphic_graphs(n) {
            for k in 1..=3u16 {
                for _ in 0..10 {
                    let params = random_params_with_margin(&g, k, 0.01, 0.99, &mut rng);
                    assert!(mixing_condition(&g, &params).unwrap().beta > 0.0);
                    instances += 1;
                    for c in exact_contraction_checks(&g, &params, 1_000_000).unwrap() {
                        checks += 1;
                        pairs += c.pairs;
                        if c.pairs > 0 {
                            tightest = tightest.min(c.bound - c.worst_drift);
                        }
                        if !c.passes {
                            failures.push(format!("n={n} K={k} v={} drift {} > {}", c.vertex, c.worst_drift, c.bound));
                        }
                    }
                }
            }
        }
    }
    check(
        failures.is_empty(),
        format!(
            "{instances} instances, {checks} vertex checks, {pairs} pairs, min slack {tightest:.2e}, {} violations{}",
            failures.len(),
            failures.first().map(|f| format!(" (first: {f})")).unwrap_or_default()
        ),
    )
}

fn bound_dominance() -> Outcome {
    let mut rng = mch::rng::rng_from_seed(404);
    let mut instances: Vec<(Graph, ModelParams)> = Vec::new();
    for n in 1..=4 {
        for g in nonisomorphic_graphs(n) {
            for k in 1..=3u16 {
                for _ in 0..2 {
                    instances.push((g.clone(), random_params_with_margin(&g, k, 0.05, 0.95, &mut rng)));
                }
            }
        }
    }
    let p3 = Graph::path(3);
    instances
        .push((p3.clone(), heuristic_params(&degree_stats(&p3), 1, HeuristicVariant::TwoThirds, Some(1.0)).unwrap()));
    let c5 = Graph::cycle(5).unwrap();
    instances
        .push((c5.clone(), heuristic_params(&degree_stats(&c5), 2, HeuristicVariant::TwoThirds, Some(1.0)).unwrap()));

    let (mut points, mut violations, mut min_gap) = (0, 0, f64::INFINITY);
    for (g, params) in &instances {
        let report = mixing_condition(g, params).unwrap();
        if !report.satisfied {
            return Err(format!("instance with beta = {} slipped in", report.beta));
        }
        let model = ExactModel::build(g, params).unwrap();
        // 50 times spanning the range where the bound drops from 1 to 1e-3.
        let end = tmix_bound(&report, 1e-3).unwrap();
        let grid: Vec<f64> = (0..50).map(|i| end * i as f64 / 49.0).collect();
        let tv = tv_worst_case_curve(&model, &grid).unwrap();
        for (&t, &d) in grid.iter().zip(&tv) {
            let bound = report.bound_curve(t);
            points += 1;
            min_gap = min_gap.min(bound - d);
            if d > bound + 1e-12 {
                violations += 1;
            }
        }
    }
    check(
        violations == 0,
        format!(
            "{} instances, {points} grid points, {violations} violations, min slack {min_gap:.3e}",
            instances.len()
        ),
    )
}

fn sandwich() -> Outcome {
    let mut rng = mch::rng::rng_from_seed(505);
    let (mut instances, mut vertices, mut violations) = (0, 0, 0);
    let mut min_ratio = f64::INFINITY;
    for n in 1..=5 {
        for g in nonisomorphic_graphs(n) {
            let stats = degree_stats(&g);
            for k in 1..=3u16 {
                for scale in [1.0, rng.random_range(0.1..1.0)] {
                    // Hypothesis met at every vertex; scale 1 is the boundary.
                    // Isolated vertices are capped below 1 to keep the chain
                    // irreducible.
                    let p: Vec<f64> = (0..n)
                        .map(|v| (scale * k as f64 / (3.0 * stats.neighbourhood_max[v].max(1) as f64)).min(0.95))
                        .collect();
                    let lambda: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
                    let params = ModelParams::new(k, lambda, p.clone()).unwrap();
                    let model = ExactModel::build(&g, &params).unwrap();
                    let s: Vec<_> = model.service_rates.iter().map(|&x| ServiceEstimate::exact(x)).collect();
                    instances += 1;
                    for c in service_rate_check(&g, &params, &s).unwrap() {
                        if !c.hypothesis_met {
                            return Err(format!("hypothesis unexpectedly unmet at n={n} K={k}"));
                        }
                        vertices += 1;
                        min_ratio = min_ratio.min(model.service_rates[c.vertex] / p[c.vertex]);
                        if c.sandwich != Some(true) {
                            violations += 1;
                        }
                    }
                }
            }
        }
    }
    check(
        violations == 0,
        format!("{instances} instances, {vertices} vertices, {violations} violations, min s/p = {min_ratio:.4}"),
    )
}

fn run_in_temp(experiment: Experiment, config: &mut ExperimentConfig, dir: &Path) -> serde_json::Value {
    config.output_dir = dir.to_path_buf();
    runner::run(experiment, config, Path::new("."), None).unwrap().metadata
}

fn per_vertex_series(path: &Path, column: &str) -> BTreeMap<usize, Vec<f64>> {
    let mut reader = csv::Reader::from_path(path).unwrap();
    let headers = reader.headers().unwrap().clone();
    let col = headers.iter().position(|h| h == column).unwrap();
    let mut out: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for record in reader.records() {
        let record = record.unwrap();
        out.entry(record[1].parse().unwrap()).or_default().push(record[col].parse().unwrap());
    }
    out
}

/// Worst quarter change over the displayed vertices' rolling service rates.
fn worst_displayed_change(dir: &Path) -> f64 {
    per_vertex_series(&dir.join("timeseries.csv"), "rolling_s").values().map(|s| quarter_change(s)).fold(0.0, f64::max)
}

fn full_scale() -> Outcome {
    // The default horizon (2000 normalised units) checks the normalized
    // difference and the vertex-averaged curve. Single-vertex rolling averages
    // there still carry about 10% sampling noise, so the per-curve check uses
    // a run ten times longer.
    let tmp = tempfile::tempdir().unwrap();
    let mut lines = Vec::new();
    let mut ok = true;
    for (name, which) in [("er", Figure::ErdosRenyi), ("rr", Figure::RandomRegular)] {
        let dir = tmp.path().join(name);
        let mut config = figure_config(which, 1.0, 2024, dir.clone()).unwrap();
        let meta = run_in_temp(Experiment::Queue, &mut config, &dir);
        let nd = meta["results"]["normalized_difference"].as_f64().unwrap();
        let mean_change = meta["results"]["median_s_quarter_change"].as_f64().unwrap();

        let long_dir = tmp.path().join(format!("{name}-long"));
        let mut long = figure_config(which, 1.0, 2024, long_dir.clone()).unwrap();
        long.horizon = 20_000.0;
        let long_meta = run_in_temp(Experiment::Queue, &mut long, &long_dir);
        let long_nd = long_meta["results"]["normalized_difference"].as_f64().unwrap();
        let vertex_change = worst_displayed_change(&long_dir);

        let band = 0.45..=0.75;
        ok &= band.contains(&nd) && band.contains(&long_nd) && mean_change < 0.10 && vertex_change < 0.10;
        lines.push(format!(
            "{name}: normalized diff {nd:.3} / {long_nd:.3} at horizon 2000 / 20000 (band 0.45..0.75), \
             s quarter change of vertex mean {mean_change:.4}, worst of {} displayed vertices {vertex_change:.4} (tol 0.10)",
            config.display_vertices
        ));
    }
    check(ok, lines.join("; "))
}

fn queue_stability() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let mut lines = Vec::new();
    let mut ok = true;
    for (name, which) in [("er", Figure::ErdosRenyi), ("rr", Figure::RandomRegular)] {
        let dir = tmp.path().join(name);
        let mut config = figure_config(which, 1.0, 77, dir.clone()).unwrap();
        config.replicas = 30;
        config.queue.as_mut().unwrap().nu_ratio = Some(0.2);
        let meta = run_in_temp(Experiment::Queue, &mut config, &dir);
        let change = meta["results"]["median_q_quarter_change"].as_f64().unwrap();
        ok &= change < 0.20;
        lines.push(format!("{name}: 30-replica median Q quarter change {change:.4} (tol 0.20)"));
    }

    // Overloaded vertex on a small instance.
    let g = Graph::path(4);
    let params = ModelParams::uniform(4, 2, 1.0, 0.5).unwrap();
    let s = ExactModel::build(&g, &params).unwrap().service_rates;
    let mut nu: Vec<f64> = s.iter().map(|x| 0.5 * x).collect();
    nu[1] = 1.5 * s[1];
    let qparams = QueueParams::new(nu, vec![1.0; 4]).unwrap();
    let options = QueueRunOptions::new(5_000.0);
    let run = simulate_queue(&g, &params, &qparams, &Configuration::all_zero(4), &[0; 4], &options, 5).unwrap();
    let overall = drift_estimate(&run.lyapunov, 5_000.0).unwrap()[0].slope;
    let windows = drift_estimate(&run.lyapunov, 500.0).unwrap();
    let positive = windows.iter().filter(|w| w.slope > 0.0).count();
    ok &= overall > 0.0 && 2 * positive > windows.len();
    lines.push(format!("nu_1 = 1.5 s_1 on P4: slope {overall:.3}, {positive}/{} windows positive", windows.len()));
    check(ok, lines.join("; "))
}

fn calculators() -> Outcome {
    let mut worst = 0.0f64;
    for (n, d, k, p) in [(20, 4, 5u16, 0.3), (50, 6, 10, 0.9), (12, 3, 2, 0.25), (500, 40, 10, 0.5)] {
        let g = generate_random_regular(n, d, 9).unwrap();
        let beta = mixing_condition(&g, &ModelParams::uniform(n, k, 1.0, p).unwrap()).unwrap().beta;
        worst = worst.max(rel_err(beta, 1.0 - p * d as f64 / k as f64));
    }
    let expected = [
        (queue_length_bound(1, 1.0, 1.0, 0.75, 0.25).unwrap().bound, 24.0 * (2.0 / std::f64::consts::E).ln()),
        (
            queue_length_bound(500, 1.0 / 3.0, 1.0, 0.3, 0.1).unwrap().bound,
            6.0 * 500.0 * (1000.0 / std::f64::consts::E).ln() / ((1.0 / 3.0) * 0.04),
        ),
        (
            heuristic_queue_bound(100, 8.0, 8, 0.3, 0.1).unwrap(),
            queue_length_bound(100, 1.0 / 3.0, 1.0, 0.3, 0.1).unwrap().bound,
        ),
        (
            tmix_bound(
                &mixing_condition(&Graph::empty(500), &ModelParams::uniform(500, 1, 1.0, 0.5).unwrap()).unwrap(),
                0.25,
            )
            .unwrap(),
            (4000.0f64).ln(),
        ),
        (heuristic_sbar(0.5, 40.0, 10.0, false), 1.0 / 6.0),
        (heuristic_sbar(0.5, 40.0, 10.0, true), 0.5 / (1.0 + 2.0 / std::f64::consts::E)),
    ];
    // tmix with beta = 1/3 on a regular instance: 3 log 4000.
    let g = generate_random_regular(500, 4, 3).unwrap();
    let report = mixing_condition(&g, &ModelParams::uniform(500, 6, 1.0, 1.0).unwrap()).unwrap();
    let tmix = tmix_bound(&report, 0.25).unwrap();
    for (got, want) in expected.iter().copied().chain([(tmix, 3.0 * (4000.0f64).ln())]) {
        worst = worst.max(rel_err(got, want));
    }
    check(worst <= 1e-12, format!("max relative error {worst:.2e} (tol 1e-12)"))
}

const DETERMINISM_CONFIG: &str = r#"
seed = 31337
replicas = 6
horizon = 60.0
initial_state = "greedy-maximal"
event_log = true

[graph]
kind = "erdos-renyi"
n = 8
edge_prob = 0.3

[params]
colours = 2
kind = "heuristic"
variant = "two-thirds"
cap = 0.9

[queue]
nu_ratio = 0.2

[exact]
tv_points = 20
"#;

fn csv_bodies(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv" || x == "txt"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect()
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let mut files = 0;
    for experiment in [
        Experiment::GenerateGraph,
        Experiment::Bounds,
        Experiment::Simulate,
        Experiment::Couple,
        Experiment::Exact,
        Experiment::Queue,
    ] {
        let mut outputs = Vec::new();
        for (run, threads) in [(0, 1), (1, 3)] {
            let mut config = ExperimentConfig::from_toml(DETERMINISM_CONFIG).unwrap();
            config.output_dir = tmp.path().join(format!("{}-{run}", experiment.name()));
            runner::run(experiment, &config, Path::new("."), Some(threads)).unwrap();
            outputs.push(csv_bodies(&config.output_dir));
        }
        if outputs[0].is_empty() || outputs[0] != outputs[1] {
            return Err(format!("{} outputs differ between runs", experiment.name()));
        }
        files += outputs[0].len();
    }
    Ok(format!("6 experiments, {files} CSV/edge-list files byte-identical across runs with 1 and 3 threads"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("oracle product form (K=1)", product_form),
        ("simulation-oracle bridge", simulation_bridge),
        ("contraction verification", contraction),
        ("bound dominance", bound_dominance),
        ("service-rate sandwich", sandwich),
        ("full-scale reproduction", full_scale),
        ("queue stability", queue_stability),
        ("calculator spot values", calculators),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let started = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail} [{secs:.1}s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail} [{secs:.1}s]");
            }
        }
    }
    println!("{} of {} acceptance criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
