//! Experiment configuration, read from a single TOML file.
//!
//! ```toml
//! seed = 42
//! replicas = 30
//! horizon = 2000.0
//! horizon_units = "normalised"   # or "model" (default)
//! output_dir = "out/er"
//! grid_spacing = 1.0
//! initial_state = "all-zero"     # or "greedy-maximal"
//! display_vertices = 10
//!
//! [graph]
//! kind = "erdos-renyi"           # random-regular, edge-list, complete, path, cycle, star, empty
//! n = 500
//! edge_prob = 0.08
//!
//! [params]
//! colours = 10
//! kind = "heuristic"             # or "uniform" / "explicit"
//! variant = "simulation"         # two-thirds, simulation, near-critical (needs `c`)
//!
//! [queue]
//! nu_ratio = 0.3333333333333333  # or `nu = [...]`
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{degree_stats, generate_erdos_renyi, generate_random_regular, Graph};
use crate::model::{heuristic_params, Colour, Configuration, HeuristicVariant, ModelParams};
use crate::queueing::QueueParams;
use crate::rng::stream_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub replicas: u64,
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    #[serde(default)]
    pub horizon_units: TimeUnits,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default = "default_grid")]
    pub grid_spacing: f64,
    #[serde(default)]
    pub initial_state: InitialState,
    #[serde(default = "default_display")]
    pub display_vertices: usize,
    /// Write per-replica event logs (simulate only).
    #[serde(default)]
    pub event_log: bool,
    pub graph: GraphSpec,
    pub params: ParamSpec,
    #[serde(default)]
    pub queue: Option<QueueSpec>,
    #[serde(default)]
    pub exact: ExactSpec,
    #[serde(default)]
    pub couple: CoupleSpec,
}

fn one() -> u64 {
    1
}
fn default_horizon() -> f64 {
    2000.0
}
fn default_output() -> PathBuf {
    PathBuf::from("out")
}
fn default_grid() -> f64 {
    1.0
}
fn default_display() -> usize {
    10
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimeUnits {
    #[default]
    Model,
    /// Model time multiplied by `(1/n) Σ_v (λ_v + ν_v + 1)`.
    Normalised,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialState {
    #[default]
    AllZero,
    GreedyMaximal,
}

impl InitialState {
    pub fn build(self, g: &Graph, colours: Colour, seed: u64) -> Configuration {
        match self {
            InitialState::AllZero => Configuration::all_zero(g.n()),
            InitialState::GreedyMaximal => {
                Configuration::greedy_maximal(g, colours, &mut crate::rng::rng_from_seed(stream_seed(seed, "initial")))
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            InitialState::AllZero => "all-zero",
            InitialState::GreedyMaximal => "greedy-maximal",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GraphSpec {
    ErdosRenyi { n: usize, edge_prob: f64, seed: Option<u64> },
    RandomRegular { n: usize, degree: usize, seed: Option<u64> },
    EdgeList { path: PathBuf },
    Complete { n: usize },
    Path { n: usize },
    Cycle { n: usize },
    Star { leaves: usize },
    Empty { n: usize },
}

impl GraphSpec {
    /// Builds the graph. Random generators without an explicit seed use a
    /// stream derived from the master seed. Relative edge-list paths are
    /// resolved against `base`.
    pub fn build(&self, master_seed: u64, base: &Path) -> Result<Graph> {
        let seed = |s: Option<u64>| s.unwrap_or_else(|| stream_seed(master_seed, "graph"));
        match self {
            GraphSpec::ErdosRenyi { n, edge_prob, seed: s } => generate_erdos_renyi(*n, *edge_prob, seed(*s)),
            GraphSpec::RandomRegular { n, degree, seed: s } => generate_random_regular(*n, *degree, seed(*s)),
            GraphSpec::EdgeList { path } => Graph::read_edge_list(base.join(path)),
            GraphSpec::Complete { n } => Ok(Graph::complete(*n)),
            GraphSpec::Path { n } => Ok(Graph::path(*n)),
            GraphSpec::Cycle { n } => Graph::cycle(*n),
            GraphSpec::Star { leaves } => Ok(Graph::star(*leaves)),
            GraphSpec::Empty { n } => Ok(Graph::empty(*n)),
        }
    }
}

// Unknown-field rejection does not combine with the flattened rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSpec {
    pub colours: Colour,
    #[serde(flatten)]
    pub rule: ParamRule,
    /// Rescale rates to sum to `n`.
    #[serde(default)]
    pub normalise: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ParamRule {
    Heuristic {
        variant: VariantName,
        /// Constant for the near-critical variant.
        c: Option<f64>,
        /// Overrides the variant's default cap.
        cap: Option<f64>,
    },
    Uniform {
        lambda: f64,
        p: f64,
    },
    Explicit {
        lambda: Vec<f64>,
        p: Vec<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariantName {
    TwoThirds,
    Simulation,
    NearCritical,
}

impl ParamSpec {
    pub fn build(&self, g: &Graph) -> Result<ModelParams> {
        let mut params = match &self.rule {
            ParamRule::Heuristic { variant, c, cap } => {
                let variant = match (variant, c) {
                    (VariantName::TwoThirds, _) => HeuristicVariant::TwoThirds,
                    (VariantName::Simulation, _) => HeuristicVariant::Simulation,
                    (VariantName::NearCritical, Some(c)) => HeuristicVariant::NearCritical { c: *c },
                    (VariantName::NearCritical, None) => {
                        return Err(Error::InvalidParameter("near-critical variant needs `c`".into()))
                    }
                };
                let cap = cap.unwrap_or(variant.default_cap());
                heuristic_params(&degree_stats(g), self.colours, variant, Some(cap))?
            }
            ParamRule::Uniform { lambda, p } => ModelParams::uniform(g.n(), self.colours, *lambda, *p)?,
            ParamRule::Explicit { lambda, p } => ModelParams::new(self.colours, lambda.clone(), p.clone())?,
        };
        params.check_graph(g)?;
        if self.normalise {
            params.normalise();
        }
        Ok(params)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueueSpec {
    /// `ν_v = nu_ratio · p_v`.
    pub nu_ratio: Option<f64>,
    pub nu: Option<Vec<f64>>,
    #[serde(default)]
    pub mu: Option<Vec<f64>>,
    /// Length of the Lyapunov drift windows, in model time.
    #[serde(default = "default_drift_window")]
    pub drift_window: f64,
    #[serde(default)]
    pub initial_queue: u64,
}

fn default_drift_window() -> f64 {
    50.0
}

impl QueueSpec {
    pub fn build(&self, params: &ModelParams) -> Result<QueueParams> {
        let nu = match (&self.nu_ratio, &self.nu) {
            (Some(r), None) => params.p.iter().map(|p| r * p).collect(),
            (None, Some(nu)) => nu.clone(),
            _ => return Err(Error::InvalidParameter("[queue] needs exactly one of nu_ratio, nu".into())),
        };
        let mu = self.mu.clone().unwrap_or_else(|| vec![1.0; params.n()]);
        if nu.len() != params.n() {
            return Err(Error::Dimension { expected: params.n(), got: nu.len() });
        }
        QueueParams::new(nu, mu)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExactSpec {
    pub max_states: usize,
    pub dense_budget: usize,
    /// TV curves are evaluated on `tv_points` equally spaced times in
    /// `[0, tv_end]`.
    pub tv_end: f64,
    pub tv_points: usize,
}

impl Default for ExactSpec {
    fn default() -> Self {
        ExactSpec { max_states: 1_000_000, dense_budget: 5_000, tv_end: 20.0, tv_points: 50 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CoupleSpec {
    pub start_x: InitialState,
    pub start_y: InitialState,
    pub tv_points: usize,
}

impl Default for CoupleSpec {
    fn default() -> Self {
        CoupleSpec { start_x: InitialState::AllZero, start_y: InitialState::GreedyMaximal, tv_points: 50 }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> std::result::Result<Self, String> {
        let config: ExperimentConfig = toml::from_str(text).map_err(|e| e.to_string())?;
        check_param_keys(text)?;
        config.validate()?;
        Ok(config)
    }

    /// Schema checks beyond what deserialisation enforces; all violations are
    /// listed.
    pub fn validate(&self) -> std::result::Result<(), String> {
        let mut problems = Vec::new();
        if !(self.horizon >= 0.0 && self.horizon.is_finite()) {
            problems.push(format!("horizon must be finite and >= 0, got {}", self.horizon));
        }
        if self.replicas == 0 {
            problems.push("replicas must be at least 1".to_string());
        }
        if !(self.grid_spacing > 0.0) {
            problems.push(format!("grid_spacing must be positive, got {}", self.grid_spacing));
        }
        if self.params.colours == 0 {
            problems.push("params.colours must be at least 1".to_string());
        }
        match &self.params.rule {
            ParamRule::Uniform { lambda, p } => {
                if !(*lambda > 0.0) {
                    problems.push(format!("params.lambda must be positive, got {lambda}"));
                }
                if !(0.0..=1.0).contains(p) {
                    problems.push(format!("params.p must be in [0,1], got {p}"));
                }
            }
            ParamRule::Explicit { lambda, p } => {
                if lambda.len() != p.len() {
                    problems.push("params.lambda and params.p differ in length".to_string());
                }
                if lambda.iter().any(|l| !(*l > 0.0)) {
                    problems.push("params.lambda entries must be positive".to_string());
                }
            }
            ParamRule::Heuristic { variant, c, .. } => {
                if *variant == VariantName::NearCritical && c.is_none() {
                    problems.push("near-critical variant needs params.c".to_string());
                }
            }
        }
        if let Some(q) = &self.queue {
            if q.nu_ratio.is_some() == q.nu.is_some() {
                problems.push("[queue] needs exactly one of nu_ratio, nu".to_string());
            }
            if q.nu_ratio.is_some_and(|r| !(r > 0.0)) {
                problems.push("queue.nu_ratio must be positive".to_string());
            }
        }
        if self.horizon_units == TimeUnits::Normalised && self.queue.is_none() {
            problems.push("horizon_units = \"normalised\" needs a [queue] section".to_string());
        }
        match &self.graph {
            GraphSpec::ErdosRenyi { edge_prob, .. } if !(0.0..=1.0).contains(edge_prob) => {
                problems.push(format!("graph.edge_prob must be in [0,1], got {edge_prob}"))
            }
            GraphSpec::ErdosRenyi { n: 0, .. } | GraphSpec::RandomRegular { n: 0, .. } => {
                problems.push("graph.n must be positive".to_string())
            }
            _ => {}
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(problems.join("; "))
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }
}

fn check_param_keys(text: &str) -> std::result::Result<(), String> {
    let table: toml::Table = toml::from_str(text).map_err(|e| e.to_string())?;
    let Some(params) = table.get("params").and_then(|p| p.as_table()) else { return Ok(()) };
    let rule_keys: &[&str] = match params.get("kind").and_then(|k| k.as_str()) {
        Some("heuristic") => &["variant", "c", "cap"],
        Some("uniform") | Some("explicit") => &["lambda", "p"],
        _ => &[],
    };
    let unknown: Vec<&str> = params
        .keys()
        .map(String::as_str)
        .filter(|k| !["colours", "kind", "normalise"].contains(k) && !rule_keys.contains(k))
        .collect();
    if unknown.is_empty() {
        Ok(())
    } else {
        Err(format!("unknown field(s) in [params]: {}", unknown.join(", ")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ER: &str = r#"
        seed = 5
        replicas = 3
        horizon = 10.0
        [graph]
        kind = "erdos-renyi"
        n = 30
        edge_prob = 0.1
        [params]
        colours = 3
        kind = "heuristic"
        variant = "simulation"
        [queue]
        nu_ratio = 0.2
    "#;

    #[test]
    fn parses_and_echoes() {
        let config = ExperimentConfig::from_toml(ER).unwrap();
        assert_eq!(config.replicas, 3);
        assert_eq!(config.display_vertices, 10);
        let echoed = ExperimentConfig::from_toml(&config.to_toml()).unwrap();
        assert_eq!(echoed, config);
    }

    #[test]
    fn lists_all_violations() {
        let bad = ER.replace("replicas = 3", "replicas = 0").replace("horizon = 10.0", "horizon = -1.0");
        let err = ExperimentConfig::from_toml(&bad).unwrap_err();
        assert!(err.contains("replicas") && err.contains("horizon"), "{err}");
        assert!(ExperimentConfig::from_toml("seed = 1").is_err());
        assert!(ExperimentConfig::from_toml(&ER.replace("seed = 5", "sede = 5")).is_err());
        let err =
            ExperimentConfig::from_toml(&ER.replace("colours = 3", "colours = 3\n        lambda = 2.0")).unwrap_err();
        assert!(err.contains("lambda"), "{err}");
    }

    #[test]
    fn builds_parts() {
        let config = ExperimentConfig::from_toml(ER).unwrap();
        let g = config.graph.build(config.seed, Path::new(".")).unwrap();
        assert_eq!(g, config.graph.build(config.seed, Path::new(".")).unwrap());
        let params = config.params.build(&g).unwrap();
        let q = config.queue.as_ref().unwrap().build(&params).unwrap();
        assert!((q.nu[0] - 0.2 * params.p[0]).abs() < 1e-15);
    }
}
