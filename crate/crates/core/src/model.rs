//! State space and single-site update rule of the multicoloured hardcore
//! model.
//!
//! A configuration assigns each vertex a colour in `0..=K`, where `0` means
//! inactive. It is proper when no edge joins two vertices sharing a nonzero
//! colour.

use std::f64::consts::E;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DegreeStats, Graph};

pub type Colour = u16;

/// Colour vector indexed by vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration(pub Vec<Colour>);

impl Configuration {
    pub fn all_zero(n: usize) -> Self {
        Configuration(vec![0; n])
    }

    /// Scans vertices in a uniformly random order and gives each a uniformly
    /// random available colour, leaving it at `0` when none is available.
    pub fn greedy_maximal(g: &Graph, colours: Colour, rng: &mut impl Rng) -> Self {
        let mut omega = Configuration::all_zero(g.n());
        let mut order: Vec<usize> = (0..g.n()).collect();
        order.shuffle(rng);
        for v in order {
            let available = available_colours(g, &omega, v, colours);
            if !available.is_empty() {
                omega.0[v] = available[rng.random_range(0..available.len())];
            }
        }
        omega
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn colour(&self, v: usize) -> Colour {
        self.0[v]
    }

    pub fn is_active(&self, v: usize) -> bool {
        self.0[v] != 0
    }

    pub fn active_count(&self) -> usize {
        self.0.iter().filter(|&&c| c != 0).count()
    }

    /// Digit string such as `"0210"`; colours above 9 are written in brackets.
    pub fn label(&self) -> String {
        self.0.iter().map(|&c| if c < 10 { char::from(b'0' + c as u8).to_string() } else { format!("[{c}]") }).collect()
    }

    /// Applies one update in place and returns the previous colour of the
    /// updated vertex.
    pub fn apply(&mut self, g: &Graph, draw: &UpdateDraw) -> Colour {
        let v = draw.vertex;
        let old = self.0[v];
        self.0[v] = updated_colour(g, self, draw);
        old
    }
}

/// The randomness consumed by one vertex update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpdateDraw {
    pub vertex: usize,
    /// Outcome of the `Bern(p_v)` coin.
    pub coin: bool,
    /// Proposed colour in `1..=K`.
    pub colour: Colour,
    pub time: f64,
}

impl UpdateDraw {
    pub fn new(vertex: usize, coin: bool, colour: Colour) -> Self {
        UpdateDraw { vertex, coin, colour, time: 0.0 }
    }
}

/// Colour count, per-vertex update rates and proposal probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub colours: Colour,
    pub lambda: Vec<f64>,
    pub p: Vec<f64>,
    /// Set when the rates have been rescaled to sum to `n`.
    pub normalised: bool,
}

impl ModelParams {
    pub fn new(colours: Colour, lambda: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        let params = ModelParams { colours, lambda, p, normalised: false };
        params.validate()?;
        Ok(params)
    }

    pub fn uniform(n: usize, colours: Colour, lambda: f64, p: f64) -> Result<Self> {
        Self::new(colours, vec![lambda; n], vec![p; n])
    }

    pub fn validate(&self) -> Result<()> {
        if self.colours == 0 {
            return Err(Error::InvalidParameter("need at least one colour".into()));
        }
        if self.lambda.len() != self.p.len() {
            return Err(Error::Dimension { expected: self.lambda.len(), got: self.p.len() });
        }
        if let Some(v) = self.lambda.iter().position(|&l| !(l > 0.0 && l.is_finite())) {
            return Err(Error::InvalidParameter(format!("rate lambda[{v}] = {} must be positive", self.lambda[v])));
        }
        if let Some(v) = self.p.iter().position(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidParameter(format!("probability p[{v}] = {} outside [0,1]", self.p[v])));
        }
        Ok(())
    }

    pub fn check_graph(&self, g: &Graph) -> Result<()> {
        if self.n() != g.n() {
            return Err(Error::Dimension { expected: g.n(), got: self.n() });
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.lambda.len()
    }

    pub fn lambda_min(&self) -> f64 {
        self.lambda.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn total_rate(&self) -> f64 {
        self.lambda.iter().sum()
    }

    /// Rescales the rates so that they sum to `n`.
    pub fn normalise(&mut self) {
        let scale = self.n() as f64 / self.total_rate();
        self.lambda.iter_mut().for_each(|l| *l *= scale);
        self.normalised = true;
    }
}

/// Proposal-probability rule `p_v = min(c K / d_v, cap)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "variant")]
pub enum HeuristicVariant {
    /// `c = 2/3`, cap 1: the regime in which the fast-mixing margin is at
    /// least 1/3.
    TwoThirds,
    /// `c = 4e/5`, cap 1/2: the choice used for the large-graph experiments.
    Simulation,
    /// User-supplied `c`, cap 1. `c` is on the scale of the conjectured
    /// threshold `p_c = e K / Δ`, so `c = (1 - η) e`.
    NearCritical { c: f64 },
}

/// Critical-threshold scale `e K / Δ`. A labelled preset only; no bound is
/// attached to it.
pub fn critical_threshold(max_degree: usize, colours: Colour) -> f64 {
    E * colours as f64 / max_degree as f64
}

impl HeuristicVariant {
    pub fn constant(&self) -> f64 {
        match *self {
            HeuristicVariant::TwoThirds => 2.0 / 3.0,
            HeuristicVariant::Simulation => 0.8 * E,
            HeuristicVariant::NearCritical { c } => c,
        }
    }

    pub fn default_cap(&self) -> f64 {
        match self {
            HeuristicVariant::Simulation => 0.5,
            _ => 1.0,
        }
    }
}

/// Degree-driven parameters: `λ_v = d_v / d̄` and `p_v = min(c K / d_v, cap)`.
///
/// With `cap = None` the raw value `c K / d_v` is used and must itself be a
/// probability; an isolated vertex is then an error. Isolated vertices get
/// unit rate, and `p_v = cap` when a cap is given.
pub fn heuristic_params(
    stats: &DegreeStats,
    colours: Colour,
    variant: HeuristicVariant,
    cap: Option<f64>,
) -> Result<ModelParams> {
    let c = variant.constant();
    if !(c > 0.0) {
        return Err(Error::InvalidParameter(format!("heuristic constant {c} must be positive")));
    }
    let k = colours as f64;
    let mut p = Vec::with_capacity(stats.degrees.len());
    for (v, &d) in stats.degrees.iter().enumerate() {
        let raw = if d == 0 { f64::INFINITY } else { c * k / d as f64 };
        let pv = match cap {
            Some(cap) => raw.min(cap),
            None if d == 0 => {
                return Err(Error::InvalidParameter(format!("vertex {v} has degree 0 and no cap was given")))
            }
            None => raw,
        };
        p.push(pv);
    }
    let lambda = stats
        .degrees
        .iter()
        .map(|&d| if d == 0 || stats.degree_sum == 0 { 1.0 } else { d as f64 / stats.mean_degree })
        .collect();
    let mut params = ModelParams::new(colours, lambda, p)?;
    params.normalised = stats.degrees.iter().all(|&d| d > 0) || stats.degree_sum == 0;
    Ok(params)
}

fn check_shape(omega: &Configuration, n: usize, colours: Colour) -> Result<()> {
    if omega.len() != n {
        return Err(Error::Dimension { expected: n, got: omega.len() });
    }
    if let Some(v) = omega.0.iter().position(|&c| c > colours) {
        return Err(Error::ColourRange { vertex: v, colour: omega.0[v], max: colours });
    }
    Ok(())
}

/// Whether no edge is monochromatic with a nonzero colour.
pub fn is_proper(g: &Graph, omega: &Configuration, colours: Colour) -> Result<bool> {
    check_shape(omega, g.n(), colours)?;
    Ok(first_conflict(g, omega).is_none())
}

/// Like [`is_proper`] but reports the offending edge.
pub fn check_proper(g: &Graph, omega: &Configuration, colours: Colour) -> Result<()> {
    check_shape(omega, g.n(), colours)?;
    match first_conflict(g, omega) {
        None => Ok(()),
        Some((u, v)) => Err(Error::NotProper { u, v, colour: omega.0[u] }),
    }
}

fn first_conflict(g: &Graph, omega: &Configuration) -> Option<(usize, usize)> {
    g.edges().find(|&(u, v)| omega.0[u] != 0 && omega.0[u] == omega.0[v])
}

/// Whether no neighbour of `v` carries colour `k`.
pub fn is_available(g: &Graph, omega: &Configuration, v: usize, k: Colour) -> bool {
    g.neighbours(v).iter().all(|&u| omega.0[u] != k)
}

/// Colours in `1..=K` not used by any neighbour of `v`, ascending.
pub fn available_colours(g: &Graph, omega: &Configuration, v: usize, colours: Colour) -> Vec<Colour> {
    let mut used = vec![false; colours as usize + 1];
    for &u in g.neighbours(v) {
        used[omega.0[u] as usize] = true;
    }
    (1..=colours).filter(|&k| !used[k as usize]).collect()
}

/// Colour the updated vertex holds after `draw`.
pub fn updated_colour(g: &Graph, omega: &Configuration, draw: &UpdateDraw) -> Colour {
    if draw.coin && is_available(g, omega, draw.vertex, draw.colour) {
        draw.colour
    } else {
        0
    }
}

/// Result of applying `draw` to a copy of `omega`.
pub fn apply_update(g: &Graph, omega: &Configuration, draw: &UpdateDraw) -> Configuration {
    let mut next = omega.clone();
    next.apply(g, draw);
    next
}
