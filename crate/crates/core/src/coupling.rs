//! Grand coupling of two copies of the dynamics and path-coupling
//! diagnostics.
//!
//! Both copies consume the same update draws: the same vertex rings at the
//! same time and sees the same coin and proposed colour. Once the copies agree
//! they agree forever.

use std::io::Write;

use rayon::prelude::*;

use crate::dynamics::DrawStream;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::model::{available_colours, check_proper, updated_colour, Configuration, ModelParams, UpdateDraw};
use crate::oracle::enumerate_states;
use crate::rng::replica_seed;
use crate::stats::wilson_interval;

/// Number of vertices at which two configurations differ.
pub fn hamming(x: &Configuration, y: &Configuration) -> usize {
    x.0.iter().zip(&y.0).filter(|(a, b)| a != b).count()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoupledState {
    pub x: Configuration,
    pub y: Configuration,
    pub coalesced: bool,
    pub distance: usize,
}

impl CoupledState {
    pub fn new(x: Configuration, y: Configuration) -> Self {
        let distance = hamming(&x, &y);
        CoupledState { x, y, coalesced: distance == 0, distance }
    }

    /// Applies `draw` to both copies, updating the distance at the touched
    /// vertex only.
    pub fn step(&mut self, g: &Graph, draw: &UpdateDraw) {
        let v = draw.vertex;
        let before = self.x.0[v] != self.y.0[v];
        self.x.apply(g, draw);
        self.y.apply(g, draw);
        let after = self.x.0[v] != self.y.0[v];
        self.distance = self.distance + usize::from(after) - usize::from(before);
        self.coalesced |= self.distance == 0;
    }
}

pub fn coupled_step(g: &Graph, state: &CoupledState, draw: &UpdateDraw) -> CoupledState {
    let mut next = state.clone();
    next.step(g, draw);
    next
}

/// Outcome of one coupled run.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingRun {
    /// First time the copies agree; `None` if still apart at the horizon.
    pub coalescence_time: Option<f64>,
    pub horizon: f64,
    /// Piecewise-constant distance: `(time, distance)` at time 0 and at every
    /// change.
    pub trace: Vec<(f64, usize)>,
    pub events: u64,
}

/// Runs the grand coupling from `(x0, y0)` until coalescence or `horizon`.
/// Each copy reads the draw stream of [`crate::dynamics::simulate`] with the
/// same seed, so either copy alone is an ordinary run.
pub fn simulate_coupled(
    g: &Graph,
    params: &ModelParams,
    x0: &Configuration,
    y0: &Configuration,
    horizon: f64,
    seed: u64,
) -> Result<CouplingRun> {
    params.check_graph(g)?;
    check_proper(g, x0, params.colours)?;
    check_proper(g, y0, params.colours)?;
    let mut state = CoupledState::new(x0.clone(), y0.clone());
    let mut trace = vec![(0.0, state.distance)];
    let mut events = 0;
    if state.coalesced {
        return Ok(CouplingRun { coalescence_time: Some(0.0), horizon, trace, events });
    }
    let mut stream = DrawStream::new(params, seed)?;
    loop {
        let draw = stream.next_draw();
        if draw.time > horizon {
            return Ok(CouplingRun { coalescence_time: None, horizon, trace, events });
        }
        let before = state.distance;
        state.step(g, &draw);
        events += 1;
        if state.distance != before {
            trace.push((draw.time, state.distance));
        }
        if state.coalesced {
            return Ok(CouplingRun { coalescence_time: Some(draw.time), horizon, trace, events });
        }
    }
}

/// Coalescence time of one replica, censored at its horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoalescenceSample {
    pub replica: u64,
    pub seed: u64,
    pub time: Option<f64>,
    pub horizon: f64,
}

/// Runs `replicas` independent coupled runs, seeded by
/// [`replica_seed`]`(master_seed, r)`, in parallel. Results are ordered by
/// replica index.
pub fn coupled_replicas(
    g: &Graph,
    params: &ModelParams,
    x0: &Configuration,
    y0: &Configuration,
    horizon: f64,
    master_seed: u64,
    replicas: u64,
) -> Result<Vec<(CoalescenceSample, CouplingRun)>> {
    (0..replicas)
        .into_par_iter()
        .map(|replica| {
            let seed = replica_seed(master_seed, replica);
            let run = simulate_coupled(g, params, x0, y0, horizon, seed)?;
            let sample = CoalescenceSample { replica, seed, time: run.coalescence_time, horizon };
            Ok((sample, run))
        })
        .collect()
}

/// CSV with columns `replica,seed,coalescence_time,horizon`; censored runs
/// show `censored`.
pub fn write_coalescence_csv<W: Write>(samples: &[CoalescenceSample], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["replica", "seed", "coalescence_time", "horizon"])?;
    for s in samples {
        let time = s.time.map_or_else(|| "censored".to_string(), |t| t.to_string());
        w.write_record([s.replica.to_string(), s.seed.to_string(), time, s.horizon.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// CSV with columns `replica,time,distance`.
pub fn write_trace_csv<W: Write>(runs: &[(u64, &CouplingRun)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["replica", "time", "distance"])?;
    for (replica, run) in runs {
        for (t, d) in &run.trace {
            w.write_record([replica.to_string(), t.to_string(), d.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TvPoint {
    pub time: f64,
    /// Fraction of replicas not yet coalesced at `time`.
    pub estimate: f64,
    /// 95% Wilson band.
    pub lower: f64,
    pub upper: f64,
}

/// Coupling upper bound on the distance between the laws started from the
/// chosen pair: the fraction of replicas with coalescence time `> t`.
/// Censored replicas count as not coalesced at every grid time, which keeps
/// the estimate an upper bound without imputing a time.
pub fn tv_upper_curve(samples: &[CoalescenceSample], grid: &[f64]) -> Result<Vec<TvPoint>> {
    if samples.is_empty() {
        return Err(Error::InsufficientData("no coalescence samples".into()));
    }
    Ok(grid
        .iter()
        .map(|&t| {
            let apart = samples.iter().filter(|s| s.time.is_none_or(|c| c > t)).count();
            let (lower, upper) = wilson_interval(apart, samples.len(), 0.95);
            TvPoint { time: t, estimate: apart as f64 / samples.len() as f64, lower, upper }
        })
        .collect())
}

/// Exact single-discrepancy drift at one vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionCheck {
    pub vertex: usize,
    /// Largest `d/dt E[d(X_t, Y_t)]` at `t = 0` over the enumerated pairs.
    pub worst_drift: f64,
    /// `λ_v (ℓ_v - 1)`.
    pub bound: f64,
    pub pairs: usize,
    pub passes: bool,
}

/// Enumerates every proper pair `(x, y)` that differs only at `v` with
/// `x_v = 0`, computes the exact instantaneous rate of change of the expected
/// distance under the grand coupling by pushing every (vertex, coin, colour)
/// outcome through both copies, and compares the worst pair with
/// `λ_v (ℓ_v - 1)`.
pub fn exact_contraction_check(g: &Graph, params: &ModelParams, v: usize, budget: usize) -> Result<ContractionCheck> {
    params.check_graph(g)?;
    if v >= g.n() {
        return Err(Error::InvalidParameter(format!("vertex {v} out of range")));
    }
    let states = enumerate_states(g, params.colours, budget)?;
    Ok(contraction_at(g, params, &states, v))
}

/// [`exact_contraction_check`] at every vertex, enumerating the state space
/// once.
pub fn exact_contraction_checks(g: &Graph, params: &ModelParams, budget: usize) -> Result<Vec<ContractionCheck>> {
    params.check_graph(g)?;
    let states = enumerate_states(g, params.colours, budget)?;
    Ok((0..g.n()).map(|v| contraction_at(g, params, &states, v)).collect())
}

fn contraction_at(g: &Graph, params: &ModelParams, states: &[Configuration], v: usize) -> ContractionCheck {
    let k = params.colours as f64;
    let mut outcomes: Vec<(UpdateDraw, f64)> = Vec::with_capacity(g.n() * (params.colours as usize + 1));
    for u in 0..g.n() {
        outcomes.push((UpdateDraw::new(u, false, 1), params.lambda[u] * (1.0 - params.p[u])));
        for c in 1..=params.colours {
            outcomes.push((UpdateDraw::new(u, true, c), params.lambda[u] * params.p[u] / k));
        }
    }

    let mut worst = f64::NEG_INFINITY;
    let mut pairs = 0;
    for x in states.iter().filter(|s| s.colour(v) == 0) {
        for c in available_colours(g, x, v, params.colours) {
            let mut y = x.clone();
            y.0[v] = c;
            // Only the updated vertex changes, so the distance after an
            // outcome at `u` is the old distance with the term at `u` replaced.
            let drift: f64 = outcomes
                .iter()
                .map(|(draw, rate)| {
                    let u = draw.vertex;
                    let was = (x.0[u] != y.0[u]) as i32;
                    let now = (updated_colour(g, x, draw) != updated_colour(g, &y, draw)) as i32;
                    rate * (now - was) as f64
                })
                .sum();
            worst = worst.max(drift);
            pairs += 1;
        }
    }

    let load = g.neighbours(v).iter().map(|&u| params.p[u] * params.lambda[u]).sum::<f64>() / (k * params.lambda[v]);
    let bound = params.lambda[v] * (load - 1.0);
    let tol = 1e-12 * (1.0 + bound.abs());
    ContractionCheck { vertex: v, worst_drift: worst, bound, pairs, passes: worst <= bound + tol }
}
