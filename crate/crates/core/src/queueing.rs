//! Queueing network driven by the colouring dynamics.
//!
//! Vertex `v` receives Poisson(`ν_v`) arrivals. Services are modelled as an
//! always-on Poisson(`μ_v`) stream of attempts; an attempt removes a customer
//! only if `v` is active and its queue is non-empty. Colour updates, arrivals
//! and attempts share one aggregated clock of rate `Σ_v (λ_v + ν_v + μ_v)`.

use std::f64::consts::E;
use std::io::Write;

use rand::Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::{Distribution, Exp};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::model::{check_proper, Colour, Configuration, ModelParams, UpdateDraw};
use crate::rng::rng_from_seed;
use crate::stats::ls_slope;

#[derive(Debug, Clone, PartialEq)]
pub struct QueueParams {
    pub nu: Vec<f64>,
    pub mu: Vec<f64>,
}

impl QueueParams {
    pub fn new(nu: Vec<f64>, mu: Vec<f64>) -> Result<Self> {
        if nu.len() != mu.len() {
            return Err(Error::Dimension { expected: nu.len(), got: mu.len() });
        }
        if let Some(v) = nu.iter().position(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(Error::InvalidParameter(format!("arrival rate nu[{v}] = {} must be positive", nu[v])));
        }
        if let Some(v) = mu.iter().position(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(Error::InvalidParameter(format!("service rate mu[{v}] = {} must be positive", mu[v])));
        }
        Ok(QueueParams { nu, mu })
    }

    /// `ν_v = ratio · p_v` and `μ_v = 1`.
    pub fn from_ratio(ratio: f64, p: &[f64]) -> Result<Self> {
        Self::new(p.iter().map(|&pv| ratio * pv).collect(), vec![1.0; p.len()])
    }

    pub fn n(&self) -> usize {
        self.nu.len()
    }
}

/// Reporting time scale `(1/n) Σ_v (λ_v + ν_v + 1)`; normalised time is raw
/// model time multiplied by this factor.
pub fn time_normalisation(params: &ModelParams, qparams: &QueueParams) -> f64 {
    let n = params.n() as f64;
    params.lambda.iter().zip(&qparams.nu).map(|(l, nu)| l + nu + 1.0).sum::<f64>() / n
}

/// Queue lengths and event counters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueueState {
    pub q: Vec<u64>,
    pub initial: Vec<u64>,
    pub arrivals: Vec<u64>,
    pub attempted: Vec<u64>,
    pub accepted: Vec<u64>,
}

impl QueueState {
    pub fn new(q0: Vec<u64>) -> Self {
        let n = q0.len();
        QueueState { initial: q0.clone(), q: q0, arrivals: vec![0; n], attempted: vec![0; n], accepted: vec![0; n] }
    }

    /// `Q = Q0 + arrivals - accepted` and `accepted <= attempted` everywhere.
    pub fn is_conserved(&self) -> bool {
        (0..self.q.len()).all(|v| {
            self.q[v] + self.accepted[v] == self.initial[v] + self.arrivals[v] && self.accepted[v] <= self.attempted[v]
        })
    }

    /// `½ Σ_v Q_v²`.
    pub fn lyapunov(&self) -> f64 {
        0.5 * self.q.iter().map(|&x| (x as f64).powi(2)).sum::<f64>()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LyapunovTrace {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl LyapunovTrace {
    /// CSV with columns `time,L`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["time", "L"])?;
        for (t, l) in self.times.iter().zip(&self.values) {
            w.write_record([t.to_string(), l.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Rolling averages `Q̂_v(t) = (1/t) ∫_0^t Q_v` and `ŝ_v(t) = (1/t) ∫_0^t
/// 1{ω_v ≠ 0}` on a time grid.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RollingSeries {
    pub times: Vec<f64>,
    /// Vertices with per-vertex series.
    pub vertices: Vec<usize>,
    /// `q_hat[i][j]`: value at `times[i]` for `vertices[j]`.
    pub q_hat: Vec<Vec<f64>>,
    pub s_hat: Vec<Vec<f64>>,
    /// Averages over all vertices.
    pub mean_q_hat: Vec<f64>,
    pub mean_s_hat: Vec<f64>,
}

impl RollingSeries {
    /// Long-format CSV `time,vertex,rolling_Q,rolling_s`; times are multiplied
    /// by `time_scale`.
    pub fn write_csv<W: Write>(&self, time_scale: f64, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["time", "vertex", "rolling_Q", "rolling_s"])?;
        for (i, t) in self.times.iter().enumerate() {
            for (j, v) in self.vertices.iter().enumerate() {
                w.write_record([
                    (t * time_scale).to_string(),
                    v.to_string(),
                    self.q_hat[i][j].to_string(),
                    self.s_hat[i][j].to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// One event of a joint queue/colouring trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QueueEventKind {
    Update { old: Colour, new: Colour },
    Arrival,
    Service { accepted: bool },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueueEvent {
    pub time: f64,
    pub vertex: usize,
    pub kind: QueueEventKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueueRunOptions {
    pub horizon: f64,
    /// Spacing of the rolling-average and Lyapunov sample grid.
    pub grid_spacing: f64,
    /// Vertices whose rolling series are kept.
    pub tracked: Vec<usize>,
    pub record_events: bool,
}

impl QueueRunOptions {
    pub fn new(horizon: f64) -> Self {
        QueueRunOptions { horizon, grid_spacing: 1.0, tracked: Vec::new(), record_events: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueueRun {
    pub state: QueueState,
    pub final_config: Configuration,
    pub rolling: RollingSeries,
    pub lyapunov: LyapunovTrace,
    /// `Q̂_v` and `ŝ_v` at the horizon for every vertex.
    pub final_q_hat: Vec<f64>,
    pub final_s_hat: Vec<f64>,
    /// First time all queues are empty after a departure.
    pub first_empty: Option<f64>,
    pub events: Vec<QueueEvent>,
    pub event_count: u64,
}

/// Lazily integrated piecewise-constant per-vertex values.
#[derive(Debug, Clone)]
struct Integrator {
    value: Vec<f64>,
    since: Vec<f64>,
    integral: Vec<f64>,
}

impl Integrator {
    fn new(initial: Vec<f64>) -> Self {
        let n = initial.len();
        Integrator { value: initial, since: vec![0.0; n], integral: vec![0.0; n] }
    }

    fn set(&mut self, v: usize, value: f64, t: f64) {
        self.integral[v] += self.value[v] * (t - self.since[v]);
        self.since[v] = t;
        self.value[v] = value;
    }

    fn integral_at(&self, v: usize, t: f64) -> f64 {
        self.integral[v] + self.value[v] * (t - self.since[v])
    }
}

struct Recorder {
    grid_spacing: f64,
    next: f64,
    horizon: f64,
    q: Integrator,
    s: Integrator,
    rolling: RollingSeries,
    lyapunov: LyapunovTrace,
}

impl Recorder {
    fn new(q0: &[u64], omega0: &Configuration, tracked: &[usize], grid_spacing: f64, horizon: f64) -> Self {
        Recorder {
            grid_spacing,
            next: grid_spacing,
            horizon,
            q: Integrator::new(q0.iter().map(|&x| x as f64).collect()),
            s: Integrator::new(omega0.0.iter().map(|&c| f64::from(u8::from(c != 0))).collect()),
            rolling: RollingSeries { vertices: tracked.to_vec(), ..Default::default() },
            lyapunov: LyapunovTrace { times: vec![0.0], values: vec![lyapunov_of(q0)] },
        }
    }

    /// Records every grid time strictly before `t` (and at most the horizon).
    fn advance(&mut self, t: f64, lyapunov: f64) {
        while self.next < t && self.next <= self.horizon {
            let at = self.next;
            let n = self.q.value.len() as f64;
            let rq: Vec<f64> = (0..self.q.value.len()).map(|v| self.q.integral_at(v, at) / at).collect();
            let rs: Vec<f64> = (0..self.s.value.len()).map(|v| self.s.integral_at(v, at) / at).collect();
            self.rolling.times.push(at);
            self.rolling.q_hat.push(self.rolling.vertices.iter().map(|&v| rq[v]).collect());
            self.rolling.s_hat.push(self.rolling.vertices.iter().map(|&v| rs[v]).collect());
            self.rolling.mean_q_hat.push(rq.iter().sum::<f64>() / n);
            self.rolling.mean_s_hat.push(rs.iter().sum::<f64>() / n);
            self.lyapunov.times.push(at);
            self.lyapunov.values.push(lyapunov);
            self.next += self.grid_spacing;
        }
    }
}

fn lyapunov_of(q: &[u64]) -> f64 {
    0.5 * q.iter().map(|&x| (x as f64).powi(2)).sum::<f64>()
}

/// Jointly simulates the colouring dynamics and the queues up to
/// `options.horizon`.
pub fn simulate_queue(
    g: &Graph,
    params: &ModelParams,
    qparams: &QueueParams,
    omega0: &Configuration,
    q0: &[u64],
    options: &QueueRunOptions,
    seed: u64,
) -> Result<QueueRun> {
    params.check_graph(g)?;
    check_proper(g, omega0, params.colours)?;
    let n = g.n();
    if qparams.n() != n || q0.len() != n {
        return Err(Error::Dimension { expected: n, got: if qparams.n() != n { qparams.n() } else { q0.len() } });
    }
    if !(options.horizon > 0.0 && options.horizon.is_finite()) {
        return Err(Error::InvalidParameter(format!("horizon {} must be positive and finite", options.horizon)));
    }
    if !(options.grid_spacing > 0.0) {
        return Err(Error::InvalidParameter("grid spacing must be positive".into()));
    }
    if let Some(&v) = options.tracked.iter().find(|&&v| v >= n) {
        return Err(Error::InvalidParameter(format!("tracked vertex {v} out of range")));
    }

    // Categories: [0, n) colour updates, [n, 2n) arrivals, [2n, 3n) attempts.
    let weights: Vec<f64> = params.lambda.iter().chain(&qparams.nu).chain(&qparams.mu).copied().collect();
    let total: f64 = weights.iter().sum();
    let categories =
        WeightedAliasIndex::new(weights).map_err(|e| Error::InvalidParameter(format!("event rates: {e}")))?;
    let holding = Exp::new(total).map_err(|e| Error::InvalidParameter(format!("total rate: {e}")))?;
    let mut rng = rng_from_seed(seed);

    let mut omega = omega0.clone();
    let mut state = QueueState::new(q0.to_vec());
    let mut lyapunov = state.lyapunov();
    let mut recorder = Recorder::new(q0, omega0, &options.tracked, options.grid_spacing, options.horizon);
    let mut events = Vec::new();
    let mut event_count = 0u64;
    let mut first_empty = None;
    let mut t = 0.0;

    loop {
        t += holding.sample(&mut rng);
        recorder.advance(t, lyapunov);
        if t > options.horizon {
            break;
        }
        let category = categories.sample(&mut rng);
        let v = category % n;
        let kind = match category / n {
            0 => {
                let coin = rng.random::<f64>() < params.p[v];
                let colour = rng.random_range(1..=params.colours);
                let old = omega.apply(g, &UpdateDraw { vertex: v, coin, colour, time: t });
                let new = omega.colour(v);
                if (old != 0) != (new != 0) {
                    recorder.s.set(v, f64::from(u8::from(new != 0)), t);
                }
                QueueEventKind::Update { old, new }
            }
            1 => {
                lyapunov += state.q[v] as f64 + 0.5;
                state.q[v] += 1;
                state.arrivals[v] += 1;
                recorder.q.set(v, state.q[v] as f64, t);
                QueueEventKind::Arrival
            }
            _ => {
                state.attempted[v] += 1;
                let accepted = omega.is_active(v) && state.q[v] > 0;
                if accepted {
                    lyapunov -= state.q[v] as f64 - 0.5;
                    state.q[v] -= 1;
                    state.accepted[v] += 1;
                    recorder.q.set(v, state.q[v] as f64, t);
                    if first_empty.is_none() && state.q[v] == 0 && state.q.iter().all(|&x| x == 0) {
                        first_empty = Some(t);
                    }
                }
                QueueEventKind::Service { accepted }
            }
        };
        event_count += 1;
        if options.record_events {
            events.push(QueueEvent { time: t, vertex: v, kind });
        }
    }

    let horizon = options.horizon;
    let final_q_hat = (0..n).map(|v| recorder.q.integral_at(v, horizon) / horizon).collect();
    let final_s_hat = (0..n).map(|v| recorder.s.integral_at(v, horizon) / horizon).collect();
    Ok(QueueRun {
        state,
        final_config: omega,
        rolling: recorder.rolling,
        lyapunov: recorder.lyapunov,
        final_q_hat,
        final_s_hat,
        first_empty,
        events,
        event_count,
    })
}

/// Values indexed `[grid point][vertex]`.
pub type GridSeries = Vec<Vec<f64>>;

/// Per-vertex rolling `Q̂` and `ŝ` on `grid`, recomputed from a recorded event
/// stream. Returns `(q_hat, s_hat)`.
pub fn rolling_averages(
    events: &[QueueEvent],
    omega0: &Configuration,
    q0: &[u64],
    grid: &[f64],
) -> Result<(GridSeries, GridSeries)> {
    if grid.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::InvalidParameter("rolling average needs windows of positive length".into()));
    }
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter("grid must be ascending".into()));
    }
    let n = q0.len();
    let mut q = Integrator::new(q0.iter().map(|&x| x as f64).collect());
    let mut s = Integrator::new(omega0.0.iter().map(|&c| f64::from(u8::from(c != 0))).collect());
    let mut queue: Vec<u64> = q0.to_vec();
    let (mut q_hat, mut s_hat) = (Vec::new(), Vec::new());
    let mut events = events.iter().peekable();
    for &at in grid {
        while let Some(e) = events.next_if(|e| e.time <= at) {
            match e.kind {
                QueueEventKind::Update { new, .. } => s.set(e.vertex, f64::from(u8::from(new != 0)), e.time),
                QueueEventKind::Arrival => {
                    queue[e.vertex] += 1;
                    q.set(e.vertex, queue[e.vertex] as f64, e.time);
                }
                QueueEventKind::Service { accepted: true } => {
                    queue[e.vertex] -= 1;
                    q.set(e.vertex, queue[e.vertex] as f64, e.time);
                }
                QueueEventKind::Service { accepted: false } => {}
            }
        }
        q_hat.push((0..n).map(|v| q.integral_at(v, at) / at).collect());
        s_hat.push((0..n).map(|v| s.integral_at(v, at) / at).collect());
    }
    Ok((q_hat, s_hat))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftWindow {
    pub start: f64,
    pub end: f64,
    /// Least-squares slope of `L` against time in the window.
    pub slope: f64,
    /// Mean of `L` over the window's samples.
    pub mean_l: f64,
}

/// Splits the trace into consecutive windows of length `window` and fits a
/// slope in each. Every window needs at least two samples.
pub fn drift_estimate(trace: &LyapunovTrace, window: f64) -> Result<Vec<DriftWindow>> {
    if !(window > 0.0) {
        return Err(Error::InvalidParameter("window must be positive".into()));
    }
    let (Some(&first), Some(&last)) = (trace.times.first(), trace.times.last()) else {
        return Err(Error::InsufficientData("empty Lyapunov trace".into()));
    };
    let count = (((last - first) / window).floor() as usize).max(1);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let start = first + i as f64 * window;
        let end = if i + 1 == count { f64::INFINITY } else { start + window };
        let (ts, ls): (Vec<f64>, Vec<f64>) = trace
            .times
            .iter()
            .zip(&trace.values)
            .filter(|(&t, _)| t >= start && t < end)
            .map(|(&t, &l)| (t, l))
            .unzip();
        let slope = ls_slope(&ts, &ls)
            .ok_or_else(|| Error::InsufficientData(format!("window starting at {start} has {} samples", ts.len())))?;
        let mean_l = ls.iter().sum::<f64>() / ls.len() as f64;
        out.push(DriftWindow { start, end: end.min(last), slope, mean_l });
    }
    Ok(out)
}

/// Equilibrium queue-length bound with its time constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueueBound {
    /// `6 n log(2n/e) / (β λ_min (s_v - ν_v)²)`.
    pub bound: f64,
    /// `(β λ_min)^{-1} log(2n)`.
    pub t0: f64,
    /// `t0 + (β λ_min)^{-1}`.
    pub t1: f64,
    /// `6 n t1 / (s_v - ν_v)²`, the same estimate written through `t1`.
    pub bound_via_t1: f64,
}

pub fn queue_length_bound(n: usize, beta: f64, lambda_min: f64, s: f64, nu: f64) -> Result<QueueBound> {
    if !(beta > 0.0) {
        return Err(Error::ConditionUnsatisfied { beta });
    }
    if !(lambda_min > 0.0) {
        return Err(Error::InvalidParameter(format!("lambda_min {lambda_min} must be positive")));
    }
    if nu >= s {
        return Err(Error::Infeasible { vertex: 0, nu, s });
    }
    let n = n as f64;
    let rate = beta * lambda_min;
    let gap2 = (s - nu).powi(2);
    let t0 = (2.0 * n).ln() / rate;
    let t1 = t0 + 1.0 / rate;
    Ok(QueueBound { bound: 6.0 * n * (2.0 * n / E).ln() / (rate * gap2), t0, t1, bound_via_t1: 6.0 * n * t1 / gap2 })
}

/// Per-vertex bounds; the error names the first vertex with `ν_v >= s_v`.
pub fn queue_length_bounds(beta: f64, lambda_min: f64, s: &[f64], nu: &[f64]) -> Result<Vec<QueueBound>> {
    s.iter()
        .zip(nu)
        .enumerate()
        .map(|(v, (&sv, &nv))| {
            queue_length_bound(s.len(), beta, lambda_min, sv, nv).map_err(|e| match e {
                Error::Infeasible { nu, s, .. } => Error::Infeasible { vertex: v, nu, s },
                other => other,
            })
        })
        .collect()
}

/// Bound under degree-proportional rates with margin 1/3:
/// `18 d̄ n log(2n/e) / (δ (s_v - ν_v)²)`.
pub fn heuristic_queue_bound(n: usize, mean_degree: f64, min_degree: usize, s: f64, nu: f64) -> Result<f64> {
    if nu >= s {
        return Err(Error::Infeasible { vertex: 0, nu, s });
    }
    let n = n as f64;
    Ok(18.0 * mean_degree * n * (2.0 * n / E).ln() / (min_degree as f64 * (s - nu).powi(2)))
}

/// Summary CSV with columns `vertex,rolling_Q,rolling_s,nu,p,normalized_diff`.
pub fn write_summary_csv<W: Write>(run: &QueueRun, qparams: &QueueParams, params: &ModelParams, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["vertex", "rolling_Q", "rolling_s", "nu", "p", "normalized_diff"])?;
    for v in 0..run.final_q_hat.len() {
        let p = params.p[v];
        w.write_record([
            v.to_string(),
            run.final_q_hat[v].to_string(),
            run.final_s_hat[v].to_string(),
            qparams.nu[v].to_string(),
            p.to_string(),
            ((run.final_s_hat[v] - p).abs() / p).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `mean_v |ŝ_v - p_v| / p_v`.
pub fn normalized_difference(s_hat: &[f64], p: &[f64]) -> f64 {
    s_hat.iter().zip(p).map(|(s, p)| (s - p).abs() / p).sum::<f64>() / s_hat.len() as f64
}
