//! Closed-form calculators for the fast-mixing condition, the mixing-time
//! bound, the service-rate sandwich and the mean-service-rate heuristic.

use std::f64::consts::E;
use std::fmt;
use std::io::Write;

use crate::error::{Error, Result};
use crate::graph::{degree_stats, Graph};
use crate::model::ModelParams;
use crate::stats::normal_upper_quantile;

/// Per-vertex loads `ℓ_v = (1/K) Σ_{u ∼ v} p_u λ_u / λ_v` and the margin
/// `β = 1 - max_v ℓ_v`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixingReport {
    pub n: usize,
    pub loads: Vec<f64>,
    pub beta: f64,
    pub lambda_min: f64,
    pub satisfied: bool,
}

impl MixingReport {
    /// Decay rate `β λ_min` of the bound curve.
    pub fn rate(&self) -> f64 {
        self.beta * self.lambda_min
    }

    /// `min{2n e^{-β λ_min t}, 1}`; identically 1 when `β <= 0`.
    pub fn bound_curve(&self, t: f64) -> f64 {
        if !self.satisfied {
            return 1.0;
        }
        (2.0 * self.n as f64 * (-self.rate() * t).exp()).min(1.0)
    }

    /// CSV with columns `vertex,load,beta,lambda_min,tmix_quarter` where the
    /// last column is the mixing-time bound at `ε = 1/4` (empty when the
    /// condition fails).
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let tmix = tmix_bound(self, 0.25).map(|t| t.to_string()).unwrap_or_default();
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["vertex", "load", "beta", "lambda_min", "tmix_quarter"])?;
        for (v, load) in self.loads.iter().enumerate() {
            w.write_record([
                v.to_string(),
                load.to_string(),
                self.beta.to_string(),
                self.lambda_min.to_string(),
                tmix.clone(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

impl fmt::Display for MixingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let max_load = self.loads.iter().copied().fold(0.0, f64::max);
        writeln!(f, "vertices:        {}", self.n)?;
        writeln!(f, "max load:        {max_load:.6}")?;
        writeln!(f, "beta:            {:.6}", self.beta)?;
        writeln!(f, "lambda_min:      {:.6}", self.lambda_min)?;
        match tmix_bound(self, 0.25) {
            Ok(t) => write!(f, "t_mix(1/4) <=    {t:.6}"),
            Err(_) => write!(f, "fast-mixing condition not satisfied"),
        }
    }
}

pub fn mixing_condition(g: &Graph, params: &ModelParams) -> Result<MixingReport> {
    params.check_graph(g)?;
    let k = params.colours as f64;
    let loads: Vec<f64> = (0..g.n())
        .map(|v| g.neighbours(v).iter().map(|&u| params.p[u] * params.lambda[u]).sum::<f64>() / (k * params.lambda[v]))
        .collect();
    let beta = 1.0 - loads.iter().copied().fold(0.0, f64::max);
    Ok(MixingReport { n: g.n(), loads, beta, lambda_min: params.lambda_min(), satisfied: beta > 0.0 })
}

/// `(β λ_min)^{-1} log(2n / ε)`.
pub fn tmix_bound(report: &MixingReport, epsilon: f64) -> Result<f64> {
    if !report.satisfied {
        return Err(Error::ConditionUnsatisfied { beta: report.beta });
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon {epsilon} not in (0,1)")));
    }
    Ok((2.0 * report.n as f64 / epsilon).ln() / report.rate())
}

/// A service-rate value, exact or estimated with a confidence interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServiceEstimate {
    pub value: f64,
    pub interval: Option<(f64, f64)>,
}

impl ServiceEstimate {
    pub fn exact(value: f64) -> Self {
        ServiceEstimate { value, interval: None }
    }

    /// Two-sided 99% interval, Bonferroni-corrected across `vertices`.
    pub fn estimated(mean: f64, standard_error: f64, vertices: usize) -> Self {
        let z = normal_upper_quantile(0.01 / (2.0 * vertices.max(1) as f64));
        ServiceEstimate { value: mean, interval: Some((mean - z * standard_error, mean + z * standard_error)) }
    }

    fn range(&self) -> (f64, f64) {
        self.interval.unwrap_or((self.value, self.value))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SandwichCheck {
    pub vertex: usize,
    /// `p_u <= K / (3 d̃_u)` for `v` and every neighbour `u`; the lower bound
    /// at `v` rests on its neighbours being rarely active.
    pub hypothesis_met: bool,
    /// `p_v/3 <= s_v <= p_v` (interval overlap for estimates); `None` when the
    /// hypothesis is unmet.
    pub sandwich: Option<bool>,
}

/// Checks `p_v / 3 <= s_v <= p_v` at every vertex meeting the hypothesis.
pub fn service_rate_check(g: &Graph, params: &ModelParams, s: &[ServiceEstimate]) -> Result<Vec<SandwichCheck>> {
    params.check_graph(g)?;
    if s.len() != g.n() {
        return Err(Error::Dimension { expected: g.n(), got: s.len() });
    }
    let stats = degree_stats(g);
    let k = params.colours as f64;
    let local: Vec<bool> = (0..g.n()).map(|u| 3.0 * params.p[u] * stats.neighbourhood_max[u] as f64 <= k).collect();
    Ok((0..g.n())
        .map(|v| {
            let p = params.p[v];
            let hypothesis_met = local[v] && g.neighbours(v).iter().all(|&u| local[u]);
            let sandwich = hypothesis_met.then(|| {
                let (lo, hi) = s[v].range();
                let tol = 1e-12;
                hi >= p / 3.0 - tol && lo <= p + tol
            });
            SandwichCheck { vertex: v, hypothesis_met, sandwich }
        })
        .collect())
}

/// Regular-graph fixed-point estimate of the mean service rate:
/// `p / (1 + p d / K)`, or `p / (1 + e^{-1} p d / K)` with `refine`.
pub fn heuristic_sbar(p: f64, d: f64, colours: f64, refine: bool) -> f64 {
    let load = p * d / colours;
    if refine {
        p / (1.0 + load / E)
    } else {
        p / (1.0 + load)
    }
}
