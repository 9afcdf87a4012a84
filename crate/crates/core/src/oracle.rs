//! Exact reference computations on instances small enough to enumerate.
//!
//! The generator is assembled directly from the transition rates: from `ω`,
//! vertex `v` moves to colour `k ∈ A_v(ω)` at rate `λ_v p_v / K` and to `0` at
//! rate `λ_v (1 - p_v + p_v |[K] \ A_v(ω)| / K)`. For `K >= 2` the chain is
//! in general not reversible, so the stationary law is obtained from the
//! global balance equations by a dense solve.

use std::collections::{HashMap, VecDeque};
use std::io::Write;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::model::{available_colours, Colour, Configuration, ModelParams};

/// Size limits for the brute-force routines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Maximum number of enumerated states.
    pub states: usize,
    /// Maximum state count for dense linear algebra and uniformization.
    pub dense: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { states: 1_000_000, dense: 5_000 }
    }
}

/// Tail mass left out of each uniformization sum.
pub const UNIFORMIZATION_TAIL: f64 = 1e-12;

/// All proper configurations in lexicographic order of the colour vector.
pub fn enumerate_states(g: &Graph, colours: Colour, budget: usize) -> Result<Vec<Configuration>> {
    let n = g.n();
    let mut states = Vec::new();
    let mut current = vec![0 as Colour; n];
    fn extend(
        g: &Graph,
        colours: Colour,
        budget: usize,
        v: usize,
        current: &mut Vec<Colour>,
        states: &mut Vec<Configuration>,
    ) -> Result<()> {
        if v == current.len() {
            if states.len() == budget {
                return Err(Error::BudgetExceeded { budget });
            }
            states.push(Configuration(current.clone()));
            return Ok(());
        }
        for c in 0..=colours {
            let clash = c != 0 && g.neighbours(v).iter().any(|&u| u < v && current[u] == c);
            if !clash {
                current[v] = c;
                extend(g, colours, budget, v + 1, current, states)?;
            }
        }
        current[v] = 0;
        Ok(())
    }
    extend(g, colours, budget, 0, &mut current, &mut states)?;
    Ok(states)
}

/// Off-diagonal transition rates out of each state, as `(target, rate)` with
/// targets distinct from the source and merged.
pub fn transition_rates(g: &Graph, params: &ModelParams, states: &[Configuration]) -> Result<Vec<Vec<(usize, f64)>>> {
    params.check_graph(g)?;
    let index: HashMap<&Configuration, usize> = states.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let k = params.colours as f64;
    let mut rows = Vec::with_capacity(states.len());
    for state in states {
        let mut row: Vec<(usize, f64)> = Vec::new();
        let mut push = |target: Configuration, rate: f64| -> Result<()> {
            if rate == 0.0 || &target == state {
                return Ok(());
            }
            let j = *index.get(&target).ok_or_else(|| {
                Error::InvalidParameter(format!("transition leaves the state list: {}", target.label()))
            })?;
            match row.iter_mut().find(|(t, _)| *t == j) {
                Some(entry) => entry.1 += rate,
                None => row.push((j, rate)),
            }
            Ok(())
        };
        for v in 0..g.n() {
            let (lambda, p) = (params.lambda[v], params.p[v]);
            let available = available_colours(g, state, v, params.colours);
            for &c in &available {
                let mut target = state.clone();
                target.0[v] = c;
                push(target, lambda * p / k)?;
            }
            let blocked = (params.colours as usize - available.len()) as f64;
            let mut target = state.clone();
            target.0[v] = 0;
            push(target, lambda * (1.0 - p + p * blocked / k))?;
        }
        row.sort_by_key(|&(j, _)| j);
        rows.push(row);
    }
    Ok(rows)
}

/// Dense generator matrix: rows sum to zero, off-diagonals are rates.
pub fn build_generator(g: &Graph, params: &ModelParams, states: &[Configuration]) -> Result<DMatrix<f64>> {
    let rows = transition_rates(g, params, states)?;
    Ok(generator_from_rates(&rows))
}

fn generator_from_rates(rows: &[Vec<(usize, f64)>]) -> DMatrix<f64> {
    let m = rows.len();
    let mut q = DMatrix::zeros(m, m);
    for (i, row) in rows.iter().enumerate() {
        let mut exit = 0.0;
        for &(j, rate) in row {
            q[(i, j)] = rate;
            exit += rate;
        }
        q[(i, i)] = -exit;
    }
    q
}

/// Whether the positive-rate digraph of `generator` is strongly connected.
pub fn is_irreducible(generator: &DMatrix<f64>) -> bool {
    let m = generator.nrows();
    if m == 0 {
        return false;
    }
    let reach = |forward: bool| {
        let mut seen = vec![false; m];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(i) = queue.pop_front() {
            for j in 0..m {
                let rate = if forward { generator[(i, j)] } else { generator[(j, i)] };
                if i != j && rate > 0.0 && !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    reach(true) && reach(false)
}

/// Unique `π` with `π Q = 0` and `Σ π = 1`.
pub fn stationary_distribution(generator: &DMatrix<f64>) -> Result<Vec<f64>> {
    let m = generator.nrows();
    if !is_irreducible(generator) {
        return Err(Error::Reducible("some states cannot reach each other (e.g. p_v = 1 or p_v = 0 somewhere)".into()));
    }
    // Qᵀ πᵀ = 0 with the last balance equation replaced by normalisation.
    let mut a = generator.transpose();
    a.row_mut(m - 1).fill(1.0);
    let mut b = DVector::zeros(m);
    b[m - 1] = 1.0;
    let lu = a.clone().lu();
    let mut x = lu.solve(&b).ok_or_else(|| Error::Reducible("singular balance system".into()))?;
    // One step of iterative refinement.
    let r = &b - &a * &x;
    if let Some(dx) = lu.solve(&r) {
        x += dx;
    }
    Ok(x.iter().map(|&v| v.max(0.0)).collect())
}

/// `max_j |(π Q)_j|`.
pub fn balance_residual(generator: &DMatrix<f64>, pi: &[f64]) -> f64 {
    let pi = DVector::from_column_slice(pi);
    (generator.transpose() * pi).amax()
}

/// Enumerated state space with its generator and stationary law.
#[derive(Debug, Clone)]
pub struct ExactModel {
    pub states: Vec<Configuration>,
    pub generator: DMatrix<f64>,
    pub pi: Vec<f64>,
    pub service_rates: Vec<f64>,
    rates: Vec<Vec<(usize, f64)>>,
    index: HashMap<Configuration, usize>,
}

impl ExactModel {
    pub fn build(g: &Graph, params: &ModelParams) -> Result<Self> {
        Self::build_with_budget(g, params, Budget::default())
    }

    pub fn build_with_budget(g: &Graph, params: &ModelParams, budget: Budget) -> Result<Self> {
        let states = enumerate_states(g, params.colours, budget.states)?;
        if states.len() > budget.dense {
            return Err(Error::BudgetExceeded { budget: budget.dense });
        }
        let rates = transition_rates(g, params, &states)?;
        let generator = generator_from_rates(&rates);
        let pi = stationary_distribution(&generator)?;
        let mut model = ExactModel {
            index: states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect(),
            states,
            generator,
            pi,
            service_rates: Vec::new(),
            rates,
        };
        model.service_rates = exact_service_rates(&model);
        Ok(model)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, state: &Configuration) -> Option<usize> {
        self.index.get(state).copied()
    }

    pub fn probability(&self, state: &Configuration) -> f64 {
        self.index_of(state).map_or(0.0, |i| self.pi[i])
    }

    /// Largest total exit rate, used as the uniformization constant.
    pub fn uniformization_rate(&self) -> f64 {
        self.rates.iter().map(|row| row.iter().map(|&(_, r)| r).sum::<f64>()).fold(0.0, f64::max)
    }

    /// Off-diagonal rates out of state `i`.
    pub fn rates_from(&self, i: usize) -> &[(usize, f64)] {
        &self.rates[i]
    }

    /// Distribution at each time of `grid` (ascending, non-negative) started
    /// from `initial`.
    pub fn transient(&self, initial: &[f64], grid: &[f64]) -> Result<Vec<Vec<f64>>> {
        if grid.iter().any(|&t| t < 0.0) || grid.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidParameter("time grid must be ascending and non-negative".into()));
        }
        let rate = self.uniformization_rate();
        let mut mu = initial.to_vec();
        let mut now = 0.0;
        let mut out = Vec::with_capacity(grid.len());
        for &t in grid {
            let mut remaining = (t - now) * rate;
            // Keep each Poisson mean moderate so e^{-a} does not underflow.
            while remaining > 0.0 {
                let a = remaining.min(50.0);
                mu = self.uniformized_step(&mu, a, rate);
                remaining -= a;
            }
            now = t;
            out.push(mu.clone());
        }
        Ok(out)
    }

    fn uniformized_step(&self, mu: &[f64], mean: f64, rate: f64) -> Vec<f64> {
        let m = mu.len();
        let mut weight = (-mean).exp();
        let mut cumulative = weight;
        let mut term = mu.to_vec();
        let mut acc: Vec<f64> = term.iter().map(|x| x * weight).collect();
        let mut k = 0usize;
        while 1.0 - cumulative > UNIFORMIZATION_TAIL && k < 10_000 {
            // term <- term * P with P = I + Q / rate.
            let mut next = vec![0.0; m];
            for (i, &mass) in term.iter().enumerate() {
                if mass == 0.0 {
                    continue;
                }
                let mut stay = mass;
                for &(j, r) in &self.rates[i] {
                    let flow = mass * r / rate;
                    next[j] += flow;
                    stay -= flow;
                }
                next[i] += stay;
            }
            term = next;
            k += 1;
            weight *= mean / k as f64;
            cumulative += weight;
            for (a, x) in acc.iter_mut().zip(&term) {
                *a += weight * x;
            }
        }
        // Renormalise the truncated mixture.
        acc.iter_mut().for_each(|a| *a /= cumulative);
        acc
    }

    fn point_mass(&self, start: &Configuration) -> Result<Vec<f64>> {
        let i = self
            .index_of(start)
            .ok_or_else(|| Error::InvalidParameter(format!("start {} is not a proper state", start.label())))?;
        let mut mu = vec![0.0; self.len()];
        mu[i] = 1.0;
        Ok(mu)
    }

    /// Dumps `(state, probability)` pairs as CSV with columns
    /// `state,probability`.
    pub fn write_pi_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["state", "probability"])?;
        for (s, p) in self.states.iter().zip(&self.pi) {
            w.write_record([s.label(), p.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `s_v = Σ_{ω : ω_v ≠ 0} π(ω)`.
pub fn exact_service_rates(model: &ExactModel) -> Vec<f64> {
    let n = model.states.first().map_or(0, Configuration::len);
    let mut s = vec![0.0; n];
    for (state, &p) in model.states.iter().zip(&model.pi) {
        for (v, sv) in s.iter_mut().enumerate() {
            if state.is_active(v) {
                *sv += p;
            }
        }
    }
    s
}

pub fn tv_distance(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// `‖P_start(X_t ∈ ·) - π‖_TV` on `grid`.
pub fn tv_exact_curve(model: &ExactModel, start: &Configuration, grid: &[f64]) -> Result<Vec<f64>> {
    let mu = model.point_mass(start)?;
    Ok(model.transient(&mu, grid)?.iter().map(|d| tv_distance(d, &model.pi)).collect())
}

/// `‖P_x(X_t ∈ ·) - P_y(Y_t ∈ ·)‖_TV` on `grid`.
pub fn tv_exact_between(model: &ExactModel, x: &Configuration, y: &Configuration, grid: &[f64]) -> Result<Vec<f64>> {
    let dx = model.transient(&model.point_mass(x)?, grid)?;
    let dy = model.transient(&model.point_mass(y)?, grid)?;
    Ok(dx.iter().zip(&dy).map(|(a, b)| tv_distance(a, b)).collect())
}

/// Worst case over all start states of the distance to `π`.
pub fn tv_worst_case_curve(model: &ExactModel, grid: &[f64]) -> Result<Vec<f64>> {
    let mut worst = vec![0.0f64; grid.len()];
    for start in &model.states {
        for (w, tv) in worst.iter_mut().zip(tv_exact_curve(model, start, grid)?) {
            *w = w.max(tv);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{apply_update, UpdateDraw};

    fn cfg(c: &[Colour]) -> Configuration {
        Configuration(c.to_vec())
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(enumerate_states(&Graph::empty(1), 4, 100).unwrap().len(), 5);
        let edge = Graph::path(2);
        assert_eq!(enumerate_states(&edge, 1, 100).unwrap(), vec![cfg(&[0, 0]), cfg(&[0, 1]), cfg(&[1, 0])]);
        let states = enumerate_states(&edge, 2, 100).unwrap();
        let expected: Vec<_> =
            [[0, 0], [0, 1], [0, 2], [1, 0], [1, 2], [2, 0], [2, 1]].iter().map(|c| cfg(c)).collect();
        assert_eq!(states, expected);
        assert!(matches!(enumerate_states(&edge, 2, 6), Err(Error::BudgetExceeded { budget: 6 })));
    }

    #[test]
    fn single_vertex_generator_and_pi() {
        let g = Graph::empty(1);
        let params = ModelParams::uniform(1, 1, 2.0, 0.3).unwrap();
        let states = enumerate_states(&g, 1, 10).unwrap();
        let q = build_generator(&g, &params, &states).unwrap();
        assert!((q[(0, 1)] - 0.6).abs() < 1e-15);
        assert!((q[(1, 0)] - 1.4).abs() < 1e-15);

        let params = ModelParams::uniform(1, 3, 1.0, 0.3).unwrap();
        let model = ExactModel::build(&g, &params).unwrap();
        assert!((model.pi[0] - 0.7).abs() < 1e-12);
        for k in 1..=3 {
            assert!((model.pi[k] - 0.1).abs() < 1e-12);
        }
        assert!((model.service_rates[0] - 0.3).abs() < 1e-12);
    }

    #[test]
    fn edge_generator_entries() {
        let g = Graph::path(2);
        let params = ModelParams::new(1, vec![1.5, 1.0], vec![0.4, 0.2]).unwrap();
        let states = enumerate_states(&g, 1, 10).unwrap();
        let q = build_generator(&g, &params, &states).unwrap();
        // 10 -> 00 through an update of u: own colour still available.
        assert!((q[(2, 0)] - 1.5 * 0.6).abs() < 1e-15);

        let params = ModelParams::new(2, vec![1.5, 1.0], vec![0.4, 0.2]).unwrap();
        let states = enumerate_states(&g, 2, 10).unwrap();
        let q = build_generator(&g, &params, &states).unwrap();
        let from = states.iter().position(|s| *s == cfg(&[1, 2])).unwrap();
        let to = states.iter().position(|s| *s == cfg(&[0, 2])).unwrap();
        assert!((q[(from, to)] - 1.5 * (1.0 - 0.4 + 0.4 * 0.5)).abs() < 1e-15);
    }

    #[test]
    fn edge_product_form() {
        let g = Graph::path(2);
        let params = ModelParams::uniform(2, 1, 1.0, 0.3).unwrap();
        let model = ExactModel::build(&g, &params).unwrap();
        let f = 0.3 / 0.7;
        let z = 1.0 + 2.0 * f;
        assert!((model.probability(&cfg(&[0, 0])) - 1.0 / z).abs() < 1e-12);
        assert!((model.probability(&cfg(&[1, 0])) - f / z).abs() < 1e-12);
        for s in &model.service_rates {
            assert!((s - 3.0 / 13.0).abs() < 1e-12);
        }
    }

    #[test]
    fn generator_structure_and_closure() {
        let g = Graph::cycle(4).unwrap();
        let params = ModelParams::new(2, vec![1.0, 2.0, 0.5, 1.0], vec![0.3, 0.6, 0.2, 0.9]).unwrap();
        let model = ExactModel::build(&g, &params).unwrap();
        let m = model.len();
        for i in 0..m {
            let row_sum: f64 = (0..m).map(|j| model.generator[(i, j)]).sum();
            assert!(row_sum.abs() < 1e-12);
            for j in 0..m {
                if i != j {
                    assert!(model.generator[(i, j)] >= 0.0);
                }
            }
        }
        assert!((model.pi.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(balance_residual(&model.generator, &model.pi) <= 1e-10);
    }

    /// Independent route: derive every rate by pushing all (vertex, coin,
    /// colour) outcomes through the update rule.
    #[test]
    fn generator_matches_update_rule() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (1, 3), (2, 3)]).unwrap();
        let params = ModelParams::new(3, vec![1.0, 0.7, 1.3, 2.0], vec![0.5, 0.25, 0.8, 0.1]).unwrap();
        let states = enumerate_states(&g, 3, 10_000).unwrap();
        let q = build_generator(&g, &params, &states).unwrap();
        let k = params.colours as f64;
        let mut expected = DMatrix::<f64>::zeros(states.len(), states.len());
        for (i, s) in states.iter().enumerate() {
            for v in 0..g.n() {
                let mut outcomes = vec![(UpdateDraw::new(v, false, 1), 1.0 - params.p[v])];
                for c in 1..=params.colours {
                    outcomes.push((UpdateDraw::new(v, true, c), params.p[v] / k));
                }
                for (draw, prob) in outcomes {
                    let t = apply_update(&g, s, &draw);
                    let j = states.iter().position(|x| *x == t).expect("closure of the state space");
                    if j != i {
                        expected[(i, j)] += params.lambda[v] * prob;
                        expected[(i, i)] -= params.lambda[v] * prob;
                    }
                }
            }
        }
        assert!((q - expected).amax() < 1e-12);
    }

    #[test]
    fn reducible_chain_is_rejected() {
        let g = Graph::path(2);
        let params = ModelParams::uniform(2, 1, 1.0, 1.0).unwrap();
        assert!(matches!(ExactModel::build(&g, &params), Err(Error::Reducible(_))));
        let params = ModelParams::new(1, vec![1.0, 1.0], vec![0.0, 0.5]).unwrap();
        assert!(matches!(ExactModel::build(&g, &params), Err(Error::Reducible(_))));
    }

    #[test]
    fn dense_budget() {
        let g = Graph::empty(6);
        let params = ModelParams::uniform(6, 3, 1.0, 0.5).unwrap();
        let err = ExactModel::build_with_budget(&g, &params, Budget { states: 10_000, dense: 100 });
        assert!(matches!(err, Err(Error::BudgetExceeded { budget: 100 })));
    }

    #[test]
    fn triangle_symmetry() {
        let g = Graph::complete(3);
        let params = ModelParams::uniform(3, 2, 1.0, 0.4).unwrap();
        let model = ExactModel::build(&g, &params).unwrap();
        assert_eq!(model.len(), 13);
        let s = &model.service_rates;
        assert!((s[0] - s[1]).abs() < 1e-12 && (s[1] - s[2]).abs() < 1e-12);
    }

    #[test]
    fn tv_curve_endpoints_and_monotonicity() {
        let g = Graph::path(3);
        let params = ModelParams::uniform(3, 2, 1.0, 0.5).unwrap();
        let model = ExactModel::build(&g, &params).unwrap();
        let start = cfg(&[1, 0, 2]);
        let grid: Vec<f64> = (0..60).map(|i| i as f64 * 0.5).collect();
        let tv = tv_exact_curve(&model, &start, &grid).unwrap();
        assert!((tv[0] - (1.0 - model.probability(&start))).abs() < 1e-12);
        assert!(tv.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        assert!(*tv.last().unwrap() < 1e-6);

        // Refining the grid does not change values at shared points.
        let fine: Vec<f64> = (0..120).map(|i| i as f64 * 0.25).collect();
        let tv_fine = tv_exact_curve(&model, &start, &fine).unwrap();
        assert!(tv_fine.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        for (i, v) in tv.iter().enumerate() {
            assert!((tv_fine[2 * i] - v).abs() < 1e-10);
        }
    }

    #[test]
    fn uniformization_matches_two_state_closed_form() {
        // Single vertex, K = 1: P_0(active at t) = p (1 - e^{-λ t}).
        let g = Graph::empty(1);
        let params = ModelParams::uniform(1, 1, 1.7, 0.35).unwrap();
        let model = ExactModel::build(&g, &params).unwrap();
        let grid = [0.0, 0.1, 1.0, 3.0, 80.0];
        let dist = model.transient(&[1.0, 0.0], &grid).unwrap();
        for (t, d) in grid.iter().zip(dist) {
            let expected = 0.35 * (1.0 - (-1.7 * t).exp());
            assert!((d[1] - expected).abs() < 1e-11, "t={t}");
        }
    }

    #[test]
    fn pi_csv() {
        let g = Graph::path(2);
        let model = ExactModel::build(&g, &ModelParams::uniform(2, 1, 1.0, 0.5).unwrap()).unwrap();
        let mut buf = Vec::new();
        model.write_pi_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("state,probability\n00,0.333"), "{text}");
        assert_eq!(text.lines().count(), 4);
    }
}
