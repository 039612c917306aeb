//! Maximum-likelihood estimation of ECM and WCM multipliers.
//!
//! The likelihood is maximised over the natural parameters `α_i = ln x_i`
//! and `β_i = ln y_i` of the active (non-isolated) nodes. In these
//! coordinates the gradient is the constraint mismatch
//!
//! ```text
//! ∂L/∂α_i = k_i - ⟨k_i⟩,    ∂L/∂β_i = s_i - ⟨s_i⟩
//! ```
//!
//! and the negative Hessian is the covariance of the sufficient statistics,
//! which is assembled in closed form dyad by dyad. Each iteration takes a
//! Levenberg-damped Newton step followed by a backtracking line search that
//! keeps every `y_i y_j` below 1 and never lets the likelihood drop.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{Error, Result};
use crate::graph::{LocalConstraints, WeightedGraph};
use crate::model::{FitDiagnostics, ModelKind, ModelParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitConfig {
    pub max_iterations: usize,
    /// Absolute tolerance on `|⟨k_i⟩ - k_i|`.
    pub degree_tolerance: f64,
    /// Tolerance on `|⟨s_i⟩ - s_i| / max(s_i, 1)`.
    pub strength_tolerance: f64,
    /// Initial step length of every line search, in `(0, 1]`.
    pub damping: f64,
    /// Start from the degree/strength heuristic rather than a flat start.
    /// Both starts are deterministic.
    pub deterministic_init: bool,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            max_iterations: 10_000,
            degree_tolerance: 1e-6,
            strength_tolerance: 1e-6,
            damping: 1.0,
            deterministic_init: true,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidInput("max_iterations must be at least 1".into()));
        }
        if !(self.degree_tolerance > 0.0 && self.strength_tolerance > 0.0) {
            return Err(Error::InvalidInput("tolerances must be positive".into()));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::InvalidInput(format!("damping {} outside (0, 1]", self.damping)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error(transparent)]
    Input(#[from] Error),

    #[error(
        "{kind} fit did not converge after {iterations} iterations \
         (max degree residual {max_degree_residual:e}, max relative strength residual {max_relative_strength_residual:e})"
    )]
    NotConverged {
        kind: ModelKind,
        iterations: usize,
        max_degree_residual: f64,
        max_relative_strength_residual: f64,
        /// Best parameters reached.
        best: Box<ModelParams>,
    },
}

/// One line of the convergence trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    pub max_degree_residual: f64,
    pub max_relative_strength_residual: f64,
    pub log_likelihood: f64,
}

/// `⟨k_i⟩ - k_i` and `⟨s_i⟩ - s_i` for every node.
#[derive(Debug, Clone, PartialEq)]
pub struct Residuals {
    pub degree: Vec<f64>,
    pub strength: Vec<f64>,
    strength_scale: Vec<f64>,
}

impl Residuals {
    pub fn max_degree(&self) -> f64 {
        self.degree.iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    /// `max_i |⟨s_i⟩ - s_i| / max(s_i, 1)`.
    pub fn max_relative_strength(&self) -> f64 {
        self.strength
            .iter()
            .zip(&self.strength_scale)
            .fold(0.0, |m, (r, s)| m.max(r.abs() / s))
    }

    /// Per-node `(degree residual, strength residual)` pairs.
    pub fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.degree.iter().copied().zip(self.strength.iter().copied())
    }
}

/// Gradient of the log-likelihood with respect to `ln x_i` and `ln y_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub ln_x: Vec<f64>,
    pub ln_y: Vec<f64>,
}

fn check_compatible(params: &ModelParams, graph: &WeightedGraph) -> Result<()> {
    if params.len() != graph.len() {
        return Err(Error::DimensionMismatch { expected: graph.len(), found: params.len() });
    }
    if params.nodes() != graph.nodes() {
        return Err(Error::InvalidInput("parameter node labels differ from graph node labels".into()));
    }
    Ok(())
}

/// `Σ_{i<j} ln q_ij(w*_ij)`.
pub fn log_likelihood(params: &ModelParams, graph: &WeightedGraph) -> Result<f64> {
    check_compatible(params, graph)?;
    let n = graph.len();
    let mut total = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            total += ln_pmf(params, i, j, graph.weight(i, j));
        }
    }
    Ok(total)
}

fn ln_pmf(params: &ModelParams, i: usize, j: usize, w: u64) -> f64 {
    params.dyad_unchecked(i, j).ln_pmf(w)
}

pub fn residuals(params: &ModelParams, graph: &WeightedGraph) -> Result<Residuals> {
    check_compatible(params, graph)?;
    let n = graph.len();
    let c = graph.local_constraints();
    let mut degree: Vec<f64> = c.degrees.iter().map(|&k| -(k as f64)).collect();
    let mut strength: Vec<f64> = c.strengths.iter().map(|&s| -(s as f64)).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            let d = params.dyad_unchecked(i, j);
            let p = d.connection_probability();
            let w = d.expected_weight();
            degree[i] += p;
            degree[j] += p;
            strength[i] += w;
            strength[j] += w;
        }
    }
    let strength_scale = c.strengths.iter().map(|&s| (s as f64).max(1.0)).collect();
    Ok(Residuals { degree, strength, strength_scale })
}

/// Analytic gradient; `ln_x` is reported for both kinds even though the
/// WCM keeps `x` fixed.
pub fn likelihood_gradient(params: &ModelParams, graph: &WeightedGraph) -> Result<Gradient> {
    let r = residuals(params, graph)?;
    Ok(Gradient {
        ln_x: r.degree.iter().map(|v| -v).collect(),
        ln_y: r.strength.iter().map(|v| -v).collect(),
    })
}

pub fn fit(graph: &WeightedGraph, kind: ModelKind, config: &FitConfig) -> Result<ModelParams, FitError> {
    fit_with_trace(graph, kind, config, |_| {})
}

/// Like [`fit`], reporting every iteration to `trace`.
pub fn fit_with_trace<F: FnMut(TraceRow)>(
    graph: &WeightedGraph,
    kind: ModelKind,
    config: &FitConfig,
    mut trace: F,
) -> Result<ModelParams, FitError> {
    config.validate()?;
    let constraints = graph.local_constraints();
    let problem = Problem::new(kind, &constraints);
    let n = graph.len();

    if problem.active.is_empty() {
        let x = match kind {
            ModelKind::Ecm => vec![0.0; n],
            ModelKind::Wcm => vec![1.0; n],
        };
        let params = ModelParams::new(kind, graph.nodes().to_vec(), x, vec![0.0; n])?;
        let diagnostics = FitDiagnostics { converged: true, ..FitDiagnostics::default() };
        return Ok(params.with_diagnostics(diagnostics));
    }

    let mut theta = problem.initial_point(config.deterministic_init);
    let mut eval = problem.evaluate(&theta).ok_or_else(|| Error::Degenerate("initial point outside the domain".into()))?;
    let mut lambda = 1e-10;
    // internal tolerances are tightened if the public residual check disagrees
    let mut tighten = 0.5;
    let mut iterations = 0;
    let mut stalled = false;
    let mut traced = None;

    loop {
        if traced != Some(iterations) {
            trace(TraceRow {
                iteration: iterations,
                max_degree_residual: eval.max_degree,
                max_relative_strength_residual: eval.max_strength,
                log_likelihood: eval.log_likelihood,
            });
            traced = Some(iterations);
        }
        let inner_done = eval.max_degree <= tighten * config.degree_tolerance
            && eval.max_strength <= tighten * config.strength_tolerance;
        if inner_done || stalled || iterations >= config.max_iterations {
            let params = problem.to_params(graph, &theta)?;
            let r = residuals(&params, graph)?;
            let (max_k, max_s) = match kind {
                ModelKind::Ecm => (r.max_degree(), r.max_relative_strength()),
                ModelKind::Wcm => (0.0, r.max_relative_strength()),
            };
            let ok = max_k <= config.degree_tolerance && max_s <= config.strength_tolerance;
            if inner_done && !ok && tighten > 1e-4 && iterations < config.max_iterations {
                tighten *= 0.1;
                continue;
            }
            let diagnostics = FitDiagnostics {
                iterations,
                max_degree_residual: max_k,
                max_relative_strength_residual: max_s,
                log_likelihood: log_likelihood(&params, graph)?,
                converged: ok,
                boundary_nodes: problem.boundary_nodes(&theta),
            };
            let params = params.with_diagnostics(diagnostics);
            if ok {
                return Ok(params);
            }
            return Err(FitError::NotConverged {
                kind,
                iterations,
                max_degree_residual: max_k,
                max_relative_strength_residual: max_s,
                best: Box::new(params),
            });
        }

        iterations += 1;
        match problem.step(&theta, &eval, &mut lambda, config.damping) {
            Some((next, next_eval)) => {
                theta = next;
                eval = next_eval;
                if problem.m() == 2 {
                    // only the products are identified; keep the symmetric solution
                    problem.symmetrize(&mut theta);
                    eval = problem.evaluate(&theta).unwrap_or(eval);
                }
            }
            None => stalled = true,
        }
    }
}

struct Problem {
    kind: ModelKind,
    /// Indices of non-isolated nodes.
    active: Vec<usize>,
    degrees: Vec<f64>,
    strengths: Vec<f64>,
}

struct Eval {
    log_likelihood: f64,
    /// `[∂L/∂α; ∂L/∂β]` for ECM, `∂L/∂β` for WCM.
    gradient: Vec<f64>,
    max_degree: f64,
    max_strength: f64,
}

fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + libm::log1p(libm::exp(-t))
    } else {
        libm::log1p(libm::exp(t))
    }
}

fn logistic(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + libm::exp(-t))
    } else {
        let e = libm::exp(t);
        e / (1.0 + e)
    }
}

/// Pair moments in natural coordinates `u = α_i + α_j`, `v = β_i + β_j < 0`.
struct PairMoments {
    z: f64,
    omz: f64,
    t: f64,
    p: f64,
    q0: f64,
    mean: f64,
}

impl PairMoments {
    fn new(u: f64, v: f64) -> Self {
        let z = libm::exp(v);
        let omz = -libm::expm1(v);
        // logit of the link probability
        let t = u + v - libm::log(omz);
        let p = logistic(t);
        let q0 = logistic(-t);
        Self { z, omz, t, p, q0, mean: p / omz }
    }

    fn var_link(&self) -> f64 {
        self.p * self.q0
    }

    fn cov_link_weight(&self) -> f64 {
        self.mean * self.q0
    }

    fn var_weight(&self) -> f64 {
        self.p * (self.q0 + self.z) / (self.omz * self.omz)
    }
}

impl Problem {
    fn new(kind: ModelKind, c: &LocalConstraints) -> Self {
        let active: Vec<usize> = (0..c.len()).filter(|&i| !c.is_isolated(i)).collect();
        let degrees = active.iter().map(|&i| c.degrees[i] as f64).collect();
        let strengths = active.iter().map(|&i| c.strengths[i] as f64).collect();
        Self { kind, active, degrees, strengths }
    }

    fn m(&self) -> usize {
        self.active.len()
    }

    fn dim(&self) -> usize {
        match self.kind {
            ModelKind::Ecm => 2 * self.m(),
            ModelKind::Wcm => self.m(),
        }
    }

    fn alpha(&self, theta: &[f64], a: usize) -> f64 {
        match self.kind {
            ModelKind::Ecm => theta[a],
            ModelKind::Wcm => 0.0,
        }
    }

    fn beta_offset(&self) -> usize {
        match self.kind {
            ModelKind::Ecm => self.m(),
            ModelKind::Wcm => 0,
        }
    }

    fn initial_point(&self, heuristic: bool) -> Vec<f64> {
        let m = self.m();
        let mut theta = vec![0.0; self.dim()];
        let off = self.beta_offset();
        if !heuristic {
            for a in 0..m {
                theta[off + a] = libm::log(0.5);
            }
            return theta;
        }
        let k_norm = libm::sqrt(self.degrees.iter().sum::<f64>());
        let s_norm = libm::sqrt(self.strengths.iter().sum::<f64>());
        for a in 0..m {
            if self.kind == ModelKind::Ecm {
                theta[a] = libm::log(self.degrees[a] / k_norm);
            }
            let t = self.strengths[a] / s_norm;
            // ln(t / (1 + t)), kept accurate for large t
            theta[off + a] = -libm::log1p(1.0 / t);
        }
        theta
    }

    fn in_domain(&self, theta: &[f64]) -> bool {
        if theta.iter().any(|v| !v.is_finite()) {
            return false;
        }
        let off = self.beta_offset();
        let betas = &theta[off..off + self.m()];
        let (mut top, mut second) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for &b in betas {
            if b > top {
                second = top;
                top = b;
            } else if b > second {
                second = b;
            }
        }
        top + second < 0.0
    }

    fn evaluate(&self, theta: &[f64]) -> Option<Eval> {
        if !self.in_domain(theta) {
            return None;
        }
        let m = self.m();
        let off = self.beta_offset();
        let mut expected_k = vec![0.0; m];
        let mut expected_s = vec![0.0; m];
        let mut ll = 0.0;
        for a in 0..m {
            for b in (a + 1)..m {
                let u = self.alpha(theta, a) + self.alpha(theta, b);
                let v = theta[off + a] + theta[off + b];
                let pm = PairMoments::new(u, v);
                expected_k[a] += pm.p;
                expected_k[b] += pm.p;
                expected_s[a] += pm.mean;
                expected_s[b] += pm.mean;
                // observed weights enter only through k and s below
                ll -= softplus(pm.t);
            }
        }
        // L = Σ_i (α_i k_i + β_i s_i) - Σ_{i<j} softplus(t_ij)
        for a in 0..m {
            ll += self.alpha(theta, a) * self.degrees[a] + theta[off + a] * self.strengths[a];
        }
        if !ll.is_finite() {
            return None;
        }
        let mut gradient = vec![0.0; self.dim()];
        let mut max_degree = 0.0f64;
        let mut max_strength = 0.0f64;
        for a in 0..m {
            let gk = self.degrees[a] - expected_k[a];
            let gs = self.strengths[a] - expected_s[a];
            if self.kind == ModelKind::Ecm {
                gradient[a] = gk;
                max_degree = max_degree.max(gk.abs());
            }
            gradient[off + a] = gs;
            max_strength = max_strength.max(gs.abs() / self.strengths[a].max(1.0));
        }
        Some(Eval { log_likelihood: ll, gradient, max_degree, max_strength })
    }

    /// Fisher information (negative Hessian) in the natural coordinates.
    fn fisher(&self, theta: &[f64]) -> DMatrix<f64> {
        let m = self.m();
        let off = self.beta_offset();
        let dim = self.dim();
        let mut f = DMatrix::<f64>::zeros(dim, dim);
        for a in 0..m {
            for b in (a + 1)..m {
                let u = self.alpha(theta, a) + self.alpha(theta, b);
                let v = theta[off + a] + theta[off + b];
                let pm = PairMoments::new(u, v);
                let vw = pm.var_weight();
                for (r, c) in [(off + a, off + a), (off + b, off + b), (off + a, off + b), (off + b, off + a)] {
                    f[(r, c)] += vw;
                }
                if self.kind == ModelKind::Ecm {
                    let vk = pm.var_link();
                    let cw = pm.cov_link_weight();
                    for (r, c) in [(a, a), (b, b), (a, b), (b, a)] {
                        f[(r, c)] += vk;
                    }
                    for (r, c) in [(a, off + a), (a, off + b), (b, off + a), (b, off + b)] {
                        f[(r, c)] += cw;
                        f[(c, r)] += cw;
                    }
                }
            }
        }
        f
    }

    fn merit(&self, e: &Eval) -> f64 {
        let off = self.beta_offset();
        let mut total = 0.0;
        for a in 0..self.m() {
            if self.kind == ModelKind::Ecm {
                total += e.gradient[a] * e.gradient[a];
            }
            let rs = e.gradient[off + a] / self.strengths[a].max(1.0);
            total += rs * rs;
        }
        total
    }

    /// One damped Newton step with backtracking. `None` when no admissible
    /// step improves on the current point.
    fn step(&self, theta: &[f64], eval: &Eval, lambda: &mut f64, damping: f64) -> Option<(Vec<f64>, Eval)> {
        let dim = self.dim();
        let fisher = self.fisher(theta);
        let g = DVector::from_column_slice(&eval.gradient);
        let merit = self.merit(eval);
        let ll = eval.log_likelihood;
        let slack = 1e-13 * ll.abs().max(1.0);

        // Jacobi scaling: strength blocks can exceed degree blocks by many orders of magnitude
        let scale: Vec<f64> = (0..dim)
            .map(|d| {
                let v = fisher[(d, d)];
                if v > 0.0 { 1.0 / libm::sqrt(v) } else { 1.0 }
            })
            .collect();
        let mut scaled = fisher.clone();
        for r in 0..dim {
            for c in 0..dim {
                scaled[(r, c)] *= scale[r] * scale[c];
            }
        }
        let scaled_g = DVector::from_iterator(dim, g.iter().zip(&scale).map(|(v, s)| v * s));
        for _ in 0..12 {
            let mut system = scaled.clone();
            for d in 0..dim {
                system[(d, d)] += *lambda * scaled[(d, d)] + 1e-13;
            }
            let Some(chol) = system.cholesky() else {
                *lambda = (*lambda * 10.0).max(1e-8);
                continue;
            };
            let mut delta = chol.solve(&scaled_g);
            for (d, s) in delta.iter_mut().zip(&scale) {
                *d *= s;
            }
            let slope = g.dot(&delta);
            let mut t = damping;
            for _ in 0..60 {
                let candidate: Vec<f64> = theta.iter().zip(delta.iter()).map(|(a, d)| a + t * d).collect();
                if let Some(e) = self.evaluate(&candidate) {
                    let armijo = e.log_likelihood >= ll + 1e-4 * t * slope;
                    let flat = e.log_likelihood >= ll - slack && self.merit(&e) < merit;
                    if armijo || flat {
                        *lambda = (*lambda * 0.1).max(1e-12);
                        return Some((candidate, e));
                    }
                }
                t *= 0.5;
            }
            *lambda = (*lambda * 10.0).max(1e-8);
        }
        None
    }

    fn symmetrize(&self, theta: &mut [f64]) {
        let m = self.m();
        for block in theta.chunks_mut(m) {
            let mean = block.iter().sum::<f64>() / m as f64;
            block.iter_mut().for_each(|v| *v = mean);
        }
    }

    fn to_params(&self, graph: &WeightedGraph, theta: &[f64]) -> Result<ModelParams> {
        let n = graph.len();
        let off = self.beta_offset();
        let mut ln_x = match self.kind {
            ModelKind::Ecm => vec![f64::NEG_INFINITY; n],
            ModelKind::Wcm => vec![0.0; n],
        };
        let mut ln_y = vec![f64::NEG_INFINITY; n];
        for (a, &i) in self.active.iter().enumerate() {
            if self.kind == ModelKind::Ecm {
                ln_x[i] = theta[a];
            }
            ln_y[i] = theta[off + a];
        }
        ModelParams::from_logs(self.kind, graph.nodes().to_vec(), ln_x, ln_y)
    }

    /// Nodes whose maximum-likelihood multipliers sit at the edge of the
    /// domain: a row linked to every other node drives `x_i` to infinity and
    /// `s_i = k_i` drives `y_i` to zero (ECM only). Numerically extreme
    /// parameters are reported as well.
    fn boundary_nodes(&self, theta: &[f64]) -> Vec<usize> {
        let off = self.beta_offset();
        let m = self.m();
        (0..m)
            .filter(|&a| {
                let extreme = self.alpha(theta, a).abs() > 30.0 || theta[off + a] < -30.0;
                let structural = self.kind == ModelKind::Ecm
                    && (self.degrees[a] + 1.0 >= m as f64 || self.strengths[a] == self.degrees[a]);
                extreme || structural
            })
            .map(|a| self.active[a])
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::String;
    use approx::assert_relative_eq;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("n{i}")).collect()
    }

    #[test]
    fn two_node_wcm_has_closed_form() {
        let g = WeightedGraph::from_edges(labels(2), &[(0, 1, 1)]).unwrap();
        let p = fit(&g, ModelKind::Wcm, &FitConfig::default()).unwrap();
        let z = p.y()[0] * p.y()[1];
        assert_relative_eq!(z, 0.5, max_relative = 1e-6);
        assert_relative_eq!(p.y()[0], 0.5f64.sqrt(), max_relative = 1e-6);
        assert_relative_eq!(p.y()[0], p.y()[1], max_relative = 1e-12);
    }

    #[test]
    fn isolated_nodes_only() {
        let g = WeightedGraph::empty(labels(4));
        for kind in [ModelKind::Ecm, ModelKind::Wcm] {
            let p = fit(&g, kind, &FitConfig::default()).unwrap();
            assert!(p.y().iter().all(|&y| y == 0.0));
            let r = residuals(&p, &g).unwrap();
            assert_eq!(r.max_degree(), 0.0);
            assert_eq!(r.max_relative_strength(), 0.0);
            assert_eq!(log_likelihood(&p, &g).unwrap(), 0.0);
        }
        let p = fit(&g, ModelKind::Ecm, &FitConfig::default()).unwrap();
        assert!(p.x().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn isolated_node_keeps_zero_multipliers() {
        let g = WeightedGraph::from_edges(labels(4), &[(0, 1, 3), (1, 2, 1), (0, 2, 2)]).unwrap();
        let p = fit(&g, ModelKind::Ecm, &FitConfig::default()).unwrap();
        assert_eq!(p.x()[3], 0.0);
        assert_eq!(p.y()[3], 0.0);
    }

    #[test]
    fn hand_evaluated_likelihood() {
        let g = WeightedGraph::from_edges(labels(2), &[(0, 1, 1)]).unwrap();
        let p = ModelParams::ecm(labels(2), vec![2f64.sqrt(); 2], vec![0.5f64.sqrt(); 2]).unwrap();
        assert_relative_eq!(log_likelihood(&p, &g).unwrap(), (1.0f64 / 3.0).ln(), max_relative = 1e-12);

        let empty = WeightedGraph::empty(labels(3));
        let zero = ModelParams::ecm(labels(3), vec![0.0; 3], vec![0.0; 3]).unwrap();
        assert_eq!(log_likelihood(&zero, &empty).unwrap(), 0.0);
        // an observed link under a zero multiplier is impossible
        let linked = WeightedGraph::from_edges(labels(3), &[(0, 1, 1)]).unwrap();
        assert_eq!(log_likelihood(&zero, &linked).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn zero_params_residuals_are_minus_constraints() {
        let g = WeightedGraph::from_edges(labels(3), &[(0, 1, 2), (1, 2, 7)]).unwrap();
        let p = ModelParams::ecm(labels(3), vec![0.0; 3], vec![0.0; 3]).unwrap();
        let r = residuals(&p, &g).unwrap();
        assert_eq!(r.degree, vec![-1.0, -2.0, -1.0]);
        assert_eq!(r.strength, vec![-2.0, -9.0, -7.0]);
    }

    #[test]
    fn mismatched_dimensions() {
        let g = WeightedGraph::empty(labels(3));
        let p = ModelParams::ecm(labels(2), vec![0.0; 2], vec![0.0; 2]).unwrap();
        assert!(matches!(log_likelihood(&p, &g), Err(Error::DimensionMismatch { .. })));
        assert!(residuals(&p, &g).is_err());
    }

    #[test]
    fn invalid_config() {
        let g = WeightedGraph::with_size(3);
        let bad = FitConfig { damping: 0.0, ..FitConfig::default() };
        assert!(matches!(fit(&g, ModelKind::Ecm, &bad), Err(FitError::Input(_))));
        let bad = FitConfig { max_iterations: 0, ..FitConfig::default() };
        assert!(fit(&g, ModelKind::Ecm, &bad).is_err());
    }

    #[test]
    fn iteration_cap_reports_best_point() {
        let g = WeightedGraph::from_edges(labels(4), &[(0, 1, 5), (1, 2, 1), (2, 3, 9), (0, 3, 2), (0, 2, 1)]).unwrap();
        let cfg = FitConfig { max_iterations: 1, ..FitConfig::default() };
        match fit(&g, ModelKind::Ecm, &cfg) {
            Err(FitError::NotConverged { iterations, best, .. }) => {
                assert_eq!(iterations, 1);
                assert!(!best.diagnostics().converged);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }
}
