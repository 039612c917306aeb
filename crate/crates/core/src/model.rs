//! Closed-form kernels of the enhanced (ECM) and weighted (WCM) configuration models.
//!
//! Under both models dyads are independent and the weight of dyad `(i, j)`
//! follows
//!
//! ```text
//! q_ij(w) = (x_i x_j)^Θ(w) (y_i y_j)^w (1 - y_i y_j) / (1 - y_i y_j + x_i x_j y_i y_j)
//! ```
//!
//! i.e. a Bernoulli link with probability `p_ij` followed, when present, by a
//! geometric number of extra weight units with ratio `y_i y_j`. The WCM is
//! the restriction `x ≡ 1`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_index, Error, Result};
use crate::graph::WeightedGraph;
use crate::polylog;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// Degrees and strengths constrained.
    Ecm,
    /// Strengths only.
    Wcm,
}

impl ModelKind {
    /// Number of free parameters for `n` nodes.
    pub fn parameter_count(self, n: usize) -> usize {
        match self {
            Self::Ecm => 2 * n,
            Self::Wcm => n,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Ecm => "ecm",
            Self::Wcm => "wcm",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl core::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ecm" => Ok(Self::Ecm),
            "wcm" => Ok(Self::Wcm),
            other => Err(Error::InvalidInput(format!("unknown model kind {other:?}"))),
        }
    }
}

/// What the solver reports alongside fitted multipliers.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FitDiagnostics {
    pub iterations: usize,
    pub max_degree_residual: f64,
    pub max_relative_strength_residual: f64,
    pub log_likelihood: f64,
    pub converged: bool,
    /// Nodes whose multipliers drifted towards the edge of the parameter
    /// domain (full rows, `s_i = k_i`, or `y_i y_j` close to 1).
    #[serde(default)]
    pub boundary_nodes: Vec<usize>,
}

/// Fitted Lagrange multipliers.
///
/// Invariants: `x_i ≥ 0`, `y_i ≥ 0`, `y_i y_j < 1` for every dyad; under the
/// WCM every `x_i` is exactly 1.
///
/// The logarithms of the multipliers are kept alongside them and are what
/// every kernel evaluates from, so `1 - y_i y_j` stays accurate when it is
/// far below machine epsilon relative to 1 (heavy weights drive `y_i y_j`
/// towards 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct ModelParams {
    kind: ModelKind,
    nodes: Vec<String>,
    x: Vec<f64>,
    y: Vec<f64>,
    ln_x: Vec<f64>,
    ln_y: Vec<f64>,
    diagnostics: FitDiagnostics,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    kind: ModelKind,
    nodes: Vec<String>,
    x: Vec<f64>,
    y: Vec<f64>,
    /// Optional, authoritative when present; `null` encodes `ln 0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ln_x: Option<Vec<Option<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ln_y: Option<Vec<Option<f64>>>,
    #[serde(default)]
    diagnostics: FitDiagnostics,
}

fn encode_logs(v: &[f64]) -> Vec<Option<f64>> {
    v.iter().map(|&l| l.is_finite().then_some(l)).collect()
}

fn decode_logs(v: Vec<Option<f64>>) -> Vec<f64> {
    v.into_iter().map(|l| l.unwrap_or(f64::NEG_INFINITY)).collect()
}

impl TryFrom<RawParams> for ModelParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        let mut p = match (raw.ln_x, raw.ln_y) {
            (Some(lx), Some(ly)) => {
                let p = ModelParams::from_logs(raw.kind, raw.nodes, decode_logs(lx), decode_logs(ly))?;
                for (i, (a, b)) in p.x.iter().zip(&raw.x).chain(p.y.iter().zip(&raw.y)).enumerate() {
                    if (a - b).abs() > 1e-12 * a.abs().max(1.0) {
                        return Err(Error::InvalidParams(format!("entry {i}: logarithm disagrees with value {b}")));
                    }
                }
                p
            }
            _ => ModelParams::new(raw.kind, raw.nodes, raw.x, raw.y)?,
        };
        p.diagnostics = raw.diagnostics;
        Ok(p)
    }
}

impl From<ModelParams> for RawParams {
    fn from(p: ModelParams) -> Self {
        RawParams {
            kind: p.kind,
            ln_x: Some(encode_logs(&p.ln_x)),
            ln_y: Some(encode_logs(&p.ln_y)),
            nodes: p.nodes,
            x: p.x,
            y: p.y,
            diagnostics: p.diagnostics,
        }
    }
}

impl ModelParams {
    pub fn new(kind: ModelKind, nodes: Vec<String>, x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let ln_x = x.iter().map(|&v| libm::log(v)).collect();
        let ln_y = y.iter().map(|&v| libm::log(v)).collect();
        let p = Self { kind, nodes, x, y, ln_x, ln_y, diagnostics: FitDiagnostics::default() };
        p.validate()?;
        Ok(p)
    }

    /// Parameters given by `ln x_i` and `ln y_i`; `-∞` stands for a zero multiplier.
    pub fn from_logs(kind: ModelKind, nodes: Vec<String>, ln_x: Vec<f64>, ln_y: Vec<f64>) -> Result<Self> {
        for (i, v) in ln_x.iter().chain(&ln_y).enumerate() {
            if v.is_nan() || *v == f64::INFINITY {
                return Err(Error::InvalidParams(format!("logarithm {i} is {v}")));
            }
        }
        let x = ln_x.iter().map(|&v| libm::exp(v)).collect();
        let y = ln_y.iter().map(|&v| libm::exp(v)).collect();
        let p = Self { kind, nodes, x, y, ln_x, ln_y, diagnostics: FitDiagnostics::default() };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        let n = self.nodes.len();
        for len in [self.x.len(), self.y.len(), self.ln_x.len(), self.ln_y.len()] {
            if len != n {
                return Err(Error::DimensionMismatch { expected: n, found: len });
            }
        }
        for (i, (&xi, &yi)) in self.x.iter().zip(&self.y).enumerate() {
            if !xi.is_finite() || xi < 0.0 {
                return Err(Error::InvalidParams(format!("x[{i}] = {xi} must be finite and non-negative")));
            }
            if !yi.is_finite() || yi < 0.0 {
                return Err(Error::InvalidParams(format!("y[{i}] = {yi} must be finite and non-negative")));
            }
            match self.kind {
                ModelKind::Wcm if xi != 1.0 || self.ln_x[i] != 0.0 => {
                    return Err(Error::InvalidParams(format!("WCM requires x[{i}] = 1, found {xi}")));
                }
                ModelKind::Ecm if (xi == 0.0) != (yi == 0.0) => {
                    return Err(Error::InvalidParams(format!(
                        "x[{i}] = {xi} and y[{i}] = {yi}: a multiplier vanishes only on isolated nodes"
                    )));
                }
                _ => {}
            }
        }
        // y_i y_j < 1 over all dyads reduces to the two largest entries
        let (mut top, mut second) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for &l in &self.ln_y {
            if l > top {
                second = top;
                top = l;
            } else if l > second {
                second = l;
            }
        }
        if n >= 2 && top + second >= 0.0 {
            return Err(Error::InvalidParams(format!(
                "y products must stay below 1, largest pair gives {}",
                libm::exp(top + second)
            )));
        }
        Ok(())
    }

    /// WCM parameters (`x ≡ 1`).
    pub fn wcm(nodes: Vec<String>, y: Vec<f64>) -> Result<Self> {
        let x = vec![1.0; y.len()];
        Self::new(ModelKind::Wcm, nodes, x, y)
    }

    /// ECM parameters.
    pub fn ecm(nodes: Vec<String>, x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        Self::new(ModelKind::Ecm, nodes, x, y)
    }

    pub fn with_diagnostics(mut self, diagnostics: FitDiagnostics) -> Self {
        self.diagnostics = diagnostics;
        self
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn ln_x(&self) -> &[f64] {
        &self.ln_x
    }

    pub fn ln_y(&self) -> &[f64] {
        &self.ln_y
    }

    pub fn diagnostics(&self) -> &FitDiagnostics {
        &self.diagnostics
    }

    pub fn is_isolated(&self, i: usize) -> bool {
        self.y[i] == 0.0 || self.x[i] == 0.0
    }

    /// Kernel of dyad `(i, j)`.
    pub fn dyad(&self, i: usize, j: usize) -> Result<Dyad> {
        check_index(i, self.len())?;
        check_index(j, self.len())?;
        if i == j {
            return Err(Error::SelfPair(i));
        }
        Ok(self.dyad_unchecked(i, j))
    }

    pub(crate) fn dyad_unchecked(&self, i: usize, j: usize) -> Dyad {
        Dyad::from_logs(self.ln_x[i] + self.ln_x[j], self.ln_y[i] + self.ln_y[j])
    }

    pub fn pair_pmf(&self, i: usize, j: usize, w: u64) -> Result<f64> {
        Ok(self.dyad(i, j)?.pmf(w))
    }

    pub fn connection_probability(&self, i: usize, j: usize) -> Result<f64> {
        Ok(self.dyad(i, j)?.connection_probability())
    }

    pub fn expected_weight(&self, i: usize, j: usize) -> Result<f64> {
        Ok(self.dyad(i, j)?.expected_weight())
    }

    pub fn expected_weight_power(&self, i: usize, j: usize, gamma: f64) -> Result<f64> {
        self.dyad(i, j)?.expected_weight_power(gamma)
    }

    /// Dense matrices of `p_ij`, `⟨w_ij⟩` and `⟨w_ij^{1/3}⟩`.
    pub fn pair_matrices(&self) -> PairMatrices {
        let n = self.len();
        let mut m = PairMatrices::zeros(n);
        for i in 0..n {
            for j in (i + 1)..n {
                let d = self.dyad_unchecked(i, j);
                let p = d.connection_probability();
                let w = d.expected_weight();
                // the invariant keeps z < 1, so the power cannot fail
                let c = d.expected_weight_power(1.0 / 3.0).unwrap_or(f64::NAN);
                m.set(i, j, p, w, c);
            }
        }
        m
    }
}

/// Distribution of a single dyad, determined by `x_i x_j` and `y_i y_j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dyad {
    xx: f64,
    z: f64,
    /// `1 - z`, computed without cancellation.
    omz: f64,
    ln_xx: f64,
    ln_z: f64,
}

impl Dyad {
    pub fn new(xx: f64, z: f64) -> Result<Self> {
        if !(xx.is_finite() && xx >= 0.0) {
            return Err(Error::InvalidParams(format!("x product {xx} must be finite and non-negative")));
        }
        if !(0.0..1.0).contains(&z) {
            return Err(Error::InvalidParams(format!("y product {z} must lie in [0, 1)")));
        }
        Ok(Self { xx, z, omz: 1.0 - z, ln_xx: libm::log(xx), ln_z: libm::log(z) })
    }

    /// From `ln(x_i x_j)` and `ln(y_i y_j) < 0`.
    pub fn from_logs(ln_xx: f64, ln_z: f64) -> Self {
        Self {
            xx: libm::exp(ln_xx),
            z: libm::exp(ln_z),
            omz: -libm::expm1(ln_z),
            ln_xx,
            ln_z,
        }
    }

    pub fn xx(&self) -> f64 {
        self.xx
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    /// `ln(y_i y_j)`, `-∞` when a multiplier vanishes.
    pub fn ln_z(&self) -> f64 {
        self.ln_z
    }

    /// `1 - y_i y_j` without cancellation.
    pub fn one_minus_z(&self) -> f64 {
        self.omz
    }

    fn denominator(&self) -> f64 {
        self.omz + self.xx * self.z
    }

    /// `q_ij(w)`.
    pub fn pmf(&self, w: u64) -> f64 {
        libm::exp(self.ln_pmf(w))
    }

    /// `ln q_ij(w)`, finite for large weights where `q_ij(w)` underflows.
    pub fn ln_pmf(&self, w: u64) -> f64 {
        let ln_omz = libm::log(self.omz);
        let ln_den = libm::log(self.denominator());
        if w == 0 {
            return ln_omz - ln_den;
        }
        if self.xx == 0.0 || self.z == 0.0 {
            return f64::NEG_INFINITY;
        }
        self.ln_xx + w as f64 * self.ln_z + ln_omz - ln_den
    }

    /// `p_ij = 1 - q_ij(0)`.
    pub fn connection_probability(&self) -> f64 {
        let num = self.xx * self.z;
        if num == 0.0 {
            return 0.0;
        }
        num / self.denominator()
    }

    /// `⟨w_ij⟩ = p_ij / (1 - y_i y_j)`.
    pub fn expected_weight(&self) -> f64 {
        self.connection_probability() / self.omz
    }

    /// `⟨w_ij^2⟩ = p_ij (1 + y_i y_j) / (1 - y_i y_j)^2`.
    pub fn expected_squared_weight(&self) -> f64 {
        self.connection_probability() * (1.0 + self.z) / (self.omz * self.omz)
    }

    /// `⟨w_ij^γ⟩` for `γ > 0`, through `Li_{-γ}(y_i y_j)`.
    pub fn expected_weight_power(&self, gamma: f64) -> Result<f64> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::Domain(format!("weight power {gamma} must be positive")));
        }
        if self.xx == 0.0 || self.z == 0.0 {
            return Ok(0.0);
        }
        let li = polylog::polylog_negative_order_log(gamma, self.z, -self.ln_z)?;
        Ok(self.xx * self.omz * li / self.denominator())
    }

    /// Probability that the pair carries weight larger than `w`.
    pub fn survival(&self, w: u64) -> f64 {
        self.connection_probability() * libm::exp(w as f64 * self.ln_z)
    }
}

/// Per-dyad expectations stored as symmetric `N×N` matrices with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct PairMatrices {
    n: usize,
    /// `p_ij`
    pub probability: Vec<f64>,
    /// `⟨w_ij⟩`
    pub weight: Vec<f64>,
    /// `⟨w_ij^{1/3}⟩`
    pub cube_root_weight: Vec<f64>,
}

impl PairMatrices {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            probability: vec![0.0; n * n],
            weight: vec![0.0; n * n],
            cube_root_weight: vec![0.0; n * n],
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Sets all three entries of dyad `(i, j)` symmetrically.
    pub fn set(&mut self, i: usize, j: usize, probability: f64, weight: f64, cube_root_weight: f64) {
        let n = self.n;
        for idx in [i * n + j, j * n + i] {
            self.probability[idx] = probability;
            self.weight[idx] = weight;
            self.cube_root_weight[idx] = cube_root_weight;
        }
    }

    pub fn p(&self, i: usize, j: usize) -> f64 {
        self.probability[i * self.n + j]
    }

    pub fn w(&self, i: usize, j: usize) -> f64 {
        self.weight[i * self.n + j]
    }

    pub fn w3(&self, i: usize, j: usize) -> f64 {
        self.cube_root_weight[i * self.n + j]
    }

    /// The observed counterpart: `a_ij`, `w_ij` and `w_ij^{1/3}`.
    pub fn from_graph(graph: &WeightedGraph) -> Self {
        let mut m = Self::zeros(graph.len());
        for (i, j, w) in graph.edges() {
            let w = w as f64;
            m.set(i, j, 1.0, w, libm::cbrt(w));
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn two(x: f64, y: f64) -> ModelParams {
        ModelParams::ecm(vec!["a".to_string(), "b".to_string()], vec![x, x], vec![y, y]).unwrap()
    }

    #[test]
    fn hand_evaluated_kernel() {
        // x_i x_j = 2, y_i y_j = 0.5
        let p = two(2f64.sqrt(), 0.5f64.sqrt());
        assert_relative_eq!(p.pair_pmf(0, 1, 0).unwrap(), 1.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(p.pair_pmf(0, 1, 1).unwrap(), 1.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(p.pair_pmf(0, 1, 2).unwrap(), 1.0 / 6.0, max_relative = 1e-14);
        assert_relative_eq!(p.connection_probability(0, 1).unwrap(), 2.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(p.expected_weight(0, 1).unwrap(), 4.0 / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn wcm_reductions() {
        let p = ModelParams::wcm(vec!["a".into(), "b".into()], vec![0.5, 0.5]).unwrap();
        assert_relative_eq!(p.connection_probability(0, 1).unwrap(), 0.25, max_relative = 1e-15);
        let p = ModelParams::wcm(vec!["a".into(), "b".into()], vec![0.5f64.sqrt(); 2]).unwrap();
        assert_relative_eq!(p.expected_weight(0, 1).unwrap(), 1.0, max_relative = 1e-14);
        assert!(ModelParams::new(ModelKind::Wcm, vec!["a".into()], vec![2.0], vec![0.5]).is_err());
    }

    #[test]
    fn isolated_and_zero_cases() {
        let p = ModelParams::ecm(vec!["a".into(), "b".into()], vec![0.0, 1.0], vec![0.0, 0.5]).unwrap();
        assert_eq!(p.pair_pmf(0, 1, 0).unwrap(), 1.0);
        assert_eq!(p.pair_pmf(0, 1, 3).unwrap(), 0.0);
        assert_eq!(p.connection_probability(0, 1).unwrap(), 0.0);
        assert_eq!(p.expected_weight(0, 1).unwrap(), 0.0);
        assert_eq!(p.expected_weight_power(0, 1, 1.0 / 3.0).unwrap(), 0.0);
        assert_eq!(p.pair_pmf(1, 1, 0), Err(Error::SelfPair(1)));
        assert_eq!(Dyad::new(3.0, 0.0).unwrap().connection_probability(), 0.0);
    }

    #[test]
    fn weight_powers() {
        let d = Dyad::new(2.0, 0.5).unwrap();
        assert_relative_eq!(d.expected_weight_power(1.0).unwrap(), d.expected_weight(), max_relative = 1e-12);
        // x x = 1, y y = 0.5: ⟨w^{1/3}⟩ = 0.5 Li_{-1/3}(0.5); the oracle sums the series to l = 200
        let oracle: f64 = (1..=200).map(|l| libm::cbrt(l as f64) * libm::pow(0.5, l as f64)).sum();
        let d = Dyad::new(1.0, 0.5).unwrap();
        assert_relative_eq!(d.expected_weight_power(1.0 / 3.0).unwrap(), 0.5 * oracle, max_relative = 1e-12);
        assert!((0.5 * oracle - 0.6037).abs() < 1e-4);
        assert!(d.expected_weight_power(0.0).is_err());
    }

    #[test]
    fn invalid_params() {
        let nodes = vec!["a".to_string(), "b".to_string()];
        assert!(ModelParams::ecm(nodes.clone(), vec![1.0, 1.0], vec![1.0, 1.0]).is_err());
        assert!(ModelParams::ecm(nodes.clone(), vec![-1.0, 1.0], vec![0.5, 0.5]).is_err());
        assert!(ModelParams::ecm(nodes.clone(), vec![0.0, 1.0], vec![0.5, 0.5]).is_err());
        assert!(ModelParams::ecm(nodes.clone(), vec![1.0], vec![0.5, 0.5]).is_err());
        // a single y above one is admissible as long as every product is below one
        assert!(ModelParams::ecm(nodes, vec![1.0, 1.0], vec![1.5, 0.5]).is_ok());
    }

    fn dyads() -> impl Strategy<Value = Dyad> {
        (1e-3f64..50.0, 0.0f64..0.95).prop_map(|(xx, z)| Dyad::new(xx, z).unwrap())
    }

    proptest! {
        #[test]
        fn pmf_normalizes_and_matches_mean(d in dyads()) {
            let cutoff = 60u64;
            let mut total = 0.0;
            let mut mean = 0.0;
            for w in 0..=cutoff {
                let q = d.pmf(w);
                total += q;
                mean += w as f64 * q;
            }
            let tail = d.survival(cutoff);
            // E[w; w > c] = P(w > c) (c + 1/(1-z))
            let tail_mean = tail * (cutoff as f64 + 1.0 / (1.0 - d.z()));
            prop_assert!((total + tail - 1.0).abs() < 1e-12);
            prop_assert!((mean + tail_mean - d.expected_weight()).abs() <= 1e-10 * d.expected_weight().max(1.0));
        }

        #[test]
        fn link_probability_monotone(xx in 1e-3f64..20.0, z in 1e-3f64..0.9, bump in 1e-3f64..0.5) {
            let p = Dyad::new(xx, z).unwrap().connection_probability();
            prop_assert!(Dyad::new(xx * (1.0 + bump), z).unwrap().connection_probability() > p);
            let z2 = z + bump * (1.0 - z) * 0.5;
            prop_assert!(Dyad::new(xx, z2).unwrap().connection_probability() > p);
        }

        #[test]
        fn creation_beats_reinforcement_iff_extensive(xx in 1e-3f64..20.0, z in 1e-3f64..0.99) {
            let p = Dyad::new(xx, z).unwrap().connection_probability();
            if xx > 1.0 { prop_assert!(p > z) } else if xx < 1.0 { prop_assert!(p < z) }
        }
    }
}
