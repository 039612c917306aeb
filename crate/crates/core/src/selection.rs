//! Information-criterion comparison of the ECM against the WCM.

use alloc::format;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelKind;

/// Size-corrected Akaike criterion for `n` nodes.
///
/// ECM: `-2L + 4N + 8N(2N+1)/(N²-5N-2)`; WCM: `-2L + 2N + 4N(N+1)/(N²-3N-2)`.
pub fn aic_c(log_likelihood: f64, kind: ModelKind, n: usize) -> Result<f64> {
    let nf = n as f64;
    let (den, min_n) = match kind {
        ModelKind::Ecm => (nf * nf - 5.0 * nf - 2.0, 6),
        ModelKind::Wcm => (nf * nf - 3.0 * nf - 2.0, 4),
    };
    if den <= 0.0 {
        return Err(Error::Domain(format!(
            "AICc for the {kind} needs at least {min_n} nodes, got {n}"
        )));
    }
    let k = kind.parameter_count(n) as f64;
    // 2k(k+1)/(n-k-1) with n = N(N-1)/2 dyads
    Ok(-2.0 * log_likelihood + 2.0 * k + 4.0 * k * (k + 1.0) / den)
}

/// Number of dyads, the sample size used by [`bic`].
pub fn dyad_count(n: usize) -> f64 {
    let nf = n as f64;
    nf * (nf - 1.0) / 2.0
}

/// Bayesian criterion `k ln(N(N-1)/2) - 2L`.
pub fn bic(log_likelihood: f64, kind: ModelKind, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain(format!("BIC needs at least 2 nodes, got {n}")));
    }
    let k = kind.parameter_count(n) as f64;
    Ok(k * libm::log(dyad_count(n)) - 2.0 * log_likelihood)
}

/// Criterion weights `(w_ECM, w_WCM)` from two criterion values.
///
/// Evaluated as a logistic function of the difference, so arbitrarily large
/// gaps saturate to 0 and 1 instead of producing `NaN`.
pub fn information_weights(ecm: f64, wcm: f64) -> (f64, f64) {
    let best = ecm.min(wcm);
    let a = libm::exp(-(ecm - best) / 2.0);
    let b = libm::exp(-(wcm - best) / 2.0);
    let w_ecm = a / (a + b);
    let w_wcm = b / (a + b);
    (w_ecm, w_wcm)
}

/// Criterion values of one model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelScore {
    pub kind: ModelKind,
    pub log_likelihood: f64,
    pub parameters: usize,
    pub aic_c: f64,
    pub bic: f64,
}

impl ModelScore {
    pub fn new(kind: ModelKind, log_likelihood: f64, n: usize) -> Result<Self> {
        Ok(Self {
            kind,
            log_likelihood,
            parameters: kind.parameter_count(n),
            aic_c: aic_c(log_likelihood, kind, n)?,
            bic: bic(log_likelihood, kind, n)?,
        })
    }
}

/// ECM versus WCM on one network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelComparison {
    pub nodes: usize,
    pub ecm: ModelScore,
    pub wcm: ModelScore,
    pub aic_c_weight_ecm: f64,
    pub aic_c_weight_wcm: f64,
    pub bic_weight_ecm: f64,
    pub bic_weight_wcm: f64,
}

/// Slack granted to the nesting check, relative to `|L|`.
pub const NESTING_TOLERANCE: f64 = 1e-9;

impl ModelComparison {
    /// Compares fitted log-likelihoods on an `n`-node network. Fails if the
    /// ECM likelihood falls below the WCM one, which is impossible at the
    /// true maxima because the WCM is a restriction of the ECM.
    pub fn new(n: usize, ecm_log_likelihood: f64, wcm_log_likelihood: f64) -> Result<Self> {
        let slack = NESTING_TOLERANCE * ecm_log_likelihood.abs().max(wcm_log_likelihood.abs()).max(1.0);
        if ecm_log_likelihood.is_nan() || wcm_log_likelihood.is_nan() || ecm_log_likelihood < wcm_log_likelihood - slack {
            return Err(Error::NestingViolated { ecm: ecm_log_likelihood, wcm: wcm_log_likelihood });
        }
        let ecm = ModelScore::new(ModelKind::Ecm, ecm_log_likelihood, n)?;
        let wcm = ModelScore::new(ModelKind::Wcm, wcm_log_likelihood, n)?;
        let (aic_c_weight_ecm, aic_c_weight_wcm) = information_weights(ecm.aic_c, wcm.aic_c);
        let (bic_weight_ecm, bic_weight_wcm) = information_weights(ecm.bic, wcm.bic);
        Ok(Self { nodes: n, ecm, wcm, aic_c_weight_ecm, aic_c_weight_wcm, bic_weight_ecm, bic_weight_wcm })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn published_criteria_give_certain_weights() {
        let (e, w) = information_weights(165_731.0, 209_972.0);
        assert_eq!((e, w), (1.0, 0.0));
    }

    #[test]
    fn logistic_form() {
        let (e, w) = information_weights(100.0, 102.0);
        assert_relative_eq!(e, 0.731_058_578_630_004_9, max_relative = 1e-14);
        assert_relative_eq!(w, 0.268_941_421_369_995_1, max_relative = 1e-14);
        assert_eq!(information_weights(5.0, 5.0), (0.5, 0.5));
        let shifted = information_weights(100.0 + 1e4, 102.0 + 1e4);
        assert_relative_eq!(shifted.0, e, max_relative = 1e-14);
        let (a, b) = information_weights(0.0, 1e6);
        assert_eq!((a, b), (1.0, 0.0));
        let (a, b) = information_weights(1e6, -1e6);
        assert_eq!((a, b), (0.0, 1.0));
    }

    #[test]
    fn published_bic_minus_aicc_matches_dyad_convention() {
        // L cancels in BIC - AICc; with N = 162 countries the published
        // differences are 211179 - 209972 and 168137 - 165731.
        let n = 162;
        let wcm = bic(0.0, ModelKind::Wcm, n).unwrap() - aic_c(0.0, ModelKind::Wcm, n).unwrap();
        let ecm = bic(0.0, ModelKind::Ecm, n).unwrap() - aic_c(0.0, ModelKind::Ecm, n).unwrap();
        assert!((wcm - 1207.0).abs() < 1.0, "{wcm}");
        assert!((ecm - 2406.0).abs() < 1.0, "{ecm}");
    }

    #[test]
    fn penalties() {
        for n in [7, 10, 50, 162, 1000] {
            let e = aic_c(0.0, ModelKind::Ecm, n).unwrap();
            let w = aic_c(0.0, ModelKind::Wcm, n).unwrap();
            assert!(e > w);
            assert!(e >= 4.0 * n as f64);
        }
        let big = aic_c(0.0, ModelKind::Ecm, 1_000_000).unwrap();
        assert_relative_eq!(big, 4e6, max_relative = 1e-5);
        assert!(aic_c(0.0, ModelKind::Ecm, 5).is_err());
        assert!(aic_c(0.0, ModelKind::Wcm, 3).is_err());
        assert!(aic_c(0.0, ModelKind::Wcm, 4).is_ok());
        assert_eq!(bic(-3.0, ModelKind::Ecm, 2).unwrap(), 6.0);
        assert!(bic(0.0, ModelKind::Ecm, 1).is_err());
    }

    #[test]
    fn comparison_enforces_nesting() {
        let c = ModelComparison::new(20, -100.0, -150.0).unwrap();
        assert_relative_eq!(c.aic_c_weight_ecm + c.aic_c_weight_wcm, 1.0);
        assert_relative_eq!(c.bic_weight_ecm + c.bic_weight_wcm, 1.0);
        assert!(c.ecm.aic_c >= -2.0 * c.ecm.log_likelihood);
        assert!(matches!(ModelComparison::new(20, -150.0, -100.0), Err(Error::NestingViolated { .. })));
    }
}
