//! Dyadic extensive/intensive bias of a fitted ECM.
//!
//! The product `x_i x_j` exceeds 1 exactly when creating a first unit of
//! weight between `i` and `j` is more probable than adding one more unit to
//! an existing link (`p_ij > y_i y_j`). The property belongs to the dyad: a
//! single `x_i` does not determine it.

use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_index, Error, Result};
use crate::model::{ModelKind, ModelParams};

/// Default half-width of the neutral band around 1.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BiasClass {
    Extensive,
    Intensive,
    Neutral,
}

impl BiasClass {
    /// Classifies a bias value against the band `[1 - tolerance, 1 + tolerance]`.
    pub fn classify(bias: f64, tolerance: f64) -> Self {
        if bias > 1.0 + tolerance {
            Self::Extensive
        } else if bias < 1.0 - tolerance {
            Self::Intensive
        } else {
            Self::Neutral
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Extensive => "extensive",
            Self::Intensive => "intensive",
            Self::Neutral => "neutral",
        }
    }
}

impl fmt::Display for BiasClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn require_ecm(params: &ModelParams) -> Result<()> {
    match params.kind() {
        ModelKind::Ecm => Ok(()),
        ModelKind::Wcm => Err(Error::Unsupported(
            "the WCM fixes x_i x_j = 1, so every dyad is neutral by assumption; bias needs ECM parameters".into(),
        )),
    }
}

/// `x_i x_j` for an ECM fit.
pub fn pair_bias(params: &ModelParams, i: usize, j: usize) -> Result<f64> {
    require_ecm(params)?;
    check_index(i, params.len())?;
    check_index(j, params.len())?;
    if i == j {
        return Err(Error::SelfPair(i));
    }
    Ok(params.x()[i] * params.x()[j])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairBias {
    pub i: usize,
    pub j: usize,
    pub bias: f64,
    pub class: BiasClass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasReport {
    pub tolerance: f64,
    /// Classified dyads with `i < j`, in row-major order.
    pub pairs: Vec<PairBias>,
    pub extensive: usize,
    pub intensive: usize,
    pub neutral: usize,
    /// Dyads with an isolated endpoint.
    pub excluded: usize,
}

impl BiasReport {
    pub fn classified(&self) -> usize {
        self.pairs.len()
    }

    fn fraction(&self, count: usize) -> f64 {
        if self.pairs.is_empty() {
            0.0
        } else {
            count as f64 / self.pairs.len() as f64
        }
    }

    pub fn extensive_fraction(&self) -> f64 {
        self.fraction(self.extensive)
    }

    pub fn intensive_fraction(&self) -> f64 {
        self.fraction(self.intensive)
    }

    pub fn neutral_fraction(&self) -> f64 {
        self.fraction(self.neutral)
    }
}

/// Classifies every dyad whose endpoints both have `x > 0`.
pub fn bias_report(params: &ModelParams, tolerance: f64) -> Result<BiasReport> {
    require_ecm(params)?;
    if !(tolerance >= 0.0 && tolerance.is_finite()) {
        return Err(Error::InvalidInput(alloc::format!("bias tolerance {tolerance} must be finite and non-negative")));
    }
    let n = params.len();
    let x = params.x();
    let mut report = BiasReport { tolerance, pairs: Vec::new(), extensive: 0, intensive: 0, neutral: 0, excluded: 0 };
    for i in 0..n {
        for j in (i + 1)..n {
            if x[i] == 0.0 || x[j] == 0.0 {
                report.excluded += 1;
                continue;
            }
            let bias = x[i] * x[j];
            let class = BiasClass::classify(bias, tolerance);
            match class {
                BiasClass::Extensive => report.extensive += 1,
                BiasClass::Intensive => report.intensive += 1,
                BiasClass::Neutral => report.neutral += 1,
            }
            report.pairs.push(PairBias { i, j, bias, class });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use alloc::string::String;
    use alloc::vec;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("n{i}")).collect()
    }

    #[test]
    fn mixed_vector() {
        let p = ModelParams::ecm(labels(3), vec![0.5, 0.5, 4.0], vec![0.3; 3]).unwrap();
        let r = bias_report(&p, DEFAULT_TOLERANCE).unwrap();
        let classes: Vec<_> = r.pairs.iter().map(|b| (b.i, b.j, b.bias, b.class)).collect();
        assert_eq!(
            classes,
            vec![
                (0, 1, 0.25, BiasClass::Intensive),
                (0, 2, 2.0, BiasClass::Extensive),
                (1, 2, 2.0, BiasClass::Extensive),
            ]
        );
        assert_eq!(pair_bias(&p, 2, 0).unwrap(), 2.0);
        assert!(pair_bias(&p, 1, 1).is_err());
    }

    #[test]
    fn isolated_pairs_are_excluded() {
        let p = ModelParams::ecm(labels(3), vec![2.0, 1.0, 0.0], vec![0.3, 0.3, 0.0]).unwrap();
        assert_eq!(pair_bias(&p, 0, 1).unwrap(), 2.0);
        assert_eq!(pair_bias(&p, 0, 2).unwrap(), 0.0);
        let r = bias_report(&p, DEFAULT_TOLERANCE).unwrap();
        assert_eq!((r.classified(), r.excluded), (1, 2));
        assert_eq!(r.extensive_fraction(), 1.0);
    }

    #[test]
    fn exact_unity_is_neutral() {
        let p = ModelParams::ecm(labels(3), vec![1.0; 3], vec![0.3; 3]).unwrap();
        let r = bias_report(&p, 0.0).unwrap();
        assert_eq!(r.neutral, 3);
        assert_eq!(r.neutral_fraction(), 1.0);
    }

    #[test]
    fn wcm_is_rejected() {
        let p = ModelParams::wcm(labels(3), vec![0.3; 3]).unwrap();
        assert!(matches!(pair_bias(&p, 0, 1), Err(Error::Unsupported(_))));
        assert!(bias_report(&p, 0.0).is_err());
    }
}
