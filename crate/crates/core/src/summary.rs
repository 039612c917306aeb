//! Panel metrics of a list of node values: mean, spread, and the two
//! Pearson correlations used to compare observed and expected lists.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Metrics of one list. Every field is `None` when it is undefined: fewer
/// than two usable entries, or a correlation against a constant list.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PanelSummary {
    /// Entries of the list that are defined.
    pub count: usize,
    pub mean: Option<f64>,
    /// Population standard deviation.
    pub std: Option<f64>,
    /// Pearson correlation with the constraint list.
    pub corr_constraint: Option<f64>,
    /// Pearson correlation with the expected list.
    pub corr_expected: Option<f64>,
    /// Optional confidence bounds on the mean.
    pub ci: Option<(f64, f64)>,
}

impl PanelSummary {
    /// True when too few entries were defined to summarize at all.
    pub fn is_undefined(&self) -> bool {
        self.mean.is_none()
    }

    pub fn with_ci(mut self, low: f64, high: f64) -> Self {
        self.ci = Some((low, high));
        self
    }
}

/// Arithmetic mean of the defined entries, `None` below two of them.
pub fn mean(values: &[Option<f64>]) -> Option<f64> {
    let defined: Vec<f64> = values.iter().flatten().copied().collect();
    (defined.len() >= 2).then(|| defined.iter().sum::<f64>() / defined.len() as f64)
}

fn population_std(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let m = values.iter().sum::<f64>() / n;
    libm::sqrt(values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n)
}

/// Pearson correlation over the entries where both lists are defined.
pub fn pearson(a: &[Option<f64>], b: &[Option<f64>]) -> Result<Option<f64>> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), found: b.len() });
    }
    let pairs: Vec<(f64, f64)> = a
        .iter()
        .zip(b)
        .filter_map(|(x, y)| Some(((*x)?, (*y)?)))
        .collect();
    if pairs.len() < 2 {
        return Ok(None);
    }
    let n = pairs.len() as f64;
    let ma = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let mb = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in &pairs {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa == 0.0 || sbb == 0.0 {
        return Ok(None);
    }
    Ok(Some((sab / libm::sqrt(saa * sbb)).clamp(-1.0, 1.0)))
}

/// Summarizes `list` against its `constraint` and `expected` counterparts.
/// Undefined entries are excluded, pairwise for the correlations.
pub fn panel_summary(list: &[Option<f64>], constraint: &[f64], expected: &[Option<f64>]) -> Result<PanelSummary> {
    if constraint.len() != list.len() {
        return Err(Error::DimensionMismatch { expected: list.len(), found: constraint.len() });
    }
    if expected.len() != list.len() {
        return Err(Error::DimensionMismatch { expected: list.len(), found: expected.len() });
    }
    let defined: Vec<f64> = list.iter().flatten().copied().collect();
    if defined.len() < 2 {
        return Ok(PanelSummary { count: defined.len(), ..PanelSummary::default() });
    }
    let constraint: Vec<Option<f64>> = constraint.iter().map(|&c| Some(c)).collect();
    Ok(PanelSummary {
        count: defined.len(),
        mean: mean(list),
        std: Some(population_std(&defined)),
        corr_constraint: pearson(list, &constraint)?,
        corr_expected: pearson(list, expected)?,
        ci: None,
    })
}
