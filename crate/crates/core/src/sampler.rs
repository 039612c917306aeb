//! Exact sampling from the ECM/WCM ensembles.
//!
//! Each dyad is drawn independently: a first unit of weight with probability
//! `p_ij`, then a geometric number of further units with continuation
//! probability `y_i y_j`. The geometric part is drawn by inverting its CDF,
//! so the cost per dyad does not grow as `y_i y_j → 1`.
//!
//! Every dyad of every sample owns its random stream, keyed by
//! `(seed, sample, min(i, j), max(i, j))`. Samples can therefore be produced
//! in any order, on any number of threads, with identical results.

use alloc::format;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{check_index, Error, Result};
use crate::graph::WeightedGraph;
use crate::model::{Dyad, ModelParams};

/// Smallest sample count accepted by the percentile intervals.
pub const MIN_PERCENTILE_SAMPLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleConfig {
    pub sample_count: usize,
    pub seed: u64,
    /// Two-sided significance level; intervals cover `1 - alpha`.
    pub alpha: f64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        Self { sample_count: 1000, seed: 0, alpha: 0.05 }
    }
}

impl SampleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sample_count == 0 {
            return Err(Error::InvalidInput("sample count must be at least 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidInput(format!("alpha {} must lie in (0, 1)", self.alpha)));
        }
        Ok(())
    }
}

/// The random stream of dyad `(i, j)` in sample `sample`.
pub fn pair_rng(seed: u64, sample: u64, i: usize, j: usize) -> ChaCha8Rng {
    let (lo, hi) = if i < j { (i, j) } else { (j, i) };
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&sample.to_le_bytes());
    key[16..24].copy_from_slice(&(lo as u64).to_le_bytes());
    key[24..].copy_from_slice(&(hi as u64).to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Uniform on `[0, 1)` with 53 random bits.
fn unit(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// One draw from the weight distribution of `dyad`.
pub fn sample_pair_weight(dyad: &Dyad, rng: &mut impl RngCore) -> u64 {
    let p = dyad.connection_probability();
    if unit(rng) >= p {
        return 0;
    }
    let ln_z = dyad.ln_z();
    if ln_z == f64::NEG_INFINITY {
        return 1;
    }
    // P(extra ≥ m) = z^m; u ∈ (0, 1]
    let u = 1.0 - unit(rng);
    let extra = libm::floor(libm::log(u) / ln_z);
    if extra >= u64::MAX as f64 {
        u64::MAX
    } else {
        1u64.saturating_add(extra as u64)
    }
}

/// Sampled weights of all dyads `(i, j > i)` in row `i`.
pub fn sample_row(params: &ModelParams, seed: u64, sample: u64, i: usize) -> Result<Vec<(usize, u64)>> {
    let n = params.len();
    check_index(i, n)?;
    let mut out = Vec::new();
    if params.is_isolated(i) {
        return Ok(out);
    }
    for j in (i + 1)..n {
        if params.is_isolated(j) {
            continue;
        }
        let dyad = params.dyad_unchecked(i, j);
        let w = sample_pair_weight(&dyad, &mut pair_rng(seed, sample, i, j));
        if w > 0 {
            out.push((j, w));
        }
    }
    Ok(out)
}

/// Assembles a graph from per-row draws as produced by [`sample_row`].
pub fn graph_from_rows(params: &ModelParams, rows: &[Vec<(usize, u64)>]) -> Result<WeightedGraph> {
    let mut g = WeightedGraph::empty(params.nodes().to_vec());
    for (i, row) in rows.iter().enumerate() {
        for &(j, w) in row {
            g.set_weight(i, j, w)?;
        }
    }
    Ok(g)
}

/// Sample number `sample` of the ensemble.
pub fn sample_graph(params: &ModelParams, seed: u64, sample: u64) -> WeightedGraph {
    let rows: Vec<_> = (0..params.len())
        .map(|i| sample_row(params, seed, sample, i).expect("row index in range"))
        .collect();
    graph_from_rows(params, &rows).expect("rows index valid dyads")
}

/// Percentile interval of a scalar across samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub low: f64,
    pub high: f64,
    /// Samples in which the statistic was defined.
    pub defined_samples: usize,
}

/// Type-7 (linear interpolation) quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = libm::floor(h) as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// `alpha/2` and `1 - alpha/2` percentiles of the defined values; `None`
/// when the value is undefined in more than half of the samples.
pub fn interval_from_samples(values: &[Option<f64>], alpha: f64) -> Result<Option<Interval>> {
    if values.len() < MIN_PERCENTILE_SAMPLES {
        return Err(Error::InvalidInput(format!(
            "percentile intervals need at least {MIN_PERCENTILE_SAMPLES} samples, got {}",
            values.len()
        )));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidInput(format!("alpha {alpha} must lie in (0, 1)")));
    }
    let mut defined: Vec<f64> = values.iter().flatten().copied().collect();
    if 2 * defined.len() < values.len() {
        return Ok(None);
    }
    defined.sort_by(f64::total_cmp);
    Ok(Some(Interval {
        low: quantile_sorted(&defined, alpha / 2.0),
        high: quantile_sorted(&defined, 1.0 - alpha / 2.0),
        defined_samples: defined.len(),
    }))
}

/// Per-node percentile intervals of `statistic` over `config.sample_count`
/// sampled graphs.
pub fn ensemble_interval<F>(params: &ModelParams, mut statistic: F, config: &SampleConfig) -> Result<Vec<Option<Interval>>>
where
    F: FnMut(&WeightedGraph) -> Vec<Option<f64>>,
{
    config.validate()?;
    if config.sample_count < MIN_PERCENTILE_SAMPLES {
        return Err(Error::InvalidInput(format!(
            "percentile intervals need at least {MIN_PERCENTILE_SAMPLES} samples, got {}",
            config.sample_count
        )));
    }
    let n = params.len();
    let mut columns: Vec<Vec<Option<f64>>> = (0..n).map(|_| Vec::with_capacity(config.sample_count)).collect();
    for m in 0..config.sample_count {
        let g = sample_graph(params, config.seed, m as u64);
        let values = statistic(&g);
        if values.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: values.len() });
        }
        for (column, v) in columns.iter_mut().zip(values) {
            column.push(v);
        }
    }
    columns
        .iter()
        .map(|c| interval_from_samples(c, config.alpha))
        .collect()
}
