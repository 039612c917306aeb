//! Maximum-entropy null models for integer-weighted undirected networks.
//!
//! The crate fits the enhanced configuration model (degrees and strengths
//! constrained) and the weighted configuration model (strengths only),
//! evaluates expected higher-order statistics in closed form, samples the
//! ensembles exactly, compares the two models with information criteria and
//! reports the per-dyad extensive/intensive bias.
//!
//! It is `no_std` and only needs an allocator; file formats and the command
//! line live in the `ecm-tools` crate.
#![no_std]

extern crate alloc;

pub mod bias;
pub mod error;
pub mod graph;
pub mod model;
pub mod multiplex;
pub mod polylog;
pub mod sampler;
pub mod selection;
pub mod solver;
pub mod stats;
pub mod summary;

pub use error::{Error, Result};
pub use graph::{
    local_constraints, normalize_total_weight, symmetrize_and_round, DirectedMatrix, LocalConstraints,
    NormalizedWeights, WeightedGraph,
};
pub use model::{Dyad, FitDiagnostics, ModelKind, ModelParams, PairMatrices};
pub use multiplex::{LayerSelection, MultiplexDataset, TOP14_CODES};
pub use polylog::polylog_negative_order;
pub use solver::{fit, fit_with_trace, log_likelihood, residuals, FitConfig, FitError, Residuals, TraceRow};
pub use bias::{bias_report, pair_bias, BiasClass, BiasReport, PairBias};
pub use sampler::{ensemble_interval, sample_graph, Interval, SampleConfig};
pub use selection::{aic_c, bic, information_weights, ModelComparison, ModelScore};
pub use stats::{expected_stats, observed_stats, NodeStatistics, Provenance, Statistic};
pub use summary::{panel_summary, PanelSummary};
