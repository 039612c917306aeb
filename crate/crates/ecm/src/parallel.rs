//! Rayon versions of the core evaluators. Each produces exactly the value of
//! its sequential counterpart because work is split into independent rows
//! and reassembled in index order.

use ecm_core::sampler::{graph_from_rows, sample_row};
use ecm_core::stats::{node_row, Margins, NodeRow, Provenance};
use ecm_core::{ModelParams, NodeStatistics, PairMatrices, WeightedGraph};
use rayon::prelude::*;

pub fn stats_from_pairs(pairs: &PairMatrices, nodes: Vec<String>, provenance: Provenance) -> NodeStatistics {
    let margins = Margins::new(pairs);
    let rows: Vec<NodeRow> = (0..pairs.len())
        .into_par_iter()
        .map(|i| node_row(pairs, &margins, i).expect("row index in range"))
        .collect();
    NodeStatistics::from_rows(nodes, provenance, &rows).expect("one row per node")
}

pub fn observed_stats(graph: &WeightedGraph) -> NodeStatistics {
    stats_from_pairs(&PairMatrices::from_graph(graph), graph.nodes().to_vec(), Provenance::Observed)
}

pub fn expected_stats(params: &ModelParams) -> NodeStatistics {
    stats_from_pairs(&params.pair_matrices(), params.nodes().to_vec(), Provenance::Expected(params.kind()))
}

pub fn sample_graph(params: &ModelParams, seed: u64, sample: u64) -> WeightedGraph {
    let rows: Vec<_> = (0..params.len())
        .into_par_iter()
        .map(|i| sample_row(params, seed, sample, i).expect("row index in range"))
        .collect();
    graph_from_rows(params, &rows).expect("rows index valid dyads")
}

/// Runs `f` on sample indices `0..count` in parallel, returning results in
/// index order.
pub fn map_samples<T: Send, F: Fn(u64) -> T + Sync + Send>(count: usize, f: F) -> Vec<T> {
    (0..count as u64).into_par_iter().map(f).collect()
}
