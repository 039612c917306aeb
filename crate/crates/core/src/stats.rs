//! Observed and expected higher-order node statistics.
//!
//! Both flavours evaluate the same four ratios over a [`PairMatrices`]
//! value. For an observed graph the matrices hold `a_ij`, `w_ij` and
//! `w_ij^{1/3}`; under a model they hold `p_ij`, `⟨w_ij⟩` and
//! `⟨w_ij^{1/3}⟩`, which is valid because dyads are independent. Expected
//! ratios are ratios of expectations, not expectations of ratios.
//!
//! A value is defined when its denominator is positive. On observed data
//! this means `k_i ≥ 1` for the nearest-neighbour averages and `k_i ≥ 2` for
//! the clustering coefficients.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_index, Error, Result};
use crate::graph::WeightedGraph;
use crate::model::{ModelKind, ModelParams, PairMatrices};

/// Where a set of statistics comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Observed,
    Expected(ModelKind),
}

impl Provenance {
    /// `observed`, `ecm` or `wcm`.
    pub fn label(self) -> &'static str {
        match self {
            Self::Observed => "observed",
            Self::Expected(kind) => kind.name(),
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// The four higher-order statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistic {
    /// Average nearest-neighbour degree.
    Knn,
    /// Binary clustering coefficient.
    C,
    /// Average nearest-neighbour strength.
    Snn,
    /// Weighted clustering coefficient.
    Cw,
}

impl Statistic {
    pub const ALL: [Statistic; 4] = [Self::Knn, Self::C, Self::Snn, Self::Cw];

    pub fn name(self) -> &'static str {
        match self {
            Self::Knn => "knn",
            Self::C => "c",
            Self::Snn => "snn",
            Self::Cw => "cw",
        }
    }

    /// Binary statistics are compared against degrees, weighted ones against strengths.
    pub fn is_weighted(self) -> bool {
        matches!(self, Self::Snn | Self::Cw)
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The statistics of one node.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NodeRow {
    pub degree: f64,
    pub strength: f64,
    pub knn: Option<f64>,
    pub c: Option<f64>,
    pub snn: Option<f64>,
    pub cw: Option<f64>,
}

/// Per-node statistics of a graph or of an ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeStatistics {
    pub nodes: Vec<String>,
    pub provenance: Provenance,
    pub degree: Vec<f64>,
    pub strength: Vec<f64>,
    pub knn: Vec<Option<f64>>,
    pub c: Vec<Option<f64>>,
    pub snn: Vec<Option<f64>>,
    pub cw: Vec<Option<f64>>,
}

impl NodeStatistics {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn values(&self, statistic: Statistic) -> &[Option<f64>] {
        match statistic {
            Statistic::Knn => &self.knn,
            Statistic::C => &self.c,
            Statistic::Snn => &self.snn,
            Statistic::Cw => &self.cw,
        }
    }

    /// The constraint a statistic is plotted against.
    pub fn constraint(&self, statistic: Statistic) -> &[f64] {
        if statistic.is_weighted() {
            &self.strength
        } else {
            &self.degree
        }
    }

    pub fn row(&self, i: usize) -> NodeRow {
        NodeRow {
            degree: self.degree[i],
            strength: self.strength[i],
            knn: self.knn[i],
            c: self.c[i],
            snn: self.snn[i],
            cw: self.cw[i],
        }
    }

    /// Assembles statistics from per-node rows, e.g. evaluated in parallel.
    pub fn from_rows(nodes: Vec<String>, provenance: Provenance, rows: &[NodeRow]) -> Result<Self> {
        if rows.len() != nodes.len() {
            return Err(Error::DimensionMismatch { expected: nodes.len(), found: rows.len() });
        }
        Ok(Self {
            nodes,
            provenance,
            degree: rows.iter().map(|r| r.degree).collect(),
            strength: rows.iter().map(|r| r.strength).collect(),
            knn: rows.iter().map(|r| r.knn).collect(),
            c: rows.iter().map(|r| r.c).collect(),
            snn: rows.iter().map(|r| r.snn).collect(),
            cw: rows.iter().map(|r| r.cw).collect(),
        })
    }

    /// Multiplies every weight-carrying quantity (`s`, `s^nn`, `c^w`) by
    /// `factor`; all three are homogeneous of degree one in the weights.
    /// With `factor = 1 / W_TOT` this yields the normalized description.
    pub fn scale_weights(&mut self, factor: f64) {
        for s in &mut self.strength {
            *s *= factor;
        }
        for v in self.snn.iter_mut().chain(self.cw.iter_mut()).flatten() {
            *v *= factor;
        }
    }
}

/// Row sums `Σ_j p_ij` and `Σ_j ⟨w_ij⟩` of the pair matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Margins {
    pub degree: Vec<f64>,
    pub strength: Vec<f64>,
}

impl Margins {
    pub fn new(pairs: &PairMatrices) -> Self {
        let n = pairs.len();
        let mut degree = Vec::with_capacity(n);
        let mut strength = Vec::with_capacity(n);
        for i in 0..n {
            let (mut k, mut s) = (0.0, 0.0);
            for j in 0..n {
                k += pairs.p(i, j);
                s += pairs.w(i, j);
            }
            degree.push(k);
            strength.push(s);
        }
        Self { degree, strength }
    }
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    (den > 0.0).then(|| num / den)
}

/// Statistics of node `i`; `O(N^2)`.
///
/// Rows are independent of each other, so callers may evaluate them in any
/// order or in parallel and obtain identical results.
pub fn node_row(pairs: &PairMatrices, margins: &Margins, i: usize) -> Result<NodeRow> {
    let n = pairs.len();
    check_index(i, n)?;
    if margins.degree.len() != n || margins.strength.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: margins.degree.len() });
    }
    let (mut knn_num, mut snn_num, mut sum_p2) = (0.0, 0.0, 0.0);
    let (mut triangles, mut weighted_triangles) = (0.0, 0.0);
    for j in 0..n {
        let pij = pairs.p(i, j);
        let cij = pairs.w3(i, j);
        if pij == 0.0 && cij == 0.0 {
            continue;
        }
        knn_num += pij * margins.degree[j];
        snn_num += pij * margins.strength[j];
        sum_p2 += pij * pij;
        // diagonal entries are zero, so j = k and i ∈ {j, k} drop out
        let (mut t, mut tw) = (0.0, 0.0);
        for k in 0..n {
            t += pairs.p(j, k) * pairs.p(k, i);
            tw += pairs.w3(j, k) * pairs.w3(k, i);
        }
        triangles += pij * t;
        weighted_triangles += cij * tw;
    }
    let k = margins.degree[i];
    // Σ_{j≠i} Σ_{k≠i,j} p_ij p_ki
    let wedges = (k * k - sum_p2).max(0.0);
    Ok(NodeRow {
        degree: k,
        strength: margins.strength[i],
        knn: ratio(knn_num, k),
        c: ratio(triangles, wedges),
        snn: ratio(snn_num, k),
        cw: ratio(weighted_triangles, wedges),
    })
}

/// Statistics of every node from pair matrices.
pub fn stats_from_pairs(pairs: &PairMatrices, nodes: Vec<String>, provenance: Provenance) -> Result<NodeStatistics> {
    if nodes.len() != pairs.len() {
        return Err(Error::DimensionMismatch { expected: pairs.len(), found: nodes.len() });
    }
    let margins = Margins::new(pairs);
    let rows = (0..pairs.len())
        .map(|i| node_row(pairs, &margins, i))
        .collect::<Result<Vec<_>>>()?;
    NodeStatistics::from_rows(nodes, provenance, &rows)
}

/// Observed statistics of `graph`.
pub fn observed_stats(graph: &WeightedGraph) -> NodeStatistics {
    let pairs = PairMatrices::from_graph(graph);
    // dimensions agree by construction
    stats_from_pairs(&pairs, graph.nodes().to_vec(), Provenance::Observed).expect("matching dimensions")
}

/// Expected statistics under fitted parameters.
pub fn expected_stats(params: &ModelParams) -> NodeStatistics {
    let pairs = params.pair_matrices();
    stats_from_pairs(&pairs, params.nodes().to_vec(), Provenance::Expected(params.kind())).expect("matching dimensions")
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use alloc::vec;
    use approx::assert_relative_eq;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("n{i}")).collect()
    }

    #[test]
    fn unit_triangle() {
        let g = WeightedGraph::from_edges(labels(3), &[(0, 1, 1), (1, 2, 1), (0, 2, 1)]).unwrap();
        let s = observed_stats(&g);
        for i in 0..3 {
            assert_eq!(s.knn[i], Some(2.0));
            assert_eq!(s.c[i], Some(1.0));
            assert_eq!(s.snn[i], Some(2.0));
            assert_relative_eq!(s.cw[i].unwrap(), 1.0, max_relative = 1e-15);
        }
        assert_eq!(s.provenance, Provenance::Observed);
    }

    #[test]
    fn star_definedness() {
        let g = WeightedGraph::from_edges(labels(4), &[(0, 1, 1), (0, 2, 1), (0, 3, 1)]).unwrap();
        let s = observed_stats(&g);
        assert_eq!(s.knn[0], Some(1.0));
        assert_eq!(s.c[0], Some(0.0));
        assert_eq!(s.cw[0], Some(0.0));
        for leaf in 1..4 {
            assert_eq!(s.knn[leaf], Some(3.0));
            assert_eq!(s.snn[leaf], Some(3.0));
            assert_eq!(s.c[leaf], None);
            assert_eq!(s.cw[leaf], None);
        }
    }

    #[test]
    fn heavy_triangle_weighted_clustering() {
        // ordered pairs (j, k) and (k, j) both contribute 8^{1/3} = 2
        let g = WeightedGraph::from_edges(labels(3), &[(0, 1, 8), (1, 2, 1), (0, 2, 1)]).unwrap();
        let s = observed_stats(&g);
        for i in 0..3 {
            assert_relative_eq!(s.cw[i].unwrap(), 2.0, max_relative = 1e-15);
        }
    }

    #[test]
    fn isolated_node_is_undefined_everywhere() {
        let g = WeightedGraph::from_edges(labels(3), &[(0, 1, 2)]).unwrap();
        let s = observed_stats(&g);
        assert_eq!(s.row(2), NodeRow { degree: 0.0, strength: 0.0, ..NodeRow::default() });
        let p = ModelParams::ecm(labels(3), vec![1.0, 1.0, 0.0], vec![0.5, 0.5, 0.0]).unwrap();
        let e = expected_stats(&p);
        assert_eq!(e.knn[2], None);
        assert_eq!(e.c[0], None, "two active nodes span no wedge");
    }

    #[test]
    fn scaling_weights() {
        let g = WeightedGraph::from_edges(labels(3), &[(0, 1, 8), (1, 2, 1), (0, 2, 1)]).unwrap();
        let mut s = observed_stats(&g);
        s.scale_weights(0.1);
        assert_relative_eq!(s.strength[0], 0.9);
        assert_relative_eq!(s.cw[0].unwrap(), 0.2);
        assert_eq!(s.c[0], Some(1.0));
        assert_eq!(s.degree[0], 2.0);
    }
}
