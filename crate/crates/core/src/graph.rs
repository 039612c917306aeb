//! Weighted undirected graphs and the directed flow matrices they are built from.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_index, Error, Result};

/// Dense directed real-valued matrix, e.g. one year of trade flows.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectedMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DirectedMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    /// Builds a matrix from row-major data, checking the flow invariants.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: row.len() });
            }
            data.extend_from_slice(row);
        }
        let m = Self { n, data };
        m.validate()?;
        Ok(m)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.n + j] = value;
    }

    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.n + j] += value;
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// Entrywise sum; both matrices must have the same dimension.
    pub fn add_matrix(&mut self, other: &DirectedMatrix) -> Result<()> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += *b;
        }
        Ok(())
    }

    /// Non-negative, finite entries and an empty diagonal.
    pub fn validate(&self) -> Result<()> {
        for i in 0..self.n {
            for j in 0..self.n {
                let v = self.get(i, j);
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidInput(format!(
                        "flow ({i}, {j}) = {v} is negative or not finite"
                    )));
                }
                if i == j && v != 0.0 {
                    return Err(Error::InvalidInput(format!("diagonal flow ({i}, {i}) = {v} is not zero")));
                }
            }
        }
        Ok(())
    }
}

/// Symmetric matrix of non-negative integer weights with an empty diagonal.
///
/// This is the substrate every model is fitted on. The binary adjacency
/// matrix is implicit: `a_ij = 1` exactly when `w_ij > 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedGraph {
    nodes: Vec<String>,
    weights: Vec<u64>,
}

impl WeightedGraph {
    pub fn empty(nodes: Vec<String>) -> Self {
        let n = nodes.len();
        Self { nodes, weights: vec![0; n * n] }
    }

    /// Nodes labelled `0..n`.
    pub fn with_size(n: usize) -> Self {
        Self::empty((0..n).map(|i| format!("{i}")).collect())
    }

    /// Builds a graph from undirected edges `(i, j, w)`; repeated edges add up.
    pub fn from_edges(nodes: Vec<String>, edges: &[(usize, usize, u64)]) -> Result<Self> {
        let mut g = Self::empty(nodes);
        for &(i, j, w) in edges {
            check_index(i, g.len())?;
            check_index(j, g.len())?;
            if i == j {
                return Err(Error::SelfPair(i));
            }
            let total = g
                .weight(i, j)
                .checked_add(w)
                .ok_or_else(|| Error::InvalidInput(format!("weight overflow on edge ({i}, {j})")))?;
            g.set_weight(i, j, total)?;
        }
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn weight(&self, i: usize, j: usize) -> u64 {
        self.weights[i * self.len() + j]
    }

    pub fn is_linked(&self, i: usize, j: usize) -> bool {
        self.weight(i, j) > 0
    }

    /// Sets `w_ij = w_ji = w`.
    pub fn set_weight(&mut self, i: usize, j: usize, w: u64) -> Result<()> {
        let n = self.len();
        check_index(i, n)?;
        check_index(j, n)?;
        if i == j {
            return Err(Error::SelfPair(i));
        }
        self.weights[i * n + j] = w;
        self.weights[j * n + i] = w;
        Ok(())
    }

    /// `Σ_{i<j} w_ij`.
    pub fn total_weight(&self) -> u128 {
        let n = self.len();
        let mut total = 0u128;
        for i in 0..n {
            for j in (i + 1)..n {
                total += u128::from(self.weight(i, j));
            }
        }
        total
    }

    pub fn edge_count(&self) -> usize {
        let n = self.len();
        (0..n).map(|i| ((i + 1)..n).filter(|&j| self.is_linked(i, j)).count()).sum()
    }

    /// Iterates over `(i, j, w)` with `i < j` and `w > 0`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        let n = self.len();
        (0..n).flat_map(move |i| {
            ((i + 1)..n).filter_map(move |j| {
                let w = self.weight(i, j);
                (w > 0).then_some((i, j, w))
            })
        })
    }

    pub fn local_constraints(&self) -> LocalConstraints {
        local_constraints(self)
    }

    /// Reorders nodes so that new node `k` is old node `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.len();
        if perm.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: perm.len() });
        }
        let mut seen = vec![false; n];
        for &p in perm {
            check_index(p, n)?;
            if core::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidInput(format!("index {p} repeated in permutation")));
            }
        }
        let nodes = perm.iter().map(|&p| self.nodes[p].clone()).collect();
        let mut g = Self::empty(nodes);
        for a in 0..n {
            for b in 0..n {
                g.weights[a * n + b] = self.weight(perm[a], perm[b]);
            }
        }
        Ok(g)
    }
}

/// Degree and strength sequences of a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalConstraints {
    pub degrees: Vec<usize>,
    pub strengths: Vec<u64>,
}

impl LocalConstraints {
    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    pub fn is_isolated(&self, i: usize) -> bool {
        self.degrees[i] == 0
    }
}

/// `k_i` counts the non-zero entries of row `i`, `s_i` sums them.
pub fn local_constraints(graph: &WeightedGraph) -> LocalConstraints {
    let n = graph.len();
    let mut degrees = vec![0usize; n];
    let mut strengths = vec![0u64; n];
    for i in 0..n {
        for j in 0..n {
            let w = graph.weight(i, j);
            if w > 0 {
                degrees[i] += 1;
                strengths[i] += w;
            }
        }
    }
    LocalConstraints { degrees, strengths }
}

/// Undirected graph whose weight is the nearest integer to the average of
/// the two directed flows. Ties round away from zero.
pub fn symmetrize_and_round(matrix: &DirectedMatrix, nodes: Vec<String>) -> Result<WeightedGraph> {
    let n = matrix.len();
    if nodes.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: nodes.len() });
    }
    matrix.validate()?;
    let mut g = WeightedGraph::empty(nodes);
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = libm::round((matrix.get(i, j) + matrix.get(j, i)) / 2.0);
            // 2^64 is exactly representable, u64::MAX is not
            if avg >= 18_446_744_073_709_551_616.0 {
                return Err(Error::InvalidInput(format!("weight {avg} of pair ({i}, {j}) overflows u64")));
            }
            g.set_weight(i, j, avg as u64)?;
        }
    }
    Ok(g)
}

/// Symmetric real matrix of weights divided by the total weight. Only used
/// for descriptive comparisons across snapshots; models are never fitted on it.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedWeights {
    n: usize,
    total: u128,
    data: Vec<f64>,
}

impl NormalizedWeights {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// The total weight `W_TOT` the entries were divided by.
    pub fn total_weight(&self) -> u128 {
        self.total
    }
}

pub fn normalize_total_weight(graph: &WeightedGraph) -> Result<NormalizedWeights> {
    let total = graph.total_weight();
    if total == 0 {
        return Err(Error::Degenerate("cannot normalize a graph with zero total weight".into()));
    }
    let n = graph.len();
    let scale = total as f64;
    let data = graph.weights.iter().map(|&w| w as f64 / scale).collect();
    Ok(NormalizedWeights { n, total, data })
}
