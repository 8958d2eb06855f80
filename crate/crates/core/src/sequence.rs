//! Descending degree sequences tied to concrete vertices.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Degrees sorted in descending order. `order[i]` is the vertex at sorted
/// position `i`; equal values are ordered by ascending vertex id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeSequence {
    values: Vec<usize>,
    order: Vec<usize>,
}

/// An anonymized sequence uses the same representation.
pub type TargetSequence = DegreeSequence;

impl DegreeSequence {
    /// Sorts per-vertex degrees (indexed by vertex id).
    pub fn from_vertex_degrees(degrees: &[usize]) -> Self {
        let mut order: Vec<usize> = (0..degrees.len()).collect();
        order.sort_by(|&a, &b| degrees[b].cmp(&degrees[a]).then(a.cmp(&b)));
        let values = order.iter().map(|&v| degrees[v]).collect();
        DegreeSequence { values, order }
    }

    /// Validating constructor: `values` descending, `order` a permutation.
    pub fn new(values: Vec<usize>, order: Vec<usize>) -> Result<Self> {
        if values.len() != order.len() {
            return Err(Error::LengthMismatch {
                expected: values.len(),
                actual: order.len(),
            });
        }
        if values.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Parameter("sequence is not descending".into()));
        }
        let mut seen = vec![false; order.len()];
        for &v in &order {
            if v >= seen.len() || std::mem::replace(&mut seen[v], true) {
                return Err(Error::Parameter("order is not a permutation".into()));
            }
        }
        Ok(DegreeSequence { values, order })
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> usize {
        self.values.iter().sum()
    }

    /// Inverse of `order`: sorted position of each vertex.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.order.len()];
        for (i, &v) in self.order.iter().enumerate() {
            pos[v] = i;
        }
        pos
    }

    /// Value for each vertex id.
    pub fn by_vertex(&self) -> Vec<usize> {
        let mut out = vec![0; self.order.len()];
        for (i, &v) in self.order.iter().enumerate() {
            out[v] = self.values[i];
        }
        out
    }
}

/// `D(G)`: the graph's degrees in descending order.
pub fn degree_sequence(g: &Graph) -> DegreeSequence {
    DegreeSequence::from_vertex_degrees(&g.degrees())
}
