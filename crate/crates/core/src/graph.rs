//! Simple undirected graphs with dense vertex ids.
//!
//! Vertices are `0..n`. Each vertex keeps the integer label it had in the
//! source file so that written output uses the original identities.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// An unordered vertex pair stored with `u < v`.
pub type Pair = (usize, usize);

/// Returns the canonical `(min, max)` form of a pair.
#[inline]
pub fn pair(u: usize, v: usize) -> Pair {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    labels: Vec<u64>,
    m: usize,
}

impl Graph {
    /// Graph with `n` isolated vertices labelled `0..n`.
    pub fn empty(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            labels: (0..n as u64).collect(),
            m: 0,
        }
    }

    /// Builds a graph from dense-id edges. Self-loops are an error; repeated
    /// pairs are kept once.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let (g, _) = Self::from_edges_counting(n, edges)?;
        Ok(g)
    }

    /// Like [`Graph::from_edges`] but also reports how many duplicates were dropped.
    pub fn from_edges_counting<I>(n: usize, edges: I) -> Result<(Self, usize)>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut set = BTreeSet::new();
        let mut duplicates = 0;
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Validation(format!(
                    "edge {{{u},{v}}} references a vertex outside 0..{n}"
                )));
            }
            if u == v {
                return Err(Error::Validation(format!("self-loop at vertex {u}")));
            }
            if !set.insert(pair(u, v)) {
                duplicates += 1;
            }
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &set {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let g = Graph {
            adj,
            labels: (0..n as u64).collect(),
            m: set.len(),
        };
        Ok((g, duplicates))
    }

    /// Replaces the vertex labels. `labels` must have one entry per vertex,
    /// strictly increasing so that label order agrees with id order.
    pub fn with_labels(mut self, labels: Vec<u64>) -> Result<Self> {
        if labels.len() != self.n() {
            return Err(Error::LengthMismatch {
                expected: self.n(),
                actual: labels.len(),
            });
        }
        if labels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Validation("labels must be strictly increasing".into()));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    /// Sorted neighbour list of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && u < self.n() && v < self.n() && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> u64 {
        self.labels[v]
    }

    /// True when labels are exactly `0..n`.
    pub fn has_identity_labels(&self) -> bool {
        self.labels.iter().enumerate().all(|(i, &l)| l == i as u64)
    }

    /// Canonical edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = Pair> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, list)| {
            let start = list.partition_point(|&w| w <= u);
            list[start..].iter().map(move |&v| (u, v))
        })
    }

    /// Applies an edit plan and returns the edited graph. `self` is untouched.
    pub fn apply_edits(&self, plan: &EditPlan) -> Result<Graph> {
        for &(u, v) in &plan.additions {
            if u >= v || v >= self.n() {
                return Err(Error::InvalidPlan(format!("addition {{{u},{v}}} is not a valid pair")));
            }
            if self.has_edge(u, v) {
                return Err(Error::InvalidPlan(format!("addition {{{u},{v}}} is already an edge")));
            }
        }
        for &(u, v) in &plan.deletions {
            if u >= v || v >= self.n() {
                return Err(Error::InvalidPlan(format!("deletion {{{u},{v}}} is not a valid pair")));
            }
            if !self.has_edge(u, v) {
                return Err(Error::InvalidPlan(format!("deletion {{{u},{v}}} is not an edge")));
            }
        }
        let mut adj = self.adj.clone();
        for &(u, v) in &plan.deletions {
            adj[u].retain(|&w| w != v);
            adj[v].retain(|&w| w != u);
        }
        for &(u, v) in &plan.additions {
            let pos = adj[u].partition_point(|&w| w < v);
            adj[u].insert(pos, v);
            let pos = adj[v].partition_point(|&w| w < u);
            adj[v].insert(pos, u);
        }
        Ok(Graph {
            adj,
            labels: self.labels.clone(),
            m: self.m + plan.additions.len() - plan.deletions.len(),
        })
    }

    /// Same graph with vertex `v` renamed to `perm[v]`. Labels are reset to `0..n`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Graph> {
        if perm.len() != self.n() {
            return Err(Error::LengthMismatch {
                expected: self.n(),
                actual: perm.len(),
            });
        }
        Graph::from_edges(self.n(), self.edges().map(|(u, v)| (perm[u], perm[v])))
    }
}

/// Edge additions and deletions to turn one graph into another, plus the
/// per-vertex degree slack a relaxed realization needed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EditPlan {
    pub additions: BTreeSet<Pair>,
    pub deletions: BTreeSet<Pair>,
    /// Net slack per vertex (`s+ - s-`). Empty or all zero in strict mode.
    pub slack: Vec<i64>,
}

impl EditPlan {
    pub fn is_empty(&self) -> bool {
        self.additions.is_empty() && self.deletions.is_empty()
    }

    /// Number of edge edits.
    pub fn len(&self) -> usize {
        self.additions.len() + self.deletions.len()
    }

    /// `Σ |slack(v)|`.
    pub fn total_slack(&self) -> i64 {
        self.slack.iter().map(|s| s.abs()).sum()
    }

    pub fn max_slack(&self) -> i64 {
        self.slack.iter().map(|s| s.abs()).max().unwrap_or(0)
    }

    /// Per-vertex counts of (additions, deletions) touching each vertex.
    pub fn incidence(&self, n: usize) -> (Vec<usize>, Vec<usize>) {
        let mut adds = vec![0; n];
        let mut dels = vec![0; n];
        for &(u, v) in &self.additions {
            adds[u] += 1;
            adds[v] += 1;
        }
        for &(u, v) in &self.deletions {
            dels[u] += 1;
            dels[v] += 1;
        }
        (adds, dels)
    }
}
