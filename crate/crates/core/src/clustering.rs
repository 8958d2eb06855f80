//! Community detection and the pair-agreement precision index.
//!
//! Communities come from deterministic greedy modularity agglomeration:
//! start from singletons and keep merging the two adjacent clusters whose
//! merge raises modularity the most. Gains are compared exactly as the
//! integer `2m·e_ij - deg_i·deg_j`, which is `ΔQ · 2m²`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// A partition of `0..n` into clusters with contiguous ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Clustering {
    assignment: Vec<usize>,
    clusters: usize,
}

impl Clustering {
    /// Relabels ids so clusters are numbered in order of their smallest
    /// member.
    pub fn from_assignment(raw: Vec<usize>) -> Self {
        let mut ids: BTreeMap<usize, usize> = BTreeMap::new();
        let mut assignment = Vec::with_capacity(raw.len());
        for c in raw {
            let next = ids.len();
            assignment.push(*ids.entry(c).or_insert(next));
        }
        Clustering {
            assignment,
            clusters: ids.len(),
        }
    }

    pub fn singletons(n: usize) -> Self {
        Clustering {
            assignment: (0..n).collect(),
            clusters: n,
        }
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn num_clusters(&self) -> usize {
        self.clusters
    }

    pub fn cluster_of(&self, v: usize) -> usize {
        self.assignment[v]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Members of each cluster, ascending.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.clusters];
        for (v, &c) in self.assignment.iter().enumerate() {
            out[c].push(v);
        }
        out
    }

    /// `vertex cluster_id` lines, using the graph's vertex labels.
    pub fn to_lines(&self, g: &Graph) -> String {
        let mut out = String::new();
        for (v, c) in self.assignment.iter().enumerate() {
            let _ = writeln!(out, "{} {c}", g.label(v));
        }
        out
    }
}

/// Greedy modularity agglomeration; ties go to the lexicographically
/// smallest cluster-id pair.
pub fn detect_communities(g: &Graph) -> Clustering {
    let n = g.n();
    let m2 = 2 * g.edge_count() as i128;
    // cluster id = smallest member; links[i][j] = edges between i and j
    let mut links: Vec<BTreeMap<usize, i128>> = vec![BTreeMap::new(); n];
    for (u, v) in g.edges() {
        *links[u].entry(v).or_insert(0) += 1;
        *links[v].entry(u).or_insert(0) += 1;
    }
    let mut degree: Vec<i128> = (0..n).map(|v| g.degree(v) as i128).collect();
    let mut parent: Vec<usize> = (0..n).collect();
    let mut alive = vec![true; n];

    loop {
        let mut best: Option<(i128, usize, usize)> = None;
        for i in (0..n).filter(|&i| alive[i]) {
            for (&j, &e) in links[i].range(i + 1..) {
                let gain = m2 * e - degree[i] * degree[j];
                if gain > 0 && best.is_none_or(|(b, _, _)| gain > b) {
                    best = Some((gain, i, j));
                }
            }
        }
        let Some((_, i, j)) = best else { break };
        // fold j into i (i < j keeps the id equal to the smallest member)
        let absorbed = std::mem::take(&mut links[j]);
        for (c, e) in absorbed {
            links[c].remove(&j);
            if c != i {
                *links[i].entry(c).or_insert(0) += e;
                *links[c].entry(i).or_insert(0) += e;
            }
        }
        links[i].remove(&j);
        degree[i] += degree[j];
        alive[j] = false;
        parent[j] = i;
    }

    let root = |mut v: usize| {
        while parent[v] != v {
            v = parent[v];
        }
        v
    };
    Clustering::from_assignment((0..n).map(root).collect())
}

fn pairs(x: u64) -> u64 {
    x * x.saturating_sub(1) / 2
}

/// Fraction of unordered vertex pairs on which the two clusterings agree
/// (together in both or apart in both). 1 for fewer than two vertices.
pub fn precision_index(c1: &Clustering, c2: &Clustering) -> Result<f64> {
    if c1.len() != c2.len() {
        return Err(Error::LengthMismatch {
            expected: c1.len(),
            actual: c2.len(),
        });
    }
    let n = c1.len() as u64;
    if n < 2 {
        return Ok(1.0);
    }
    let mut joint: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    let mut left = vec![0u64; c1.num_clusters()];
    let mut right = vec![0u64; c2.num_clusters()];
    for v in 0..c1.len() {
        let (a, b) = (c1.cluster_of(v), c2.cluster_of(v));
        *joint.entry((a, b)).or_insert(0) += 1;
        left[a] += 1;
        right[b] += 1;
    }
    let together_both: u64 = joint.values().map(|&x| pairs(x)).sum();
    let together_left: u64 = left.iter().map(|&x| pairs(x)).sum();
    let together_right: u64 = right.iter().map(|&x| pairs(x)).sum();
    let total = pairs(n);
    let disagree = together_left + together_right - 2 * together_both;
    Ok((total - disagree) as f64 / total as f64)
}

/// `1 - precision_index`.
pub fn precision_error(c1: &Clustering, c2: &Clustering) -> Result<f64> {
    precision_index(c1, c2).map(|p| 1.0 - p)
}
