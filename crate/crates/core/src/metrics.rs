//! Utility measures and the before/after relative-error report.
//!
//! Seven measures are compared between the original and anonymized graph:
//! largest adjacency eigenvalue, algebraic connectivity, average shortest
//! path, harmonic mean distance, modularity, transitivity and mean subgraph
//! centrality.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use crate::clustering::Clustering;
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Largest graph handled by the dense eigensolver in [`eigen_metrics`].
pub const DENSE_LIMIT: usize = 2000;

/// Guard for relative errors against near-zero baselines.
pub const REL_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenMetrics {
    pub lambda_max_adj: f64,
    pub lambda2_lap: f64,
    /// Unit eigenvector belonging to `lambda_max_adj`.
    pub leading_vector: Vec<f64>,
}

pub fn adjacency_matrix(g: &Graph) -> DMatrix<f64> {
    let n = g.n();
    let mut a = DMatrix::zeros(n, n);
    for (u, v) in g.edges() {
        a[(u, v)] = 1.0;
        a[(v, u)] = 1.0;
    }
    a
}

/// `L = D - A`.
pub fn laplacian_matrix(g: &Graph) -> DMatrix<f64> {
    let mut l = -adjacency_matrix(g);
    for v in 0..g.n() {
        l[(v, v)] = g.degree(v) as f64;
    }
    l
}

/// Spectral measures; dense decomposition up to [`DENSE_LIMIT`] vertices,
/// power iteration beyond.
pub fn eigen_metrics(g: &Graph) -> EigenMetrics {
    if g.n() <= DENSE_LIMIT {
        dense_eigen_metrics(g)
    } else {
        power_eigen_metrics(g)
    }
}

pub fn dense_eigen_metrics(g: &Graph) -> EigenMetrics {
    let n = g.n();
    if n == 0 {
        return EigenMetrics {
            lambda_max_adj: 0.0,
            lambda2_lap: 0.0,
            leading_vector: Vec::new(),
        };
    }
    let adj = SymmetricEigen::new(adjacency_matrix(g));
    let top = (0..n)
        .max_by(|&i, &j| adj.eigenvalues[i].total_cmp(&adj.eigenvalues[j]))
        .expect("n > 0");
    let leading_vector = adj.eigenvectors.column(top).iter().copied().collect();

    let mut lap: Vec<f64> = SymmetricEigen::new(laplacian_matrix(g))
        .eigenvalues
        .iter()
        .copied()
        .collect();
    lap.sort_by(f64::total_cmp);
    let lambda2 = if n >= 2 { lap[1].max(0.0) } else { 0.0 };
    EigenMetrics {
        lambda_max_adj: adj.eigenvalues[top],
        lambda2_lap: lambda2,
        leading_vector,
    }
}

fn mul_adj(g: &Graph, x: &[f64], out: &mut [f64]) {
    for (v, o) in out.iter_mut().enumerate() {
        *o = g.neighbors(v).iter().map(|&w| x[w]).sum();
    }
}

fn normalize(x: &mut [f64]) -> f64 {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
    norm
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Dominant eigenpair of `apply` by power iteration with Rayleigh quotients.
/// `project` is applied after every step (used for deflation).
fn power_iteration(
    n: usize,
    mut apply: impl FnMut(&[f64], &mut [f64]),
    project: impl Fn(&mut [f64]),
) -> (f64, Vec<f64>) {
    // deterministic start with a little asymmetry so no eigenvector is missed
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.01 * ((i * 7919) % 101) as f64 / 101.0).collect();
    project(&mut x);
    if normalize(&mut x) == 0.0 {
        return (0.0, x);
    }
    let mut y = vec![0.0; n];
    let mut rq = f64::NAN;
    for _ in 0..200_000 {
        apply(&x, &mut y);
        project(&mut y);
        let next = dot(&x, &y);
        let residual = y
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - next * b).powi(2))
            .sum::<f64>()
            .sqrt();
        std::mem::swap(&mut x, &mut y);
        if normalize(&mut x) == 0.0 {
            return (0.0, x);
        }
        if residual < 1e-10 * (1.0 + next.abs()) || (next - rq).abs() < 1e-15 * (1.0 + next.abs()) {
            rq = next;
            break;
        }
        rq = next;
    }
    (rq, x)
}

/// Spectral measures by power iteration on shifted matrices.
pub fn power_eigen_metrics(g: &Graph) -> EigenMetrics {
    let n = g.n();
    let max_deg = (0..n).map(|v| g.degree(v)).max().unwrap_or(0) as f64;

    // A + cI is positive semidefinite for c = max degree
    let (shifted, leading_vector) = power_iteration(
        n,
        |x, out| {
            mul_adj(g, x, out);
            for (o, xi) in out.iter_mut().zip(x) {
                *o += max_deg * xi;
            }
        },
        |_| {},
    );

    // cI - L with the constant vector projected out; c bounds the spectrum of L
    let c = 2.0 * max_deg;
    let (top, _) = power_iteration(
        n,
        |x, out| {
            mul_adj(g, x, out);
            for (v, (o, xi)) in out.iter_mut().zip(x).enumerate() {
                *o += (c - g.degree(v) as f64) * xi;
            }
        },
        |x| {
            let mean = x.iter().sum::<f64>() / x.len().max(1) as f64;
            x.iter_mut().for_each(|v| *v -= mean);
        },
    );
    let lambda2 = if n >= 2 { (c - top).max(0.0) } else { 0.0 };
    EigenMetrics {
        lambda_max_adj: shifted - max_deg,
        lambda2_lap: lambda2,
        leading_vector,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceMetrics {
    /// Mean distance over connected unordered pairs; NaN when there are none.
    pub avg_path: f64,
    /// All pairs divided by the sum of reciprocal distances; infinite when
    /// no pair is connected.
    pub harmonic_mean_dist: f64,
    pub connected_pairs: u64,
}

fn bfs_from(g: &Graph, s: usize, dist: &mut [u32], queue: &mut Vec<usize>) -> (u64, f64, u64) {
    dist.iter_mut().for_each(|d| *d = u32::MAX);
    queue.clear();
    dist[s] = 0;
    queue.push(s);
    let mut head = 0;
    let (mut sum, mut recip, mut count) = (0u64, 0.0f64, 0u64);
    while head < queue.len() {
        let u = queue[head];
        head += 1;
        for &w in g.neighbors(u) {
            if dist[w] == u32::MAX {
                dist[w] = dist[u] + 1;
                queue.push(w);
                if w > s {
                    sum += dist[w] as u64;
                    recip += 1.0 / dist[w] as f64;
                    count += 1;
                }
            }
        }
    }
    (sum, recip, count)
}

/// All-pairs BFS. Sources run in parallel; totals are combined in vertex order.
pub fn distance_metrics(g: &Graph) -> DistanceMetrics {
    let n = g.n();
    let per_source: Vec<(u64, f64, u64)> = (0..n)
        .into_par_iter()
        .map_init(
            || (vec![u32::MAX; n], Vec::with_capacity(n)),
            |(dist, queue), s| bfs_from(g, s, dist, queue),
        )
        .collect();
    let (mut sum, mut recip, mut count) = (0u64, 0.0f64, 0u64);
    for (s, r, c) in per_source {
        sum += s;
        recip += r;
        count += c;
    }
    let all_pairs = (n as u64) * (n as u64).saturating_sub(1) / 2;
    DistanceMetrics {
        avg_path: if count == 0 {
            f64::NAN
        } else {
            sum as f64 / count as f64
        },
        harmonic_mean_dist: if recip == 0.0 {
            f64::INFINITY
        } else {
            all_pairs as f64 / recip
        },
        connected_pairs: count,
    }
}

/// Newman modularity of `partition`; 0 for an edgeless graph.
pub fn modularity(g: &Graph, partition: &Clustering) -> f64 {
    let m = g.edge_count() as f64;
    if m == 0.0 {
        return 0.0;
    }
    let k = partition.num_clusters();
    let mut inner = vec![0.0; k];
    let mut degree = vec![0.0; k];
    for v in 0..g.n() {
        degree[partition.cluster_of(v)] += g.degree(v) as f64;
    }
    for (u, v) in g.edges() {
        if partition.cluster_of(u) == partition.cluster_of(v) {
            inner[partition.cluster_of(u)] += 1.0;
        }
    }
    inner
        .iter()
        .zip(&degree)
        .map(|(e, d)| e / m - (d / (2.0 * m)).powi(2))
        .sum()
}

pub fn triangle_count(g: &Graph) -> u64 {
    let mut count = 0;
    for (u, v) in g.edges() {
        let (a, b) = (g.neighbors(u), g.neighbors(v));
        let (mut i, mut j) = (a.partition_point(|&w| w <= v), b.partition_point(|&w| w <= v));
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    count += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
    }
    count
}

/// `3 * triangles / paths of length two`; 0 when there are no such paths.
pub fn transitivity(g: &Graph) -> f64 {
    let triples: u64 = (0..g.n())
        .map(|v| {
            let d = g.degree(v) as u64;
            d * d.saturating_sub(1) / 2
        })
        .sum();
    if triples == 0 {
        return 0.0;
    }
    3.0 * triangle_count(g) as f64 / triples as f64
}

/// `SC(v) = Σ_j u_j(v)^2 exp(λ_j)` from the adjacency eigendecomposition.
pub fn subgraph_centrality(g: &Graph) -> Vec<f64> {
    let n = g.n();
    if n == 0 {
        return Vec::new();
    }
    let eig = SymmetricEigen::new(adjacency_matrix(g));
    let weights: Vec<f64> = eig.eigenvalues.iter().map(|l| l.exp()).collect();
    (0..n)
        .map(|v| {
            weights
                .iter()
                .enumerate()
                .map(|(j, w)| eig.eigenvectors[(v, j)].powi(2) * w)
                .sum()
        })
        .collect()
}

/// `(modularity, transitivity, per-vertex subgraph centrality)`.
pub fn structure_metrics(g: &Graph, partition: &Clustering) -> (f64, f64, Vec<f64>) {
    (modularity(g, partition), transitivity(g), subgraph_centrality(g))
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

/// The seven measures for one graph.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphMetrics {
    pub lambda_max_adj: f64,
    pub lambda2_lap: f64,
    pub avg_path: f64,
    pub harmonic_mean_dist: f64,
    pub modularity: f64,
    pub transitivity: f64,
    pub subgraph_centrality_mean: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct MetricFlags {
    /// No connected pair, so the average path length is undefined.
    pub avg_path_undefined: bool,
    /// No connected pair, so the harmonic mean distance is infinite.
    pub harmonic_infinite: bool,
    /// No edges, so modularity was reported as 0.
    pub modularity_undefined: bool,
}

impl GraphMetrics {
    pub fn compute(g: &Graph, partition: &Clustering) -> (GraphMetrics, MetricFlags) {
        let eig = eigen_metrics(g);
        let dist = distance_metrics(g);
        let (q, trans, sc) = structure_metrics(g, partition);
        let flags = MetricFlags {
            avg_path_undefined: dist.avg_path.is_nan(),
            harmonic_infinite: dist.harmonic_mean_dist.is_infinite(),
            modularity_undefined: g.edge_count() == 0,
        };
        let metrics = GraphMetrics {
            lambda_max_adj: eig.lambda_max_adj,
            lambda2_lap: eig.lambda2_lap,
            avg_path: dist.avg_path,
            harmonic_mean_dist: dist.harmonic_mean_dist,
            modularity: q,
            transitivity: trans,
            subgraph_centrality_mean: mean(&sc),
        };
        (metrics, flags)
    }

    fn fields(&self) -> [f64; 7] {
        [
            self.lambda_max_adj,
            self.lambda2_lap,
            self.avg_path,
            self.harmonic_mean_dist,
            self.modularity,
            self.transitivity,
            self.subgraph_centrality_mean,
        ]
    }

    fn from_fields(f: [f64; 7]) -> Self {
        GraphMetrics {
            lambda_max_adj: f[0],
            lambda2_lap: f[1],
            avg_path: f[2],
            harmonic_mean_dist: f[3],
            modularity: f[4],
            transitivity: f[5],
            subgraph_centrality_mean: f[6],
        }
    }

    /// Per-measure `|after - before| / max(|before|, ε)`.
    pub fn relative_error(before: &GraphMetrics, after: &GraphMetrics) -> GraphMetrics {
        let (b, a) = (before.fields(), after.fields());
        let mut out = [0.0; 7];
        for i in 0..7 {
            out[i] = relative_error(b[i], a[i]);
        }
        Self::from_fields(out)
    }
}

/// `|after - before| / max(|before|, ε)`; equal values (including two
/// infinities or two NaNs) give 0.
pub fn relative_error(before: f64, after: f64) -> f64 {
    if before == after || (before.is_nan() && after.is_nan()) {
        return 0.0;
    }
    (after - before).abs() / before.abs().max(REL_EPS)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UtilityReport {
    pub original: GraphMetrics,
    pub anonymized: GraphMetrics,
    pub errors: GraphMetrics,
    pub original_flags: MetricFlags,
    pub anonymized_flags: MetricFlags,
}

/// All measures for both graphs plus their relative errors.
pub fn utility_error_report(g: &Graph, g2: &Graph, p1: &Clustering, p2: &Clustering) -> Result<UtilityReport> {
    if g.n() != g2.n() {
        return Err(Error::Validation(format!(
            "graphs have different vertex counts ({} vs {})",
            g.n(),
            g2.n()
        )));
    }
    if p1.len() != g.n() || p2.len() != g.n() {
        return Err(Error::Validation("partition does not cover the vertex set".into()));
    }
    let ((original, original_flags), (anonymized, anonymized_flags)) =
        rayon::join(|| GraphMetrics::compute(g, p1), || GraphMetrics::compute(g2, p2));
    Ok(UtilityReport {
        errors: GraphMetrics::relative_error(&original, &anonymized),
        original,
        anonymized,
        original_flags,
        anonymized_flags,
    })
}

impl UtilityReport {
    pub fn errors_all_zero(&self) -> bool {
        self.errors.fields().iter().all(|&e| e == 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn complete(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).unwrap()
    }

    fn p3() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn complete_graph_spectrum() {
        let e = dense_eigen_metrics(&complete(4));
        assert_abs_diff_eq!(e.lambda_max_adj, 3.0, epsilon = 1e-9);
        assert_abs_diff_eq!(e.lambda2_lap, 4.0, epsilon = 1e-9);
    }

    #[test]
    fn disconnected_has_zero_connectivity() {
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert_abs_diff_eq!(dense_eigen_metrics(&g).lambda2_lap, 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(power_eigen_metrics(&g).lambda2_lap, 0.0, epsilon = 1e-6);
    }

    #[test]
    fn cycle_spectrum_closed_form() {
        let c4 = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        // adjacency 2cos(2πj/4), Laplacian 2 - 2cos(2πj/4)
        let adj: Vec<f64> = (0..4)
            .map(|j| 2.0 * (2.0 * std::f64::consts::PI * j as f64 / 4.0).cos())
            .collect();
        let mut lap: Vec<f64> = adj.iter().map(|a| 2.0 - a).collect();
        lap.sort_by(f64::total_cmp);
        let e = dense_eigen_metrics(&c4);
        assert_abs_diff_eq!(
            e.lambda_max_adj,
            adj.iter().cloned().fold(f64::MIN, f64::max),
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(e.lambda2_lap, lap[1], epsilon = 1e-9);
        assert_abs_diff_eq!(e.lambda2_lap, 2.0, epsilon = 1e-9);
        let p = power_eigen_metrics(&c4);
        assert_abs_diff_eq!(p.lambda_max_adj, 2.0, epsilon = 1e-6);
        assert_abs_diff_eq!(p.lambda2_lap, 2.0, epsilon = 1e-6);
    }

    #[test]
    fn laplacian_rows_sum_to_zero() {
        let l = laplacian_matrix(&p3());
        for r in 0..3 {
            assert_eq!(l.row(r).sum(), 0.0);
        }
    }

    #[test]
    fn distances() {
        let k5 = distance_metrics(&complete(5));
        assert_eq!((k5.avg_path, k5.harmonic_mean_dist), (1.0, 1.0));

        // P3 pairs: 1, 1, 2
        let p = distance_metrics(&p3());
        assert_abs_diff_eq!(p.avg_path, 4.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.harmonic_mean_dist, 3.0 / 2.5, epsilon = 1e-12);

        // two K2: 6 pairs, 2 connected at distance 1
        let d = distance_metrics(&Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap());
        assert_eq!(d.avg_path, 1.0);
        assert_abs_diff_eq!(d.harmonic_mean_dist, 3.0, epsilon = 1e-12);

        let none = distance_metrics(&Graph::empty(3));
        assert!(none.avg_path.is_nan());
        assert!(none.harmonic_mean_dist.is_infinite());
    }

    #[test]
    fn triangle_structure() {
        let c3 = complete(3);
        let single = Clustering::from_assignment(vec![0, 0, 0]);
        assert_abs_diff_eq!(modularity(&c3, &single), 0.0, epsilon = 1e-12);
        assert_eq!(transitivity(&c3), 1.0);
    }

    #[test]
    fn star_has_no_triangles() {
        let star = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(transitivity(&star), 0.0);
    }

    #[test]
    fn two_triangles() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        let split = Clustering::from_assignment(vec![0, 0, 0, 1, 1, 1]);
        // m = 6, e_c = 3, deg_c = 6: 2 * (3/6 - (6/12)^2)
        assert_abs_diff_eq!(modularity(&g, &split), 2.0 * (3.0 / 6.0 - 0.25), epsilon = 1e-12);
        assert_abs_diff_eq!(modularity(&g, &split), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn subgraph_centrality_closed_forms() {
        let k2 = Graph::from_edges(2, [(0, 1)]).unwrap();
        for sc in subgraph_centrality(&k2) {
            // eigenvalues ±1 with weights 1/2 each
            assert_abs_diff_eq!(sc, 1f64.cosh(), epsilon = 1e-9);
        }
        let sc = subgraph_centrality(&Graph::from_edges(3, [(0, 1)]).unwrap());
        assert_abs_diff_eq!(sc[2], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn diamond_error() {
        let k4 = complete(4);
        let diamond = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]).unwrap();
        let lam = dense_eigen_metrics(&diamond).lambda_max_adj;
        // largest root of x^3 - x^2 - 5x - 4 ... factor (x+1)(x^2 - x - 4)
        assert_abs_diff_eq!(lam, (1.0 + 17f64.sqrt()) / 2.0, epsilon = 1e-9);
        let p = Clustering::from_assignment(vec![0; 4]);
        let report = utility_error_report(&k4, &diamond, &p, &p).unwrap();
        assert_abs_diff_eq!(report.errors.lambda_max_adj, (3.0 - lam) / 3.0, epsilon = 1e-9);
        assert_abs_diff_eq!(report.errors.lambda_max_adj, 0.1461, epsilon = 1e-4);
    }

    #[test]
    fn identical_graphs_have_zero_error() {
        let g = p3();
        let p = Clustering::from_assignment(vec![0, 0, 1]);
        let r = utility_error_report(&g, &g, &p, &p).unwrap();
        assert!(r.errors_all_zero());
    }

    #[test]
    fn vertex_mismatch_rejected() {
        let p = Clustering::from_assignment(vec![0, 0, 0]);
        let q = Clustering::from_assignment(vec![0, 0]);
        assert!(utility_error_report(&p3(), &Graph::empty(2), &p, &q).is_err());
    }

    #[test]
    fn emptied_graph_transitivity_error() {
        let g = complete(4);
        let p = Clustering::from_assignment(vec![0; 4]);
        let r = utility_error_report(&g, &Graph::empty(4), &p, &p).unwrap();
        assert_eq!(r.errors.transitivity, 1.0);
        assert!(r.anonymized_flags.avg_path_undefined && r.anonymized_flags.modularity_undefined);
    }
}
