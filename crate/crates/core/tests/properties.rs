mod common;

use common::*;
use mpda_core::clustering::detect_communities;
use mpda_core::ilp::{self, lp_bound, Limits, Model, Sense, Status};
use mpda_core::metrics::{adjacency_matrix, dense_eigen_metrics, distance_metrics, power_eigen_metrics, GraphMetrics};
use mpda_core::realize::{build_strict_model, realize, RealizationMode};
use mpda_core::{ChangeVector, Clustering, Graph, VertexCaps};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n).prop_flat_map(|n| {
        let pairs = all_pairs(n);
        prop::collection::vec(any::<bool>(), pairs.len()).prop_map(move |keep| {
            Graph::from_edges(n, pairs.iter().zip(&keep).filter(|(_, &k)| k).map(|(&e, _)| e)).unwrap()
        })
    })
}

fn relabel(c: &Clustering, perm: &[usize]) -> Clustering {
    let mut a = vec![0; c.len()];
    for v in 0..c.len() {
        a[perm[v]] = c.cluster_of(v);
    }
    Clustering::from_assignment(a)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a.is_nan() && b.is_nan()) || a == b || (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

#[test]
fn generator_counts_match_known_sequence() {
    let counts: Vec<usize> = (1..=6).map(|n| nonisomorphic_graphs(n).len()).collect();
    assert_eq!(counts, vec![1, 2, 4, 11, 34, 156]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn metrics_invariant_under_relabeling(g in arb_graph(12), seed in any::<u64>()) {
        let mut perm: Vec<usize> = (0..g.n()).collect();
        perm.shuffle(&mut rng(seed));
        let h = g.permuted(&perm).unwrap();
        let c = detect_communities(&g);
        let (a, _) = GraphMetrics::compute(&g, &c);
        let (b, _) = GraphMetrics::compute(&h, &relabel(&c, &perm));
        prop_assert!(close(a.lambda_max_adj, b.lambda_max_adj, 1e-9));
        prop_assert!(close(a.lambda2_lap, b.lambda2_lap, 1e-9));
        prop_assert!(close(a.avg_path, b.avg_path, 1e-12));
        prop_assert!(close(a.harmonic_mean_dist, b.harmonic_mean_dist, 1e-12));
        prop_assert!(close(a.modularity, b.modularity, 1e-12));
        prop_assert!(close(a.transitivity, b.transitivity, 1e-12));
        prop_assert!(close(a.subgraph_centrality_mean, b.subgraph_centrality_mean, 1e-9));
    }

    #[test]
    fn dense_and_power_routes_agree(n in 2usize..50, p in 0.05f64..0.6, seed in any::<u64>()) {
        let g = gnp(n, p, &mut rng(seed));
        let d = dense_eigen_metrics(&g);
        let q = power_eigen_metrics(&g);
        prop_assert!((d.lambda_max_adj - q.lambda_max_adj).abs() < 1e-5, "{} vs {}", d.lambda_max_adj, q.lambda_max_adj);
        prop_assert!((d.lambda2_lap - q.lambda2_lap).abs() < 1e-5, "{} vs {}", d.lambda2_lap, q.lambda2_lap);
    }

    #[test]
    fn leading_eigenpair_residual(g in arb_graph(20)) {
        let e = dense_eigen_metrics(&g);
        let a = adjacency_matrix(&g);
        let x = nalgebra::DVector::from_vec(e.leading_vector.clone());
        let residual = (&a * &x - e.lambda_max_adj * &x).norm();
        prop_assert!(residual <= 1e-5 * x.norm());
    }

    #[test]
    fn connectivity_and_ranges(g in arb_graph(14)) {
        let e = dense_eigen_metrics(&g);
        let d = distance_metrics(&g);
        let connected = d.connected_pairs as usize == g.n() * (g.n() - 1) / 2;
        prop_assert_eq!(e.lambda2_lap > 1e-9, connected);
        if d.connected_pairs > 0 {
            prop_assert!(d.harmonic_mean_dist >= 1.0);
        }
        let (m, _) = GraphMetrics::compute(&g, &detect_communities(&g));
        prop_assert!((0.0..=1.0).contains(&m.transitivity));
        prop_assert!((-0.5..=1.0).contains(&m.modularity));
        prop_assert!(m.subgraph_centrality_mean >= 1.0 - 1e-12);
    }
}

/// Minimum over the whole integer box, or `None` if nothing is feasible.
fn enumerate(model: &Model) -> Option<f64> {
    let vars = &model.variables;
    let mut x: Vec<i64> = vars.iter().map(|v| v.lower).collect();
    let mut best: Option<f64> = None;
    loop {
        if model.is_feasible(&x) {
            let value = model.objective_value(&x);
            if best.is_none_or(|b| value < b) {
                best = Some(value);
            }
        }
        let mut i = 0;
        loop {
            if i == x.len() {
                return best;
            }
            if x[i] < vars[i].upper {
                x[i] += 1;
                break;
            }
            x[i] = vars[i].lower;
            i += 1;
        }
    }
}

fn random_model(r: &mut impl Rng) -> Model {
    let mut m = Model::new();
    let nvars = r.gen_range(1..=12);
    for j in 0..nvars {
        let (lo, hi) = if r.gen_bool(0.8) {
            (0, 1)
        } else {
            (r.gen_range(-2..=0), r.gen_range(1..=2))
        };
        m.add_variable(format!("x{j}"), lo, hi, r.gen_range(-3..=5) as f64);
    }
    for i in 0..r.gen_range(1..=6) {
        let mut terms: Vec<(usize, i64)> = Vec::new();
        for j in 0..nvars {
            let a = r.gen_range(-2..=2);
            if a != 0 && r.gen_bool(0.4) {
                terms.push((j, a));
            }
        }
        let sense = [Sense::Le, Sense::Ge, Sense::Eq][r.gen_range(0..3)];
        m.add_constraint(format!("c{i}"), terms, sense, r.gen_range(-2..=3));
    }
    m
}

#[test]
fn solver_matches_enumeration_on_small_models() {
    let mut r = rng(11);
    for case in 0..400 {
        let m = random_model(&mut r);
        let expected = enumerate(&m);
        let got = ilp::solve(&m, Limits::default()).unwrap();
        match expected {
            Some(e) => {
                assert_eq!(got.status, Status::Optimal, "case {case}");
                assert!(
                    (got.objective.unwrap() - e).abs() < 1e-9,
                    "case {case}: {:?} vs {e}",
                    got.objective
                );
                assert!(m.is_feasible(&got.assignment));
                assert!(lp_bound(&m).unwrap().unwrap() <= e + 1e-9);
            }
            None => assert_eq!(got.status, Status::Infeasible, "case {case}"),
        }
        // determinism
        assert_eq!(ilp::solve(&m, Limits::default()).unwrap(), got);
    }
}

#[test]
fn realization_matches_enumeration_on_seven_vertices() {
    let mut r = rng(12);
    for _ in 0..4 {
        let g = gnp(7, 0.4, &mut r);
        let profiles = edit_profiles(&g);
        for _ in 0..10 {
            let (a, d, _) = &profiles[r.gen_range(0..profiles.len())];
            let theta: Vec<i64> = a.iter().zip(d).map(|(a, d)| a - d).collect();
            let caps = VertexCaps::uniform(7, r.gen_range(1..=6), r.gen_range(1..=6));
            let expected = brute_force_min(&profiles, &theta, &caps.additions, &caps.deletions, None);
            let got = realize(
                &g,
                &ChangeVector::from(theta.clone()),
                &caps,
                RealizationMode::Strict,
                Limits::default(),
            );
            match (expected, got) {
                (Some(e), Ok(real)) => {
                    assert_eq!(real.objective, e);
                    let after = g.apply_edits(&real.plan).unwrap();
                    assert!((0..7).all(|v| after.degree(v) as i64 == g.degree(v) as i64 + theta[v]));
                }
                (None, Err(_)) => {}
                (e, got) => panic!("theta {theta:?}: expected {e:?}, got {got:?}"),
            }
        }
    }
}

#[test]
fn relaxed_never_costs_more_than_strict() {
    let mut r = rng(13);
    for _ in 0..30 {
        let n = r.gen_range(4..10);
        let g = gnp(n, 0.4, &mut r);
        let mut theta: Vec<i64> = (0..n).map(|_| r.gen_range(-2..=2)).collect();
        if theta.iter().sum::<i64>() % 2 != 0 {
            theta[0] -= theta[0].signum().max(0) * 2 - 1;
        }
        let theta = ChangeVector::from(theta);
        let caps = VertexCaps::uniform(n, n, n);
        let relaxed = realize(&g, &theta, &caps, RealizationMode::relaxed(), Limits::default()).unwrap();
        if let Ok(strict) = realize(&g, &theta, &caps, RealizationMode::Strict, Limits::default()) {
            assert!(relaxed.objective <= strict.objective + 1e-9);
        }
        // relaxed realization lands exactly on theta plus the recorded slack
        let after = g.apply_edits(&relaxed.plan).unwrap();
        for v in 0..n {
            assert_eq!(
                after.degree(v) as i64,
                g.degree(v) as i64 + theta.theta[v] + relaxed.plan.slack[v]
            );
        }
    }
}

#[test]
fn parity_rows_keep_the_optimum() {
    // the strengthened model must not cut off any integer point of the original
    let mut r = rng(14);
    for _ in 0..40 {
        let g = gnp(6, 0.5, &mut r);
        let profiles = edit_profiles(&g);
        let (a, d, _) = &profiles[r.gen_range(0..profiles.len())];
        let theta = ChangeVector::from(a.iter().zip(d).map(|(a, d)| a - d).collect::<Vec<_>>());
        let caps = VertexCaps::uniform(6, 5, 5);
        let plain = build_strict_model(&g, &theta, &caps).unwrap();
        let mut strong = plain.clone();
        strong.add_parity_rows(&theta).unwrap();
        let x = ilp::solve(&plain.model, Limits::default()).unwrap();
        let y = ilp::solve(&strong.model, Limits::default()).unwrap();
        assert_eq!(x.objective, y.objective);
        assert!(lp_bound(&strong.model).unwrap() >= lp_bound(&plain.model).unwrap().map(|b| b - 1e-9));
    }
}
