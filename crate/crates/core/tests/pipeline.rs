mod common;

use common::*;
use mpda_core::io::{read_edge_list, write_edge_list, LoadOptions};
use mpda_core::pipeline::{evaluate, export_model};
use mpda_core::{
    run_pipeline, verify_k_anonymous, AnonymizationParams, Error, Graph, InfeasibilityHint, PipelineConfig,
};
use proptest::prelude::*;

fn arb_labeled_graph() -> impl Strategy<Value = Graph> {
    (
        1usize..15,
        0.0f64..0.7,
        any::<u64>(),
        prop::collection::btree_set(0u64..1000, 15),
    )
        .prop_map(|(n, p, seed, labels)| {
            let g = gnp(n, p, &mut rng(seed));
            g.with_labels(labels.into_iter().take(n).collect()).unwrap()
        })
}

fn round_trip(g: &Graph) -> Graph {
    let mut buf = Vec::new();
    write_edge_list(g, &mut buf).unwrap();
    read_edge_list(buf.as_slice(), LoadOptions::default()).unwrap().graph
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn edge_list_round_trip(g in arb_labeled_graph()) {
        let h = round_trip(&g);
        prop_assert_eq!(h.labels(), g.labels());
        prop_assert_eq!(h.edges().collect::<Vec<_>>(), g.edges().collect::<Vec<_>>());
    }

    #[test]
    fn relaxed_runs_are_anonymous_within_budget(
        n in 6usize..40, p in 0.05f64..0.5, seed in any::<u64>(), k in 2usize..6, t in 0usize..3,
    ) {
        let g = gnp(n, p, &mut rng(seed));
        prop_assume!(k <= n);
        let cfg = PipelineConfig::new(AnonymizationParams::new(k, t).unwrap());
        let run = run_pipeline(&g, &cfg).unwrap();
        prop_assert!(run.k_anonymous);
        prop_assert!(verify_k_anonymous(&run.anonymized.degrees(), k, run.verified_t));
        let (adds, dels) = run.realization.plan.incidence(n);
        for v in 0..n {
            prop_assert!(adds[v] <= run.caps.additions[v]);
            prop_assert!(dels[v] <= run.caps.deletions[v]);
        }
        // edits land exactly where the targets and slack say
        for v in 0..n {
            let want = g.degree(v) as i64 + run.theta.theta[v] + run.realization.plan.slack[v];
            prop_assert_eq!(run.anonymized.degree(v) as i64, want);
        }
        let again = run_pipeline(&g, &cfg).unwrap();
        prop_assert_eq!(again.realization.plan, run.realization.plan);
    }

    #[test]
    fn strict_runs_hit_targets_exactly(
        n in 6usize..30, p in 0.05f64..0.5, seed in any::<u64>(), k in 2usize..5, t in 0usize..3,
    ) {
        let g = gnp(n, p, &mut rng(seed));
        prop_assume!(k <= n);
        let cfg = PipelineConfig::new(AnonymizationParams::new(k, t).unwrap())
            .strict()
            .with_parity_repair(true);
        match run_pipeline(&g, &cfg) {
            Ok(run) => {
                prop_assert_eq!(run.total_slack(), 0);
                prop_assert_eq!(run.verified_t, t);
                prop_assert!(verify_k_anonymous(&run.anonymized.degrees(), k, t));
            }
            Err(Error::Infeasible(hint)) => {
                let odd = matches!(hint, InfeasibilityHint::OddParity { .. });
                prop_assert!(!odd, "parity repair left an odd sum");
            }
            Err(e) => return Err(TestCaseError::fail(format!("unexpected error {e}"))),
        }
    }
}

#[test]
fn evaluating_a_graph_against_itself_is_exact() {
    let g = gnp(40, 0.15, &mut rng(3));
    let ev = evaluate(&g, &g).unwrap();
    assert!(ev.report.errors_all_zero());
    assert_eq!(ev.precision_index, 1.0);
    assert_eq!(ev.precision_error, 0.0);
}

#[test]
fn evaluate_rejects_different_vertex_sets() {
    assert!(evaluate(&Graph::empty(4), &Graph::empty(5)).is_err());
}

#[test]
fn lesmis_loads_and_exports() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/lesmis.txt");
    let g = mpda_core::load_graph(path, LoadOptions::default()).unwrap().graph;
    assert_eq!((g.n(), g.edge_count()), (77, 254));
    let cfg = PipelineConfig::new(AnonymizationParams::new(5, 1).unwrap());
    let lp = export_model(&g, &cfg).unwrap();
    assert!(lp.contains("Minimize"));
    assert!(lp.contains("Subject To") && lp.trim_end().ends_with("End"));
}
