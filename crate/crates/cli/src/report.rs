//! JSON and CSV artifacts written by the driver.

use std::fmt::Write as _;

use mpda_core::metrics::GraphMetrics;
use mpda_core::pipeline::Evaluation;
use mpda_core::{ChunkParams, Graph, PipelineRun};
use serde::Serialize;

pub const PRECISION_DEFINITION: &str =
    "pair agreement: fraction of vertex pairs placed together in both clusterings or apart in both";

#[derive(Debug, Serialize)]
pub struct PlanReport {
    pub additions: Vec<(u64, u64)>,
    pub deletions: Vec<(u64, u64)>,
    /// Nonzero net slack as `(vertex, slack)`.
    pub slack: Vec<(u64, i64)>,
}

impl PlanReport {
    pub fn new(g: &Graph, run: &PipelineRun) -> Self {
        let plan = &run.realization.plan;
        let label = |(u, v): &(usize, usize)| (g.label(*u), g.label(*v));
        PlanReport {
            additions: plan.additions.iter().map(label).collect(),
            deletions: plan.deletions.iter().map(label).collect(),
            slack: plan
                .slack
                .iter()
                .enumerate()
                .filter(|(_, &s)| s != 0)
                .map(|(v, &s)| (g.label(v), s))
                .collect(),
        }
    }

    /// `+ u v`, `- u v` and `slack v s` lines.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for (u, v) in &self.additions {
            let _ = writeln!(out, "+ {u} {v}");
        }
        for (u, v) in &self.deletions {
            let _ = writeln!(out, "- {u} {v}");
        }
        for (v, s) in &self.slack {
            let _ = writeln!(out, "slack {v} {s}");
        }
        out
    }
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub input: String,
    pub vertices: usize,
    pub k: usize,
    pub t: usize,
    pub mode: &'static str,
    pub lambda: Option<f64>,
    pub parity_repair: bool,
    pub edges_original: usize,
    pub edges_anonymized: usize,
    pub edits: usize,
    pub total_slack: i64,
    pub max_slack: i64,
    pub objective: f64,
    pub nodes_explored: u64,
    /// Tolerance the output graph was checked at.
    pub verified_t: usize,
    pub k_anonymous: bool,
    pub chunks: Vec<ChunkParams>,
    pub plan: PlanReport,
    #[serde(flatten)]
    pub evaluation: Evaluation,
    pub precision_definition: &'static str,
}

#[derive(Debug, Serialize)]
pub struct EvaluationReport {
    pub original: String,
    pub anonymized_path: String,
    pub vertices: usize,
    #[serde(flatten)]
    pub evaluation: Evaluation,
    pub precision_definition: &'static str,
}

#[derive(Debug, Serialize)]
pub struct BatchEntry {
    pub k: usize,
    pub report: String,
    pub edits: Option<usize>,
    pub total_slack: Option<i64>,
    pub precision_error: Option<f64>,
    pub errors: Option<GraphMetrics>,
    pub failure: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct BatchSummary {
    pub input: String,
    pub t: usize,
    pub mode: &'static str,
    pub runs: Vec<BatchEntry>,
    /// Mean of each relative error over the successful runs.
    pub average_errors: Option<GraphMetrics>,
    pub average_precision_error: Option<f64>,
}

/// Componentwise mean; `None` when there is nothing to average.
pub fn average(all: &[&GraphMetrics]) -> Option<GraphMetrics> {
    if all.is_empty() {
        return None;
    }
    let n = all.len() as f64;
    let mean = |f: fn(&GraphMetrics) -> f64| all.iter().map(|m| f(m)).sum::<f64>() / n;
    Some(GraphMetrics {
        lambda_max_adj: mean(|m| m.lambda_max_adj),
        lambda2_lap: mean(|m| m.lambda2_lap),
        avg_path: mean(|m| m.avg_path),
        harmonic_mean_dist: mean(|m| m.harmonic_mean_dist),
        modularity: mean(|m| m.modularity),
        transitivity: mean(|m| m.transitivity),
        subgraph_centrality_mean: mean(|m| m.subgraph_centrality_mean),
    })
}

pub const CSV_HEADER: &str = "k,edits,total_slack,precision_error,lambda_max_adj,lambda2_lap,avg_path,harmonic_mean_dist,modularity,transitivity,subgraph_centrality_mean";

/// One row per successful run, in the order of the header.
pub fn csv_rows(entries: &[BatchEntry]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for e in entries {
        let (Some(edits), Some(slack), Some(p), Some(m)) = (e.edits, e.total_slack, e.precision_error, &e.errors)
        else {
            continue;
        };
        let _ = writeln!(
            out,
            "{},{edits},{slack},{p},{},{},{},{},{},{},{}",
            e.k,
            m.lambda_max_adj,
            m.lambda2_lap,
            m.avg_path,
            m.harmonic_mean_dist,
            m.modularity,
            m.transitivity,
            m.subgraph_centrality_mean
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn metrics(x: f64) -> GraphMetrics {
        GraphMetrics {
            lambda_max_adj: x,
            lambda2_lap: x,
            avg_path: x,
            harmonic_mean_dist: x,
            modularity: x,
            transitivity: x,
            subgraph_centrality_mean: x,
        }
    }

    #[test]
    fn average_is_componentwise() {
        let (a, b) = (metrics(0.1), metrics(0.3));
        let m = average(&[&a, &b]).unwrap();
        assert!((m.modularity - 0.2).abs() < 1e-15);
        assert!(average(&[]).is_none());
    }

    #[test]
    fn csv_skips_failed_runs() {
        let ok = BatchEntry {
            k: 2,
            report: "r.k2.json".into(),
            edits: Some(3),
            total_slack: Some(0),
            precision_error: Some(0.5),
            errors: Some(metrics(0.0)),
            failure: None,
        };
        let bad = BatchEntry {
            k: 3,
            report: "r.k3.json".into(),
            edits: None,
            total_slack: None,
            precision_error: None,
            errors: None,
            failure: Some("odd parity".into()),
        };
        let csv = csv_rows(&[ok, bad]);
        assert_eq!(csv.lines().count(), 2);
        assert!(csv.lines().nth(1).unwrap().starts_with("2,3,0,0.5,"));
    }
}
