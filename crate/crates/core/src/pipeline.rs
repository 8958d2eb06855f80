//! End-to-end run: degree sequence, anonymized targets, realization,
//! edited graph, and the utility evaluation.

use serde::Serialize;

use crate::anonymize::{
    anonymize_sequence, change_vector, repair_parity, verify_k_anonymous, Anonymization, AnonymizationParams,
    ChangeVector, VertexCaps,
};
use crate::clustering::{detect_communities, precision_index, Clustering};
use crate::error::Result;
use crate::graph::Graph;
use crate::ilp::{write_lp, Limits};
use crate::metrics::{utility_error_report, UtilityReport};
use crate::realize::{build_relaxed_model, build_strict_model, realize, Realization, RealizationMode};
use crate::sequence::{degree_sequence, DegreeSequence};

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub params: AnonymizationParams,
    pub mode: RealizationMode,
    pub limits: Limits,
    /// Replaces every vertex's addition budget.
    pub max_additions: Option<usize>,
    /// Replaces every vertex's deletion budget.
    pub max_deletions: Option<usize>,
    /// Make the target sum even before realizing.
    pub parity_repair: bool,
}

impl PipelineConfig {
    /// Relaxed mode with unit slack weight, chunk budgets, no parity repair.
    pub fn new(params: AnonymizationParams) -> Self {
        PipelineConfig {
            params,
            mode: RealizationMode::relaxed(),
            limits: Limits::default(),
            max_additions: None,
            max_deletions: None,
            parity_repair: false,
        }
    }

    pub fn strict(mut self) -> Self {
        self.mode = RealizationMode::Strict;
        self
    }

    pub fn with_parity_repair(mut self, on: bool) -> Self {
        self.parity_repair = on;
        self
    }
}

/// Everything an anonymization run produced.
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub degrees: DegreeSequence,
    pub anonymization: Anonymization,
    pub theta: ChangeVector,
    pub caps: VertexCaps,
    pub realization: Realization,
    pub anonymized: Graph,
    /// Tolerance the output was checked at: `t` plus the largest slack.
    pub verified_t: usize,
    pub k_anonymous: bool,
}

impl PipelineRun {
    pub fn edits(&self) -> usize {
        self.realization.plan.len()
    }

    pub fn total_slack(&self) -> i64 {
        self.realization.plan.total_slack()
    }
}

struct Prepared {
    degrees: DegreeSequence,
    anonymization: Anonymization,
    theta: ChangeVector,
    caps: VertexCaps,
}

fn prepare(g: &Graph, cfg: &PipelineConfig) -> Result<Prepared> {
    let degrees = degree_sequence(g);
    let mut anonymization = anonymize_sequence(&degrees, cfg.params)?;
    if cfg.parity_repair {
        anonymization = repair_parity(&degrees, &anonymization, cfg.params.t);
    }
    let theta = change_vector(&degrees, &anonymization.target)?;
    let caps = anonymization.vertex_caps(&degrees, cfg.max_additions, cfg.max_deletions);
    Ok(Prepared {
        degrees,
        anonymization,
        theta,
        caps,
    })
}

/// Anonymizes `g` and realizes the targets with minimum edits.
pub fn run_pipeline(g: &Graph, cfg: &PipelineConfig) -> Result<PipelineRun> {
    let Prepared {
        degrees,
        anonymization,
        theta,
        caps,
    } = prepare(g, cfg)?;
    log::debug!(
        "k={} t={}: {} chunks, |theta|_1 = {}",
        cfg.params.k,
        cfg.params.t,
        anonymization.chunks.len(),
        theta.l1()
    );
    let realization = realize(g, &theta, &caps, cfg.mode, cfg.limits)?;
    let anonymized = g.apply_edits(&realization.plan)?;
    let verified_t = cfg.params.t + realization.plan.max_slack() as usize;
    let k_anonymous = verify_k_anonymous(&anonymized.degrees(), cfg.params.k, verified_t);
    Ok(PipelineRun {
        degrees,
        anonymization,
        theta,
        caps,
        realization,
        anonymized,
        verified_t,
        k_anonymous,
    })
}

/// The realization model the pipeline would solve, as LP text.
pub fn export_model(g: &Graph, cfg: &PipelineConfig) -> Result<String> {
    let p = prepare(g, cfg)?;
    let built = match cfg.mode {
        RealizationMode::Strict => build_strict_model(g, &p.theta, &p.caps)?,
        RealizationMode::Relaxed { lambda } => build_relaxed_model(g, &p.theta, &p.caps, lambda)?,
    };
    Ok(write_lp(&built.model))
}

/// Utility comparison of two graphs on the same vertex set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evaluation {
    #[serde(flatten)]
    pub report: UtilityReport,
    pub precision_index: f64,
    pub precision_error: f64,
    pub original_clusters: usize,
    pub anonymized_clusters: usize,
    #[serde(skip)]
    pub original_clustering: Clustering,
    #[serde(skip)]
    pub anonymized_clustering: Clustering,
}

/// Detects communities in both graphs, then compares all measures.
pub fn evaluate(original: &Graph, anonymized: &Graph) -> Result<Evaluation> {
    let (c1, c2) = rayon::join(|| detect_communities(original), || detect_communities(anonymized));
    let report = utility_error_report(original, anonymized, &c1, &c2)?;
    let index = precision_index(&c1, &c2)?;
    Ok(Evaluation {
        report,
        precision_index: index,
        precision_error: 1.0 - index,
        original_clusters: c1.num_clusters(),
        anonymized_clusters: c2.num_clusters(),
        original_clustering: c1,
        anonymized_clustering: c2,
    })
}
