//! Multi-parameterized k-degree anonymization of simple undirected graphs.
//!
//! The pipeline sorts the degree sequence, anonymizes it chunk by chunk
//! ([`anonymize`]), realizes the resulting per-vertex degree changes with
//! the fewest edge edits by solving an integer program exactly
//! ([`realize`], [`ilp`]), and measures what the edits cost in terms of
//! spectral, distance and clustering structure ([`metrics`], [`clustering`]).

pub mod anonymize;
pub mod clustering;
pub mod error;
pub mod graph;
pub mod ilp;
pub mod io;
pub mod metrics;
pub mod pipeline;
pub mod realize;
pub mod sequence;

pub use anonymize::{
    anonymize_sequence, change_vector, partition_chunks, repair_parity, verify_k_anonymous, Anonymization,
    AnonymizationParams, ChangeVector, ChunkParams, VertexCaps,
};
pub use clustering::{detect_communities, precision_index, Clustering};
pub use error::{Error, InfeasibilityHint, Result};
pub use graph::{EditPlan, Graph};
pub use io::{load_graph, read_edge_list, save_graph, write_edge_list, LoadOptions};
pub use metrics::{utility_error_report, UtilityReport};
pub use pipeline::{run_pipeline, PipelineConfig, PipelineRun};
pub use realize::{realize, Realization, RealizationMode};
pub use sequence::{degree_sequence, DegreeSequence, TargetSequence};
