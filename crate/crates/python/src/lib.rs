//! Python bindings: graphs, the anonymization pipeline, and the utility
//! evaluation.

use mpda_core::ilp::Limits;
use mpda_core::metrics::{GraphMetrics, MetricFlags};
use mpda_core::pipeline::{self, Evaluation};
use mpda_core::{
    detect_communities, io, precision_index, AnonymizationParams, Clustering, DegreeSequence, Error, PipelineConfig,
    PipelineRun, RealizationMode,
};
use pyo3::create_exception;
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use std::time::Duration;

create_exception!(
    mpda,
    InfeasibleError,
    PyValueError,
    "Strict realization has no solution."
);
create_exception!(
    mpda,
    SolverTimeout,
    PyValueError,
    "The solver stopped at its time or node limit."
);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Infeasible(_) => InfeasibleError::new_err(e.to_string()),
        Error::Timeout { .. } => SolverTimeout::new_err(e.to_string()),
        Error::Io(_) => PyIOError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// A simple undirected graph on vertices `0..n`.
#[pyclass(name = "Graph", module = "mpda", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyGraph {
    inner: mpda_core::Graph,
}

#[pymethods]
impl PyGraph {
    #[new]
    #[pyo3(signature = (n, edges = Vec::new()))]
    fn new(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        let inner = mpda_core::Graph::from_edges(n, edges).map_err(to_py)?;
        Ok(PyGraph { inner })
    }

    /// Reads a whitespace edge list.
    #[staticmethod]
    #[pyo3(signature = (path, drop_self_loops = false))]
    fn load(path: &str, drop_self_loops: bool) -> PyResult<Self> {
        let opts = io::LoadOptions {
            strict: !drop_self_loops,
        };
        let loaded = io::load_graph(path, opts).map_err(to_py)?;
        Ok(PyGraph { inner: loaded.graph })
    }

    fn save(&self, path: &str) -> PyResult<()> {
        io::save_graph(&self.inner, path).map_err(to_py)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn degrees(&self) -> Vec<usize> {
        self.inner.degrees()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().collect()
    }

    fn labels(&self) -> Vec<u64> {
        self.inner.labels().to_vec()
    }

    fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.inner.n() && v < self.inner.n() && self.inner.has_edge(u, v)
    }

    fn __len__(&self) -> usize {
        self.inner.n()
    }

    fn __repr__(&self) -> String {
        format!("Graph(n={}, m={})", self.inner.n(), self.inner.edge_count())
    }
}

/// Outcome of one anonymization run.
#[pyclass(name = "Run", module = "mpda", frozen)]
pub struct PyRun {
    run: PipelineRun,
}

#[pymethods]
impl PyRun {
    #[getter]
    fn graph(&self) -> PyGraph {
        PyGraph {
            inner: self.run.anonymized.clone(),
        }
    }

    #[getter]
    fn edits(&self) -> usize {
        self.run.edits()
    }

    #[getter]
    fn additions(&self) -> Vec<(usize, usize)> {
        self.run.realization.plan.additions.iter().copied().collect()
    }

    #[getter]
    fn deletions(&self) -> Vec<(usize, usize)> {
        self.run.realization.plan.deletions.iter().copied().collect()
    }

    /// Net slack per vertex.
    #[getter]
    fn slack(&self) -> Vec<i64> {
        self.run.realization.plan.slack.clone()
    }

    #[getter]
    fn total_slack(&self) -> i64 {
        self.run.total_slack()
    }

    /// Requested degree change per vertex.
    #[getter]
    fn theta(&self) -> Vec<i64> {
        self.run.theta.theta.clone()
    }

    #[getter]
    fn objective(&self) -> f64 {
        self.run.realization.objective
    }

    #[getter]
    fn verified_t(&self) -> usize {
        self.run.verified_t
    }

    #[getter]
    fn k_anonymous(&self) -> bool {
        self.run.k_anonymous
    }

    fn __repr__(&self) -> String {
        format!(
            "Run(edits={}, total_slack={}, k_anonymous={})",
            self.run.edits(),
            self.run.total_slack(),
            self.run.k_anonymous
        )
    }
}

fn mode_from(mode: &str, lam: f64) -> PyResult<RealizationMode> {
    match mode {
        "strict" => Ok(RealizationMode::Strict),
        "relaxed" if lam.is_finite() && lam > 0.0 => Ok(RealizationMode::Relaxed { lambda: lam }),
        "relaxed" => Err(PyValueError::new_err(format!("lam must be positive, got {lam}"))),
        other => Err(PyValueError::new_err(format!("unknown mode {other:?}"))),
    }
}

/// Anonymizes `graph` and realizes the targets with the fewest edits.
#[pyfunction]
#[pyo3(signature = (graph, k, t = 0, mode = "relaxed", lam = 1.0, time_limit = 60.0, a = None, d = None, parity_repair = false))]
#[allow(clippy::too_many_arguments)]
fn anonymize(
    py: Python<'_>,
    graph: &PyGraph,
    k: usize,
    t: usize,
    mode: &str,
    lam: f64,
    time_limit: f64,
    a: Option<usize>,
    d: Option<usize>,
    parity_repair: bool,
) -> PyResult<PyRun> {
    if !(time_limit.is_finite() && time_limit > 0.0) {
        return Err(PyValueError::new_err("time_limit must be positive"));
    }
    let params = AnonymizationParams::new(k, t).map_err(to_py)?;
    let mut cfg = PipelineConfig::new(params).with_parity_repair(parity_repair);
    cfg.mode = mode_from(mode, lam)?;
    cfg.limits = Limits {
        time: Duration::from_secs_f64(time_limit),
        ..Limits::default()
    };
    cfg.max_additions = a;
    cfg.max_deletions = d.or(a);
    let g = &graph.inner;
    let run = py.detach(|| pipeline::run_pipeline(g, &cfg)).map_err(to_py)?;
    Ok(PyRun { run })
}

/// Anonymized degree targets for a degree list, in the input order.
#[pyfunction]
#[pyo3(signature = (degrees, k, t = 0))]
fn anonymize_degrees(degrees: Vec<usize>, k: usize, t: usize) -> PyResult<Vec<usize>> {
    let seq = DegreeSequence::from_vertex_degrees(&degrees);
    let params = AnonymizationParams::new(k, t).map_err(to_py)?;
    let anon = mpda_core::anonymize_sequence(&seq, params).map_err(to_py)?;
    let theta = mpda_core::change_vector(&seq, &anon.target).map_err(to_py)?;
    Ok(degrees
        .iter()
        .zip(&theta.theta)
        .map(|(&d, &c)| (d as i64 + c) as usize)
        .collect())
}

/// Community id per vertex from greedy modularity agglomeration.
#[pyfunction]
fn communities(graph: &PyGraph) -> Vec<usize> {
    detect_communities(&graph.inner).assignment().to_vec()
}

/// Pair-agreement index between two clusterings given as id lists.
#[pyfunction]
fn precision(a: Vec<usize>, b: Vec<usize>) -> PyResult<f64> {
    precision_index(&Clustering::from_assignment(a), &Clustering::from_assignment(b)).map_err(to_py)
}

fn metrics_dict<'py>(py: Python<'py>, m: &GraphMetrics) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("lambda_max_adj", m.lambda_max_adj)?;
    d.set_item("lambda2_lap", m.lambda2_lap)?;
    d.set_item("avg_path", m.avg_path)?;
    d.set_item("harmonic_mean_dist", m.harmonic_mean_dist)?;
    d.set_item("modularity", m.modularity)?;
    d.set_item("transitivity", m.transitivity)?;
    d.set_item("subgraph_centrality_mean", m.subgraph_centrality_mean)?;
    Ok(d)
}

fn flags_dict<'py>(py: Python<'py>, f: &MetricFlags) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("avg_path_undefined", f.avg_path_undefined)?;
    d.set_item("harmonic_infinite", f.harmonic_infinite)?;
    d.set_item("modularity_undefined", f.modularity_undefined)?;
    Ok(d)
}

/// The seven utility measures of a graph under its own communities.
#[pyfunction]
fn metrics<'py>(py: Python<'py>, graph: &PyGraph) -> PyResult<Bound<'py, PyDict>> {
    let g = &graph.inner;
    let (m, _) = py.detach(|| GraphMetrics::compute(g, &detect_communities(g)));
    metrics_dict(py, &m)
}

/// Utility report comparing two graphs on the same vertices.
#[pyfunction]
fn evaluate<'py>(py: Python<'py>, original: &PyGraph, anonymized: &PyGraph) -> PyResult<Bound<'py, PyDict>> {
    let (g1, g2) = (&original.inner, &anonymized.inner);
    let ev: Evaluation = py.detach(|| pipeline::evaluate(g1, g2)).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("original", metrics_dict(py, &ev.report.original)?)?;
    d.set_item("anonymized", metrics_dict(py, &ev.report.anonymized)?)?;
    d.set_item("errors", metrics_dict(py, &ev.report.errors)?)?;
    d.set_item("original_flags", flags_dict(py, &ev.report.original_flags)?)?;
    d.set_item("anonymized_flags", flags_dict(py, &ev.report.anonymized_flags)?)?;
    d.set_item("precision_index", ev.precision_index)?;
    d.set_item("precision_error", ev.precision_error)?;
    d.set_item("original_communities", ev.original_clustering.assignment().to_vec())?;
    d.set_item("anonymized_communities", ev.anonymized_clustering.assignment().to_vec())?;
    Ok(d)
}

#[pymodule]
pub fn mpda(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyRun>()?;
    m.add_function(wrap_pyfunction!(anonymize, m)?)?;
    m.add_function(wrap_pyfunction!(anonymize_degrees, m)?)?;
    m.add_function(wrap_pyfunction!(communities, m)?)?;
    m.add_function(wrap_pyfunction!(precision, m)?)?;
    m.add_function(wrap_pyfunction!(metrics, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add("InfeasibleError", m.py().get_type::<InfeasibleError>())?;
    m.add("SolverTimeout", m.py().get_type::<SolverTimeout>())?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
