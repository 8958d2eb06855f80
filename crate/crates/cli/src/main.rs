//! `mpda`: anonymize an edge list under the multi-parameterized k-degree
//! model and report how much structure the edits cost.
//!
//! Exit codes: 0 success, 1 I/O or validation error, 2 strict realization
//! infeasible, 3 solver limit reached.

mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use mpda_core::ilp::Limits;
use mpda_core::pipeline::{evaluate, export_model};
use mpda_core::{
    load_graph, run_pipeline, save_graph, AnonymizationParams, Error, Graph, LoadOptions, PipelineConfig,
    RealizationMode,
};
use serde::Serialize;

use report::{
    average, csv_rows, BatchEntry, BatchSummary, EvaluationReport, PlanReport, RunReport, PRECISION_DEFINITION,
};

#[derive(Debug, Parser)]
#[command(name = "mpda", version, about = "Multi-parameterized k-degree anonymization")]
struct Cli {
    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Anonymize a graph and evaluate the result.
    Anonymize(AnonymizeArgs),
    /// Compare an original graph with an anonymized one.
    Evaluate(EvaluateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Strict,
    Relaxed,
}

#[derive(Debug, Args)]
struct AnonymizeArgs {
    /// Edge list to anonymize.
    #[arg(long)]
    input: PathBuf,
    /// Anonymity level. A comma-separated list runs one job per value.
    #[arg(long, value_delimiter = ',', required = true)]
    k: Vec<usize>,
    /// Degree tolerance.
    #[arg(long, default_value_t = 0)]
    t: usize,
    #[arg(long, value_enum, default_value_t = Mode::Relaxed)]
    mode: Mode,
    /// Cost of one unit of degree slack in relaxed mode.
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    /// Solver time limit in seconds.
    #[arg(long, default_value_t = 60.0)]
    time_limit: f64,
    /// Per-vertex addition cap, replacing the chunk budgets.
    #[arg(long)]
    a: Option<usize>,
    /// Per-vertex deletion cap (defaults to `--a` when that is given).
    #[arg(long)]
    d: Option<usize>,
    /// Nudge one target so the degree changes sum to an even number.
    #[arg(long)]
    parity_repair: bool,
    /// Drop self-loops from the input instead of rejecting it.
    #[arg(long)]
    drop_self_loops: bool,
    /// Anonymized edge list.
    #[arg(long)]
    out: PathBuf,
    /// JSON report (the cross-k summary in batch mode).
    #[arg(long)]
    report: PathBuf,
    /// Edit plan log: `+ u v`, `- u v` and `slack v s` lines.
    #[arg(long)]
    plan: Option<PathBuf>,
    /// Export the realization model in LP format.
    #[arg(long)]
    lp: Option<PathBuf>,
    /// Communities of the anonymized graph as `vertex cluster_id` lines.
    #[arg(long)]
    clusters: Option<PathBuf>,
    /// Communities of the original graph as `vertex cluster_id` lines.
    #[arg(long)]
    original_clusters: Option<PathBuf>,
    /// Per-k error table (batch mode defaults to the report path with a .csv extension).
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[arg(long)]
    original: PathBuf,
    #[arg(long)]
    anonymized: PathBuf,
    #[arg(long)]
    report: PathBuf,
    #[arg(long)]
    clusters: Option<PathBuf>,
    #[arg(long)]
    original_clusters: Option<PathBuf>,
    #[arg(long)]
    drop_self_loops: bool,
}

/// A failure and the exit code it maps to.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Infeasible(_) => 2,
            Error::Timeout { .. } => 3,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::from(Error::Io(e))
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .init();
    let result = match cli.command {
        Command::Anonymize(args) => anonymize(&args),
        Command::Evaluate(args) => evaluate_files(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load(path: &Path, drop_self_loops: bool) -> Result<Graph, Failure> {
    let opts = LoadOptions {
        strict: !drop_self_loops,
    };
    load_graph(path, opts)
        .map(|l| l.graph)
        .map_err(|e| Failure::from(e).with_context(path))
}

impl Failure {
    fn with_context(mut self, path: &Path) -> Self {
        self.message = format!("{}: {}", path.display(), self.message);
        self
    }
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::from(e).with_context(path))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| invalid(e.to_string()))?;
    text.push('\n');
    write(path, &text)
}

/// `dir/name.ext` becomes `dir/name.k<k>.ext`.
fn per_k(path: &Path, k: usize) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}.k{k}.{}", ext.to_string_lossy()),
        None => format!("{stem}.k{k}"),
    };
    path.with_file_name(name)
}

fn config(args: &AnonymizeArgs, k: usize) -> Result<PipelineConfig, Failure> {
    let params = AnonymizationParams::new(k, args.t)?;
    let mut cfg = PipelineConfig::new(params).with_parity_repair(args.parity_repair);
    cfg.mode = match args.mode {
        Mode::Strict => RealizationMode::Strict,
        Mode::Relaxed => RealizationMode::Relaxed { lambda: args.lambda },
    };
    cfg.limits = Limits {
        time: Duration::from_secs_f64(args.time_limit),
        ..Limits::default()
    };
    cfg.max_additions = args.a;
    cfg.max_deletions = args.d.or(args.a);
    Ok(cfg)
}

fn validate(args: &AnonymizeArgs, n: usize) -> Result<(), Failure> {
    if !(args.lambda.is_finite() && args.lambda > 0.0) {
        return Err(invalid(format!("--lambda must be positive, got {}", args.lambda)));
    }
    if !(args.time_limit.is_finite() && args.time_limit > 0.0) {
        return Err(invalid(format!(
            "--time-limit must be positive, got {}",
            args.time_limit
        )));
    }
    if let Some(&k) = args.k.iter().find(|&&k| k < 2 || k > n) {
        return Err(invalid(format!("k = {k} is outside 2..={n}")));
    }
    if args.mode == Mode::Strict && args.lambda != 1.0 {
        log::warn!("--lambda has no effect in strict mode");
    }
    Ok(())
}

/// Paths one job writes to.
struct Outputs {
    graph: PathBuf,
    report: PathBuf,
    plan: Option<PathBuf>,
    lp: Option<PathBuf>,
    clusters: Option<PathBuf>,
    original_clusters: Option<PathBuf>,
}

impl Outputs {
    fn new(args: &AnonymizeArgs, batch_k: Option<usize>) -> Self {
        let place = |p: &Path| match batch_k {
            Some(k) => per_k(p, k),
            None => p.to_path_buf(),
        };
        Outputs {
            graph: place(&args.out),
            report: place(&args.report),
            plan: args.plan.as_deref().map(place),
            lp: args.lp.as_deref().map(place),
            clusters: args.clusters.as_deref().map(place),
            original_clusters: args.original_clusters.clone(),
        }
    }
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Strict => "strict",
        Mode::Relaxed => "relaxed",
    }
}

fn run_one(args: &AnonymizeArgs, g: &Graph, k: usize, out: &Outputs) -> Result<RunReport, Failure> {
    let cfg = config(args, k)?;
    if let Some(path) = &out.lp {
        write(path, &export_model(g, &cfg)?)?;
    }
    let started = Instant::now();
    let run = run_pipeline(g, &cfg)?;
    info!("k={k}: realized in {:.3} s", started.elapsed().as_secs_f64());
    let evaluation = evaluate(g, &run.anonymized)?;
    save_graph(&run.anonymized, &out.graph).map_err(|e| Failure::from(e).with_context(&out.graph))?;
    let plan = PlanReport::new(g, &run);
    if let Some(path) = &out.plan {
        write(path, &plan.to_lines())?;
    }
    if let Some(path) = &out.clusters {
        write(path, &evaluation.anonymized_clustering.to_lines(&run.anonymized))?;
    }
    if let Some(path) = &out.original_clusters {
        write(path, &evaluation.original_clustering.to_lines(g))?;
    }
    let report = RunReport {
        input: args.input.display().to_string(),
        vertices: g.n(),
        k,
        t: args.t,
        mode: mode_name(args.mode),
        lambda: (args.mode == Mode::Relaxed).then_some(args.lambda),
        parity_repair: args.parity_repair,
        edges_original: g.edge_count(),
        edges_anonymized: run.anonymized.edge_count(),
        edits: run.edits(),
        total_slack: run.total_slack(),
        max_slack: run.realization.plan.max_slack(),
        objective: run.realization.objective,
        nodes_explored: run.realization.nodes_explored,
        verified_t: run.verified_t,
        k_anonymous: run.k_anonymous,
        chunks: run.anonymization.chunks.clone(),
        plan,
        evaluation,
        precision_definition: PRECISION_DEFINITION,
    };
    write_json(&out.report, &report)?;
    println!(
        "k={k} t={}: {} edits (+{} -{}), slack {}, precision error {:.4}",
        args.t,
        report.edits,
        report.plan.additions.len(),
        report.plan.deletions.len(),
        report.total_slack,
        report.evaluation.precision_error
    );
    Ok(report)
}

fn anonymize(args: &AnonymizeArgs) -> Result<(), Failure> {
    let g = load(&args.input, args.drop_self_loops)?;
    validate(args, g.n())?;
    if let [k] = args.k[..] {
        let report = run_one(args, &g, k, &Outputs::new(args, None))?;
        if let Some(csv) = &args.csv {
            let entry = batch_entry(k, args.report.display().to_string(), Ok(&report));
            write(csv, &csv_rows(&[entry]))?;
        }
        return Ok(());
    }

    let mut entries = Vec::new();
    let mut first_failure: Option<Failure> = None;
    for &k in &args.k {
        let out = Outputs::new(args, Some(k));
        let result = run_one(args, &g, k, &out);
        if let Err(f) = &result {
            eprintln!("k={k}: {}", f.message);
        }
        let entry = batch_entry(
            k,
            out.report.display().to_string(),
            result.as_ref().map_err(|f| f.message.clone()),
        );
        entries.push(entry);
        if let Err(f) = result {
            first_failure.get_or_insert(f);
        }
    }
    let ok: Vec<_> = entries.iter().filter_map(|e| e.errors.as_ref()).collect();
    let precisions: Vec<f64> = entries.iter().filter_map(|e| e.precision_error).collect();
    let summary = BatchSummary {
        input: args.input.display().to_string(),
        t: args.t,
        mode: mode_name(args.mode),
        average_errors: average(&ok),
        average_precision_error: (!precisions.is_empty())
            .then(|| precisions.iter().sum::<f64>() / precisions.len() as f64),
        runs: entries,
    };
    let csv = args.csv.clone().unwrap_or_else(|| args.report.with_extension("csv"));
    write(&csv, &csv_rows(&summary.runs))?;
    write_json(&args.report, &summary)?;
    if let Some(p) = summary.average_precision_error {
        println!("average over {} runs: precision error {p:.4}", precisions.len());
    }
    first_failure.map_or(Ok(()), Err)
}

fn batch_entry(k: usize, report: String, result: Result<&RunReport, String>) -> BatchEntry {
    match result {
        Ok(r) => BatchEntry {
            k,
            report,
            edits: Some(r.edits),
            total_slack: Some(r.total_slack),
            precision_error: Some(r.evaluation.precision_error),
            errors: Some(r.evaluation.report.errors.clone()),
            failure: None,
        },
        Err(message) => BatchEntry {
            k,
            report,
            edits: None,
            total_slack: None,
            precision_error: None,
            errors: None,
            failure: Some(message),
        },
    }
}

fn evaluate_files(args: &EvaluateArgs) -> Result<(), Failure> {
    let g1 = load(&args.original, args.drop_self_loops)?;
    let g2 = load(&args.anonymized, args.drop_self_loops)?;
    if g1.n() != g2.n() {
        return Err(invalid(format!(
            "vertex counts differ: {} has {}, {} has {}",
            args.original.display(),
            g1.n(),
            args.anonymized.display(),
            g2.n()
        )));
    }
    if g1.labels() != g2.labels() {
        return Err(invalid("the two graphs name different vertices"));
    }
    let evaluation = evaluate(&g1, &g2)?;
    if let Some(path) = &args.clusters {
        write(path, &evaluation.anonymized_clustering.to_lines(&g2))?;
    }
    if let Some(path) = &args.original_clusters {
        write(path, &evaluation.original_clustering.to_lines(&g1))?;
    }
    println!(
        "precision index {:.4}, precision error {:.4}, {} vs {} communities",
        evaluation.precision_index,
        evaluation.precision_error,
        evaluation.original_clusters,
        evaluation.anonymized_clusters
    );
    let report = EvaluationReport {
        original: args.original.display().to_string(),
        anonymized_path: args.anonymized.display().to_string(),
        vertices: g1.n(),
        evaluation,
        precision_definition: PRECISION_DEFINITION,
    };
    write_json(&args.report, &report)
}
