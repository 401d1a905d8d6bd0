//! Command-line front end: argument parsing, graph loading and report
//! rendering. [`run`] is the whole program minus process I/O, so it can be
//! driven from tests.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use icsym_core::exact::ExactOracle;
use icsym_core::graph::{generate_er_graph, parse_edge_list, serialize_edge_list, EdgeProbability, Graph};
use icsym_core::stats::EstimateCell;
use icsym_core::verify::{
    check_exact_symmetry, check_mc_consistency, check_reversal_distribution, check_transpose_identity,
};
use icsym_core::{estimate_p_matrix, matrix_estimate_p, DEFAULT_EXACT_CAP};

/// Exit status for success or a passing check.
pub const EXIT_OK: i32 = 0;
/// Exit status for a verification that ran and failed.
pub const EXIT_FAILED: i32 = 1;
/// Exit status for usage and input errors.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Input { path: String, message: String },
    #[error(transparent)]
    Engine(Box<dyn std::error::Error + Send + Sync>),
}

fn engine<E: std::error::Error + Send + Sync + 'static>(e: E) -> CliError {
    CliError::Engine(Box::new(e))
}

/// `er:<n>:<density>:<p|uniform>`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenSpec {
    pub nodes: usize,
    pub density: f64,
    pub prob: EdgeProbability,
}

impl FromStr for GenSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let ["er", nodes, density, prob] = parts[..] else {
            return Err(format!("expected er:<n>:<density>:<p|uniform>, got {s:?}"));
        };
        let nodes: usize = nodes
            .parse()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| format!("invalid node count {nodes:?}"))?;
        let density: f64 = density
            .parse()
            .ok()
            .filter(|d| (0.0..=1.0).contains(d))
            .ok_or_else(|| format!("invalid density {density:?}"))?;
        Ok(GenSpec {
            nodes,
            density,
            prob: prob.parse()?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "icsym", version, about = "Independent cascade simulation and symmetry verification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct GraphSource {
    /// Edge-list file.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Generated graph, `er:<n>:<density>:<p|uniform>`, seeded by --seed.
    #[arg(long)]
    pub gen: Option<GenSpec>,
}

#[derive(Debug, Args)]
pub struct Common {
    #[command(flatten)]
    pub source: GraphSource,
    /// Number of cascade steps.
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0.99)]
    pub confidence: f64,
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = DEFAULT_EXACT_CAP)]
    pub exact_cap: usize,
}

#[derive(Debug, Args)]
pub struct SymmetryArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = DEFAULT_EXACT_CAP)]
    pub exact_cap: usize,
}

#[derive(Debug, Args)]
pub struct TransposeArgs {
    #[command(flatten)]
    pub common: Common,
    /// Number of sampled matrix sequences.
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
}

#[derive(Debug, Args)]
pub struct ConsistencyArgs {
    #[command(flatten)]
    pub estimate: EstimateArgs,
    #[arg(long, default_value_t = DEFAULT_EXACT_CAP)]
    pub exact_cap: usize,
}

#[derive(Debug, Subcommand)]
pub enum Check {
    /// Exact check of P_ij(n) = P_ji(n).
    Symmetry(SymmetryArgs),
    /// Per-sample transpose identity of step-matrix products.
    Transpose(TransposeArgs),
    /// Monte Carlo engines against exact values.
    Consistency(ConsistencyArgs),
    /// Forward and reversed product orders agree in distribution.
    Reversal(EstimateArgs),
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print a generated graph as an edge list.
    Gen {
        #[arg(long)]
        gen: GenSpec,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Monte Carlo estimate of P(n) with the cascade engine.
    Simulate(EstimateArgs),
    /// Exact P(n).
    Exact(ExactArgs),
    /// Monte Carlo estimate of P(n) with the matrix engine.
    MatrixEstimate(EstimateArgs),
    /// Verification checks.
    Verify {
        #[command(subcommand)]
        check: Check,
    },
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String, pass: Option<bool>) -> Self {
        Outcome {
            status: if pass == Some(false) { EXIT_FAILED } else { EXIT_OK },
            stdout,
            stderr: String::new(),
        }
    }
}

fn load_graph(source: &GraphSource, seed: u64) -> Result<Graph, CliError> {
    match (&source.graph, &source.gen) {
        (Some(path), None) => {
            let display = path.display().to_string();
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Input {
                path: display.clone(),
                message: e.to_string(),
            })?;
            parse_edge_list(&text).map_err(|e| CliError::Input {
                path: display,
                message: e.to_string(),
            })
        }
        (None, Some(spec)) => generate_er_graph(spec.nodes, spec.density, spec.prob, seed).map_err(engine),
        _ => Err(CliError::Usage("exactly one of --graph or --gen is required".into())),
    }
}

fn oracle(cap: usize) -> Result<ExactOracle, CliError> {
    if cap > 63 {
        return Err(CliError::Usage(format!("--exact-cap {cap} exceeds 63")));
    }
    Ok(ExactOracle::with_cap(cap))
}

fn check_confidence(c: f64) -> Result<(), CliError> {
    if c > 0.0 && c < 1.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--confidence {c} must lie in (0, 1)")))
    }
}

fn check_trials(t: u64) -> Result<(), CliError> {
    if t >= 1 {
        Ok(())
    } else {
        Err(CliError::Usage("--trials must be at least 1".into()))
    }
}

#[derive(Serialize)]
struct Report<'a> {
    command: &'a str,
    graph: Value,
    n: usize,
    seed: u64,
    results: Value,
    pass: Option<bool>,
}

fn render_json(command: &str, g: &Graph, common: &Common, results: Value, pass: Option<bool>) -> String {
    let report = Report {
        command,
        graph: json!({ "nodes": g.node_count(), "edges": g.edge_count() }),
        n: common.n,
        seed: common.seed,
        results,
        pass,
    };
    let mut out = serde_json::to_string_pretty(&report).expect("report serialises");
    out.push('\n');
    out
}

/// Rows of comma-separated values, no header.
fn render_csv_matrix<T: std::fmt::Debug>(rows: &[Vec<T>]) -> String {
    let mut out = String::new();
    for row in rows {
        let line: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        writeln!(out, "{}", line.join(",")).unwrap();
    }
    out
}

fn render_csv_summary(pairs: &[(&str, String)]) -> String {
    let header: Vec<&str> = pairs.iter().map(|(k, _)| *k).collect();
    let values: Vec<&str> = pairs.iter().map(|(_, v)| v.as_str()).collect();
    format!("{}\n{}\n", header.join(","), values.join(","))
}

fn map_cells<T>(cells: &[Vec<EstimateCell>], f: impl Fn(&EstimateCell) -> T) -> Vec<Vec<T>> {
    cells.iter().map(|row| row.iter().map(&f).collect()).collect()
}

fn estimate_results(engine: &str, args: &EstimateArgs, cells: &[Vec<EstimateCell>]) -> Value {
    json!({
        "engine": engine,
        "trials": args.trials,
        "confidence": args.confidence,
        "estimates": map_cells(cells, |c| c.point),
        "ci_low": map_cells(cells, |c| c.ci_low),
        "ci_high": map_cells(cells, |c| c.ci_high),
        "successes": map_cells(cells, |c| c.successes),
    })
}

fn estimate_command(name: &str, args: &EstimateArgs, matrix_engine: bool) -> Result<Outcome, CliError> {
    check_trials(args.trials)?;
    check_confidence(args.confidence)?;
    let c = &args.common;
    let g = load_graph(&c.source, c.seed)?;
    let cells = if matrix_engine {
        matrix_estimate_p(&g, c.n, args.trials, c.seed, args.confidence).map_err(engine)?
    } else {
        estimate_p_matrix(&g, c.n, args.trials, c.seed, args.confidence).map_err(engine)?
    };
    let stdout = match c.format {
        Format::Csv => render_csv_matrix(&map_cells(&cells, |c| c.point)),
        Format::Json => {
            let label = if matrix_engine { "matrix" } else { "cascade" };
            render_json(name, &g, c, estimate_results(label, args, &cells), None)
        }
    };
    Ok(Outcome::ok(stdout, None))
}

fn dispatch(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Gen { gen, seed } => {
            let g = generate_er_graph(gen.nodes, gen.density, gen.prob, seed).map_err(engine)?;
            Ok(Outcome::ok(serialize_edge_list(&g), None))
        }
        Command::Simulate(args) => estimate_command("simulate", &args, false),
        Command::MatrixEstimate(args) => estimate_command("matrix-estimate", &args, true),
        Command::Exact(args) => {
            let c = &args.common;
            let g = load_graph(&c.source, c.seed)?;
            let p = oracle(args.exact_cap)?.exact_p_matrix(&g, c.n).map_err(engine)?;
            let stdout = match c.format {
                Format::Csv => render_csv_matrix(&p.values),
                Format::Json => render_json("exact", &g, c, json!({ "values": p.values }), None),
            };
            Ok(Outcome::ok(stdout, None))
        }
        Command::Verify { check } => verify(check),
    }
}

fn verify(check: Check) -> Result<Outcome, CliError> {
    match check {
        Check::Symmetry(args) => {
            let c = &args.common;
            let g = load_graph(&c.source, c.seed)?;
            let r = check_exact_symmetry(&oracle(args.exact_cap)?, &g, c.n, args.tol).map_err(engine)?;
            let stdout = match c.format {
                Format::Csv => render_csv_summary(&[
                    ("method", "exact".into()),
                    ("n", c.n.to_string()),
                    ("max_abs_asymmetry", format!("{:?}", r.max_abs_asymmetry)),
                    ("tolerance", format!("{:?}", r.tolerance)),
                    ("violations", r.violations.to_string()),
                    ("pass", r.pass.to_string()),
                ]),
                Format::Json => render_json("verify symmetry", &g, c, to_value(&r), Some(r.pass)),
            };
            Ok(Outcome::ok(stdout, Some(r.pass)))
        }
        Check::Transpose(args) => {
            check_trials(args.trials)?;
            let c = &args.common;
            let g = load_graph(&c.source, c.seed)?;
            let r = check_transpose_identity(&g, c.n, args.trials, c.seed).map_err(engine)?;
            let stdout = match c.format {
                Format::Csv => render_csv_summary(&[
                    ("method", "per-sample".into()),
                    ("n", c.n.to_string()),
                    ("samples", args.trials.to_string()),
                    ("checks", r.checks.to_string()),
                    ("violations", r.violations.to_string()),
                    ("pass", r.pass.to_string()),
                ]),
                Format::Json => render_json("verify transpose", &g, c, to_value(&r), Some(r.pass)),
            };
            Ok(Outcome::ok(stdout, Some(r.pass)))
        }
        Check::Consistency(args) => {
            let e = &args.estimate;
            check_trials(e.trials)?;
            check_confidence(e.confidence)?;
            let c = &e.common;
            let g = load_graph(&c.source, c.seed)?;
            let r = check_mc_consistency(&oracle(args.exact_cap)?, &g, c.n, e.trials, e.confidence, c.seed)
                .map_err(engine)?;
            let pass = r.pass();
            let stdout = match c.format {
                Format::Csv => {
                    let mut out = String::from("i,j,exact,cascade,cascade_inside_ci,matrix,matrix_inside_ci\n");
                    for rec in &r.records {
                        writeln!(
                            out,
                            "{},{},{:?},{:?},{},{:?},{}",
                            rec.i,
                            rec.j,
                            rec.exact,
                            rec.cascade.point,
                            rec.cascade_inside_ci,
                            rec.matrix.point,
                            rec.matrix_inside_ci
                        )
                        .unwrap();
                    }
                    out
                }
                Format::Json => render_json("verify consistency", &g, c, to_value(&r), Some(pass)),
            };
            Ok(Outcome::ok(stdout, Some(pass)))
        }
        Check::Reversal(args) => {
            check_trials(args.trials)?;
            check_confidence(args.confidence)?;
            let c = &args.common;
            let g = load_graph(&c.source, c.seed)?;
            let r = check_reversal_distribution(&g, c.n, args.trials, c.seed, args.confidence).map_err(engine)?;
            let stdout = match c.format {
                Format::Csv => render_csv_summary(&[
                    ("method", "monte-carlo".into()),
                    ("n", c.n.to_string()),
                    ("samples", args.trials.to_string()),
                    ("max_abs_difference", format!("{:?}", r.max_abs_difference)),
                    ("non_overlapping", r.non_overlapping.to_string()),
                    ("pass", r.pass.to_string()),
                ]),
                Format::Json => render_json("verify reversal", &g, c, to_value(&r), Some(r.pass)),
            };
            Ok(Outcome::ok(stdout, Some(r.pass)))
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serialises")
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    status: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: rendered,
                }
            } else {
                Outcome {
                    status: EXIT_OK,
                    stdout: rendered,
                    stderr: String::new(),
                }
            };
        }
    };
    match dispatch(cli) {
        Ok(outcome) => outcome,
        Err(e) => Outcome {
            status: EXIT_USAGE,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}
