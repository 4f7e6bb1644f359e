//! Command-line front end. `run` is the whole program minus process exit.
//!
//! Exit codes: 0 success, 1 I/O, parse or usage error, 2 validation failure
//! with a witness, 3 failed invariant, 4 numeric failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::checks::{verify_all, Status};
use crate::complex::generate::GenSpec;
use crate::complex::{validate_median_with, BuildOptions, CubeComplex, CubeId, Graph, MedianCheck, Vertex};
use crate::de_rham::{
    all_block_spectra, base_term, block_lower_bound, block_spectrum, convergence_table, galerkin_interval,
    galerkin_two_cell, kernel_alignment, observed_orders, SpectralList,
};
use crate::error::Error;
use crate::exec::Execution;
use crate::format::{fmt_sig12, to_csv, to_json, write_atomic};
use crate::group_action::{difference_report, enumerate_automorphisms, unitary, Automorphism};
use crate::homotopy::convergence_scan_with;
use crate::julg_valette::{cohomology_dims, d_squared_law_check, jv_operator};
use crate::weights::{WeightFn, WeightSpec, WeightValues};

pub const MAX_CUBES_ENV: &str = "CUBESPEC_MAX_CUBES";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "cubespec", version, about = "Operators and spectra on finite CAT(0) cube complexes")]
pub struct Cli {
    /// Complex file: {"vertices": N, "edges": [[u, v], ...], "base": p, "weights": {...}}
    #[arg(long, global = true, value_name = "FILE")]
    input: Option<PathBuf>,

    /// Generated complex, e.g. path:4, tree:2:3, grid:3x3, hypercube:3, tree:2:2*tree:2:2
    #[arg(long, global = true, value_name = "SPEC")]
    generate: Option<String>,

    /// Override the base vertex.
    #[arg(long, global = true)]
    base: Option<Vertex>,

    /// Override the weights: distance, constant:<c>, explicit:<w0>,<w1>,... or a JSON object.
    #[arg(long, global = true)]
    weights: Option<String>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write the report here (atomically) instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Disable data parallelism.
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check that the input graph is a connected median graph.
    Validate,
    /// Summarize cubes, hyperplanes, blocks and weights.
    Info,
    /// Julg–Valette operator: D² law and cohomology (json) or matrix entries (csv).
    Jv,
    /// Block spectra of the squared de Rham operator.
    Dr {
        #[arg(long, default_value_t = 12.0)]
        lambda_max: f64,
        /// Only the block of this vertex.
        #[arg(long)]
        vertex: Option<Vertex>,
    },
    /// Deviation of the deformed operator from Julg–Valette over s.
    Homotopy {
        #[arg(long, value_delimiter = ',', default_value = "1,0.5,0.1,0.01")]
        s: Vec<f64>,
    },
    /// Finite-difference check of the single-edge spectrum.
    Galerkin {
        #[arg(long, default_value_t = 1.0)]
        w: f64,
        #[arg(long, default_value_t = 2000)]
        n: usize,
        /// Grid doublings in the convergence table.
        #[arg(long, default_value_t = 2)]
        levels: usize,
    },
    /// Difference reports for one automorphism (JSON array) or all of them.
    Action {
        #[arg(long, value_name = "JSON")]
        perm: Option<String>,
    },
    /// Print the generated graph as an input file.
    Generate,
    /// Run every invariant check.
    VerifyAll,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::MalformedGraph(_) | Error::InvalidParameter(_) | Error::InvalidPermutation(_) | Error::WeightCount { .. } => 1,
        Error::Disconnected { .. } | Error::NotMedian { .. } | Error::NotAutomorphism { .. } => 2,
        Error::NonPositiveWeight { .. }
        | Error::InvariantViolation(_)
        | Error::NotAdjacent { .. }
        | Error::LawViolated { .. }
        | Error::IdentityViolated { .. }
        | Error::SupportViolated { .. }
        | Error::BoundViolated { .. }
        | Error::EstimateViolated(_) => 3,
        Error::DimensionExceeded { .. }
        | Error::SizeOverflow { .. }
        | Error::EigenFailure(_)
        | Error::TruncationOverflow { .. } => 4,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: exit_code(&e), message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::usage(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::usage(e.to_string())
    }
}

type CmdResult = std::result::Result<(String, i32), Failure>;

/// Parses `args` (including the program name), runs the command and returns
/// the exit code. Reports go to `out` or `--output`; diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let sink: &mut dyn Write = if code == 0 { out } else { err };
            let _ = write!(sink, "{e}");
            return code;
        }
    };
    let result = execute(&cli).and_then(|(text, code)| {
        match &cli.output {
            Some(path) => write_atomic(path, text.as_bytes())?,
            None => out.write_all(text.as_bytes())?,
        }
        Ok(code)
    });
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn execute(cli: &Cli) -> CmdResult {
    let exec = if cli.sequential { Execution::Sequential } else { Execution::default() };
    match &cli.command {
        Command::Galerkin { w, n, levels } => galerkin(cli.format, *w, *n, *levels),
        Command::Generate => {
            let (graph, _) = load(cli)?;
            Ok((to_json(&graph)?, 0))
        }
        Command::Validate => {
            let (graph, _) = load(cli)?;
            validate(&graph, exec)
        }
        command => {
            let (graph, spec) = load(cli)?;
            let x = CubeComplex::build_with(graph, build_options()?, exec)?;
            match command {
                Command::Info => info(cli.format, &x, &spec.resolve(&x)?),
                Command::Jv => jv(cli.format, &x, &spec.resolve(&x)?),
                Command::Dr { lambda_max, vertex } => dr(cli.format, &x, &spec.resolve(&x)?, *lambda_max, *vertex, exec),
                Command::Homotopy { s } => {
                    let rows = convergence_scan_with(&x, &spec.resolve(&x)?, s, exec)?;
                    table_or_json(cli.format, &rows, &["s", "max_deviation", "bound", "identity_residual", "block_error", "block_bound"], |r| {
                        vec![r.s, r.max_deviation, r.bound, r.identity_residual, r.block_error, r.block_bound]
                            .into_iter()
                            .map(fmt_sig12)
                            .collect()
                    })
                }
                Command::Action { perm } => action(cli.format, &x, &spec.resolve(&x)?, perm.as_deref()),
                Command::VerifyAll => {
                    let report = verify_all(&x, &spec, exec);
                    let code = if report.passed { 0 } else { 3 };
                    let (text, _) = table_or_json(cli.format, &report.checks, &["name", "status", "measured", "tolerance", "slack", "detail"], |c| {
                        let status = match c.status {
                            Status::Pass => "pass",
                            Status::Fail => "fail",
                            Status::Skipped => "skipped",
                        };
                        vec![
                            c.name.to_string(),
                            status.to_string(),
                            fmt_sig12(c.measured),
                            fmt_sig12(c.tolerance),
                            fmt_sig12(c.slack),
                            c.detail.clone(),
                        ]
                    })?;
                    let text = if cli.format == Format::Json { to_json(&report)? } else { text };
                    Ok((text, code))
                }
                Command::Validate | Command::Generate | Command::Galerkin { .. } => unreachable!(),
            }
        }
    }
}

fn build_options() -> std::result::Result<BuildOptions, Failure> {
    let mut options = BuildOptions::default();
    if let Ok(raw) = std::env::var(MAX_CUBES_ENV) {
        options.max_cubes = raw
            .trim()
            .parse()
            .map_err(|_| Failure::usage(format!("{MAX_CUBES_ENV} must be a non-negative integer, got {raw:?}")))?;
    }
    Ok(options)
}

fn load(cli: &Cli) -> std::result::Result<(Graph, WeightSpec), Failure> {
    let (graph, mut spec) = match (&cli.input, &cli.generate) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
            let value: serde_json::Value = serde_json::from_str(&text)?;
            let spec = match value.get("weights") {
                Some(w) => serde_json::from_value(w.clone())?,
                None => WeightSpec::default(),
            };
            (Graph::from_json(&text)?, spec)
        }
        (None, Some(spec)) => {
            let g: GenSpec = spec.parse()?;
            (g.generate(build_options()?.max_cubes)?, WeightSpec::default())
        }
        _ => return Err(Failure::usage("exactly one of --input and --generate is required")),
    };
    let graph = match cli.base {
        Some(b) => graph.with_base(b)?,
        None => graph,
    };
    if let Some(raw) = &cli.weights {
        spec = parse_weight_spec(raw)?;
    }
    Ok((graph, spec))
}

pub fn parse_weight_spec(raw: &str) -> crate::Result<WeightSpec> {
    let raw = raw.trim();
    let bad = |why: String| Error::InvalidParameter(format!("weights {raw:?}: {why}"));
    if raw.starts_with('{') {
        return serde_json::from_str(raw).map_err(|e| bad(e.to_string()));
    }
    let number = |s: &str| s.trim().parse::<f64>().map_err(|e| bad(e.to_string()));
    match raw.split_once(':') {
        None if raw == "distance" => Ok(WeightSpec::Distance),
        Some(("constant", v)) => Ok(WeightSpec::Constant { value: number(v)? }),
        Some(("explicit", vs)) => Ok(WeightSpec::Explicit {
            values: vs.split(',').map(number).collect::<crate::Result<_>>()?,
        }),
        _ => Err(bad("expected distance, constant:<c> or explicit:<list>".into())),
    }
}

fn json_only(format: Format, what: &str) -> std::result::Result<(), Failure> {
    match format {
        Format::Json => Ok(()),
        Format::Csv => Err(Failure::usage(format!("{what} has no CSV form; use --format json"))),
    }
}

fn table_or_json<T: Serialize>(
    format: Format,
    rows: &[T],
    header: &[&str],
    cells: impl Fn(&T) -> Vec<String>,
) -> CmdResult {
    let text = match format {
        Format::Json => to_json(&rows)?,
        Format::Csv => to_csv(header, rows.iter().map(cells))?,
    };
    Ok((text, 0))
}

fn validate(graph: &Graph, exec: Execution) -> CmdResult {
    let report = match validate_median_with(graph, exec) {
        Ok(MedianCheck::Ok) => {
            json!({"valid": true, "vertices": graph.vertex_count(), "edges": graph.edges().len()})
        }
        Ok(MedianCheck::Witness { triple, median_count }) => {
            json!({"valid": false, "reason": "not_median", "triple": triple, "median_count": median_count})
        }
        Err(Error::Disconnected { unreachable }) => {
            json!({"valid": false, "reason": "disconnected", "unreachable": unreachable})
        }
        Err(e) => return Err(e.into()),
    };
    let code = if report["valid"] == json!(true) { 0 } else { 2 };
    Ok((to_json(&report)?, code))
}

fn info(format: Format, x: &CubeComplex, w: &WeightFn) -> CmdResult {
    json_only(format, "info")?;
    let report = json!({
        "vertices": x.vertex_count(),
        "edges": x.graph().edges().len(),
        "base": x.base(),
        "dimension": x.dimension(),
        "hyperplanes": x.hyperplane_count(),
        "cubes": x.cube_count(),
        "cubes_by_dimension": (0..=x.dimension()).map(|q| x.cubes_of_dim(q).len()).collect::<Vec<_>>(),
        "block_sizes": (0..x.vertex_count()).map(|q| x.block(q).len()).collect::<Vec<_>>(),
        "weights_exact": w.is_exact(),
        "weights": w.to_f64_vec(),
    });
    Ok((to_json(&report)?, 0))
}

fn jv(format: Format, x: &CubeComplex, w: &WeightFn) -> CmdResult {
    let weights = w.to_f64_vec();
    let op = jv_operator(x, &weights);
    if format == Format::Csv {
        let rows = op.entries().map(|((r, c), v)| vec![r.to_string(), c.to_string(), fmt_sig12(*v)]);
        return Ok((to_csv(&["row", "col", "value"], rows)?, 0));
    }
    let law = match w.values() {
        WeightValues::Exact(v) => d_squared_law_check(x, v)?,
        WeightValues::Float(v) => d_squared_law_check(x, v)?,
    };
    let report = json!({
        "exact": law.exact,
        "nnz": op.nnz(),
        "d_squared": law,
        "cohomology": cohomology_dims(x, w),
    });
    Ok((to_json(&report)?, 0))
}

fn dr(format: Format, x: &CubeComplex, w: &WeightFn, lambda_max: f64, vertex: Option<Vertex>, exec: Execution) -> CmdResult {
    let blocks: Vec<(Vertex, SpectralList)> = match vertex {
        Some(q) if q >= x.vertex_count() => {
            return Err(Failure::usage(format!("vertex {q} out of range")));
        }
        Some(q) => vec![(q, block_spectrum(x, w, q, lambda_max)?)],
        None => all_block_spectra(x, w, lambda_max, exec)?.into_iter().enumerate().collect(),
    };
    match format {
        Format::Csv => {
            let rows = blocks.iter().flat_map(|(q, s)| {
                s.entries()
                    .iter()
                    .map(move |&(v, m)| vec![fmt_sig12(v), m.to_string(), q.to_string()])
            });
            Ok((to_csv(&["eigenvalue", "multiplicity", "block_vertex"], rows)?, 0))
        }
        Format::Json => {
            let report = json!({
                "lambda_max": lambda_max,
                "count": blocks.iter().map(|(_, s)| s.count()).sum::<usize>(),
                "blocks": blocks.iter().map(|(q, s)| json!({
                    "vertex": q,
                    "lower_bound": block_lower_bound(x, w, *q),
                    "entries": s.entries(),
                })).collect::<Vec<_>>(),
            });
            Ok((to_json(&report)?, 0))
        }
    }
}

fn galerkin(format: Format, w: f64, n: usize, levels: usize) -> CmdResult {
    if levels == 0 {
        return Err(Failure::usage("--levels must be at least 1"));
    }
    let table = convergence_table(w, n, levels)?;
    let orders = observed_orders(&table);
    let kernel = galerkin_interval(w, n, 1.0)?.min().unwrap_or(f64::NAN);
    let two_cell = galerkin_two_cell(w, n, 1.0 + base_term(w))?.min().unwrap_or(f64::NAN);
    let alignment = kernel_alignment(w, n)?;
    #[derive(Serialize)]
    struct Row {
        quantity: &'static str,
        n: usize,
        computed: f64,
        analytic: f64,
        error: f64,
        order: Option<f64>,
    }
    let mut rows = vec![Row { quantity: "kernel", n, computed: kernel, analytic: 0.0, error: kernel.abs(), order: None }];
    rows.extend(table.iter().enumerate().map(|(i, r)| Row {
        quantity: "series_1",
        n: r.n,
        computed: r.computed,
        analytic: r.analytic,
        error: r.relative_error,
        order: i.checked_sub(1).map(|j| orders[j]),
    }));
    let base = base_term(w);
    rows.push(Row { quantity: "two_cell", n, computed: two_cell, analytic: base, error: (two_cell - base).abs(), order: None });
    rows.push(Row { quantity: "kernel_alignment", n, computed: alignment, analytic: 1.0, error: (1.0 - alignment).abs(), order: None });
    table_or_json(format, &rows, &["quantity", "n", "computed", "analytic", "error", "order"], |r| {
        vec![
            r.quantity.to_string(),
            r.n.to_string(),
            fmt_sig12(r.computed),
            fmt_sig12(r.analytic),
            fmt_sig12(r.error),
            r.order.map(fmt_sig12).unwrap_or_default(),
        ]
    })
}

fn action(format: Format, x: &CubeComplex, w: &WeightFn, perm: Option<&str>) -> CmdResult {
    json_only(format, "action")?;
    let group = match perm {
        Some(text) => {
            let perm: Vec<Vertex> = serde_json::from_str(text)?;
            vec![Automorphism::validate(x, &perm)?]
        }
        None => enumerate_automorphisms(x)?,
    };
    let reports = group
        .iter()
        .map(|g| {
            let u = unitary(x, g);
            let report = difference_report(x, g, w)?;
            Ok(json!({
                "vertex_map": g.vertex_map(),
                "hyperplane_map": g.hyperplane_map().iter().map(|h| h.0).collect::<Vec<_>>(),
                "cube_map": u.target.iter().map(|c: &CubeId| c.0).collect::<Vec<_>>(),
                "cube_sign": u.sign,
                "difference": report,
            }))
        })
        .collect::<crate::Result<Vec<_>>>()?;
    Ok((to_json(&reports)?, 0))
}
