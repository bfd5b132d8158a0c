//! Subcommand implementations.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use qproj::elevation::{pi_sector_kernel, SectorPoint};
use qproj::operator::{eigenvalues_in_range, spectral_norm};
use qproj::projector::{
    averaged_projector, averaged_projector_by_group_quadrature, bound_sweep, projector_diagnostics, zero_tolerance,
    ProjectorDiagnostics, SincDiagnostics,
};
use qproj::reparam::{extended_kernel, sharp_q_propagator, ExtendedMode, PropagatorMode, ReducedMode};
use qproj::{
    operator_norm, reduced_kernel, spectral_gap, spectral_projector, KernelValue, PhasePoint,
    ProjectorScheme, QuadratureSpec,
};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{CliError, CliResult};
use crate::model::{BuiltConstraint, Model};
use crate::output::{emit, json_bytes, num, Format, Table};
use crate::suites::{self, Suite, DEFAULT_SEED};

#[derive(Parser, Debug)]
#[command(name = "qproj", version, about = "Projection-operator quantization of constrained systems", long_about = None)]
pub struct Cli {
    /// Increase log verbosity (repeatable)
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Ascending eigenvalues of the constraint operator
    Spectrum(SpectrumArgs),
    /// Spectral gap and zero multiplicity
    Gap(GapArgs),
    /// Build a projector and report its structural defects
    Projector(ProjectorArgs),
    /// Interval-average error against the bound 1/(L Delta)
    BoundSweep(BoundSweepArgs),
    /// Evaluate coherent-state kernels at labelled point pairs
    Kernel(KernelArgs),
    /// Run a named verification suite
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
pub struct ModelArgs {
    /// JSON model file
    #[arg(long)]
    pub model: PathBuf,
    /// Output file; stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub io: ModelArgs,
    /// Only the lowest COUNT eigenvalues
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Args, Debug)]
pub struct GapArgs {
    #[command(flatten)]
    pub io: ModelArgs,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SchemeKind {
    Spectral,
    Sinc,
    Interval,
    Haar,
}

#[derive(Args, Debug)]
pub struct ProjectorArgs {
    #[command(flatten)]
    pub io: ModelArgs,
    #[arg(long, value_enum, default_value = "interval")]
    pub scheme: SchemeKind,
    /// Window half-width; defaults to Delta/2
    #[arg(long)]
    pub delta: Option<f64>,
    /// Sinc cutoff Xi; defaults to 1000/Delta
    #[arg(long)]
    pub xi: Option<f64>,
    /// Sinc refinement target for the truncation and quadrature errors
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Interval half-width
    #[arg(long = "L", default_value_t = 100.0)]
    pub half_width: f64,
    /// Haar nodes
    #[arg(long, default_value_t = 64)]
    pub nodes: usize,
    /// Also integrate exp(-i xi Phi) directly and report the discrepancy
    #[arg(long)]
    pub group_route: bool,
    /// CSV file for the projector matrix (i,j,re,im)
    #[arg(long)]
    pub matrix_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BoundSweepArgs {
    #[command(flatten)]
    pub io: ModelArgs,
    /// Comma-separated interval half-widths
    #[arg(long = "L", value_delimiter = ',', required = true)]
    pub half_widths: Vec<f64>,
}

#[derive(Args, Debug)]
pub struct KernelArgs {
    /// JSON kernel request
    #[arg(long)]
    pub points: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Group-route node budget for `projector --group-route`.
const GROUP_ROUTE_NODES: usize = 8192;

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Spectrum(a) => spectrum(a),
        Command::Gap(a) => gap(a),
        Command::Projector(a) => projector(a),
        Command::BoundSweep(a) => bound_sweep_cmd(a),
        Command::Kernel(a) => kernel(a),
        Command::Verify(a) => verify(a),
    }
}

fn load(path: &Path) -> CliResult<(Model, BuiltConstraint)> {
    let model = Model::load(path)?;
    let built = model.build()?;
    Ok((model, built))
}

fn spectrum(args: SpectrumArgs) -> CliResult<()> {
    let (_, built) = load(&args.io.model)?;
    let op = &built.operator;
    let count = args.count.unwrap_or(op.dim());
    if count == 0 || count > op.dim() {
        return Err(CliError::Input(format!("count must be in 1..={}, got {count}", op.dim())));
    }
    let values = eigenvalues_in_range(op, 0..count)?;
    // bisection resolves to a few ulps of the norm; dense QR to n ulps
    let ulps = if op.as_tridiagonal().is_some() { 4.0 } else { op.dim() as f64 };
    let tolerance = ulps * f64::EPSILON * operator_norm(op)?;
    let bytes = match Format::resolve(args.format, args.io.out.as_deref()) {
        Format::Csv => {
            let mut t = Table::new(&["index", "eigenvalue", "tolerance"])?;
            for (i, v) in values.iter().enumerate() {
                t.row([i.to_string(), num(*v), num(tolerance)])?;
            }
            t.into_bytes()?
        }
        Format::Json => json_bytes(&json!({ "dim": op.dim(), "tolerance": tolerance, "eigenvalues": values }))?,
    };
    emit(args.io.out.as_deref(), &bytes)
}

fn gap(args: GapArgs) -> CliResult<()> {
    let (model, built) = load(&args.io.model)?;
    let report = spectral_gap(&built.operator, model.tolerances.zero_tolerance)?;
    let bytes = match Format::resolve(args.format, args.io.out.as_deref()) {
        Format::Csv => {
            let mut t = Table::new(&["Delta", "zero_multiplicity", "zero_tolerance"])?;
            t.row([num(report.delta_cap), report.zero_multiplicity.to_string(), num(report.zero_tolerance)])?;
            t.into_bytes()?
        }
        Format::Json => json_bytes(&json!({ "gap": report, "c": built.c, "dim": built.operator.dim() }))?,
    };
    emit(args.io.out.as_deref(), &bytes)
}

#[derive(Debug, Serialize)]
struct ProjectorSummary {
    scheme: ProjectorScheme,
    dim: usize,
    #[serde(rename = "Delta")]
    delta_cap: f64,
    zero_tolerance: f64,
    diagnostics: ProjectorDiagnostics,
    #[serde(skip_serializing_if = "Option::is_none")]
    sinc: Option<SincDiagnostics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    group_route_discrepancy: Option<f64>,
}

fn projector(args: ProjectorArgs) -> CliResult<()> {
    let (model, built) = load(&args.io.model)?;
    let op = &built.operator;
    let zero_tol = model.tolerances.zero_tolerance;
    let gap = spectral_gap(op, zero_tol)?;
    let half_gap = gap.delta_cap / 2.0;
    let scheme = match args.scheme {
        SchemeKind::Spectral => ProjectorScheme::Spectral { delta: args.delta.unwrap_or(half_gap) },
        SchemeKind::Sinc => {
            let mut s = ProjectorScheme::sinc(args.delta.unwrap_or(half_gap), args.xi.unwrap_or(1e3 / gap.delta_cap));
            if let ProjectorScheme::Sinc { tolerance, .. } = &mut s {
                *tolerance = args.tolerance;
            }
            s
        }
        SchemeKind::Interval => ProjectorScheme::Interval { half_width: args.half_width },
        SchemeKind::Haar => ProjectorScheme::Haar { nodes: args.nodes },
    };
    scheme.validate()?;
    let (matrix, sinc) = match scheme {
        ProjectorScheme::Spectral { delta } => (spectral_projector(op, delta, zero_tol)?.matrix, None),
        _ => {
            let f = averaged_projector(op, &scheme)?;
            (f.matrix, f.sinc)
        }
    };
    let diagnostics = projector_diagnostics(op, &matrix, zero_tol)?;
    let group_route_discrepancy = if args.group_route {
        let g = averaged_projector_by_group_quadrature(op, &scheme, GROUP_ROUTE_NODES)?;
        Some(spectral_norm(&(g - matrix.to_dense().into_owned())))
    } else {
        None
    };
    let summary = ProjectorSummary {
        scheme,
        dim: op.dim(),
        delta_cap: gap.delta_cap,
        zero_tolerance: zero_tolerance(op, zero_tol)?,
        diagnostics,
        sinc,
        group_route_discrepancy,
    };
    if let Some(path) = &args.matrix_out {
        let mut t = Table::new(&["i", "j", "re", "im"])?;
        let m = matrix.to_dense();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                t.row([i.to_string(), j.to_string(), num(m[(i, j)].re), num(m[(i, j)].im)])?;
            }
        }
        emit(Some(path), &t.into_bytes()?)?;
    }
    emit(args.io.out.as_deref(), &json_bytes(&summary)?)?;
    match summary.sinc {
        Some(d) if !d.converged => Err(CliError::not_converged("sinc average did not reach its tolerance", &d)),
        _ => Ok(()),
    }
}

fn bound_sweep_cmd(args: BoundSweepArgs) -> CliResult<()> {
    let (model, built) = load(&args.io.model)?;
    let reports = bound_sweep(&built.operator, &args.half_widths, model.tolerances.zero_tolerance)?;
    let mut t = Table::new(&["L", "Delta", "measured_norm", "bound", "saturation_ratio", "route_discrepancy"])?;
    for r in &reports {
        t.row([
            num(r.half_width),
            num(r.delta_cap),
            num(r.measured_norm),
            num(r.bound),
            num(r.saturation_ratio),
            num(r.route_discrepancy),
        ])?;
    }
    emit(args.io.out.as_deref(), &t.into_bytes()?)?;
    let failed = reports.iter().filter(|r| !r.holds()).count();
    if failed > 0 {
        for r in reports.iter().filter(|r| !r.holds()) {
            log::error!("bound violated: {}", serde_json::to_string(r).unwrap_or_default());
        }
        return Err(CliError::ChecksFailed { failed, total: reports.len() });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointPair {
    pub a: PhasePoint,
    pub b: PhasePoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagatorSample {
    pub q2: f64,
    pub q1: f64,
    pub dt: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectorPair {
    pub a: SectorPoint,
    pub b: SectorPoint,
}

fn default_reduced_mode() -> ReducedMode {
    ReducedMode::ClosedForm
}

fn default_extended_mode() -> ExtendedMode {
    ExtendedMode::Exact
}

fn default_propagator_mode() -> PropagatorMode {
    PropagatorMode::Quadrature
}

/// Which kernel to evaluate and at which labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelRequest {
    Reduced {
        #[serde(default = "default_reduced_mode")]
        mode: ReducedMode,
        pairs: Vec<PointPair>,
    },
    Extended {
        delta: f64,
        #[serde(default = "default_extended_mode")]
        mode: ExtendedMode,
        pairs: Vec<PointPair>,
    },
    Propagator {
        #[serde(default = "default_propagator_mode")]
        mode: PropagatorMode,
        samples: Vec<PropagatorSample>,
    },
    Sector {
        delta: f64,
        pairs: Vec<SectorPair>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelFile {
    pub kernel: KernelRequest,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
}

fn kernel_columns(v: &KernelValue) -> [String; 5] {
    let method = serde_json::to_value(v.method).ok().and_then(|m| m.as_str().map(str::to_string)).unwrap_or_default();
    [num(v.value.re), num(v.value.im), num(v.estimated_error), method, v.converged.to_string()]
}

const VALUE_COLUMNS: [&str; 5] = ["re", "im", "est_error", "method", "converged"];

fn header(labels: &[&'static str]) -> Vec<&'static str> {
    labels.iter().chain(VALUE_COLUMNS.iter()).copied().collect()
}

fn point_columns(p: &PhasePoint, with_s: bool) -> Vec<String> {
    let mut v = vec![num(p.p), num(p.q)];
    if with_s {
        v.push(num(p.s_or_zero()));
    }
    v.push(num(p.t_or_zero()));
    v
}

fn kernel(args: KernelArgs) -> CliResult<()> {
    let text = fs::read_to_string(&args.points).map_err(|e| CliError::io(&args.points, e))?;
    let request: KernelFile = serde_json::from_str(&text).map_err(|e| CliError::schema(&args.points, &text, &e))?;
    let quad = request.quadrature;
    quad.validate()?;
    let mut values = Vec::new();
    let mut rows: Vec<Vec<String>> = Vec::new();
    let table_header = match &request.kernel {
        KernelRequest::Reduced { mode, pairs } => {
            for pair in pairs {
                let v = reduced_kernel(&pair.a, &pair.b, *mode, &quad)?;
                rows.push([point_columns(&pair.a, false), point_columns(&pair.b, false)].concat());
                values.push(v);
            }
            header(&["a_p", "a_q", "a_t", "b_p", "b_q", "b_t"])
        }
        KernelRequest::Extended { delta, mode, pairs } => {
            for pair in pairs {
                let v = extended_kernel(&pair.a, &pair.b, *delta, *mode, &quad)?;
                rows.push([point_columns(&pair.a, true), point_columns(&pair.b, true)].concat());
                values.push(v);
            }
            header(&["a_p", "a_q", "a_s", "a_t", "b_p", "b_q", "b_s", "b_t"])
        }
        KernelRequest::Propagator { mode, samples } => {
            for s in samples {
                values.push(sharp_q_propagator(s.q2, s.q1, s.dt, *mode, &quad)?);
                rows.push(vec![num(s.q2), num(s.q1), num(s.dt)]);
            }
            header(&["q2", "q1", "dt"])
        }
        KernelRequest::Sector { delta, pairs } => {
            for pair in pairs {
                values.push(pi_sector_kernel(&pair.a, &pair.b, *delta, &quad)?);
                rows.push(vec![num(pair.a.pi), num(pair.a.lambda), num(pair.b.pi), num(pair.b.lambda)]);
            }
            header(&["a_pi", "a_lambda", "b_pi", "b_lambda"])
        }
    };
    let mut t = Table::new(&table_header)?;
    for (row, v) in rows.iter().zip(&values) {
        t.row(row.iter().cloned().chain(kernel_columns(v)))?;
    }
    emit(args.out.as_deref(), &t.into_bytes()?)?;
    let flagged: Vec<(usize, &KernelValue)> = values.iter().enumerate().filter(|(_, v)| !v.converged).collect();
    if !flagged.is_empty() {
        let report: Vec<_> = flagged.iter().map(|(i, v)| json!({ "row": i, "kernel": v })).collect();
        return Err(CliError::not_converged(format!("{} kernel values above tolerance", flagged.len()), &report));
    }
    Ok(())
}

fn verify(args: VerifyArgs) -> CliResult<()> {
    let report = suites::run(args.suite, args.seed)?;
    emit(args.out.as_deref(), &json_bytes(&report)?)?;
    for c in report.checks.iter().filter(|c| !c.passed) {
        log::error!("check {} failed: measured {:e}, tolerance {:e}", c.name, c.measured, c.tolerance);
    }
    if report.passed {
        Ok(())
    } else {
        Err(CliError::ChecksFailed { failed: report.failed(), total: report.checks.len() })
    }
}

/// Parses a `QPROJ_WORKERS` value.
pub fn parse_workers(raw: &str) -> CliResult<usize> {
    raw.trim()
        .parse()
        .ok()
        .filter(|&n: &usize| n > 0)
        .ok_or_else(|| CliError::Input(format!("QPROJ_WORKERS must be a positive integer, got {raw:?}")))
}

/// Builds the global worker pool from `QPROJ_WORKERS` when set.
pub fn configure_workers() -> CliResult<()> {
    let Ok(raw) = std::env::var("QPROJ_WORKERS") else {
        return Ok(());
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(parse_workers(&raw)?)
        .build_global()
        .map_err(|e| CliError::Input(format!("cannot size worker pool: {e}")))
}
