//! `regge-flow`: curvature, flow and stability runs on mesh files, lattice
//! generation, and reproduction of the closed-form model results.
//!
//! Exit codes: 0 success, 1 I/O or other failure, 2 usage or malformed
//! input, 3 edge collapse, 4 nonrealizable simplex, 5 singular mass matrix,
//! 6 adaptive step underflow.

mod commands;
mod output;
mod reproduce;

use clap::{Args, Parser, Subcommand, ValueEnum};
use regge_flow::flow::Differentiation;
use regge_flow::{Error, Integrator, Termination};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "regge-flow", version, about = "Ricci flow and curvature on piecewise-flat 3-geometries")]
struct Cli {
    /// Worker threads for assembly (0: one per core).
    #[arg(long, global = true, env = "REGGE_FLOW_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Deficits, dual geometry and curvatures of a mesh.
    Curvature {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Integrate the edge-length flow.
    Flow(FlowArgs),
    /// Lattice generators.
    Models {
        #[command(subcommand)]
        command: ModelsCommand,
    },
    /// Regenerate the closed-form model reports.
    Reproduce {
        #[arg(long, value_enum, default_value_t = Table::All)]
        table: Table,
        #[arg(long)]
        out: PathBuf,
    },
    /// Eigenvalues of the linearised flow at the mesh's metric.
    Stability {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        derivatives: DerivativeArgs,
    },
}

#[derive(Debug, Args)]
pub struct FlowArgs {
    #[arg(long)]
    pub mesh: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Fixed step (euler, rk4) or initial step (rk45).
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub dt_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub dt_max: f64,
    #[arg(long)]
    pub t_end: f64,
    #[arg(long, value_enum, default_value_t = IntegratorArg::Rk45)]
    pub integrator: IntegratorArg,
    #[arg(long, default_value_t = 1e-8)]
    pub rel_tol: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub abs_tol: f64,
    /// Stop once an edge is below this fraction of its initial length.
    #[arg(long, default_value_t = 1e-3)]
    pub stop_min_edge: f64,
    #[arg(long, default_value_t = 1)]
    pub record_every: usize,
    #[command(flatten)]
    pub derivatives: DerivativeArgs,
    /// Retry rk45 steps whose trial stages are nonrealizable instead of stopping.
    #[arg(long)]
    pub retry_nonrealizable: bool,
}

/// How the dual-length derivatives `∂λ/∂ℓ` are computed.
#[derive(Debug, Args)]
pub struct DerivativeArgs {
    /// `exact`: forward-mode tangents; `central`: central differences.
    #[arg(long, value_enum, default_value_t = DerivativeMode::Exact)]
    pub derivatives: DerivativeMode,
    /// Relative step for `--derivatives central`.
    #[arg(long, default_value_t = 1e-6)]
    pub fd_step: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DerivativeMode {
    Exact,
    Central,
}

impl From<&DerivativeArgs> for Differentiation<f64> {
    fn from(a: &DerivativeArgs) -> Self {
        match a.derivatives {
            DerivativeMode::Exact => Differentiation::Exact,
            DerivativeMode::Central => Differentiation::Central(a.fd_step),
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum IntegratorArg {
    Euler,
    Rk4,
    Rk45,
}

impl From<IntegratorArg> for Integrator {
    fn from(a: IntegratorArg) -> Self {
        match a {
            IntegratorArg::Euler => Integrator::ExplicitEuler,
            IntegratorArg::Rk4 => Integrator::Rk4,
            IntegratorArg::Rk45 => Integrator::Rk45Adaptive,
        }
    }
}

#[derive(Debug, Subcommand)]
enum ModelsCommand {
    /// Write a lattice as mesh JSON.
    Generate(GenerateArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub model: ModelArg,
    /// Output file.
    #[arg(long)]
    pub out: PathBuf,
    /// Multiply every squared length by this factor.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    /// Relative random perturbation of every edge length (uniform in ±fraction).
    #[arg(long, default_value_t = 0.0)]
    pub perturb: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Cells per side of the flat torus.
    #[arg(long, default_value_t = 3)]
    pub cells: usize,
    /// Displace every flat-torus vertex by up to this fraction of the cube
    /// edge (keeps the metric flat, breaks the lattice symmetry).
    #[arg(long, default_value_t = 0.0)]
    pub jitter: f64,
    /// Rings of the cylinder.
    #[arg(long, default_value_t = 4)]
    pub rings: usize,
    #[arg(long, default_value_t = 1.0)]
    pub s0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub a0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    #[value(name = "5-cell")]
    FiveCell,
    #[value(name = "16-cell")]
    SixteenCell,
    #[value(name = "600-cell")]
    SixHundredCell,
    FlatTorus,
    Cylinder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Table {
    #[value(name = "s3_table")]
    S3Table,
    Cylinder,
    All,
}

/// Failure carrying its exit code.
#[derive(Debug)]
pub struct Exit {
    pub code: u8,
    pub error: anyhow::Error,
}

impl<E: Into<anyhow::Error>> From<E> for Exit {
    fn from(e: E) -> Self {
        let error = e.into();
        let code = error.downcast_ref::<Error>().map_or(1, error_code);
        Exit { code, error }
    }
}

pub fn error_code(e: &Error) -> u8 {
    match e {
        Error::Format(_)
        | Error::UnknownEdge(_)
        | Error::MissingEdgeLength(..)
        | Error::MetricSizeMismatch { .. }
        | Error::DegenerateSimplex { .. }
        | Error::DuplicateTetrahedron(_)
        | Error::EmptyComplex
        | Error::NotCompact
        | Error::NonPositiveLength { .. }
        | Error::InvalidArgument(_) => 2,
        Error::NonRealizable(_) | Error::DegenerateFace(_) => 4,
        Error::MatrixSingular { .. } => 5,
        Error::StepTooSmall { .. } => 6,
        _ => 1,
    }
}

pub fn termination_code(t: Termination) -> u8 {
    match t {
        Termination::ReachedTEnd => 0,
        Termination::EdgeCollapse => 3,
        Termination::NonRealizable => 4,
        Termination::MatrixSingular => 5,
        Termination::StepTooSmall => 6,
    }
}

fn run(cli: Cli) -> Result<u8, Exit> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    match cli.command {
        Command::Curvature { mesh, out } => commands::curvature(&mesh, &out).map(|_| 0),
        Command::Flow(args) => commands::flow(&args),
        Command::Models { command: ModelsCommand::Generate(args) } => commands::generate(&args).map(|_| 0),
        Command::Reproduce { table, out } => reproduce::run(table, &out).map(|_| 0),
        Command::Stability { mesh, out, derivatives } => {
            commands::stability(&mesh, &out, (&derivatives).into()).map(|_| 0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Exit { code, error }) => {
            eprintln!("error: {error:#}");
            ExitCode::from(code)
        }
    }
}
