//! `hilbert` — command-line front end for hilbert-core.
//!
//! Exit codes: 0 success, 1 numeric/domain failure (message names the
//! invariant), 2 parse or usage error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, CommandFactory, Parser, Subcommand, ValueEnum};
use hilbert_core::GeomError;

#[derive(Parser, Debug)]
#[command(name = "hilbert", version, about = "Hilbert-metric computations on convex polytopes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Hilbert distance between two interior points
    Distance(DistanceArgs),
    /// Finsler norm of a tangent vector, plus the tangent-ball densities
    Finsler(FinslerArgs),
    /// Boundary of a metric ball, optionally with its volume
    Ball(BallArgs),
    /// Ball volumes over a range of radii and the log-log growth fit
    Growth(GrowthArgs),
    /// Isometric image of points in the polyhedrally normed space
    Embed(EmbedArgs),
    /// Simplex-section lift of the polytope
    Lift(LiftArgs),
    /// Dual-space log map, its inverse, or the distortion report
    Bernig(BernigArgs),
    /// Finsler-norm ratio of two polytopes sharing a simplex
    Compare(CompareArgs),
    /// Divergence ratio of two vertex rays at increasing distance
    Raylimit(RaylimitArgs),
    /// Cross-validate all distance formulas on random pairs
    Check(CheckArgs),
}

/// A point or list literal; an alias so clap treats it as one value.
pub type Coords = Vec<f64>;

/// Comma-separated decimals, e.g. `0.25,-1.5`.
pub fn parse_point(s: &str) -> Result<Coords, String> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("`{t}` is not a finite decimal"))
        })
        .collect()
}

#[derive(Args, Debug)]
pub struct Input {
    /// Polytope JSON file (`vertices` or `halfspaces` form)
    #[arg(long = "in", value_name = "FILE")]
    pub path: PathBuf,
}

#[derive(Args, Debug)]
pub struct Outputs {
    /// Write a CSV table
    #[arg(long, value_name = "FILE")]
    pub csv: Option<PathBuf>,
    /// Write a JSON summary
    #[arg(long, value_name = "FILE")]
    pub json: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum MeasureArg {
    Busemann,
    HolmesThompson,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SamplerArg {
    DualLog,
    EuclideanBox,
}

#[derive(Args, Debug)]
pub struct McArgs {
    #[arg(long, value_enum, default_value = "busemann")]
    pub measure: MeasureArg,
    /// Monte Carlo samples per radius
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "dual-log")]
    pub sampler: SamplerArg,
    /// Directions for the tangent-ball quadrature (default depends on dimension)
    #[arg(long)]
    pub directions: Option<usize>,
}

#[derive(Args, Debug)]
pub struct DistanceArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub p: Coords,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub q: Coords,
    /// Write a JSON summary
    #[arg(long, value_name = "FILE")]
    pub json: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct FinslerArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub p: Coords,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub v: Coords,
    /// Quadrature directions for the densities (ignored in 2-D, which is exact)
    #[arg(long)]
    pub directions: Option<usize>,
    #[arg(long, value_name = "FILE")]
    pub json: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BallArgs {
    #[command(flatten)]
    pub input: Input,
    /// Ball center (default: analytic center)
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub center: Option<Coords>,
    #[arg(long)]
    pub radius: f64,
    /// Boundary directions
    #[arg(long, default_value_t = 256)]
    pub boundary_directions: usize,
    /// Also estimate the ball volume
    #[arg(long)]
    pub volume: bool,
    #[command(flatten)]
    pub mc: McArgs,
    #[command(flatten)]
    pub out: Outputs,
    /// Write an SVG of the polygon and the ball (2-D only)
    #[arg(long, value_name = "FILE")]
    pub svg: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GrowthArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub center: Option<Coords>,
    /// Radii, comma-separated; must span [1, 10]
    #[arg(long, value_parser = parse_point, default_value = "1,2,3,5,6,7,8,10,12")]
    pub radii: Coords,
    #[command(flatten)]
    pub mc: McArgs,
    #[command(flatten)]
    pub out: Outputs,
}

#[derive(Args, Debug)]
pub struct EmbedArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub p: Coords,
    /// Second point; reports both distances
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub q: Option<Coords>,
    #[arg(long, value_name = "FILE")]
    pub json: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct LiftArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long, value_name = "FILE")]
    pub json: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("mode").required(true).args(["p", "inverse", "report"])))]
pub struct BernigArgs {
    #[command(flatten)]
    pub input: Input,
    /// Point to map
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub p: Option<Coords>,
    /// Dual vector to pull back
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub inverse: Option<Coords>,
    /// Run the stratified distortion report
    #[arg(long)]
    pub report: bool,
    /// Pairs per depth stratum for the report
    #[arg(long, default_value_t = 200)]
    pub pairs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub out: Outputs,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    /// First polytope
    #[arg(long, value_name = "FILE")]
    pub a: PathBuf,
    /// Second polytope
    #[arg(long, value_name = "FILE")]
    pub b: PathBuf,
    /// Simplex contained in both
    #[arg(long, value_name = "FILE")]
    pub simplex: PathBuf,
    #[arg(long, default_value_t = 100)]
    pub points: usize,
    #[arg(long, default_value_t = 360)]
    pub directions: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub out: Outputs,
}

#[derive(Args, Debug)]
pub struct RaylimitArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub center: Option<Coords>,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub v1: Coords,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub v2: Coords,
    /// Hilbert distances from the center, comma-separated
    #[arg(long, value_parser = parse_point, default_value = "5,10,20,40")]
    pub t: Coords,
    #[command(flatten)]
    pub out: Outputs,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long, default_value_t = 500)]
    pub pairs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Tolerance on |d1 - d2| / (1 + d1)
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[command(flatten)]
    pub out: Outputs,
}

#[derive(Debug)]
pub enum Failure {
    /// Unreadable or malformed input.
    Usage(String),
    Domain(GeomError),
    /// A computed quantity breached its tolerance.
    Check { invariant: &'static str, detail: String },
}

impl From<GeomError> for Failure {
    fn from(e: GeomError) -> Self {
        match e {
            GeomError::Parse(m) => Failure::Usage(format!("parse error: {m}")),
            e => Failure::Domain(e),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Domain(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli.command, &mut std::io::stdout().lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\n{}", Cli::command().render_usage());
            ExitCode::from(2)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error[{}]: {e}", e.invariant());
            ExitCode::from(1)
        }
        Err(Failure::Check { invariant, detail }) => {
            eprintln!("error[{invariant}]: {detail}");
            ExitCode::from(1)
        }
    }
}
