//! Command-line surface. Every struct here is echoed into output artifacts
//! as the resolved configuration.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "sl2h",
    version,
    about = "Harmonic analysis of (l,n)-type functions on SL(2,R)"
)]
pub struct Cli {
    /// JSON object whose keys are flag names; explicit flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Iwasawa and Cartan coordinates of a group element.
    Decompose(DecomposeArgs),
    /// Plancherel density μ(τ, λ).
    Density(DensityArgs),
    /// Discrete parameters Γ for a type pair.
    Gamma(PairArgs),
    /// Matrix coefficient φ at a group element.
    Spherical(SphericalArgs),
    /// Forward transform of a radial profile to spectral.json.
    Transform(TransformArgs),
    /// Inverse transform of spectral.json to a profile.
    Invert(InvertArgs),
    /// Both sides of the Plancherel identity.
    PlancherelCheck(PlancherelArgs),
    /// Apply a Fourier or spectral multiplier.
    Multiplier(MultiplierArgs),
    /// Evaluate a multiplier-norm bound functional.
    Bound(BoundArgs),
    /// Inequality ratios over a family of test functions.
    InequalityCheck(InequalityArgs),
    /// Picard solver for the nonlinear heat equation.
    HeatSolve(HeatArgs),
    /// Picard solver for the nonlinear wave equation.
    WaveSolve(WaveArgs),
    /// Existence times and the global smallness condition.
    ExistenceTime(ExistenceArgs),
    /// Calibrate discrete-series normalizations into an η table.
    CalibrateEta(CalibrateArgs),
}

impl Command {
    pub const NAMES: [&'static str; 14] = [
        "decompose",
        "density",
        "gamma",
        "spherical",
        "transform",
        "invert",
        "plancherel-check",
        "multiplier",
        "bound",
        "inequality-check",
        "heat-solve",
        "wave-solve",
        "existence-time",
        "calibrate-eta",
    ];
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PairArgs {
    #[arg(long, default_value_t = 0)]
    pub l: i64,
    #[arg(long, default_value_t = 0)]
    pub n: i64,
}

/// Radial and spectral discretization.
#[derive(Debug, Clone, Args, Serialize)]
pub struct GridArgs {
    /// Spectral grid covers [-lambda-max, lambda-max].
    #[arg(long, default_value_t = 60.0)]
    pub lambda_max: f64,
    /// Number of spectral samples (odd).
    #[arg(long, visible_alias = "lambda-steps", default_value_t = 4097)]
    pub samples: usize,
    /// Gauss–Legendre nodes per unit radial panel.
    #[arg(long, default_value_t = 64)]
    pub per_panel: usize,
    /// Radial grid end; defaults to the input's range or 6.
    #[arg(long)]
    pub t_max: Option<f64>,
    /// η table from calibrate-eta; defaults to the built-in calibration.
    #[arg(long)]
    pub eta_table: Option<PathBuf>,
}

/// The finer grid calibration needs: below it the per-profile estimates
/// spread by more than the default tolerance.
#[derive(Debug, Clone, Args, Serialize)]
pub struct CalibrationGridArgs {
    #[arg(long, default_value_t = 120.0)]
    pub lambda_max: f64,
    #[arg(long, visible_alias = "lambda-steps", default_value_t = 8193)]
    pub samples: usize,
    #[arg(long, default_value_t = 64)]
    pub per_panel: usize,
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Existing table to extend.
    #[arg(long)]
    pub eta_table: Option<PathBuf>,
}

impl From<&CalibrationGridArgs> for GridArgs {
    fn from(g: &CalibrationGridArgs) -> Self {
        GridArgs {
            lambda_max: g.lambda_max,
            samples: g.samples,
            per_panel: g.per_panel,
            t_max: g.t_max,
            eta_table: g.eta_table.clone(),
        }
    }
}

/// Where a radial profile comes from.
#[derive(Debug, Clone, Args, Serialize)]
pub struct SourceArgs {
    /// Profile CSV with columns t,re,im.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Smooth bump t0:t1[:omega[:amplitude]] instead of an input file.
    #[arg(long, conflicts_with = "input")]
    pub bump: Option<String>,
}

/// A multiplier symbol: a name with its parameter, or a JSON file such as
/// {"kind": "heat", "t": 1.0}.
#[derive(Debug, Clone, Args, Serialize)]
pub struct SymbolArgs {
    /// heat | sobolev | power | rational | constant, or a JSON file.
    #[arg(long, default_value = "heat")]
    pub symbol: String,
    /// Time parameter of the heat symbol.
    #[arg(long)]
    pub t: Option<f64>,
    /// Exponent of the sobolev, power and rational symbols.
    #[arg(long)]
    pub a: Option<f64>,
    /// Value of the constant symbol.
    #[arg(long)]
    pub c: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct DecomposeArgs {
    /// Matrix entries a,b,c,d of [[a, b], [c, d]].
    #[arg(long)]
    pub matrix: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct DensityArgs {
    /// plus | minus
    #[arg(long)]
    pub tau: String,
    #[arg(long)]
    pub lambda: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct SphericalArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub pair: PairArgs,
    /// Spectral parameter re or re,im.
    #[arg(long, conflicts_with = "m")]
    pub lambda: Option<String>,
    /// Discrete parameter; evaluates at λ = i|m|.
    #[arg(long)]
    pub m: Option<i64>,
    /// Radial coordinate of k_{θ1} a_t k_{θ2}.
    #[arg(long, default_value_t = 0.0)]
    pub t: f64,
    #[arg(long, default_value_t = 0.0)]
    pub theta1: f64,
    #[arg(long, default_value_t = 0.0)]
    pub theta2: f64,
    /// Radial points start:stop:count, or a CSV whose first column is t.
    /// Switches the output to CSV with columns t,re,im.
    #[arg(long, conflicts_with = "t")]
    pub t_grid: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct TransformArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub pair: PairArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
    /// Double the spectral range until the outer band is negligible.
    #[arg(long)]
    pub adaptive: bool,
    #[arg(long, default_value_t = 1e-10)]
    pub tail_tol: f64,
    #[arg(long, default_value_t = 3)]
    pub max_doublings: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct InvertArgs {
    /// spectral.json from the transform subcommand.
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
    /// Evaluation points lo:hi:count, or a CSV whose first column is t.
    /// The radial quadrature nodes when absent.
    #[arg(long)]
    pub t_grid: Option<String>,
    /// Profile CSV; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct PlancherelArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub pair: PairArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct MultiplierArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub pair: PairArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub symbol: SymbolArgs,
    /// Profile CSV; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct BoundArgs {
    /// lp-lq | spectral | heat
    #[arg(long)]
    pub theorem: String,
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub q: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub pair: PairArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub symbol: SymbolArgs,
    #[arg(long, default_value_t = 60.0)]
    pub lambda_max: f64,
    #[arg(long, default_value_t = 4097)]
    pub samples: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct InequalityArgs {
    /// hy | dual-hy | paley | hyp
    #[arg(long)]
    pub which: String,
    #[arg(long)]
    pub p: f64,
    /// Intermediate exponent of the hyp check.
    #[arg(long)]
    pub b: Option<f64>,
    /// Weight rational:<a> = (1+λ²)^(-a) or const:<c>.
    #[arg(long, default_value = "rational:1")]
    pub psi: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub pair: PairArgs,
    /// "default" or a JSON file {"pair": {"l","n"}, "members": [{t0,t1,omega,amplitude}]}.
    #[arg(long, default_value = "default")]
    pub family: String,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PicardArgs {
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    /// Time horizon.
    #[arg(long = "T")]
    #[serde(rename = "T")]
    pub horizon: f64,
    /// biinvariant | paper-literal
    #[arg(long, default_value = "biinvariant")]
    pub mode: String,
    #[arg(long, default_value_t = 128)]
    pub steps_per_unit: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 100)]
    pub max_iterations: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct HeatArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub pair: PairArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub symbol: SymbolArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub picard: PicardArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct WaveArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub pair: PairArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SourceArgs,
    /// Initial velocity CSV; zero when absent.
    #[arg(long)]
    pub u1: Option<PathBuf>,
    /// Coefficient const:<c> or decay:<c>:<gamma>.
    #[arg(long, default_value = "const:1")]
    pub psi: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub symbol: SymbolArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub picard: PicardArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ExistenceArgs {
    /// heat | wave | global
    #[arg(long)]
    pub problem: String,
    #[arg(long)]
    pub c: f64,
    #[arg(long)]
    pub p: f64,
    /// heat: ‖u0‖; wave: ‖u0‖,‖u1‖,‖Ψ‖; global: ‖u0‖.
    #[arg(long)]
    pub norms: String,
    /// Decay exponent γ of the global condition.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Auxiliary exponent γ0 of the global condition.
    #[arg(long)]
    pub gamma0: Option<f64>,
    /// Horizon of the global condition.
    #[arg(long = "T")]
    #[serde(rename = "T")]
    pub horizon: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct CalibrateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub pair: PairArgs,
    /// One discrete parameter; all of Γ when absent.
    #[arg(long)]
    pub m: Option<i64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: CalibrationGridArgs,
    /// Allowed relative spread of the per-profile estimates.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
