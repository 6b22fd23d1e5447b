use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

/// c-curvature of surface metrics near constant curvature: constants,
/// evaluation, scans and verification campaigns.
#[derive(Parser, Debug)]
#[command(name = "ccurv", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,

    /// Write the output to PATH (plus a run manifest next to it)
    #[arg(long, value_name = "PATH", global = true)]
    pub out: Option<PathBuf>,

    /// Relative ODE tolerance
    #[arg(long, default_value = "1e-12", global = true)]
    pub tol_rel: f64,

    /// Absolute ODE tolerance
    #[arg(long, default_value = "1e-14", global = true)]
    pub tol_abs: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the constant table (B, c, C) and derived thresholds
    Constants(ConstantsArgs),
    /// Print the smallness conditions and the chosen parameters
    Thresholds(GridArgs),
    /// Evaluate the c-curvature at one probe
    Eval(EvalArgs),
    /// Scan the almost-positivity ratio over a probe grid
    Scan(ScanArgs),
    /// Distance to the first conjugate point along the axis
    Conjugate(FieldArgs),
    /// Curvature of the conjugate boundary at the axis
    Boundary(FieldArgs),
    /// Run a verification campaign
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Args, Debug)]
pub struct GridArgs {
    /// Intervals of the supremum grid for c6..c17
    #[arg(long, default_value_t = ccurv_core::constants::DEFAULT_GRID)]
    pub grid: usize,
}

#[derive(Args, Debug)]
pub struct ConstantsArgs {
    #[command(flatten)]
    pub grid: GridArgs,

    /// Compare against the published values; exit 4 on mismatch
    #[arg(long)]
    pub check_paper: bool,
}

#[derive(Args, Debug)]
pub struct FieldArgs {
    /// Field configuration file (key=value lines)
    #[arg(long, value_name = "FILE")]
    pub field: PathBuf,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[command(flatten)]
    pub field: FieldArgs,

    /// Length of the base vector
    #[arg(long)]
    pub r0: f64,

    /// Angle of the test vector from the axis
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
    pub theta: f64,

    /// Angle of the variation direction from the axis
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
    pub phi: f64,

    /// Also evaluate the finite-difference oracle
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[command(flatten)]
    pub field: FieldArgs,

    /// Nodes along r0
    #[arg(long, default_value_t = 16)]
    pub nr: usize,

    /// Nodes along theta
    #[arg(long, default_value_t = 16)]
    pub nth: usize,

    /// Nodes along phi
    #[arg(long, default_value_t = 16)]
    pub nph: usize,

    /// Positivity constant tested against C/A2
    #[arg(long, default_value = "3.21e-9")]
    pub sigma: f64,

    /// Relative distance kept from the conjugate point
    #[arg(long, default_value = "1e-3")]
    pub conj_margin: f64,
}

#[derive(Subcommand, Debug)]
pub enum VerifyCommand {
    /// Perturbation bounds on the Jacobi fields and their variations
    Lemma(LemmaArgs),
    /// Maclaurin residual against its bound at random probes
    Corollary(CorollaryArgs),
    /// Monotonicity and minorants of h1, h2
    Hfuncs,
    /// Sturm pinching and the conjugate-distance bracket
    Sturm(SturmArgs),
    /// Minorants of mu1
    Mu1(Mu1Args),
}

#[derive(Args, Debug)]
pub struct LemmaArgs {
    #[command(flatten)]
    pub field: FieldArgs,

    /// Base lengths, comma separated
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.5, 2.5])]
    pub r0: Vec<f64>,

    /// Variation angles, comma separated
    #[arg(
        long,
        value_delimiter = ',',
        default_values_t = [0.0, std::f64::consts::FRAC_PI_3, std::f64::consts::FRAC_PI_2]
    )]
    pub phi: Vec<f64>,
}

#[derive(Args, Debug)]
pub struct CorollaryArgs {
    #[command(flatten)]
    pub field: FieldArgs,

    /// Number of random probes
    #[arg(long, default_value_t = 20)]
    pub probes: usize,

    /// Seed of the probe sampler
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct SturmArgs {
    #[command(flatten)]
    pub field: FieldArgs,

    /// Base lengths, comma separated
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.5, 2.5])]
    pub r0: Vec<f64>,
}

#[derive(Args, Debug)]
pub struct Mu1Args {
    /// delta1 (default: the chosen value)
    #[arg(long)]
    pub delta1: Option<f64>,

    /// delta2 (default: the chosen value)
    #[arg(long)]
    pub delta2: Option<f64>,
}
