//! `privsig` — command-line front end for the Gaussian privacy-signaling
//! solvers.
//!
//! Subcommands:
//!
//! * `solve` — one game instance (noiseless linear, bottleneck, noisy or
//!   discrete channel) as a JSON document.
//! * `sweep` — a one-axis parameter sweep as fixed-column CSV.
//! * `ib` — bottleneck variants: trade-off weight, hard estimation floor,
//!   or relevance weight `beta`, with mutual-information accounting.
//! * `quantize` — the optimal normal quantizer by itself.
//! * `verify` — certification checks with a text verdict.
//! * `simulate` — Monte-Carlo replication of an analytic report.
//!
//! Exit codes: `0` success, `2` usage or validation error, `3`
//! verification failure. All randomness hangs off `--seed` (default 42),
//! so identical invocations reproduce identical bytes.

mod commands;
mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "privsig", version, about = "Gaussian privacy-signaling equilibrium toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve one game instance and print a JSON document.
    Solve(SolveArgs),
    /// Sweep one parameter axis and print CSV (or JSON rows).
    Sweep(SweepArgs),
    /// Bottleneck solvers: the sender observes the private block only.
    Ib(IbArgs),
    /// Optimal quantizer of the standard normal.
    Quantize(QuantizeArgs),
    /// Certify equilibria; prints a verdict per check.
    Verify(VerifyArgs),
    /// Replicate an analytic report by Monte-Carlo simulation.
    Simulate(SimulateArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Source description shared by all subcommands: scalar via variances and
/// correlation, vector via a whitespace-separated covariance file plus the
/// private-block size.
#[derive(Args)]
pub struct SourceArgs {
    /// Variance of the private parameter X (scalar sources).
    #[arg(long, default_value_t = 1.0)]
    pub sx2: f64,
    /// Variance of the public parameter Y (scalar sources).
    #[arg(long, default_value_t = 1.0)]
    pub sy2: f64,
    /// Correlation E[XY] (scalar sources).
    #[arg(long)]
    pub rho: Option<f64>,
    /// Plain-text square covariance matrix, whitespace-separated rows.
    #[arg(long)]
    pub sigma_file: Option<PathBuf>,
    /// Number of leading covariance coordinates that form the private
    /// block X (required with --sigma-file).
    #[arg(long)]
    pub nx: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolveMode {
    /// Payoff-dominant scalar equilibrium with the closed-form slope.
    Scalar,
    /// Payoff-dominant linear equilibrium (any dimension).
    Nash,
    /// Commitment solution (coincides with the payoff-dominant one).
    Stackelberg,
    /// Bottleneck: the sender observes X only.
    Ib,
    /// Scalar game over the power-constrained Gaussian channel.
    Awgn,
    /// Scalar game over an M-symbol discrete channel.
    Discrete,
}

#[derive(Args)]
pub struct SolveArgs {
    #[arg(long, value_enum)]
    pub mode: SolveMode,
    #[command(flatten)]
    pub source: SourceArgs,
    /// Privacy weight of the sender's cost.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Relevance weight: with --mode ib, solve the variational form
    /// instead of the trade-off form.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Transmit power budget (awgn).
    #[arg(long)]
    pub p: Option<f64>,
    /// Channel noise variance (awgn).
    #[arg(long)]
    pub sigma_w2: Option<f64>,
    /// Number of channel symbols (discrete).
    #[arg(long)]
    pub levels: Option<usize>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Also run the matching certification check; exit 3 if it fails.
    #[arg(long)]
    pub verify: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepMode {
    Nash,
    Stackelberg,
    Ib,
    Awgn,
    Discrete,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepAxis {
    Delta,
    Rho,
    SigmaW2,
    Levels,
}

#[derive(Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub mode: SweepMode,
    /// Which parameter the grid runs over.
    #[arg(long, value_enum)]
    pub axis: SweepAxis,
    /// Comma-separated, strictly increasing grid values.
    #[arg(long, value_delimiter = ',', required = true)]
    pub grid: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub sx2: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sy2: f64,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub sigma_w2: Option<f64>,
    #[arg(long)]
    pub levels: Option<usize>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct IbArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Trade-off weight: conveyed directions are the nonnegative spectrum.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Hard floor on the receiver's private-parameter estimation error.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Relevance weight of the variational form.
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct QuantizeArgs {
    /// Number of quantizer levels.
    #[arg(long)]
    pub levels: usize,
    /// Convergence tolerance on the level movement per iteration.
    #[arg(long, default_value_t = privsig::channel::LLOYD_DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = privsig::channel::LLOYD_DEFAULT_MAX_ITER)]
    pub max_iter: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyMode {
    /// Mutual-best-response check of one scalar equilibrium.
    Scalar,
    /// Deviation sampling against the commitment solution.
    Stackelberg,
    /// Analytic-vs-Monte-Carlo agreement for the equilibrium policy.
    Consistency,
    /// Analytic-vs-Monte-Carlo agreement for the discrete-channel
    /// solution.
    Discrete,
}

#[derive(Args)]
pub struct VerifyArgs {
    /// Which check to run; without it, the scalar fixed-point suite runs
    /// over the built-in parameter grid.
    #[arg(long, value_enum)]
    pub mode: Option<VerifyMode>,
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub sigma_w2: Option<f64>,
    #[arg(long)]
    pub levels: Option<usize>,
    /// Random linear deviation candidates (stackelberg mode).
    #[arg(long, default_value_t = 200)]
    pub n_encoders: usize,
    /// Monte-Carlo sample count (consistency modes).
    #[arg(long, default_value_t = 100_000)]
    pub mc: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Tolerance for analytic comparisons.
    #[arg(long, default_value_t = privsig::verify::DEFAULT_VERIFY_TOL)]
    pub tol: f64,
    /// Allowance, in standard errors, for Monte-Carlo comparisons.
    #[arg(long, default_value_t = privsig::verify::DEFAULT_K_SIGMA)]
    pub k_sigma: f64,
    /// Test hook: damage the named part before checking.
    #[arg(long, hide = true)]
    pub corrupt: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimulateMode {
    Scalar,
    Awgn,
    Discrete,
}

#[derive(Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub mode: SimulateMode,
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub sigma_w2: Option<f64>,
    #[arg(long)]
    pub levels: Option<usize>,
    /// Monte-Carlo draws.
    #[arg(long, default_value_t = 100_000)]
    pub n: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            2
        }
    };
    std::process::exit(code);
}

/// `Ok` carries the exit code (0, or 3 after an emitted-but-failed
/// verification); `Err` is a usage/validation problem bound for exit 2.
fn run(cli: Cli) -> Result<i32, String> {
    match cli.cmd {
        Cmd::Solve(args) => commands::cmd_solve(args),
        Cmd::Sweep(args) => commands::cmd_sweep(args),
        Cmd::Ib(args) => commands::cmd_ib(args),
        Cmd::Quantize(args) => commands::cmd_quantize(args),
        Cmd::Verify(args) => commands::cmd_verify(args),
        Cmd::Simulate(args) => commands::cmd_simulate(args),
    }
}
