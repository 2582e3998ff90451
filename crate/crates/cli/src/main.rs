mod commands;
mod errors;
mod input;
mod manifest;
mod tables;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

use errors::{CliResult, EXIT_FLAGS};

#[derive(Parser)]
#[command(
    name = "lrdshift",
    version,
    about = "Decide whether a series is short-range dependent with one mean shift or long-range dependent",
    after_help = "Exit codes: 0 ok, 2 input parse error, 3 degenerate data, 4 bad flags."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the test(s) on a data file (one real per line / single-column CSV)
    Test(TestArgs),
    /// Empirical size under the AR(1) mean-shift model
    Size(SizeArgs),
    /// Empirical power under fractional Gaussian noise
    Power(PowerArgs),
    /// Reproduce the size/power tables (one CSV per table)
    Tables(TablesArgs),
    /// Raw lag-1 correlation samples under outlier contamination
    FigureRho(FigureRhoArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TestChoice {
    Wilcoxon,
    Cusum,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VarianceChoice {
    /// Non-overlapping block subsampling estimator
    Carlstein,
    /// Kernel-weighted autocovariance sum (CUSUM test only)
    Bartlett,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RhoChoice {
    /// Sample lag-1 autocorrelation
    Acf,
    /// Qn-based robust lag-1 autocorrelation
    Robust,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatChoice {
    Csv,
    Json,
}

/// Flags shared by everything that runs the testing procedures.
#[derive(Args, Clone)]
pub struct ProcedureFlags {
    /// Which procedure(s) to run
    #[arg(long = "test", value_enum, default_value_t = TestChoice::Both)]
    pub test: TestChoice,
    /// Significance level
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Long-run variance estimator studentizing the CUSUM test
    #[arg(long, value_enum, default_value_t = VarianceChoice::Carlstein)]
    pub variance: VarianceChoice,
    /// Lag-1 correlation feeding the block rule
    /// [default: acf, or robust when --outliers is set]
    #[arg(long = "rho-source", value_enum)]
    pub rho_source: Option<RhoChoice>,
    /// Fixed subsampling block length (overrides the block rule)
    #[arg(long)]
    pub block: Option<usize>,
}

#[derive(Args)]
struct TestArgs {
    /// Input data file
    input: PathBuf,
    #[command(flatten)]
    procedure: ProcedureFlags,
    #[arg(long, value_enum, default_value_t = FormatChoice::Json)]
    format: FormatChoice,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SizeArgs {
    /// Sample length
    #[arg(long, default_value_t = 500)]
    n: usize,
    /// Break fraction: the shift sits at floor(n * theta)
    #[arg(long, default_value_t = 0.5)]
    theta: f64,
    /// Size of the mean shift
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    /// AR(1) coefficient
    #[arg(long, default_value_t = 0.4)]
    rho: f64,
    /// Contaminate each replication with four 50x outliers
    #[arg(long)]
    outliers: bool,
    /// Monte Carlo replications
    #[arg(long, default_value_t = 10_000)]
    reps: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    procedure: ProcedureFlags,
    #[arg(long, value_enum, default_value_t = FormatChoice::Csv)]
    format: FormatChoice,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PowerArgs {
    /// Long-memory parameter d (Hurst index d + 1/2)
    #[arg(long, default_value_t = 0.4)]
    d: f64,
    /// Sample length
    #[arg(long, default_value_t = 500)]
    n: usize,
    /// Contaminate each replication with four 50x outliers
    #[arg(long)]
    outliers: bool,
    /// Monte Carlo replications
    #[arg(long, default_value_t = 10_000)]
    reps: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    procedure: ProcedureFlags,
    #[arg(long, value_enum, default_value_t = FormatChoice::Csv)]
    format: FormatChoice,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TablesArgs {
    /// Which table to produce: 1..5, figure-rho, or all
    #[arg(long, default_value = "all")]
    table: String,
    /// Replications per cell (10000 reproduces the published tables)
    #[arg(long, default_value_t = 10_000)]
    reps: u32,
    /// Drop grid rows with n above this bound
    #[arg(long = "max-n", default_value_t = 5000)]
    max_n: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Output directory
    #[arg(long, default_value = "tables")]
    out: PathBuf,
}

#[derive(Args)]
struct FigureRhoArgs {
    /// Sample length
    #[arg(long, default_value_t = 500)]
    n: usize,
    /// AR(1) coefficient
    #[arg(long, default_value_t = 0.4)]
    rho: f64,
    /// Monte Carlo replications
    #[arg(long, default_value_t = 10_000)]
    reps: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = FormatChoice::Csv)]
    format: FormatChoice,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Test(args) => commands::cmd_test(args),
        Command::Size(args) => commands::cmd_size(args),
        Command::Power(args) => commands::cmd_power(args),
        Command::Tables(args) => tables::cmd_tables(args),
        Command::FigureRho(args) => commands::cmd_figure_rho(args),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp
                | ErrorKind::DisplayVersion
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => 0,
                _ => EXIT_FLAGS,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    if let Err(err) = run(cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
