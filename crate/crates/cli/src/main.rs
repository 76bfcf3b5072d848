mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Converts between continuous games and multi-objective normal-form games,
/// runs multi-objective fictitious play, and checks equilibria.
///
/// Settings are resolved as: command-line flags, then the `--config` file,
/// then built-in defaults.
#[derive(Debug, Parser)]
#[command(name = "psequiv", version)]
struct Cli {
    /// Worker threads for parallel trials [default: available parallelism].
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run fictitious play and write trajectories, summaries and a verification report.
    RunFp(RunFpArgs),
    /// Construct the pure-strategy-equivalent counterpart of a game.
    Transform(TransformArgs),
    /// Check whether a joint strategy is an ε-Nash equilibrium.
    ///
    /// Exit status: 0 pass, 1 fail, 2 error.
    Verify(VerifyArgs),
    /// List catalog games.
    ListGames,
}

/// Bertrand price bounds; they apply to the `bertrand*` games only.
#[derive(Debug, Clone, Default, Args)]
struct PriceArgs {
    #[arg(long)]
    p_min: Option<f64>,
    #[arg(long)]
    p_max: Option<f64>,
}

#[derive(Debug, Args)]
struct RunFpArgs {
    /// TOML file with any of the fields of these flags (snake_case names).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Catalog game (see `list-games`).
    #[arg(long)]
    game: Option<String>,
    /// Iterations per trial [default: 200].
    #[arg(long)]
    iterations: Option<usize>,
    /// Independent trials [default: 1000].
    #[arg(long)]
    trials: Option<usize>,
    /// Master seed; trial t uses stream t of this seed [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Record every n-th iteration (the last is always recorded) [default: 1].
    #[arg(long)]
    record_every: Option<usize>,
    /// Best-response grid points per simplex dimension [default: 2001].
    #[arg(long)]
    grid: Option<usize>,
    /// Tolerance of the verification report [default: 1e-2].
    #[arg(long)]
    eps: Option<f64>,
    /// Output directory [default: out].
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    prices: PriceArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    Monfg,
    Continuous,
}

#[derive(Debug, Args)]
struct TransformArgs {
    #[arg(long)]
    game: String,
    /// Model to construct.
    #[arg(long, value_enum)]
    to: Target,
    /// Output directory [default: out].
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Joint strategies sampled for the certificate.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Largest utility gap the certificate accepts.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Add this offset to the constructed utilities before certifying
    /// (a self-test: the certificate must then fail).
    #[arg(long)]
    inject_fault: Option<f64>,
    #[command(flatten)]
    prices: PriceArgs,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long)]
    game: String,
    /// Joint strategy: players separated by ';', components by ','. Continuous
    /// games take pure strategies ("0.397;0.630"), matrix games mixed ones
    /// ("0.5,0.5;1,0").
    #[arg(long, allow_hyphen_values = true)]
    strategy: String,
    #[arg(long, default_value_t = 1e-3)]
    eps: f64,
    /// Best-response grid points per simplex dimension.
    #[arg(long, default_value_t = 2001)]
    grid: usize,
    /// Also write the reports to this TOML file.
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    prices: PriceArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start {n} workers: {e}");
            return ExitCode::from(2);
        }
    }
    let outcome = match cli.command {
        Command::RunFp(args) => commands::run_fp(args).map(|_| true),
        Command::Transform(args) => commands::transform(args),
        Command::Verify(args) => commands::verify(args),
        Command::ListGames => {
            commands::list_games();
            Ok(true)
        }
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
