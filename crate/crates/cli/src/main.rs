mod commands;
mod error;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "polargauge", version, about = "Polar envelopes, gauge duals and perspective minimization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate the polar envelope, polar prox and gradient at a point.
    Envelope(EnvelopeArgs),
    /// Emit a 2-D grid of gauge, Moreau envelope and polar envelope values as CSV.
    Contour(ContourArgs),
    /// Solve a basis-pursuit style instance through its smooth gauge dual.
    BpSolve(SolveArgs),
    /// Solve an instance with the Lagrange-dual smoothing baseline.
    LagrangeSolve(SolveArgs),
    /// Run the projected polar proximal point algorithm.
    P4a(P4aArgs),
    /// Run envelope minimization by Armijo gradient descent.
    Ema(EmaArgs),
    /// Run the invariant and oracle check suites.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// Seed for every random draw.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Write the JSON report (or CSV grid) here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override a tolerance, as key=value; repeatable.
    #[arg(long = "tol-override", value_name = "KEY=VALUE")]
    tol_override: Vec<String>,
}

#[derive(Debug, Args)]
struct EnvelopeArgs {
    /// Gauge descriptor, inline JSON or a path to a JSON file.
    #[arg(long)]
    gauge: String,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Comma-separated point.
    #[arg(long, allow_hyphen_values = true)]
    x: String,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct ContourArgs {
    #[arg(long)]
    gauge: String,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = -1.5, allow_hyphen_values = true)]
    lower: f64,
    #[arg(long, default_value_t = 1.5, allow_hyphen_values = true)]
    upper: f64,
    /// Grid points per axis.
    #[arg(long, default_value_t = 101)]
    resolution: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct SolveArgs {
    /// Problem instance JSON file.
    #[arg(long)]
    instance: PathBuf,
    /// Override the instance's smoothing parameter.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Write the iteration trace CSV here.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Also run the other solver on the same instance.
    #[arg(long)]
    compare: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Perspective {
    /// Lifted function descriptor, inline JSON or a path to a JSON file.
    #[arg(long)]
    function: String,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Comma-separated start point; drawn from N(0, I) with --seed if absent.
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<String>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct P4aArgs {
    #[command(flatten)]
    run: Perspective,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct EmaArgs {
    #[command(flatten)]
    run: Perspective,
    /// Armijo parameter in (0, 1).
    #[arg(long, default_value_t = 0.5)]
    sigma: f64,
    /// Trial step lengths, used cyclically.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    beta: Vec<f64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct CheckArgs {
    /// envelope, convolution, duality, perspective or all.
    #[arg(default_value = "all")]
    suite: String,
    #[command(flatten)]
    common: Common,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Envelope(a) => commands::envelope(&a),
        Command::Contour(a) => commands::contour(&a),
        Command::BpSolve(a) => commands::solve(&a, false),
        Command::LagrangeSolve(a) => commands::solve(&a, true),
        Command::P4a(a) => commands::p4a(&a),
        Command::Ema(a) => commands::ema(&a),
        Command::Check(a) => commands::check(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
