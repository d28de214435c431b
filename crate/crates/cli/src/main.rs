use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use localpress_cli::{
    grid_csv, run_command, write_atomically, CliError, Command, ExperimentConfig,
};

/// Pressure, equilibrium chains, and finite-scale local estimates for
/// one-sided shifts of finite type.
#[derive(Parser)]
#[command(name = "localpress", version, about, long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Compute the spectral pressure of the configured system and potential,
    /// with finite-depth partition-sum cross-checks on the config's grid.
    Pressure(RunArgs),
    /// Derive the pressure-attaining chain for the configured pair and
    /// report its entropy, average, and attainment gap.
    Equilibrium(RunArgs),
    /// Sample a batch from the configured measure and survey the local
    /// pressure estimator over the config's (n, k) grid.
    LocalPressure(RunArgs),
    /// Grade the configured measure against the Gibbs property and, unless
    /// it is rejected, certify whether it is an equilibrium.
    GibbsCheck(RunArgs),
    /// Run the built-in verification suite against the shipped configs.
    Selftest,
}

#[derive(Args)]
struct RunArgs {
    /// Path to the experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Write the JSON report here (atomic replace) instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the per-point grid values as CSV (grid commands only).
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Cap the worker pool at this many threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Override the config's sampling seed for this run.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Sub::Selftest => run_selftest(),
        Sub::Pressure(args) => run(Command::Pressure, args),
        Sub::Equilibrium(args) => run(Command::Equilibrium, args),
        Sub::LocalPressure(args) => run(Command::LocalPressure, args),
        Sub::GibbsCheck(args) => run(Command::GibbsCheck, args),
    }
}

/// Writes one line to stdout. A closed pipe (`localpress … | head`) is
/// treated as a clean early exit rather than an error: the process has
/// ignored SIGPIPE, so the broken pipe surfaces here as an io error.
fn emit(text: &str) -> Result<(), CliError> {
    use std::io::Write;
    let mut stdout = std::io::stdout().lock();
    match writeln!(stdout, "{text}") {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        Err(e) => Err(CliError::Io {
            path: PathBuf::from("<stdout>"),
            source: e,
        }),
    }
}

fn run(command: Command, args: RunArgs) -> Result<ExitCode, CliError> {
    if args.csv.is_some() && !command.has_grid() {
        return Err(CliError::Config(format!(
            "--csv exports per-point grids, which `{}` does not produce",
            command.name()
        )));
    }
    if let Some(threads) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot size the worker pool: {e}")))?;
    }
    let mut config = ExperimentConfig::from_path(&args.config)?;
    if let Some(seed) = args.seed {
        config.estimator.seed = seed;
    }
    let envelope = run_command(command, config)?;
    if let Some(csv_path) = &args.csv {
        let csv = grid_csv(&envelope).expect("grid commands always export");
        write_atomically(csv_path, &csv)?;
    }
    let json = envelope.to_json();
    match &args.out {
        Some(path) => write_atomically(path, &json)?,
        None => emit(&json)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn run_selftest() -> Result<ExitCode, CliError> {
    let results = localpress_cli::run_all();
    let mut lines: Vec<String> = results.iter().map(|r| r.summary_line()).collect();
    let all_passed = results.iter().all(|r| r.passed);
    if all_passed {
        lines.push(format!("all {} checks passed", results.len()));
    } else {
        lines.push("verification failed".to_string());
    }
    emit(&lines.join("\n"))?;
    Ok(if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}
