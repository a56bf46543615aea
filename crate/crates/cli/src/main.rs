mod commands;
mod error;
mod output;
mod scenario;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::Format;
use error::CliError;
use output::to_json_string;
use scenario::ScenarioFile;

/// Spectrum allocation and pricing in licensed/unlicensed two-tier networks.
#[derive(Debug, Parser)]
#[command(name = "hetnet-market", version)]
struct Cli {
    /// Write the reference scenarios into DIR and exit.
    #[arg(long, value_name = "DIR")]
    seed_figures: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// User association for a fixed allocation.
    Associate(Common),
    /// Single-SP optimal split; a `sweep` gives the split against B_U.
    Monopoly(Common),
    /// Nash equilibrium among SPs; a `sweep` maps two-SP equilibrium types.
    Nash(Common),
    /// Welfare-optimal split of the whole band.
    Planner(Common),
    /// Social welfare against unlicensed bandwidth for several markets.
    Sweep(Common),
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long)]
    scenario: PathBuf,
    /// Output file; defaults to the scenario's `out`, then stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Grid points per axis for sweeps and maps.
    #[arg(long)]
    grid: Option<usize>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn seed_figures(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    for (name, s) in commands::figure_seeds() {
        fs::write(dir.join(name), to_json_string(&s))?;
        eprintln!("wrote {}", dir.join(name).display());
    }
    Ok(())
}

type Runner = fn(&ScenarioFile, Format, Option<usize>) -> Result<String, CliError>;

fn run_command(command: Command) -> Result<(), CliError> {
    let (run, c): (Runner, Common) = match command {
        Command::Associate(c) => (|s, f, _| commands::associate(s, f), c),
        Command::Monopoly(c) => (commands::monopoly_cmd, c),
        Command::Nash(c) => (commands::nash, c),
        Command::Planner(c) => (|s, f, _| commands::planner(s, f), c),
        Command::Sweep(c) => (commands::sweep, c),
    };
    if c.jobs == Some(0) {
        return Err(CliError::Validation("--jobs must be >= 1".into()));
    }
    if c.grid.is_some_and(|g| g < 2) {
        return Err(CliError::Validation("--grid must be >= 2".into()));
    }
    let s = ScenarioFile::load(&c.scenario)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(c.jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Internal(format!("thread pool: {e}")))?;
    let text = pool.install(|| run(&s, c.format, c.grid))?;
    write_output(c.out.as_deref().or(s.out.as_deref()), &text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match (cli.seed_figures, cli.command) {
        (Some(dir), _) => seed_figures(&dir),
        (None, Some(cmd)) => run_command(cmd),
        (None, None) => Err(CliError::Validation("no command given; see --help".into())),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
