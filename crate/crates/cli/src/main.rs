use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fofana_lab::{diff_files, run, write_outputs, ExperimentConfig, LabError, Suite};

#[derive(Parser)]
#[command(name = "fofana-lab", version, about = "Runs the Hardy-Fofana experiment suites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one suite, or `all`, and write `<suite>.csv` and `summary.json`.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// norms, characterization, cr-harmonic, cr-temperature, oracles or all.
        #[arg(long)]
        suite: String,
        /// Output directory; defaults to the config's `output_dir`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compare the logged bands of two summaries.
    Diff { old: PathBuf, new: PathBuf },
}

const CHECK_FAILURE: u8 = 1;
const CONFIG_ERROR: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, suite, out, seed } => run_command(&config, &suite, out, seed),
        Command::Diff { old, new } => diff_command(&old, &new),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(CHECK_FAILURE),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(CONFIG_ERROR)
        }
    }
}

fn run_command(config: &Path, suite: &str, out: Option<PathBuf>, seed: Option<u64>) -> Result<bool, LabError> {
    let suites = Suite::select(suite)?;
    let cfg = ExperimentConfig::load(config)?;
    let dir = out
        .or_else(|| cfg.output_dir.as_ref().map(PathBuf::from))
        .ok_or_else(|| LabError::config("no output directory: pass --out or set output_dir"))?;
    let outcome = run(&cfg, &suites, seed)?;
    write_outputs(&dir, &outcome)?;
    for r in &outcome.results {
        let status = if r.passed() { "PASS" } else { "FAIL" };
        println!("{}: {status} ({} checks, {} rows)", r.name, r.checks.len(), r.records.len());
        for c in r.failures() {
            println!("  failed {}: {:e} (threshold {:e})", c.name, c.value, c.threshold);
        }
    }
    println!("wrote {}", dir.display());
    Ok(outcome.passed())
}

fn diff_command(old: &Path, new: &Path) -> Result<bool, LabError> {
    let report = diff_files(old, new)?;
    println!("{report}");
    Ok(report.flagged().count() == 0)
}
