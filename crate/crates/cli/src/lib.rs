//! Experiment runner: configuration, test-function catalog, suites and reports.

pub mod catalog;
pub mod config;
pub mod diff;
pub mod error;
pub mod report;
pub mod suites;

use std::path::Path;

use rayon::prelude::*;

pub use config::ExperimentConfig;
pub use diff::{report_bands, DriftReport};
pub use error::LabError;
pub use report::{Check, SuiteResult, Summary};
pub use suites::{Context, Suite};

/// Suite tables and the summary of one run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub results: Vec<SuiteResult>,
    pub summary: Summary,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        self.summary.passed
    }
}

/// Validates `config` (with `seed` overriding its seed) and runs `suites` concurrently.
pub fn run(config: &ExperimentConfig, suites: &[Suite], seed: Option<u64>) -> Result<RunOutcome, LabError> {
    let mut config = config.clone();
    if let Some(seed) = seed {
        config.seed = seed;
    }
    let cx = Context::new(config.resolve()?);
    let results = suites.par_iter().map(|s| s.run(&cx)).collect::<Result<Vec<_>, _>>()?;
    let summary = Summary::new(cx.resolved.echo.clone(), &results);
    Ok(RunOutcome { results, summary })
}

/// Writes `<suite>.csv` per suite and `summary.json` into `dir`.
pub fn write_outputs(dir: &Path, outcome: &RunOutcome) -> Result<(), LabError> {
    let unwritable = |e: std::io::Error| LabError::config(format!("output directory {}: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(unwritable)?;
    for r in &outcome.results {
        std::fs::write(dir.join(format!("{}.csv", r.name)), r.to_csv()?).map_err(unwritable)?;
    }
    std::fs::write(dir.join("summary.json"), outcome.summary.to_json()? + "\n").map_err(unwritable)?;
    Ok(())
}

/// Reads and compares two summaries.
pub fn diff_files(previous: &Path, current: &Path) -> Result<DriftReport, LabError> {
    let load = |p: &Path| {
        let text =
            std::fs::read_to_string(p).map_err(|e| LabError::Incompatible(format!("cannot read {}: {e}", p.display())))?;
        Summary::from_json(&text)
    };
    report_bands(&load(previous)?, &load(current)?)
}
