//! Drift of logged bands between two summaries.

use std::fmt;

use crate::error::LabError;
use crate::report::Summary;

/// Relative drift above which a band is flagged.
pub const DRIFT_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct Drift {
    pub suite: String,
    pub band: String,
    pub old: f64,
    pub new: f64,
    /// `|new / old - 1|`; infinite when only one side vanishes.
    pub drift: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriftReport {
    pub entries: Vec<Drift>,
}

impl DriftReport {
    pub fn flagged(&self) -> impl Iterator<Item = &Drift> {
        self.entries.iter().filter(|d| d.flagged)
    }

    pub fn max_drift(&self) -> f64 {
        self.entries.iter().map(|d| d.drift).fold(0.0, f64::max)
    }
}

impl fmt::Display for DriftReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.entries {
            let mark = if d.flagged { "DRIFT" } else { "ok" };
            writeln!(f, "{mark}\t{}\t{}\t{:e}\t{:e}\t{:e}", d.suite, d.band, d.old, d.new, d.drift)?;
        }
        let n = self.flagged().count();
        write!(f, "{} bands compared, {n} drifted by more than {}%", self.entries.len(), DRIFT_THRESHOLD * 100.0)
    }
}

fn relative_drift(old: f64, new: f64) -> f64 {
    if old == new {
        0.0
    } else if old == 0.0 {
        f64::INFINITY
    } else {
        (new / old - 1.0).abs()
    }
}

/// Compares every band of two summaries produced on the same grid and ladders.
pub fn report_bands(previous: &Summary, current: &Summary) -> Result<DriftReport, LabError> {
    if previous.config.grid != current.config.grid {
        return Err(LabError::Incompatible(format!(
            "grids differ: {:?} vs {:?}",
            previous.config.grid, current.config.grid
        )));
    }
    if previous.config.ladders != current.config.ladders {
        return Err(LabError::Incompatible("ladder definitions differ".into()));
    }
    let mut entries = Vec::new();
    for (name, old) in &previous.suites {
        let new = current
            .suites
            .get(name)
            .ok_or_else(|| LabError::Incompatible(format!("suite {name} missing from the current summary")))?;
        for (band, &a) in &old.bands {
            let &b = new
                .bands
                .get(band)
                .ok_or_else(|| LabError::Incompatible(format!("band {name}/{band} missing from the current summary")))?;
            let drift = relative_drift(a, b);
            entries.push(Drift {
                suite: name.clone(),
                band: band.clone(),
                old: a,
                new: b,
                drift,
                flagged: drift > DRIFT_THRESHOLD,
            });
        }
        if let Some(extra) = new.bands.keys().find(|k| !old.bands.contains_key(*k)) {
            return Err(LabError::Incompatible(format!("band {name}/{extra} missing from the previous summary")));
        }
    }
    if let Some(extra) = current.suites.keys().find(|k| !previous.suites.contains_key(*k)) {
        return Err(LabError::Incompatible(format!("suite {extra} missing from the previous summary")));
    }
    Ok(DriftReport { entries })
}
