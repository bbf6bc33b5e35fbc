//! The experiment suites.

mod characterization;
mod cr_harmonic;
mod cr_temperature;
mod norms;
mod oracles;

use std::fmt;
use std::str::FromStr;

use fofana_core::hardy_fofana::Ladders;
use fofana_core::{CRSystem, Exponents, GridFunction, GridSpec};

use crate::catalog::CatalogFunction;
use crate::config::Resolved;
use crate::error::LabError;
use crate::report::{Check, Record, SuiteResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    Norms,
    Characterization,
    CrHarmonic,
    CrTemperature,
    Oracles,
}

impl Suite {
    pub const ALL: [Suite; 5] =
        [Suite::Norms, Suite::Characterization, Suite::CrHarmonic, Suite::CrTemperature, Suite::Oracles];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Norms => "norms",
            Suite::Characterization => "characterization",
            Suite::CrHarmonic => "cr-harmonic",
            Suite::CrTemperature => "cr-temperature",
            Suite::Oracles => "oracles",
        }
    }

    /// Suites selected by a `--suite` argument; `all` selects every suite.
    pub fn select(name: &str) -> Result<Vec<Suite>, LabError> {
        if name == "all" {
            return Ok(Self::ALL.to_vec());
        }
        Ok(vec![name.parse()?])
    }

    pub fn run(self, cx: &Context) -> Result<SuiteResult, LabError> {
        match self {
            Suite::Norms => norms::run(cx),
            Suite::Characterization => characterization::run(cx),
            Suite::CrHarmonic => cr_harmonic::run(cx),
            Suite::CrTemperature => cr_temperature::run(cx),
            Suite::Oracles => oracles::run(cx),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self, LabError> {
        Self::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Self::ALL.iter().map(|x| x.name()).collect();
            LabError::config(format!("unknown suite {s}; expected one of {}, all", names.join(", ")))
        })
    }
}

/// Resolved configuration plus the sampled catalog.
#[derive(Debug, Clone)]
pub struct Context {
    pub resolved: Resolved,
    pub samples: Vec<GridFunction<f64>>,
}

impl Context {
    pub fn new(resolved: Resolved) -> Self {
        let spec = resolved.spec;
        let samples = resolved.catalog.functions().iter().map(|f| f.sample(&spec)).collect();
        Self { resolved, samples }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.resolved.spec
    }

    pub fn exponents(&self) -> &[Exponents] {
        &self.resolved.exponents
    }

    pub fn ladders(&self) -> Ladders {
        Ladders::new(self.resolved.ladders.t.clone(), self.resolved.ladders.r.clone())
    }

    /// Catalog entries with their samples.
    pub fn functions(&self) -> impl Iterator<Item = (&CatalogFunction, &GridFunction<f64>)> {
        self.resolved.catalog.functions().iter().zip(&self.samples)
    }

    /// Non-trivial members of the `rho` ladder.
    pub fn dilations(&self) -> Vec<f64> {
        self.resolved.ladders.rho.members().into_iter().filter(|&r| r != 1.0).collect()
    }

    /// `alpha` of the first exponent triple, for checks needing a single dilation exponent.
    pub fn alpha(&self) -> f64 {
        self.exponents()[0].alpha()
    }
}

/// Ladders for data dilated by `rho`: scales move with the data, dilation radii against it.
pub fn reindexed(ladders: &Ladders, rho: f64) -> Result<Ladders, LabError> {
    Ok(Ladders { t: ladders.t.rescaled(rho)?, r: ladders.r.rescaled(1.0 / rho)?, shape: ladders.shape })
}

/// `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    let m = a.abs().max(b.abs());
    if m == 0.0 {
        0.0
    } else {
        (a - b).abs() / m
    }
}

/// Largest termwise relative difference of two equally long sequences.
pub fn max_rel_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| rel_diff(*x, *y)).fold(0.0, f64::max)
}

/// `max |u - v| / max |v|`, zero when both vanish.
pub fn rel_max_diff(u: &GridFunction<f64>, v: &GridFunction<f64>) -> Result<f64, LabError> {
    let diff = u.max_diff(v)?;
    let scale = u.max_abs().max(v.max_abs());
    Ok(if scale == 0.0 { 0.0 } else { diff / scale })
}

/// Explicit row for a catalog function left out of a smooth-only section.
pub fn excluded(section: &str, f: &CatalogFunction) -> Record {
    Record::new(section, &f.name).note("excluded: non-smooth")
}

/// Fails the suite when no smooth catalog function was available; true otherwise.
pub fn require_smooth(out: &mut SuiteResult, checked: usize) -> bool {
    if checked == 0 {
        out.check(Check::at_least("smooth_functions", 0.0, 1.0));
    }
    checked > 0
}

pub fn triple_key(e: &Exponents) -> String {
    format!("({},{},{})", e.p(), e.q(), e.alpha())
}


/// `max |a - b| / max |b|` over every slice and component of two systems.
pub fn system_defect(a: &CRSystem, b: &CRSystem) -> Result<f64, LabError> {
    let (mut diff, mut scale) = (0.0f64, 0.0f64);
    for ((_, x), (_, y)) in a.slices().iter().zip(b.slices()) {
        for (u, v) in x.iter().zip(y) {
            diff = diff.max(u.max_diff(v)?);
            scale = scale.max(v.max_abs());
        }
    }
    Ok(if scale == 0.0 { diff } else { diff / scale })
}

/// Residual on the default grid and on the grid refined once, with the observed order.
#[derive(Debug, Clone, Copy)]
pub struct Convergence {
    pub coarse: f64,
    pub fine: f64,
}

impl Convergence {
    pub fn order(&self) -> f64 {
        (self.coarse / self.fine).log2()
    }

    pub fn record(&self, section: &str, function: &str) -> Record {
        Record::new(section, function)
            .value(self.order())
            .reference(self.coarse)
            .defect(self.fine)
            .note("value = order, reference = default-grid residual, defect = refined-grid residual")
    }
}
