//! Experiment configuration: a single JSON document, unknown keys rejected.

use std::path::Path;

use fofana_core::{make_grid, Exponents, GridSpec, Ladder};
use serde::{Deserialize, Serialize};

use crate::catalog::{default_catalog, Catalog, CatalogEntry};
use crate::error::LabError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub d: usize,
    #[serde(rename = "L")]
    pub side: usize,
    pub m: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { d: 1, side: 64, m: 64 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentConfig {
    pub p: f64,
    pub q: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderConfig {
    pub base: f64,
    pub ratio: f64,
    pub count: usize,
}

impl LadderConfig {
    fn of(l: &Ladder) -> Self {
        Self { base: l.base(), ratio: l.ratio(), count: l.count() }
    }

    fn build(&self, name: &str) -> Result<Ladder, LabError> {
        Ladder::new(self.base, self.ratio, self.count).map_err(|e| LabError::config(format!("ladder {name}: {e}")))
    }
}

/// Ladder definitions; missing entries get grid-dependent defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderSet {
    /// Mollifier and Poisson scales.
    pub t: Option<LadderConfig>,
    /// Dilation radii of the Fofana norm.
    pub r: Option<LadderConfig>,
    /// Dilations applied to the data.
    pub rho: Option<LadderConfig>,
    /// Exponent scalings of the restriction table.
    pub mu: Option<LadderConfig>,
    /// Ball radii of the Hardy-Littlewood operator.
    pub radii: Option<LadderConfig>,
    /// Slices of the extensions used in PDE and Cauchy-Riemann checks.
    pub slab: Option<LadderConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default = "default_exponents")]
    pub exponents: Vec<ExponentConfig>,
    #[serde(default)]
    pub ladders: LadderSet,
    #[serde(default)]
    pub catalog: Option<Vec<CatalogEntry>>,
    /// Catalog names checked against the direct principal-value sum.
    #[serde(default)]
    pub riesz_oracle: Option<Vec<String>>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub output_dir: Option<String>,
}

fn default_exponents() -> Vec<ExponentConfig> {
    vec![
        ExponentConfig { p: 1.0, q: 2.0, alpha: 1.5 },
        ExponentConfig { p: 2.0, q: 4.0, alpha: 3.0 },
        ExponentConfig { p: 1.5, q: 3.0, alpha: 2.0 },
    ]
}

fn default_seed() -> u64 {
    1
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            grid: GridConfig::default(),
            exponents: default_exponents(),
            ladders: LadderSet::default(),
            catalog: None,
            riesz_oracle: None,
            seed: default_seed(),
            output_dir: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, LabError> {
        serde_json::from_str(text).map_err(|e| LabError::config(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Checks every precondition and fills in the defaults.
    pub fn resolve(&self) -> Result<Resolved, LabError> {
        let g = &self.grid;
        let spec = make_grid(g.d, g.side, g.m).map_err(|e| LabError::config(format!("grid: {e}")))?;
        if self.exponents.is_empty() {
            return Err(LabError::config("exponents: at least one triple is required"));
        }
        let exponents = self
            .exponents
            .iter()
            .map(|e| {
                Exponents::theorem(e.p, e.q, e.alpha, g.d)
                    .map_err(|err| LabError::config(format!("exponents ({}, {}, {}): {err}", e.p, e.q, e.alpha)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let ladders = ResolvedLadders::new(&self.ladders, &spec)?;
        let entries = self.catalog.clone().unwrap_or_else(|| default_catalog(g.d));
        let catalog = Catalog::build(&entries, &spec, self.seed)?;
        let oracle_names = match &self.riesz_oracle {
            Some(names) => names.clone(),
            None => default_oracle_names(&catalog),
        };
        if oracle_names.is_empty() {
            return Err(LabError::config("riesz_oracle: at least one smooth catalog function is required"));
        }
        for name in &oracle_names {
            let f = catalog.get(name).ok_or_else(|| LabError::config(format!("riesz_oracle: no catalog entry {name}")))?;
            if !f.smooth {
                return Err(LabError::config(format!("riesz_oracle: {name} is not smooth")));
            }
        }
        let mut echo = self.clone();
        echo.catalog = Some(entries);
        echo.riesz_oracle = Some(oracle_names.clone());
        echo.ladders = ladders.echo();
        Ok(Resolved { spec, exponents, ladders, catalog, oracle_names, seed: self.seed, echo })
    }
}

fn default_oracle_names(catalog: &Catalog) -> Vec<String> {
    let preferred = ["W(0.5)", "W(1)", "W(2)", "P(1)", "P(2)"];
    let found: Vec<String> = preferred.iter().filter(|n| catalog.get(n).is_some()).map(|n| n.to_string()).collect();
    if found.is_empty() {
        catalog.functions().iter().filter(|f| f.smooth).take(5).map(|f| f.name.clone()).collect()
    } else {
        found
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedLadders {
    pub t: Ladder,
    pub r: Ladder,
    pub rho: Ladder,
    pub mu: Ladder,
    pub radii: Ladder,
    pub slab: Ladder,
}

/// Slab end time at which the slowest torus mode has decayed by `e^-40`.
fn slab_horizon(spec: &GridSpec) -> f64 {
    let s = spec.side();
    let t = 40.0 * s * s / (4.0 * std::f64::consts::PI.powi(2));
    2f64.powi(t.log2().ceil() as i32)
}

impl ResolvedLadders {
    fn new(set: &LadderSet, spec: &GridSpec) -> Result<Self, LabError> {
        let h = spec.spacing();
        let pick = |c: &Option<LadderConfig>, name: &str, default: Ladder| match c {
            Some(c) => c.build(name),
            None => Ok(default),
        };
        let per_octave = 8;
        let horizon = slab_horizon(spec);
        let slab_default = Ladder::spanning(0.125, horizon, per_octave).expect("valid span");
        let l = Self {
            t: pick(&set.t, "t", Ladder::new(4.0 * h, 2.0, 13).expect("valid"))?,
            r: pick(&set.r, "r", Ladder::dyadic(-6, 6).expect("valid"))?,
            rho: pick(&set.rho, "rho", Ladder::new(0.25, 2.0, 5).expect("valid"))?,
            mu: pick(&set.mu, "mu", Ladder::new(1.0, 2.0, 4).expect("valid"))?,
            radii: pick(&set.radii, "radii", Ladder::new(h, 2.0, 13).expect("valid"))?,
            slab: pick(&set.slab, "slab", slab_default)?,
        };
        for (name, ladder) in [("t", &l.t), ("r", &l.r), ("rho", &l.rho)] {
            if !ladder.is_dyadic() {
                return Err(LabError::config(format!("ladder {name}: base and ratio must be powers of two")));
            }
        }
        if l.mu.min() < 1.0 {
            return Err(LabError::config("ladder mu: members must be at least 1"));
        }
        if l.radii.min() < h {
            return Err(LabError::config(format!("ladder radii: smallest radius must be at least h = {h}")));
        }
        if l.slab.count() < 5 {
            return Err(LabError::config("ladder slab: at least 5 slices are needed for the half-order derivative"));
        }
        if l.slab.member(1) * 8.0 > l.slab.max() {
            return Err(LabError::config("ladder slab: must reach 8 times beyond its second slice"));
        }
        Ok(l)
    }

    fn echo(&self) -> LadderSet {
        LadderSet {
            t: Some(LadderConfig::of(&self.t)),
            r: Some(LadderConfig::of(&self.r)),
            rho: Some(LadderConfig::of(&self.rho)),
            mu: Some(LadderConfig::of(&self.mu)),
            radii: Some(LadderConfig::of(&self.radii)),
            slab: Some(LadderConfig::of(&self.slab)),
        }
    }
}

/// A validated configuration with every default filled in.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub spec: GridSpec,
    pub exponents: Vec<Exponents>,
    pub ladders: ResolvedLadders,
    pub catalog: Catalog,
    pub oracle_names: Vec<String>,
    pub seed: u64,
    /// Configuration as run, for the summary.
    pub echo: ExperimentConfig,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_resolve() {
        let r = ExperimentConfig::default().resolve().unwrap();
        assert_eq!(r.spec.len(), 4096);
        assert_eq!(r.ladders.t.count(), 13);
        assert!((r.ladders.slab.max() / 8192.0 - 1.0).abs() < 1e-9);
        assert_eq!(r.oracle_names.len(), 5);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = ExperimentConfig::from_json(r#"{"grid": {"d": 1, "L": 8, "m": 8, "n": 3}}"#).unwrap_err();
        assert!(err.to_string().contains("unknown field"));
        assert!(ExperimentConfig::from_json(r#"{"colour": 1}"#).is_err());
    }

    #[test]
    fn bad_triple_cites_the_condition() {
        let cfg = ExperimentConfig::from_json(r#"{"exponents": [{"p": 2, "q": 1, "alpha": 3}]}"#).unwrap();
        let msg = cfg.resolve().unwrap_err().to_string();
        assert!(msg.contains("p <= alpha <= q"), "{msg}");
    }

    #[test]
    fn ladder_preconditions() {
        let cfg = ExperimentConfig::from_json(r#"{"ladders": {"r": {"base": 0.3, "ratio": 2, "count": 4}}}"#).unwrap();
        assert!(cfg.resolve().is_err());
        let cfg = ExperimentConfig::from_json(r#"{"ladders": {"mu": {"base": 0.5, "ratio": 2, "count": 4}}}"#).unwrap();
        assert!(cfg.resolve().is_err());
        let cfg = ExperimentConfig::from_json(r#"{"ladders": {"slab": {"base": 1, "ratio": 2, "count": 4}}}"#).unwrap();
        assert!(cfg.resolve().is_err());
    }
}
