//! Named closed-form test functions.

use fofana_core::grid::dyadic_exponent;
use fofana_core::kernels::closed_form;
use fofana_core::{sample, GridFunction, GridSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::LabError;

/// Bound on `|f|` outside `|x| <= L/4` for entries without a heavy tail.
pub const DECAY_BOUND: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CatalogEntry {
    /// Heat kernel `W_s` centred at `center` (origin by default).
    Gaussian {
        s: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<f64>>,
    },
    /// Poisson kernel `P_s`.
    Poisson {
        s: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<f64>>,
    },
    /// Indicator of the dyadic cube `corner + [0, side)^d`.
    Indicator { corner: Vec<f64>, side: f64 },
    /// `sum_k w_k W_s(x - c_k)`.
    ShiftedSum {
        s: f64,
        centers: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights: Option<Vec<f64>>,
    },
    /// `sum_k W_{s_k}`.
    Multiscale { scales: Vec<f64> },
    /// Seeded bumps with positive amplitudes in `[1/2, 3/2)`, scales in
    /// `[scale_min, scale_max)` and centres in `[-spread, spread)^d`.
    RandomField { count: usize, scale_min: f64, scale_max: f64, spread: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum BumpKind {
    Heat,
    Poisson,
}

#[derive(Debug, Clone, PartialEq)]
struct Bump {
    kind: BumpKind,
    s: f64,
    center: [f64; 2],
    weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
enum Profile {
    Bumps(Vec<Bump>),
    Indicator { corner: [f64; 2], side: f64 },
}

/// A catalog entry made concrete for one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CatalogFunction {
    pub name: String,
    pub entry: CatalogEntry,
    /// Excluded from PDE and Cauchy-Riemann suites when false.
    pub smooth: bool,
    /// Exempt from the decay bound.
    pub heavy_tail: bool,
    profile: Profile,
}

impl CatalogFunction {
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        match &self.profile {
            Profile::Bumps(bumps) => bumps
                .iter()
                .map(|b| {
                    let y = [x[0] - b.center[0], x.get(1).map_or(0.0, |v| v - b.center[1])];
                    let y = &y[..x.len()];
                    b.weight
                        * match b.kind {
                            BumpKind::Heat => closed_form::heat(y, b.s),
                            BumpKind::Poisson => closed_form::poisson(y, b.s),
                        }
                })
                .sum(),
            Profile::Indicator { corner, side } => {
                let inside = x.iter().enumerate().all(|(a, &v)| v >= corner[a] && v < corner[a] + side);
                if inside {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn sample(&self, spec: &GridSpec) -> GridFunction<f64> {
        sample(|x| self.evaluate(x), spec).expect("catalog functions are finite")
    }
}

fn fmt_num(v: f64) -> String {
    format!("{v}")
}

fn fmt_point(c: &[f64]) -> String {
    c.iter().map(|v| fmt_num(*v)).collect::<Vec<_>>().join(",")
}

fn point(c: &[f64], d: usize, what: &str) -> Result<[f64; 2], LabError> {
    if c.len() != d {
        return Err(LabError::config(format!("catalog: {what} has {} coordinates, grid has d = {d}", c.len())));
    }
    Ok([c[0], c.get(1).copied().unwrap_or(0.0)])
}

fn positive(v: f64, what: &str) -> Result<(), LabError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(LabError::config(format!("catalog: {what} must be positive, got {v}")))
    }
}

impl CatalogEntry {
    fn concretize(&self, d: usize, seed: u64) -> Result<CatalogFunction, LabError> {
        let origin = [0.0, 0.0];
        let centered = |c: &Option<Vec<f64>>| -> Result<([f64; 2], String), LabError> {
            match c {
                Some(c) => Ok((point(c, d, "center")?, format!("@({})", fmt_point(c)))),
                None => Ok((origin, String::new())),
            }
        };
        let (name, profile, smooth, heavy_tail) = match self {
            CatalogEntry::Gaussian { s, center } => {
                positive(*s, "s")?;
                let (c, suffix) = centered(center)?;
                let bump = Bump { kind: BumpKind::Heat, s: *s, center: c, weight: 1.0 };
                (format!("W({}){suffix}", fmt_num(*s)), Profile::Bumps(vec![bump]), true, false)
            }
            CatalogEntry::Poisson { s, center } => {
                positive(*s, "s")?;
                let (c, suffix) = centered(center)?;
                let bump = Bump { kind: BumpKind::Poisson, s: *s, center: c, weight: 1.0 };
                (format!("P({}){suffix}", fmt_num(*s)), Profile::Bumps(vec![bump]), true, true)
            }
            CatalogEntry::Indicator { corner, side } => {
                positive(*side, "side")?;
                if dyadic_exponent(*side).is_none() {
                    return Err(LabError::config(format!("catalog: indicator side {side} is not a power of two")));
                }
                if corner.iter().any(|c| (c / side).fract() != 0.0) {
                    return Err(LabError::config("catalog: indicator corner must be a multiple of its side"));
                }
                let c = point(corner, d, "corner")?;
                let hi: Vec<String> = corner.iter().map(|v| format!("[{},{})", fmt_num(*v), fmt_num(v + side))).collect();
                (format!("chi{}", hi.join("x")), Profile::Indicator { corner: c, side: *side }, false, false)
            }
            CatalogEntry::ShiftedSum { s, centers, weights } => {
                positive(*s, "s")?;
                let weights = weights.clone().unwrap_or_else(|| vec![1.0; centers.len()]);
                if weights.len() != centers.len() || centers.is_empty() {
                    return Err(LabError::config("catalog: shifted_sum needs one weight per centre"));
                }
                let bumps = centers
                    .iter()
                    .zip(&weights)
                    .map(|(c, w)| Ok(Bump { kind: BumpKind::Heat, s: *s, center: point(c, d, "center")?, weight: *w }))
                    .collect::<Result<Vec<_>, LabError>>()?;
                let label: Vec<String> = centers.iter().map(|c| fmt_point(c)).collect();
                (format!("shifted({};{})", fmt_num(*s), label.join(";")), Profile::Bumps(bumps), true, false)
            }
            CatalogEntry::Multiscale { scales } => {
                if scales.is_empty() {
                    return Err(LabError::config("catalog: multiscale needs at least one scale"));
                }
                scales.iter().try_for_each(|s| positive(*s, "scale"))?;
                let bumps = scales.iter().map(|&s| Bump { kind: BumpKind::Heat, s, center: origin, weight: 1.0 }).collect();
                let label: Vec<String> = scales.iter().map(|s| fmt_num(*s)).collect();
                (format!("multiscale({})", label.join(",")), Profile::Bumps(bumps), true, false)
            }
            CatalogEntry::RandomField { count, scale_min, scale_max, spread } => {
                positive(*scale_min, "scale_min")?;
                positive(*spread, "spread")?;
                if scale_max.is_nan() || scale_max <= scale_min || *count == 0 {
                    return Err(LabError::config("catalog: random_field needs count > 0 and scale_max > scale_min"));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let bumps = (0..*count)
                    .map(|_| {
                        let mut c = [0.0; 2];
                        for v in c.iter_mut().take(d) {
                            *v = rng.gen_range(-spread..*spread);
                        }
                        let s = rng.gen_range(*scale_min..*scale_max);
                        let weight = rng.gen_range(0.5..1.5);
                        Bump { kind: BumpKind::Heat, s, center: c, weight }
                    })
                    .collect();
                (format!("random({count};seed={seed})"), Profile::Bumps(bumps), true, false)
            }
        };
        Ok(CatalogFunction { name, entry: self.clone(), smooth, heavy_tail, profile })
    }
}

/// Default entries for the desk-scale grids (`L = 64` in one dimension,
/// `L = 16` in two).
pub fn default_catalog(d: usize) -> Vec<CatalogEntry> {
    use CatalogEntry::*;
    if d == 1 {
        vec![
            Gaussian { s: 0.0625, center: None },
            Gaussian { s: 0.25, center: None },
            Gaussian { s: 0.5, center: None },
            Gaussian { s: 1.0, center: None },
            Gaussian { s: 2.0, center: None },
            Poisson { s: 1.0, center: None },
            Poisson { s: 2.0, center: None },
            Indicator { corner: vec![0.0], side: 2.0 },
            Indicator { corner: vec![-4.0], side: 4.0 },
            ShiftedSum { s: 0.5, centers: vec![vec![-5.0], vec![3.0]], weights: Some(vec![1.0, 0.5]) },
            Multiscale { scales: vec![0.25, 1.0, 2.0] },
            RandomField { count: 8, scale_min: 0.25, scale_max: 1.0, spread: 6.0 },
        ]
    } else {
        vec![
            Gaussian { s: 0.0625, center: None },
            Gaussian { s: 0.125, center: None },
            Gaussian { s: 0.2, center: None },
            Poisson { s: 0.5, center: None },
            Indicator { corner: vec![0.0, 0.0], side: 1.0 },
            Indicator { corner: vec![-2.0, -2.0], side: 2.0 },
            ShiftedSum { s: 0.0625, centers: vec![vec![1.0, 0.0], vec![-1.0, 0.5]], weights: None },
            Multiscale { scales: vec![0.0625, 0.125] },
            RandomField { count: 8, scale_min: 0.03125, scale_max: 0.0625, spread: 1.0 },
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Catalog {
    functions: Vec<CatalogFunction>,
}

impl Catalog {
    /// Concretizes `entries` and checks names, support and decay on `spec`.
    pub fn build(entries: &[CatalogEntry], spec: &GridSpec, seed: u64) -> Result<Self, LabError> {
        if entries.is_empty() {
            return Err(LabError::config("catalog: at least one entry is required"));
        }
        let quarter = spec.side() / 4.0;
        let mut functions: Vec<CatalogFunction> = Vec::with_capacity(entries.len());
        for (k, e) in entries.iter().enumerate() {
            let f = e.concretize(spec.dim(), seed.wrapping_add(k as u64))?;
            if functions.iter().any(|g| g.name == f.name) {
                return Err(LabError::config(format!("catalog: duplicate entry {}", f.name)));
            }
            let u = f.sample(spec);
            if let Profile::Indicator { corner, side } = &f.profile {
                let fits = corner[..spec.dim()].iter().all(|&c| c >= -spec.side() / 2.0 && c + side <= spec.side() / 2.0);
                if !fits {
                    return Err(LabError::config(format!("catalog: {} leaves the box", f.name)));
                }
            } else if !f.heavy_tail {
                let outside = (0..spec.len())
                    .filter(|&i| {
                        let x = spec.point(i);
                        x[..spec.dim()].iter().map(|v| v * v).sum::<f64>().sqrt() > quarter
                    })
                    .map(|i| u.values()[i].abs())
                    .fold(0.0, f64::max);
                if outside >= DECAY_BOUND {
                    return Err(LabError::config(format!(
                        "catalog: {} reaches {outside:e} outside |x| <= L/4; it must stay below {DECAY_BOUND:e}",
                        f.name
                    )));
                }
            }
            functions.push(f);
        }
        Ok(Self { functions })
    }

    pub fn functions(&self) -> &[CatalogFunction] {
        &self.functions
    }

    pub fn get(&self, name: &str) -> Option<&CatalogFunction> {
        self.functions.iter().find(|f| f.name == name)
    }

    pub fn smooth(&self) -> impl Iterator<Item = &CatalogFunction> {
        self.functions.iter().filter(|f| f.smooth)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use fofana_core::make_grid;

    #[test]
    fn default_catalogs_validate() {
        let s1 = make_grid(1, 64, 64).unwrap();
        let c = Catalog::build(&default_catalog(1), &s1, 7).unwrap();
        assert_eq!(c.functions().len(), 12);
        assert!(c.get("W(0.5)").is_some());
        assert!(c.get("P(1)").unwrap().heavy_tail);
        assert!(!c.get("chi[0,2)").unwrap().smooth);
        let s2 = make_grid(2, 16, 16).unwrap();
        let c2 = Catalog::build(&default_catalog(2), &s2, 7).unwrap();
        assert!(c2.get("chi[0,1)x[0,1)").is_some());
    }

    #[test]
    fn random_field_is_seeded() {
        let s = make_grid(1, 64, 16).unwrap();
        let e = [CatalogEntry::RandomField { count: 4, scale_min: 0.25, scale_max: 1.0, spread: 6.0 }];
        let a = Catalog::build(&e, &s, 3).unwrap().functions()[0].sample(&s);
        let b = Catalog::build(&e, &s, 3).unwrap().functions()[0].sample(&s);
        let c = Catalog::build(&e, &s, 4).unwrap().functions()[0].sample(&s);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.values().iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn slow_decay_is_rejected() {
        let s = make_grid(1, 16, 16).unwrap();
        let err = Catalog::build(&[CatalogEntry::Gaussian { s: 4.0, center: None }], &s, 0).unwrap_err();
        assert!(err.to_string().contains("L/4"));
        let bad = CatalogEntry::Indicator { corner: vec![1.0], side: 2.0 };
        assert!(Catalog::build(&[bad], &s, 0).is_err());
    }

    #[test]
    fn entries_parse_from_json() {
        let e: CatalogEntry = serde_json::from_str(r#"{"kind": "gaussian", "s": 0.5}"#).unwrap();
        assert_eq!(e, CatalogEntry::Gaussian { s: 0.5, center: None });
        assert!(serde_json::from_str::<CatalogEntry>(r#"{"kind": "gaussian", "s": 0.5, "width": 1}"#).is_err());
    }
}
