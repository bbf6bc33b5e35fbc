//! The Hardy-Fofana quasi-norm and its Poisson, Riesz and dilation
//! characterizations, plus the restriction-at-infinity table.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{GridFunction, GridSpec, Ladder};
use crate::kernels::{mollifier_with, MollifierShape};
use crate::maximal::{grand_maximal, nontangential_maximal};
use crate::norms::{amalgam_norm, default_dilation_ladder, dilate, fofana_norm, Exponents, NormReport};
use crate::transforms::{poisson_extend, riesz_transform, Spectrum};

/// Ladders shared by the estimators: `t` for mollifier and Poisson scales,
/// `r` for the dilation supremum of the Fofana norm.
#[derive(Debug, Clone, PartialEq)]
pub struct Ladders {
    pub t: Ladder,
    pub r: Ladder,
    pub shape: MollifierShape,
}

impl Ladders {
    pub fn new(t: Ladder, r: Ladder) -> Self {
        Self { t, r, shape: MollifierShape::Gaussian }
    }

    /// 13 dyadic scales from `4h` upward, and `r` in `2^-6 .. 2^6`.
    pub fn default_for(spec: &GridSpec) -> Self {
        let t = Ladder::new(4.0 * spec.spacing(), 2.0, 13).expect("positive spacing");
        Self::new(t, default_dilation_ladder())
    }

    pub fn with_shape(mut self, shape: MollifierShape) -> Self {
        self.shape = shape;
        self
    }

    /// Moves the `t` ladder by `factor`, leaving `r` alone.
    pub fn with_t_rescaled(&self, factor: f64) -> Result<Self> {
        Ok(Self { t: self.t.rescaled(factor)?, r: self.r.clone(), shape: self.shape })
    }
}

/// `||Mf||_{p,q,alpha}` with `M` the grand maximal function.
pub fn hardy_fofana_norm(f: &GridFunction<f64>, e: &Exponents, ladders: &Ladders) -> Result<NormReport> {
    e.check_theorem(f.spec().dim())?;
    fofana_norm(&grand_maximal(f, &ladders.t, ladders.shape)?, e, &ladders.r)
}

/// Fofana norm of the non-tangential maximal function of the Poisson extension.
pub fn poisson_characterization_norm(f: &GridFunction<f64>, e: &Exponents, ladders: &Ladders) -> Result<NormReport> {
    e.check_theorem(f.spec().dim())?;
    let star = nontangential_maximal(&poisson_extend(f, &ladders.t)?)?;
    fofana_norm(&star, e, &ladders.r)
}

/// `sup_t ( ||f * phi_t|| + sum_j ||R_j f * phi_t|| )` with its breakdown.
#[derive(Debug, Clone, PartialEq)]
pub struct RieszReport {
    /// Supremum over the `t` ladder of the per-scale sums.
    pub norm: NormReport,
    /// Per scale: `[||f * phi_t||, ||R_1 f * phi_t||, ..]`.
    pub components: Vec<Vec<f64>>,
}

pub fn riesz_characterization(f: &GridFunction<f64>, e: &Exponents, ladders: &Ladders) -> Result<RieszReport> {
    let spec = *f.spec();
    e.check_theorem(spec.dim())?;
    let mut parts = vec![Spectrum::of(f)];
    for j in 0..spec.dim() {
        parts.push(Spectrum::of(&riesz_transform(f, j)?));
    }
    let components = ladders
        .t
        .members()
        .into_par_iter()
        .map(|t| {
            let phi = Spectrum::of_kernel(&mollifier_with(&spec, t, ladders.shape)?.values);
            parts
                .iter()
                .map(|g| Ok(fofana_norm(&g.convolve(&phi)?.re(), e, &ladders.r)?.value))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let sums = components.iter().map(|c| c.iter().sum()).collect();
    Ok(RieszReport { norm: NormReport::from_terms(ladders.t.clone(), sums), components })
}

/// `sup_rho ||M(St^alpha_rho f)||_{p,q}` over a dyadic `rho` ladder.
///
/// The mollifier ladder moves with the dilation (`t -> rho t`), so that with
/// `rho_ladder = r` this reproduces [`hardy_fofana_norm`] term by term.
pub fn dilation_characterization(
    f: &GridFunction<f64>,
    e: &Exponents,
    rho_ladder: &Ladder,
    ladders: &Ladders,
) -> Result<NormReport> {
    e.check_theorem(f.spec().dim())?;
    if !rho_ladder.is_dyadic() {
        return Err(Error::NotDyadic(rho_ladder.ratio()));
    }
    let terms = rho_ladder
        .members()
        .into_par_iter()
        .map(|rho| {
            let g = dilate(f, e.alpha(), rho)?;
            let m = grand_maximal(&g, &ladders.t.rescaled(rho)?, ladders.shape)?;
            amalgam_norm(&m, e.p(), e.q())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NormReport::from_terms(rho_ladder.clone(), terms))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ratio {
    pub numerator: &'static str,
    pub denominator: &'static str,
    /// `None` when the denominator vanishes.
    pub value: Option<f64>,
}

/// The four functionals of the characterization theorems side by side.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacterizationReport {
    pub maximal_norm: NormReport,
    pub poisson_norm: NormReport,
    pub riesz_functional: RieszReport,
    pub dilation_norm: NormReport,
    pub ratios: Vec<Ratio>,
}

impl CharacterizationReport {
    pub const NAMES: [&'static str; 4] = ["maximal", "poisson", "riesz", "dilation"];

    pub fn values(&self) -> [f64; 4] {
        [self.maximal_norm.value, self.poisson_norm.value, self.riesz_functional.norm.value, self.dilation_norm.value]
    }

    pub fn ratio(&self, numerator: &str, denominator: &str) -> Option<f64> {
        self.ratios
            .iter()
            .find(|r| r.numerator == numerator && r.denominator == denominator)
            .and_then(|r| r.value)
    }
}

/// Runs all four functionals; the dilation one uses `ladders.r` as its `rho` ladder.
pub fn characterize(f: &GridFunction<f64>, e: &Exponents, ladders: &Ladders) -> Result<CharacterizationReport> {
    let ((maximal_norm, poisson_norm), (riesz_functional, dilation_norm)) = rayon::join(
        || rayon::join(|| hardy_fofana_norm(f, e, ladders), || poisson_characterization_norm(f, e, ladders)),
        || rayon::join(|| riesz_characterization(f, e, ladders), || dilation_characterization(f, e, &ladders.r, ladders)),
    );
    let mut report = CharacterizationReport {
        maximal_norm: maximal_norm?,
        poisson_norm: poisson_norm?,
        riesz_functional: riesz_functional?,
        dilation_norm: dilation_norm?,
        ratios: Vec::new(),
    };
    let values = report.values();
    for a in 0..4 {
        for b in 0..4 {
            if a != b {
                report.ratios.push(Ratio {
                    numerator: CharacterizationReport::NAMES[a],
                    denominator: CharacterizationReport::NAMES[b],
                    value: (values[b] > 0.0).then(|| values[a] / values[b]),
                });
            }
        }
    }
    Ok(report)
}

/// One row of the restriction-at-infinity table.
#[derive(Debug, Clone, PartialEq)]
pub struct RestrictionRow {
    pub mu: f64,
    /// `||f * phi||_{p mu, q mu, alpha mu}`.
    pub norm: f64,
    /// `||f * phi||_inf^{1 - 1/mu} ||f * phi||_{p,q,alpha}^{1/mu}`.
    pub bound: f64,
    pub violated: bool,
}

/// Relative slack allowed before a row counts as violating the bound.
pub const RESTRICTION_SLACK: f64 = 1e-12;

/// Fofana norms of `f * phi` at the scaled exponents `(p mu, q mu, alpha mu)`,
/// with `phi` the unit-scale mollifier.
pub fn restricted_at_infinity_diag(
    f: &GridFunction<f64>,
    e: &Exponents,
    mu_ladder: &Ladder,
    ladders: &Ladders,
) -> Result<Vec<RestrictionRow>> {
    if mu_ladder.min() < 1.0 {
        return Err(Error::Exponent { name: "mu", value: mu_ladder.min(), reason: "must be at least 1" });
    }
    let phi = mollifier_with(f.spec(), 1.0, ladders.shape)?;
    let g = Spectrum::of(f).convolve(&Spectrum::of_kernel(&phi.values))?.re();
    let sup = g.max_abs();
    let base = fofana_norm(&g, e, &ladders.r)?.value;
    mu_ladder
        .members()
        .into_par_iter()
        .map(|mu| {
            let norm = fofana_norm(&g, &e.scaled(mu)?, &ladders.r)?.value;
            let bound = sup.powf(1.0 - 1.0 / mu) * base.powf(1.0 / mu);
            let violated = norm > bound * (1.0 + RESTRICTION_SLACK);
            Ok(RestrictionRow { mu, norm, bound, violated })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, sample};
    use crate::kernels::closed_form;
    use crate::norms::lp_norm;

    fn bump(x: &[f64]) -> f64 {
        closed_form::heat(&[x[0] - 0.5], 0.25)
    }

    fn small_ladders(spec: &GridSpec) -> Ladders {
        Ladders::new(Ladder::new(4.0 * spec.spacing(), 2.0, 8).unwrap(), Ladder::dyadic(-3, 3).unwrap())
    }

    #[test]
    fn zero_gives_zero_everywhere() {
        let s = make_grid(1, 16, 16).unwrap();
        let z = GridFunction::<f64>::zeros(s);
        let e = Exponents::new(1.0, 2.0, 1.5).unwrap();
        let l = small_ladders(&s);
        let rep = characterize(&z, &e, &l).unwrap();
        assert_eq!(rep.values(), [0.0; 4]);
        assert!(rep.ratios.iter().all(|r| r.value.is_none()));
        let mu = Ladder::new(1.0, 2.0, 3).unwrap();
        assert!(restricted_at_infinity_diag(&z, &e, &mu, &l).unwrap().iter().all(|r| r.norm == 0.0));
    }

    #[test]
    fn constant_and_homogeneity() {
        let s = make_grid(1, 16, 16).unwrap();
        let e = Exponents::new(1.0, 2.0, 1.5).unwrap();
        let l = small_ladders(&s);
        let c = sample(|_| 3.0, &s).unwrap();
        let one = sample(|_| 1.0, &s).unwrap();
        let hc = hardy_fofana_norm(&c, &e, &l).unwrap().value;
        let h1 = fofana_norm(&one, &e, &l.r).unwrap().value;
        assert!((hc - 3.0 * h1).abs() < 1e-10 * hc);

        let f = sample(bump, &s).unwrap();
        let a = poisson_characterization_norm(&f, &e, &l).unwrap().value;
        let b = poisson_characterization_norm(&f.scale(3.0), &e, &l).unwrap().value;
        assert!((b - 3.0 * a).abs() < 1e-12 * b);
    }

    #[test]
    fn exponents_outside_theorem_range_are_rejected() {
        let s = make_grid(2, 4, 4).unwrap();
        let f = GridFunction::<f64>::zeros(s);
        let e = Exponents::new(0.4, 2.0, 1.0).unwrap();
        assert!(matches!(hardy_fofana_norm(&f, &e, &small_ladders(&s)), Err(Error::TheoremRange(_))));
        assert!(matches!(Exponents::new(1.0, 2.0, 3.0), Err(Error::Nontrivial { .. })));
    }

    #[test]
    fn riesz_functional_at_l2() {
        let s = make_grid(1, 32, 32).unwrap();
        let e = Exponents::new(2.0, 2.0, 2.0).unwrap();
        let f = sample(|x| closed_form::heat(x, 0.5), &s).unwrap();
        let l = Ladders::new(Ladder::new(s.spacing(), 2.0, 6).unwrap(), Ladder::dyadic(-2, 2).unwrap());
        let rep = riesz_characterization(&f, &e, &l).unwrap();
        let hf = riesz_transform(&f, 0).unwrap();
        let expected = lp_norm(&f, 2.0).unwrap() + lp_norm(&hf, 2.0).unwrap();
        assert!((rep.norm.value - expected).abs() < 1e-2 * expected);
        assert_eq!(rep.norm.argmax, l.t.min());
        assert_eq!(rep.components.len(), 6);
    }

    #[test]
    fn dilation_matches_maximal_norm() {
        let s = make_grid(1, 16, 16).unwrap();
        let e = Exponents::new(1.0, 2.0, 1.5).unwrap();
        let l = small_ladders(&s);
        let f = sample(bump, &s).unwrap();
        let a = hardy_fofana_norm(&f, &e, &l).unwrap();
        let b = dilation_characterization(&f, &e, &l.r, &l).unwrap();
        assert!((a.value - b.value).abs() < 1e-10 * a.value);
        let one = Ladder::new(1.0, 2.0, 1).unwrap();
        let plain = dilation_characterization(&f, &e, &one, &l).unwrap().value;
        let m = grand_maximal(&f, &l.t, l.shape).unwrap();
        assert!((plain - amalgam_norm(&m, 1.0, 2.0).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn restriction_table() {
        let s = make_grid(1, 16, 16).unwrap();
        let e = Exponents::new(1.0, 2.0, 1.5).unwrap();
        let l = small_ladders(&s);
        let f = sample(bump, &s).unwrap();
        let mu = Ladder::new(1.0, 2.0, 4).unwrap();
        let rows = restricted_at_infinity_diag(&f, &e, &mu, &l).unwrap();
        assert!(rows.iter().all(|r| !r.violated));
        let phi = mollifier_with(&s, 1.0, l.shape).unwrap().values;
        let g = crate::transforms::convolve(&f, &phi).unwrap();
        assert!((rows[0].norm - fofana_norm(&g, &e, &l.r).unwrap().value).abs() < 1e-14);
        assert!(restricted_at_infinity_diag(&f, &e, &Ladder::new(0.5, 2.0, 2).unwrap(), &l).is_err());
    }
}
