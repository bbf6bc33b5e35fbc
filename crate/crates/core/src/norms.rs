//! Lebesgue, amalgam, Fofana and Morrey norms, and the dilation `St^alpha_r`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{dyadic_exponent, resample_dyadic, GridFunction, Ladder, Scalar};

/// Exponent triple `(p, q, alpha)` with `p <= alpha <= q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponents {
    p: f64,
    q: f64,
    alpha: f64,
}

impl Exponents {
    pub fn new(p: f64, q: f64, alpha: f64) -> Result<Self> {
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::Exponent { name: "p", value: p, reason: "must be finite and positive" });
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::Exponent { name: "alpha", value: alpha, reason: "must be finite and positive" });
        }
        if q.is_nan() || q <= 0.0 {
            return Err(Error::Exponent { name: "q", value: q, reason: "must be positive or infinite" });
        }
        if !(p <= alpha && alpha <= q) {
            return Err(Error::Nontrivial { p, q, alpha });
        }
        Ok(Self { p, q, alpha })
    }

    /// Triple inside the range `(d-1)/d < p <= alpha <= q < infinity`.
    pub fn theorem(p: f64, q: f64, alpha: f64, d: usize) -> Result<Self> {
        let e = Self::new(p, q, alpha)?;
        e.check_theorem(d)?;
        Ok(e)
    }

    pub fn check_theorem(&self, d: usize) -> Result<()> {
        let floor = (d as f64 - 1.0) / d as f64;
        if self.p <= floor {
            return Err(Error::TheoremRange(format!("p = {} must exceed (d-1)/d = {floor}", self.p)));
        }
        if !self.q.is_finite() {
            return Err(Error::TheoremRange("q must be finite".into()));
        }
        Ok(())
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `(p mu, q mu, alpha mu)`.
    pub fn scaled(&self, mu: f64) -> Result<Self> {
        Self::new(self.p * mu, self.q * mu, self.alpha * mu)
    }
}

/// Discrete supremum over a ladder, with the member that attains it.
#[derive(Debug, Clone, PartialEq)]
pub struct NormReport {
    pub value: f64,
    /// Smallest ladder member attaining `value`.
    pub argmax: f64,
    pub ladder: Ladder,
    /// Per-member values, in ladder order.
    pub terms: Vec<f64>,
}

impl NormReport {
    /// Builds the report from per-member terms; ties go to the smallest member.
    pub fn from_terms(ladder: Ladder, terms: Vec<f64>) -> Self {
        let members = ladder.members();
        let mut best = 0;
        for (k, t) in terms.iter().enumerate() {
            if *t > terms[best] {
                best = k;
            }
        }
        Self { value: terms[best], argmax: members[best], ladder, terms }
    }

    /// Term recorded for ladder member `r`, if present.
    pub fn term_at(&self, r: f64) -> Option<f64> {
        self.ladder.members().iter().position(|&m| m == r).map(|k| self.terms[k])
    }
}

/// Default dilation ladder `2^-6 .. 2^6`.
pub fn default_dilation_ladder() -> Ladder {
    Ladder::dyadic(-6, 6).expect("static ladder")
}

fn check_lebesgue(name: &'static str, p: f64) -> Result<()> {
    if p.is_nan() || p <= 0.0 {
        return Err(Error::Exponent { name, value: p, reason: "must be positive" });
    }
    Ok(())
}

/// `(h^d sum |u|^p)^{1/p}`, or `max |u|` for `p = infinity`.
pub fn lp_norm<T: Scalar>(u: &GridFunction<T>, p: f64) -> Result<f64> {
    check_lebesgue("p", p)?;
    if p.is_infinite() {
        return Ok(u.max_abs());
    }
    let sum: f64 = u.values().iter().map(|v| v.modulus().powf(p)).sum();
    Ok((u.spec().cell_volume() * sum).powf(1.0 / p))
}

/// Amalgam norm `(sum_k ||u chi_{Q_k}||_p^q)^{1/q}` over the unit cubes `Q_k`.
///
/// Every cell of a dyadic grid lies inside one unit cube when `h <= 1`; when
/// `h > 1` a cell covers `h^d` whole cubes, each seeing the constant cell
/// value. Both cases are exact block reductions.
pub fn amalgam_norm<T: Scalar>(u: &GridFunction<T>, p: f64, q: f64) -> Result<f64> {
    check_lebesgue("p", p)?;
    check_lebesgue("q", q)?;
    let spec = *u.spec();
    let d = spec.dim();
    let vals = u.values();

    if spec.spacing_exp() > 0 {
        // each cell spans h^d unit cubes with local norm |u_i|
        let cubes_per_cell = spec.cell_volume();
        if q.is_infinite() {
            return Ok(u.max_abs());
        }
        let sum: f64 = vals.iter().map(|v| v.modulus().powf(q)).sum();
        return Ok((cubes_per_cell * sum).powf(1.0 / q));
    }

    let n = spec.points_per_axis();
    let first = spec.origin().floor();
    let cube_of: Vec<usize> = (0..n).map(|i| (spec.coordinate(i).floor() - first) as usize).collect();
    let per_axis = cube_of[n - 1] + 1;
    let n_cubes = per_axis.pow(d as u32);
    let mut local = vec![0.0f64; n_cubes];
    for (flat, v) in vals.iter().enumerate() {
        let idx = spec.unflatten(flat);
        let cube = match d {
            1 => cube_of[idx[0]],
            _ => cube_of[idx[0]] * per_axis + cube_of[idx[1]],
        };
        let m = v.modulus();
        if p.is_infinite() {
            local[cube] = local[cube].max(m);
        } else {
            local[cube] += m.powf(p);
        }
    }
    let vol = spec.cell_volume();
    // local L^p norms of each cube
    let cube_norm = |s: f64| if p.is_infinite() { s } else { (vol * s).powf(1.0 / p) };
    if q.is_infinite() {
        return Ok(local.iter().fold(0.0f64, |m, &s| m.max(cube_norm(s))));
    }
    let total: f64 = if p.is_infinite() {
        local.iter().map(|&s| s.powf(q)).sum()
    } else {
        local.iter().map(|&s| (vol * s).powf(q / p)).sum()
    };
    Ok(total.powf(1.0 / q))
}

/// `(St^alpha_r u)(x) = r^{-d/alpha} u(x / r)` for dyadic `r`.
pub fn dilate<T: Scalar>(u: &GridFunction<T>, alpha: f64, r: f64) -> Result<GridFunction<T>> {
    dyadic_exponent(r).ok_or(Error::NotDyadic(r))?;
    if r == 1.0 {
        return Ok(u.clone());
    }
    let d = u.spec().dim() as f64;
    let amplitude = r.powf(-d / alpha);
    Ok(resample_dyadic(u, r)?.scale(amplitude))
}

/// `sup_r ||St^alpha_r u||_{p,q}` over a dyadic ladder.
pub fn fofana_norm<T: Scalar>(u: &GridFunction<T>, e: &Exponents, r_ladder: &Ladder) -> Result<NormReport> {
    if !r_ladder.is_dyadic() {
        return Err(Error::NotDyadic(if dyadic_exponent(r_ladder.base()).is_none() {
            r_ladder.base()
        } else {
            r_ladder.ratio()
        }));
    }
    let terms = r_ladder
        .members()
        .par_iter()
        .map(|&r| amalgam_norm(&dilate(u, e.alpha(), r)?, e.p(), e.q()))
        .collect::<Result<Vec<_>>>()?;
    Ok(NormReport::from_terms(r_ladder.clone(), terms))
}

/// Morrey norm: the `q = infinity` Fofana norm over the default dyadic ladder.
pub fn morrey_norm<T: Scalar>(u: &GridFunction<T>, p: f64, alpha: f64) -> Result<f64> {
    if p >= alpha {
        return Err(Error::Exponent { name: "p", value: p, reason: "Morrey norm needs p < alpha" });
    }
    let e = Exponents::new(p, f64::INFINITY, alpha)?;
    Ok(fofana_norm(u, &e, &default_dilation_ladder())?.value)
}
