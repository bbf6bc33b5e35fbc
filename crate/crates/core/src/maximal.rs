//! Grand maximal, centred Hardy-Littlewood and non-tangential maximal functions.
//!
//! Ball and cone reductions only ever combine nonnegative values, so that
//! `|f| <= |g|` gives `Mf <= Mg` exactly in floating point.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{GridFunction, GridSpec, Ladder, Scalar};
use crate::kernels::{mollifier_with, MollifierShape};
use crate::norms::{fofana_norm, Exponents};
use crate::transforms::{Slab, Spectrum};

/// Cone `|x - y| < t` over the ladder of heights.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeSpec {
    t_ladder: Ladder,
}

impl ConeSpec {
    pub const APERTURE: f64 = 1.0;

    pub fn new(t_ladder: Ladder) -> Self {
        Self { t_ladder }
    }

    pub fn aperture(&self) -> f64 {
        Self::APERTURE
    }

    pub fn t_ladder(&self) -> &Ladder {
        &self.t_ladder
    }
}

#[derive(Clone, Copy)]
enum Reduce {
    Sum,
    Max,
}

impl Reduce {
    fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            Reduce::Sum => a + b,
            Reduce::Max => a.max(b),
        }
    }
}

/// Row offsets `a` and half-widths `k_a` of the grid points `y` with
/// `|x - y| < r`, as signed offsets on the torus (minimum image).
fn ball_rows(spec: &GridSpec, r: f64) -> Vec<(i64, usize)> {
    let n = spec.points_per_axis() as i64;
    let rr = (r / spec.spacing()).powi(2);
    let half_width = |a: i64| -> Option<usize> {
        let rest = rr - (a * a) as f64;
        if rest <= 0.0 {
            return None;
        }
        // largest b with b^2 < rest
        let mut b = rest.sqrt().floor() as i64;
        while b > 0 && (b * b) as f64 >= rest {
            b -= 1;
        }
        while (((b + 1) * (b + 1)) as f64) < rest {
            b += 1;
        }
        Some(b.max(0) as usize)
    };
    match spec.dim() {
        1 => vec![(0, half_width(0).unwrap_or(0))],
        _ => (-(n / 2)..(n - n / 2)).filter_map(|a| half_width(a).map(|k| (a, k))).collect(),
    }
}

fn ball_count(spec: &GridSpec, rows: &[(i64, usize)]) -> f64 {
    let n = spec.points_per_axis();
    rows.iter().map(|&(_, k)| (2 * k + 1).min(n) as f64).sum()
}

/// Row-wise window reductions of one field, cached per half-width and
/// shared by every ball centre.
///
/// Windows grow one point per side at a time, so every reduction only
/// combines nonnegative values: `|f| <= |g|` gives `Mf <= Mg` exactly.
struct RowWindows {
    n: usize,
    dim: usize,
    op: Reduce,
    values: Vec<f64>,
    cache: HashMap<usize, Vec<f64>>,
}

impl RowWindows {
    fn new(values: &[f64], spec: &GridSpec, op: Reduce) -> Self {
        Self { n: spec.points_per_axis(), dim: spec.dim(), op, values: values.to_vec(), cache: HashMap::new() }
    }

    /// Cache key: the half-width, or `n / 2` once the window covers the row.
    fn key(&self, k: usize) -> usize {
        k.min(self.n / 2)
    }

    fn prepare(&mut self, rows: &[(i64, usize)]) {
        let mut wanted: Vec<usize> = rows.iter().map(|&(_, k)| self.key(k)).filter(|k| !self.cache.contains_key(k)).collect();
        wanted.sort_unstable();
        wanted.dedup();
        let Some(&last) = wanted.last() else { return };
        let (n, op) = (self.n, self.op);
        let mut current = self.values.clone();
        for k in 0..=last {
            if k > 0 {
                for (row, out) in self.values.chunks(n).zip(current.chunks_mut(n)) {
                    // row[j - k] and row[j + k], periodically
                    let left = row[n - k..].iter().chain(&row[..n - k]);
                    let right = row[k..].iter().chain(&row[..k]);
                    if 2 * k == n {
                        // the last step of an even row adds the single opposite point
                        out.iter_mut().zip(left).for_each(|(w, &l)| *w = op.apply(*w, l));
                    } else {
                        out.iter_mut().zip(left.zip(right)).for_each(|(w, (&l, &r))| *w = op.apply(op.apply(*w, l), r));
                    }
                }
            }
            if wanted.binary_search(&k).is_ok() {
                self.cache.insert(k, current.clone());
            }
        }
    }

    /// Reduction over the ball with the given rows, at every grid point.
    fn balls(&mut self, rows: &[(i64, usize)]) -> Vec<f64> {
        self.prepare(rows);
        let (n, op) = (self.n, self.op);
        let windows: Vec<&[f64]> = rows.iter().map(|&(_, k)| self.cache[&self.key(k)].as_slice()).collect();
        if self.dim == 1 {
            return windows[0].to_vec();
        }
        let mut out = vec![0.0f64; n * n];
        out.par_chunks_mut(n).enumerate().for_each(|(i, acc)| {
            for (&(a, _), w) in rows.iter().zip(&windows) {
                let row = (i as i64 + a).rem_euclid(n as i64) as usize;
                for (o, &v) in acc.iter_mut().zip(&w[row * n..(row + 1) * n]) {
                    *o = op.apply(*o, v);
                }
            }
        });
        out
    }
}

/// `sup_t |(f * phi_t)(x)|` over the ladder, with `phi` of the given shape.
pub fn grand_maximal<T: Scalar>(
    f: &GridFunction<T>,
    t_ladder: &Ladder,
    shape: MollifierShape,
) -> Result<GridFunction<f64>> {
    let spectrum = Spectrum::of(f);
    let slices = t_ladder
        .members()
        .into_par_iter()
        .map(|t| {
            let phi = mollifier_with(f.spec(), t, shape)?;
            Ok(spectrum.convolve(&Spectrum::of_kernel(&phi.values))?.modulus())
        })
        .collect::<Result<Vec<_>>>()?;
    pointwise_max(slices)
}

fn pointwise_max(slices: Vec<GridFunction<f64>>) -> Result<GridFunction<f64>> {
    let mut it = slices.into_iter();
    let first = it.next().ok_or(Error::Empty("ladder"))?;
    it.try_fold(first, |acc, u| acc.zip_with(&u, f64::max))
}

/// Centred Hardy-Littlewood maximal function over the radius ladder.
///
/// Balls are the grid points with `|x - y| < r` (torus distance); the average
/// divides by the point count, so `|B| = count * h^d` exactly.
pub fn hl_maximal<T: Scalar>(f: &GridFunction<T>, r_ladder: &Ladder) -> Result<GridFunction<f64>> {
    let spec = *f.spec();
    if r_ladder.min() < spec.spacing() {
        return Err(Error::Scale(r_ladder.min()));
    }
    let abs: Vec<f64> = f.values().iter().map(|v| v.modulus()).collect();
    let mut windows = RowWindows::new(&abs, &spec, Reduce::Sum);
    let mut out = vec![0.0f64; spec.len()];
    for r in r_ladder.members() {
        let rows = ball_rows(&spec, r);
        let count = ball_count(&spec, &rows);
        for (o, s) in out.iter_mut().zip(windows.balls(&rows)) {
            *o = o.max(s / count);
        }
    }
    GridFunction::new(spec, out)
}

/// `u*(x) = sup_t sup_{|x-y|<t} |u(y, t)|` over the slices of `u`.
pub fn nontangential_maximal(u: &Slab) -> Result<GridFunction<f64>> {
    let spec = *u.spec();
    let per_slice = u
        .slices()
        .par_iter()
        .map(|(t, g)| {
            let abs: Vec<f64> = g.values().iter().map(|v| v.abs()).collect();
            GridFunction::new(spec, RowWindows::new(&abs, &spec, Reduce::Max).balls(&ball_rows(&spec, *t)))
        })
        .collect::<Result<Vec<_>>>()?;
    pointwise_max(per_slice)
}

/// Both sides of the vector-valued maximal inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorMaximalReport {
    /// `||(sum (Mf_n)^u)^{1/u}||_{p,q,alpha}`.
    pub maximal_side: f64,
    /// `||(sum |f_n|^u)^{1/u}||_{p,q,alpha}`.
    pub plain_side: f64,
    /// `maximal_side / plain_side`, 1 when both vanish.
    pub ratio: f64,
}

impl VectorMaximalReport {
    pub const LOWER_TOLERANCE: f64 = 1e-2;

    pub fn lower_bound_holds(&self) -> bool {
        self.ratio >= 1.0 - Self::LOWER_TOLERANCE
    }
}

fn lu_sum(parts: &[GridFunction<f64>], u: f64) -> Result<GridFunction<f64>> {
    let first = parts.first().ok_or(Error::Empty("function family"))?;
    let mut acc = first.map(|v| v.abs().powf(u));
    for g in &parts[1..] {
        acc = acc.zip_with(g, |a, b| a + b.abs().powf(u))?;
    }
    Ok(acc.map(|v| v.powf(1.0 / u)))
}

/// Evaluates both sides of the vector-valued maximal inequality for `fs`.
///
/// `radii` drives the Hardy-Littlewood operator; `r_ladder` the Fofana norm.
pub fn vector_maximal_experiment(
    fs: &[GridFunction<f64>],
    u: f64,
    e: &Exponents,
    radii: &Ladder,
    r_ladder: &Ladder,
) -> Result<VectorMaximalReport> {
    if e.p() <= 1.0 {
        return Err(Error::Exponent { name: "p", value: e.p(), reason: "vector maximal inequality needs p > 1" });
    }
    if !(u.is_finite() && u > 1.0) {
        return Err(Error::Exponent { name: "u", value: u, reason: "must exceed 1" });
    }
    let maximal = fs.par_iter().map(|f| hl_maximal(f, radii)).collect::<Result<Vec<_>>>()?;
    let maximal_side = fofana_norm(&lu_sum(&maximal, u)?, e, r_ladder)?.value;
    let plain_side = fofana_norm(&lu_sum(fs, u)?, e, r_ladder)?.value;
    let ratio = if plain_side == 0.0 && maximal_side == 0.0 { 1.0 } else { maximal_side / plain_side };
    Ok(VectorMaximalReport { maximal_side, plain_side, ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, sample};
    use crate::kernels::closed_form;
    use crate::transforms::poisson_extend;

    fn indicator(lo: f64, hi: f64) -> impl Fn(&[f64]) -> f64 {
        move |x: &[f64]| if x[0] >= lo && x[0] < hi { 1.0 } else { 0.0 }
    }

    /// Ball average by scanning every grid point.
    fn brute_ball_average(f: &GridFunction<f64>, flat: usize, r: f64) -> f64 {
        let s = f.spec();
        let side = s.side();
        let x = s.point(flat);
        let (mut sum, mut count) = (0.0, 0.0);
        for (k, v) in f.values().iter().enumerate() {
            let y = s.point(k);
            let mut d2 = 0.0;
            for a in 0..s.dim() {
                let mut dx = (x[a] - y[a]).abs() % side;
                if dx > side / 2.0 {
                    dx = side - dx;
                }
                d2 += dx * dx;
            }
            if d2.sqrt() < r {
                sum += v.abs();
                count += 1.0;
            }
        }
        sum / count
    }

    #[test]
    fn row_windows_match_direct_reductions() {
        let spec = make_grid(1, 4, 4).unwrap();
        let n = spec.points_per_axis();
        let vals: Vec<f64> = (0..n).map(|i| ((i * 7) % 5) as f64 + 0.25).collect();
        let mut sums = RowWindows::new(&vals, &spec, Reduce::Sum);
        let mut maxes = RowWindows::new(&vals, &spec, Reduce::Max);
        for k in 0..=n {
            let width = (2 * k + 1).min(n);
            let v = &vals;
            let window = |j: usize| (0..width).map(move |o| v[(j + n - k.min(n / 2) + o) % n]);
            let (s, m) = (sums.balls(&[(0, k)]), maxes.balls(&[(0, k)]));
            for j in 0..n {
                assert!((s[j] - window(j).sum::<f64>()).abs() < 1e-12, "k = {k}, j = {j}");
                assert_eq!(m[j], window(j).fold(0.0, f64::max));
            }
        }
    }

    #[test]
    fn ball_rows_are_strict() {
        let s = make_grid(2, 4, 4).unwrap();
        // r = 2h: offsets with a^2 + b^2 < 4
        let rows = ball_rows(&s, 0.5);
        assert_eq!(rows, vec![(-1, 1), (0, 1), (1, 1)]);
        assert_eq!(ball_count(&s, &rows), 9.0);
        let one = make_grid(1, 4, 4).unwrap();
        assert_eq!(ball_rows(&one, 0.25), vec![(0, 0)]);
    }

    #[test]
    fn hl_examples() {
        let s = make_grid(1, 16, 8).unwrap();
        let chi = sample(indicator(-1.0, 1.0), &s).unwrap();
        let ladder = Ladder::new(s.spacing(), 2.0, 8).unwrap();
        let m = hl_maximal(&chi, &ladder).unwrap();
        assert_eq!(m.at_point(&[0.0]).unwrap(), 1.0);
        // at x = 3 the best dyadic radius is r = 4: 15 of the 63 points lie in [-1, 1)
        let v = m.at_point(&[3.0]).unwrap();
        let flat = (3.0 * 8.0 + 64.0) as usize;
        let brute = ladder.members().iter().map(|&r| brute_ball_average(&chi, flat, r)).fold(0.0, f64::max);
        assert_eq!(v, brute);
        assert_eq!(v, 15.0 / 63.0);

        let c = sample(|_| 2.5, &s).unwrap();
        assert!(hl_maximal(&c, &ladder).unwrap().values().iter().all(|v| (v - 2.5).abs() < 1e-10));
        assert!(hl_maximal(&c, &Ladder::new(0.5 * s.spacing(), 2.0, 3).unwrap()).is_err());
    }

    #[test]
    fn hl_matches_brute_force_2d() {
        let s = make_grid(2, 4, 4).unwrap();
        let f = sample(|x| (x[0] - 0.3 * x[1]).sin() + 0.2, &s).unwrap();
        let ladder = Ladder::new(s.spacing(), 2.0, 5).unwrap();
        let m = hl_maximal(&f, &ladder).unwrap();
        for flat in [0, 17, 100, 255] {
            let brute = ladder.members().iter().map(|&r| brute_ball_average(&f, flat, r)).fold(0.0, f64::max);
            assert!((m.values()[flat] - brute).abs() < 1e-12);
        }
    }

    #[test]
    fn grand_maximal_examples() {
        let s = make_grid(1, 16, 32).unwrap();
        let ladder = Ladder::new(4.0 * s.spacing(), 2.0, 13).unwrap();
        let c = sample(|_| -1.5, &s).unwrap();
        let m = grand_maximal(&c, &ladder, MollifierShape::Gaussian).unwrap();
        assert!(m.values().iter().all(|v| (v - 1.5).abs() < 1e-10));
        let z = grand_maximal(&GridFunction::<f64>::zeros(s), &ladder, MollifierShape::Gaussian).unwrap();
        assert_eq!(z.max_abs(), 0.0);
        let w = sample(|x| closed_form::heat(x, 1.0 / (4.0 * std::f64::consts::PI)), &s).unwrap();
        let m = grand_maximal(&w, &ladder, MollifierShape::Gaussian).unwrap();
        assert!(m.at_point(&[0.0]).unwrap() >= 0.99);
    }

    #[test]
    fn nontangential_examples() {
        let s = make_grid(1, 64, 16).unwrap();
        let ladder = Ladder::new(s.spacing(), 2.0, 13).unwrap();
        let p1 = crate::kernels::poisson_kernel(&s, 1.0).unwrap().values;
        let star = nontangential_maximal(&poisson_extend(&p1, &ladder).unwrap()).unwrap();
        assert!((star.at_point(&[0.0]).unwrap() - 1.0 / std::f64::consts::PI).abs() < 2e-2);
        let c = sample(|_| -0.75, &s).unwrap();
        let cs = Slab::new(ladder.members().into_iter().map(|t| (t, c.clone())).collect()).unwrap();
        assert!(nontangential_maximal(&cs).unwrap().values().iter().all(|&v| v == 0.75));
    }

    #[test]
    fn vector_maximal_examples() {
        let s = make_grid(1, 16, 16).unwrap();
        let e = Exponents::new(2.0, 4.0, 3.0).unwrap();
        let radii = Ladder::new(s.spacing(), 2.0, 8).unwrap();
        let r = Ladder::dyadic(-3, 3).unwrap();
        let z = GridFunction::<f64>::zeros(s);
        let rep = vector_maximal_experiment(&[z.clone(), z], 2.0, &e, &radii, &r).unwrap();
        assert_eq!(rep.ratio, 1.0);
        let c = sample(|_| 1.0, &s).unwrap();
        let rep = vector_maximal_experiment(&[c], 2.0, &e, &radii, &r).unwrap();
        assert!((rep.ratio - 1.0).abs() < 1e-2);
        let low = Exponents::new(1.0, 4.0, 3.0).unwrap();
        assert!(vector_maximal_experiment(&[], 2.0, &low, &radii, &r).is_err());
    }
}
