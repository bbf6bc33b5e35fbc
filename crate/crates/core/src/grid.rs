//! Sampled functions on periodic grids aligned with the unit-cube partition.
//!
//! A [`GridSpec`] describes the torus `[-S/2, S/2)^d` sampled with `n` points per
//! axis at spacing `h = 2^e`. Sample `j` sits at the left edge `x_j = -S/2 + j h`
//! of its cell `[x_j, x_j + h)`, so dyadic indicators are represented exactly and
//! every unit cube holds a whole number of cells whenever `h <= 1`.
//!
//! Dyadic dilation never resamples: [`resample_dyadic`] keeps the sample values
//! and rescales the coordinates (`h -> 2^k h`, `S -> 2^k S`), which makes
//! `u(x / 2^k)` exact on the new grid.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Scalar sample type: `f64` or `Complex64`.
pub trait Scalar:
    Copy
    + Send
    + Sync
    + PartialEq
    + std::fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Neg<Output = Self>
    + Mul<f64, Output = Self>
    + 'static
{
    fn zero() -> Self;
    fn modulus(self) -> f64;
    fn is_finite_value(self) -> bool;
    fn to_complex(self) -> Complex64;
    /// Largest finite component, used for error reporting.
    fn probe(self) -> f64;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
    fn probe(self) -> f64 {
        self
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn is_finite_value(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    fn to_complex(self) -> Complex64 {
        self
    }
    fn probe(self) -> f64 {
        if self.re.is_finite() {
            self.im
        } else {
            self.re
        }
    }
}

/// Returns `Some(k)` when `x == 2^k` exactly.
pub fn dyadic_exponent(x: f64) -> Option<i32> {
    if !(x.is_finite() && x > 0.0) {
        return None;
    }
    let k = x.log2().round() as i32;
    (2f64.powi(k) == x).then_some(k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridSpec {
    dim: usize,
    points_per_axis: usize,
    spacing_exp: i32,
}

/// Validated base grid: dimension `d`, even side `side`, `per_unit` samples per unit length.
pub fn make_grid(d: usize, side: usize, per_unit: usize) -> Result<GridSpec> {
    if d != 1 && d != 2 {
        return Err(Error::Dimension(d));
    }
    if side < 2 || !side.is_multiple_of(2) {
        return Err(Error::SideLength(side));
    }
    if per_unit < 2 || !per_unit.is_power_of_two() {
        return Err(Error::Resolution(per_unit));
    }
    Ok(GridSpec {
        dim: d,
        points_per_axis: side * per_unit,
        spacing_exp: -(per_unit.trailing_zeros() as i32),
    })
}

impl GridSpec {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    /// Total sample count `n^d`.
    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing_exp(&self) -> i32 {
        self.spacing_exp
    }

    pub fn spacing(&self) -> f64 {
        2f64.powi(self.spacing_exp)
    }

    /// `h^d`, the quadrature weight of one sample.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Side length of the periodic box.
    pub fn side(&self) -> f64 {
        self.points_per_axis as f64 * self.spacing()
    }

    pub fn origin(&self) -> f64 {
        -0.5 * self.side()
    }

    /// Samples per unit length (`1/h`); fractional for coarse grids.
    pub fn per_unit(&self) -> f64 {
        2f64.powi(-self.spacing_exp)
    }

    /// Coordinate of the `i`-th sample along any axis.
    pub fn coordinate(&self, i: usize) -> f64 {
        self.origin() + i as f64 * self.spacing()
    }

    /// Grid index along one axis of the point `x = 0`.
    pub fn center_index(&self) -> usize {
        self.points_per_axis / 2
    }

    /// Per-axis indices of a flat index (axis 0 is the slow axis).
    pub fn unflatten(&self, flat: usize) -> [usize; 2] {
        match self.dim {
            1 => [flat, 0],
            _ => [flat / self.points_per_axis, flat % self.points_per_axis],
        }
    }

    pub fn flatten(&self, idx: [usize; 2]) -> usize {
        match self.dim {
            1 => idx[0],
            _ => idx[0] * self.points_per_axis + idx[1],
        }
    }

    /// Coordinates of a flat index (unused trailing entries are zero).
    pub fn point(&self, flat: usize) -> [f64; 2] {
        let idx = self.unflatten(flat);
        match self.dim {
            1 => [self.coordinate(idx[0]), 0.0],
            _ => [self.coordinate(idx[0]), self.coordinate(idx[1])],
        }
    }

    /// The same sample layout with coordinates multiplied by `2^k`.
    pub fn scaled(&self, k: i32) -> GridSpec {
        GridSpec { spacing_exp: self.spacing_exp + k, ..*self }
    }

    /// The same box sampled twice as finely.
    pub fn refined(&self) -> GridSpec {
        GridSpec { points_per_axis: 2 * self.points_per_axis, spacing_exp: self.spacing_exp - 1, ..*self }
    }

    /// Number of unit cubes along one axis, for grids with `h <= 1` and integer side.
    pub fn cubes_per_axis(&self) -> Option<usize> {
        let side = self.side();
        (self.spacing_exp <= 0 && side >= 1.0 && side.fract() == 0.0).then_some(side as usize)
    }
}

/// Samples of a scalar function on a periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction<T: Scalar = f64> {
    spec: GridSpec,
    values: Vec<T>,
}

pub type ComplexGridFunction = GridFunction<Complex64>;

impl<T: Scalar> GridFunction<T> {
    pub fn new(spec: GridSpec, values: Vec<T>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::Length { expected: spec.len(), got: values.len() });
        }
        if let Some((index, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite_value()) {
            return Err(Error::NonFinite { index, value: v.probe() });
        }
        Ok(Self { spec, values })
    }

    /// Internal constructor for values produced by finite arithmetic on finite inputs.
    pub(crate) fn from_parts(spec: GridSpec, values: Vec<T>) -> Self {
        debug_assert_eq!(values.len(), spec.len());
        Self { spec, values }
    }

    pub fn zeros(spec: GridSpec) -> Self {
        Self { spec, values: vec![T::zero(); spec.len()] }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> GridFunction<U> {
        GridFunction::from_parts(self.spec, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with<U: Scalar, V: Scalar>(
        &self,
        other: &GridFunction<U>,
        f: impl Fn(T, U) -> V,
    ) -> Result<GridFunction<V>> {
        if self.spec != other.spec {
            return Err(Error::SpecMismatch);
        }
        Ok(GridFunction::from_parts(
            self.spec,
            self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        ))
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| v * c)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Pointwise modulus.
    pub fn modulus(&self) -> GridFunction<f64> {
        self.map(|v| v.modulus())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.modulus()))
    }

    /// Discrete `L^2` norm `(h^d sum |u|^2)^{1/2}`.
    pub fn l2(&self) -> f64 {
        (self.spec.cell_volume() * self.values.iter().map(|v| v.modulus().powi(2)).sum::<f64>()).sqrt()
    }

    pub fn to_complex(&self) -> ComplexGridFunction {
        self.map(|v| v.to_complex())
    }

    /// Value at the grid point nearest to the left of `x` (cell containing `x`).
    pub fn at_point(&self, x: &[f64]) -> Option<T> {
        let h = self.spec.spacing();
        let n = self.spec.points_per_axis();
        let mut idx = [0usize; 2];
        for (axis, xi) in x.iter().take(self.spec.dim()).enumerate() {
            let k = ((xi - self.spec.origin()) / h).floor();
            if k < 0.0 || k >= n as f64 {
                return None;
            }
            idx[axis] = k as usize;
        }
        Some(self.values[self.spec.flatten(idx)])
    }
}

impl GridFunction<f64> {
    /// Largest pointwise difference `max |u - v|`.
    pub fn max_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.max_abs())
    }

    /// `||u - v||_2 / ||v||_2` (absolute when `v = 0`).
    pub fn rel_l2_diff(&self, reference: &Self) -> Result<f64> {
        let diff = self.sub(reference)?.l2();
        let denom = reference.l2();
        Ok(if denom > 0.0 { diff / denom } else { diff })
    }

    pub fn real_to_complex(&self) -> ComplexGridFunction {
        self.to_complex()
    }
}

impl ComplexGridFunction {
    pub fn re(&self) -> GridFunction<f64> {
        self.map(|v| v.re)
    }

    pub fn im(&self) -> GridFunction<f64> {
        self.map(|v| v.im)
    }
}

/// Finite geometric ladder `{base * ratio^k : 0 <= k < count}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ladder {
    base: f64,
    ratio: f64,
    count: usize,
}

impl Ladder {
    pub fn new(base: f64, ratio: f64, count: usize) -> Result<Self> {
        if !(base.is_finite() && base > 0.0 && ratio.is_finite() && ratio > 1.0 && count > 0) {
            return Err(Error::Ladder { base, ratio, count });
        }
        Ok(Self { base, ratio, count })
    }

    /// `{2^lo, ..., 2^hi}`.
    pub fn dyadic(lo: i32, hi: i32) -> Result<Self> {
        if hi < lo {
            return Err(Error::Ladder { base: 2f64.powi(lo), ratio: 2.0, count: 0 });
        }
        Self::new(2f64.powi(lo), 2.0, (hi - lo + 1) as usize)
    }

    /// Geometric ladder from `lo` to `hi` with `per_octave` members per doubling.
    pub fn spanning(lo: f64, hi: f64, per_octave: usize) -> Result<Self> {
        let octaves = (hi / lo).log2();
        if !(octaves.is_finite() && octaves > 0.0 && per_octave > 0) {
            return Err(Error::Ladder { base: lo, ratio: 2.0, count: 0 });
        }
        let steps = (octaves * per_octave as f64).round() as usize;
        Self::new(lo, 2f64.powf(1.0 / per_octave as f64), steps + 1)
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn members(&self) -> Vec<f64> {
        (0..self.count).map(|k| self.member(k)).collect()
    }

    pub fn member(&self, k: usize) -> f64 {
        self.base * self.ratio.powi(k as i32)
    }

    pub fn min(&self) -> f64 {
        self.base
    }

    pub fn max(&self) -> f64 {
        self.member(self.count - 1)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.members().contains(&x)
    }

    /// Every member is an exact power of two.
    pub fn is_dyadic(&self) -> bool {
        dyadic_exponent(self.base).is_some() && dyadic_exponent(self.ratio).is_some()
    }

    /// Same ladder with every member multiplied by `factor`.
    pub fn rescaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.base * factor, self.ratio, self.count)
    }

    /// Halves the logarithmic step while keeping both endpoints.
    pub fn refined(&self) -> Self {
        Self { base: self.base, ratio: self.ratio.sqrt(), count: 2 * self.count - 1 }
    }
}

/// Samples `descriptor` at every grid point.
pub fn sample(descriptor: impl Fn(&[f64]) -> f64, spec: &GridSpec) -> Result<GridFunction<f64>> {
    let d = spec.dim();
    let values = (0..spec.len())
        .map(|flat| {
            let x = spec.point(flat);
            let v = descriptor(&x[..d]);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::NonFinite { index: flat, value: v })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GridFunction::from_parts(*spec, values))
}

/// Index blocks of the unit cubes `Q_k`, `k` in lexicographic order.
pub fn cube_slices(spec: &GridSpec) -> Result<Vec<Vec<usize>>> {
    let cubes = spec.cubes_per_axis().ok_or(Error::CoarseGrid(spec.spacing()))?;
    let per = (spec.per_unit()) as usize;
    let blocks = match spec.dim() {
        1 => (0..cubes).map(|k| (k * per..(k + 1) * per).collect()).collect(),
        _ => {
            let mut out = Vec::with_capacity(cubes * cubes);
            for k0 in 0..cubes {
                for k1 in 0..cubes {
                    let mut block = Vec::with_capacity(per * per);
                    for i0 in k0 * per..(k0 + 1) * per {
                        for i1 in k1 * per..(k1 + 1) * per {
                            block.push(spec.flatten([i0, i1]));
                        }
                    }
                    out.push(block);
                }
            }
            out
        }
    };
    Ok(blocks)
}

/// Second-order central difference along `axis` with periodic wraparound.
pub fn partial_derivative<T: Scalar>(u: &GridFunction<T>, axis: usize) -> Result<GridFunction<T>> {
    let spec = *u.spec();
    if axis >= spec.dim() {
        return Err(Error::Axis { axis, dim: spec.dim() });
    }
    let n = spec.points_per_axis();
    let inv = 0.5 / spec.spacing();
    let vals = u.values();
    let out = (0..spec.len())
        .map(|flat| {
            let mut idx = spec.unflatten(flat);
            let i = idx[axis];
            idx[axis] = (i + 1) % n;
            let fwd = vals[spec.flatten(idx)];
            idx[axis] = (i + n - 1) % n;
            let bwd = vals[spec.flatten(idx)];
            (fwd - bwd) * inv
        })
        .collect();
    Ok(GridFunction::from_parts(spec, out))
}

/// Second-order central second difference along `axis`.
pub fn second_partial<T: Scalar>(u: &GridFunction<T>, axis: usize) -> Result<GridFunction<T>> {
    let spec = *u.spec();
    if axis >= spec.dim() {
        return Err(Error::Axis { axis, dim: spec.dim() });
    }
    let n = spec.points_per_axis();
    let inv = 1.0 / (spec.spacing() * spec.spacing());
    let vals = u.values();
    let out = (0..spec.len())
        .map(|flat| {
            let mut idx = spec.unflatten(flat);
            let i = idx[axis];
            let mid = vals[flat];
            idx[axis] = (i + 1) % n;
            let fwd = vals[spec.flatten(idx)];
            idx[axis] = (i + n - 1) % n;
            let bwd = vals[spec.flatten(idx)];
            (fwd + bwd - mid - mid) * inv
        })
        .collect();
    Ok(GridFunction::from_parts(spec, out))
}

/// `x -> u(x / factor)` for `factor = 2^k`, by rescaling the coordinates.
///
/// The sample count is unchanged; the spacing and box side are multiplied by
/// `factor`. Dyadic indicators map to dyadic indicators exactly and the
/// operation composes exactly (`factor 2` then `1/2` is the identity).
pub fn resample_dyadic<T: Scalar>(u: &GridFunction<T>, factor: f64) -> Result<GridFunction<T>> {
    let k = dyadic_exponent(factor).ok_or(Error::NotDyadic(factor))?;
    Ok(GridFunction::from_parts(u.spec().scaled(k), u.values().to_vec()))
}

/// Transfers `u` onto another dyadic grid of the same dimension.
///
/// Finer target cells replicate the source cell containing them; coarser target
/// cells take the average of the source cells they cover (nearest-cell average).
/// Space outside the source box counts as zero. Both grids have cell edges on
/// multiples of their spacing, so indicators of dyadic boxes transfer exactly.
pub fn regrid(u: &GridFunction<f64>, target: &GridSpec) -> Result<GridFunction<f64>> {
    let src = *u.spec();
    if src.dim() != target.dim() {
        return Err(Error::SpecMismatch);
    }
    let d = src.dim();
    let hs = src.spacing();
    let ht = target.spacing();
    let ns = src.points_per_axis() as i64;
    // Per-axis list of (source index, weight) for each target index.
    let axis_map: Vec<Vec<(usize, f64)>> = (0..target.points_per_axis())
        .map(|i| {
            let left = target.coordinate(i);
            if ht <= hs {
                let k = ((left - src.origin()) / hs).floor() as i64;
                if (0..ns).contains(&k) {
                    vec![(k as usize, 1.0)]
                } else {
                    Vec::new()
                }
            } else {
                let per = (ht / hs) as i64;
                let first = ((left - src.origin()) / hs).floor() as i64;
                let w = 1.0 / per as f64;
                (first..first + per).filter(|k| (0..ns).contains(k)).map(|k| (k as usize, w)).collect()
            }
        })
        .collect();
    let values = (0..target.len())
        .map(|flat| {
            let idx = target.unflatten(flat);
            match d {
                1 => axis_map[idx[0]].iter().map(|&(k, w)| w * u.values()[k]).sum(),
                _ => {
                    let mut acc = 0.0;
                    for &(k0, w0) in &axis_map[idx[0]] {
                        for &(k1, w1) in &axis_map[idx[1]] {
                            acc += w0 * w1 * u.values()[src.flatten([k0, k1])];
                        }
                    }
                    acc
                }
            }
        })
        .collect();
    Ok(GridFunction::from_parts(*target, values))
}
