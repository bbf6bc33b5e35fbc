//! Periodic convolution, Fourier multipliers, Riesz transforms and the
//! Poisson/heat extensions to the upper half-space.
//!
//! Transform convention: `f^(xi) = h^d sum_x f(x) e^{-2 pi i x.xi}` with `xi` on
//! the lattice `k / S`. Multiplier symbols below are stated in this convention:
//! Riesz `-i xi_j/|xi|`, Poisson `e^{-2 pi t |xi|}`, heat `e^{-4 pi^2 t |xi|^2}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fft::{signed_index, transform};
use crate::grid::{ComplexGridFunction, GridFunction, GridSpec, Ladder, Scalar};
use crate::kernels::{heat_kernel, poisson_kernel, riesz_kernel_truncated};

/// Relative size of the imaginary part tolerated when a result must be real.
pub const IMAGINARY_TOLERANCE: f64 = 1e-10;

/// Frequency-indexed multiplier table.
#[derive(Debug, Clone, PartialEq)]
pub struct Symbol {
    spec: GridSpec,
    values: Vec<Complex64>,
}

/// Signed lattice indices and the frequency `xi = k / S` of a flat DFT index.
pub fn frequency(spec: &GridSpec, flat: usize) -> ([i64; 2], [f64; 2]) {
    let n = spec.points_per_axis();
    let side = spec.side();
    let idx = spec.unflatten(flat);
    let k = [signed_index(idx[0], n), if spec.dim() == 2 { signed_index(idx[1], n) } else { 0 }];
    (k, [k[0] as f64 / side, k[1] as f64 / side])
}

fn modulus(xi: [f64; 2]) -> f64 {
    (xi[0] * xi[0] + xi[1] * xi[1]).sqrt()
}

impl Symbol {
    pub fn new(spec: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::SymbolSize { expected: spec.len(), got: values.len() });
        }
        Ok(Self { spec, values })
    }

    /// Tabulates `f(k, xi)` over the frequency lattice.
    pub fn from_fn(spec: &GridSpec, f: impl Fn([i64; 2], [f64; 2]) -> Complex64) -> Self {
        let values = (0..spec.len())
            .map(|flat| {
                let (k, xi) = frequency(spec, flat);
                f(k, xi)
            })
            .collect();
        Self { spec: *spec, values }
    }

    /// `-i xi_j / |xi|`, zero at `xi = 0` and on the Nyquist plane of axis `j`.
    pub fn riesz(spec: &GridSpec, j: usize) -> Result<Self> {
        if j >= spec.dim() {
            return Err(Error::Axis { axis: j, dim: spec.dim() });
        }
        let nyquist = -(spec.points_per_axis() as i64 / 2);
        Ok(Self::from_fn(spec, |k, xi| {
            let m = modulus(xi);
            if m == 0.0 || k[j] == nyquist {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, -xi[j] / m)
            }
        }))
    }

    /// `e^{-2 pi t |xi|}`.
    pub fn poisson(spec: &GridSpec, t: f64) -> Self {
        Self::from_fn(spec, |_, xi| Complex64::new((-2.0 * PI * t * modulus(xi)).exp(), 0.0))
    }

    /// `e^{-4 pi^2 t |xi|^2}`.
    pub fn heat(spec: &GridSpec, t: f64) -> Self {
        Self::from_fn(spec, |_, xi| {
            let m = modulus(xi);
            Complex64::new((-4.0 * PI * PI * t * m * m).exp(), 0.0)
        })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
}

/// Spectrum of a grid function, reusable across several convolutions.
#[derive(Debug, Clone)]
pub struct Spectrum {
    spec: GridSpec,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn of<T: Scalar>(u: &GridFunction<T>) -> Self {
        let mut coeffs: Vec<Complex64> = u.values().iter().map(|v| v.to_complex()).collect();
        transform(&mut coeffs, u.spec(), false);
        Self { spec: *u.spec(), coeffs }
    }

    /// Spectrum of a kernel sampled in centred coordinates, shifted so that the
    /// displacement `0` sits at index `0`.
    pub fn of_kernel(v: &GridFunction<f64>) -> Self {
        let spec = *v.spec();
        let n = spec.points_per_axis();
        let c = spec.center_index();
        let mut shifted = vec![Complex64::new(0.0, 0.0); spec.len()];
        for (flat, val) in v.values().iter().enumerate() {
            let idx = spec.unflatten(flat);
            let dst = match spec.dim() {
                1 => [(idx[0] + n - c) % n, 0],
                _ => [(idx[0] + n - c) % n, (idx[1] + n - c) % n],
            };
            shifted[spec.flatten(dst)] = Complex64::new(*val, 0.0);
        }
        transform(&mut shifted, &spec, false);
        Self { spec, coeffs: shifted }
    }

    fn invert(mut coeffs: Vec<Complex64>, spec: &GridSpec) -> ComplexGridFunction {
        transform(&mut coeffs, spec, true);
        GridFunction::from_parts(*spec, coeffs)
    }

    /// `u * v` where `self` is the spectrum of `u` and `kernel` that of `v`.
    pub fn convolve(&self, kernel: &Spectrum) -> Result<ComplexGridFunction> {
        if self.spec != kernel.spec {
            return Err(Error::SpecMismatch);
        }
        let w = self.spec.cell_volume();
        let coeffs = self.coeffs.iter().zip(&kernel.coeffs).map(|(a, b)| a * b * w).collect();
        Ok(Self::invert(coeffs, &self.spec))
    }

    pub fn multiply(&self, symbol: &Symbol) -> Result<ComplexGridFunction> {
        if symbol.spec.len() != self.spec.len() {
            return Err(Error::SymbolSize { expected: self.spec.len(), got: symbol.values.len() });
        }
        let coeffs = self.coeffs.iter().zip(&symbol.values).map(|(a, b)| a * b).collect();
        Ok(Self::invert(coeffs, &self.spec))
    }
}

/// Real part of `z`, after checking the imaginary part is numerically zero.
pub fn real_part(z: &ComplexGridFunction) -> Result<GridFunction<f64>> {
    let scale = z.values().iter().fold(0.0f64, |m, v| m.max(v.re.abs()));
    let residue = z.values().iter().fold(0.0f64, |m, v| m.max(v.im.abs()));
    if residue > IMAGINARY_TOLERANCE * scale.max(f64::MIN_POSITIVE) && residue > 1e-300 {
        return Err(Error::ImaginaryResidue(residue / scale.max(f64::MIN_POSITIVE)));
    }
    Ok(z.re())
}

/// Periodic convolution `h^d sum_y u(y) v(x - y)` of two real grid functions.
pub fn convolve(u: &GridFunction<f64>, v: &GridFunction<f64>) -> Result<GridFunction<f64>> {
    if u.spec() != v.spec() {
        return Err(Error::SpecMismatch);
    }
    Ok(Spectrum::of(u).convolve(&Spectrum::of_kernel(v))?.re())
}

/// Forward transform, pointwise multiplication by `symbol`, inverse transform.
pub fn apply_multiplier<T: Scalar>(u: &GridFunction<T>, symbol: &Symbol) -> Result<ComplexGridFunction> {
    if symbol.values.len() != u.spec().len() {
        return Err(Error::SymbolSize { expected: u.spec().len(), got: symbol.values.len() });
    }
    Spectrum::of(u).multiply(symbol)
}

/// `R_j u` via the multiplier `-i xi_j / |xi|`.
pub fn riesz_transform(u: &GridFunction<f64>, j: usize) -> Result<GridFunction<f64>> {
    let symbol = Symbol::riesz(u.spec(), j)?;
    real_part(&apply_multiplier(u, &symbol)?)
}

/// Direct truncated principal-value sum of `u` against the torus Riesz kernel.
///
/// Costs `O(N^2)`; meant as an independent check of [`riesz_transform`].
pub fn riesz_pv_oracle(u: &GridFunction<f64>, j: usize, eps: f64) -> Result<GridFunction<f64>> {
    let spec = *u.spec();
    let kernel = riesz_kernel_truncated(&spec, j, eps)?;
    let k = kernel.values.values();
    let vals = u.values();
    let n = spec.points_per_axis();
    let c = spec.center_index();
    let w = spec.cell_volume();
    let out: Vec<f64> = (0..spec.len())
        .into_par_iter()
        .map(|target| {
            let ti = spec.unflatten(target);
            let mut acc = 0.0;
            for (src, &uv) in vals.iter().enumerate() {
                if uv == 0.0 {
                    continue;
                }
                let si = spec.unflatten(src);
                let disp = match spec.dim() {
                    1 => [(ti[0] + n + c - si[0]) % n, 0],
                    _ => [(ti[0] + n + c - si[0]) % n, (ti[1] + n + c - si[1]) % n],
                };
                acc += uv * k[spec.flatten(disp)];
            }
            w * acc
        })
        .collect();
    Ok(GridFunction::from_parts(spec, out))
}

/// A function on the upper half-space sampled on `t`-slices.
#[derive(Debug, Clone, PartialEq)]
pub struct Slab {
    spec: GridSpec,
    slices: Vec<(f64, GridFunction<f64>)>,
}

impl Slab {
    pub const MIN_SLICES: usize = 3;

    pub fn new(slices: Vec<(f64, GridFunction<f64>)>) -> Result<Self> {
        if slices.len() < Self::MIN_SLICES {
            return Err(Error::TooFewSlices { needed: Self::MIN_SLICES, got: slices.len() });
        }
        let spec = *slices[0].1.spec();
        if slices.iter().any(|(_, u)| *u.spec() != spec) {
            return Err(Error::SpecMismatch);
        }
        if slices.iter().any(|(t, _)| !(t.is_finite() && *t > 0.0)) {
            return Err(Error::Scale(slices.iter().map(|s| s.0).find(|t| t.is_nan() || *t <= 0.0).unwrap_or(f64::NAN)));
        }
        if slices.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::SliceOrder);
        }
        Ok(Self { spec, slices })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.slices.iter().map(|s| s.0).collect()
    }

    pub fn slices(&self) -> &[(f64, GridFunction<f64>)] {
        &self.slices
    }

    pub fn slice(&self, i: usize) -> &GridFunction<f64> {
        &self.slices[i].1
    }

    pub fn map(&self, f: impl Fn(&GridFunction<f64>) -> Result<GridFunction<f64>>) -> Result<Slab> {
        Slab::new(self.slices.iter().map(|(t, u)| Ok((*t, f(u)?))).collect::<Result<Vec<_>>>()?)
    }
}

fn extend(
    f: &GridFunction<f64>,
    ladder: &Ladder,
    kernel: impl Fn(&GridSpec, f64) -> Result<crate::kernels::KernelSample> + Sync,
) -> Result<Slab> {
    let spectrum = Spectrum::of(f);
    let slices = ladder
        .members()
        .into_par_iter()
        .map(|t| {
            let k = kernel(f.spec(), t)?;
            Ok((t, spectrum.convolve(&Spectrum::of_kernel(&k.values))?.re()))
        })
        .collect::<Result<Vec<_>>>()?;
    Slab::new(slices)
}

/// `u(x, t) = (f * P_t)(x)` on every ladder member.
pub fn poisson_extend(f: &GridFunction<f64>, t_ladder: &Ladder) -> Result<Slab> {
    extend(f, t_ladder, poisson_kernel)
}

/// `u(x, t) = (f * W_t)(x)` on every ladder member.
pub fn heat_extend(f: &GridFunction<f64>, t_ladder: &Ladder) -> Result<Slab> {
    extend(f, t_ladder, heat_kernel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, sample};
    use crate::kernels::{closed_form, mollifier};

    fn indicator(lo: f64, hi: f64) -> impl Fn(&[f64]) -> f64 {
        move |x: &[f64]| if x[0] >= lo && x[0] < hi { 1.0 } else { 0.0 }
    }

    /// Direct O(N^2) periodic convolution.
    fn direct_convolution(u: &GridFunction<f64>, v: &GridFunction<f64>) -> GridFunction<f64> {
        let s = *u.spec();
        let n = s.points_per_axis();
        let c = s.center_index();
        let out = (0..n)
            .map(|j| s.spacing() * (0..n).map(|i| u.values()[i] * v.values()[(j + n + c - i) % n]).sum::<f64>())
            .collect();
        GridFunction::new(s, out).unwrap()
    }

    #[test]
    fn delta_is_identity() {
        let s = make_grid(1, 16, 32).unwrap();
        let u = sample(|x| (-x[0] * x[0]).exp() + 0.1 * x[0].sin(), &s).unwrap();
        let mut delta = vec![0.0; s.len()];
        delta[s.center_index()] = 1.0 / s.spacing();
        let delta = GridFunction::new(s, delta).unwrap();
        assert!(convolve(&u, &delta).unwrap().max_diff(&u).unwrap() < 1e-10);

        let s2 = make_grid(2, 4, 8).unwrap();
        let u2 = sample(|x| (-x[0] * x[0] - 2.0 * x[1] * x[1]).exp() + 0.3 * x[1], &s2).unwrap();
        let mut d2 = vec![0.0; s2.len()];
        let c = s2.center_index();
        d2[s2.flatten([c, c])] = 1.0 / s2.cell_volume();
        let d2 = GridFunction::new(s2, d2).unwrap();
        assert!(convolve(&u2, &d2).unwrap().max_diff(&u2).unwrap() < 1e-10);
    }

    #[test]
    fn box_convolution_is_hat() {
        let s = make_grid(1, 8, 32).unwrap();
        let chi = sample(indicator(0.0, 1.0), &s).unwrap();
        let conv = convolve(&chi, &chi).unwrap();
        let oracle = direct_convolution(&chi, &chi);
        assert!(conv.max_diff(&oracle).unwrap() < 1e-12);
        // discrete hat: 31 cells pair up at the apex, 17 at x = 1/2
        assert!((conv.at_point(&[1.0]).unwrap() - 31.0 / 32.0).abs() < 1e-12);
        assert!((conv.at_point(&[0.5]).unwrap() - 17.0 / 32.0).abs() < 1e-12);
    }

    #[test]
    fn convolution_commutes() {
        let s = make_grid(1, 16, 16).unwrap();
        let u = sample(|x| (-(x[0] - 1.0).powi(2)).exp(), &s).unwrap();
        let v = sample(|x| x[0].cos() * (-x[0].abs()).exp(), &s).unwrap();
        let a = convolve(&u, &v).unwrap();
        let b = convolve(&v, &u).unwrap();
        assert!(a.max_diff(&b).unwrap() < 1e-12);
        assert!(a.max_diff(&direct_convolution(&u, &v)).unwrap() < 1e-12);
        let other = make_grid(1, 16, 32).unwrap();
        assert_eq!(convolve(&u, &GridFunction::zeros(other)), Err(Error::SpecMismatch));
    }

    #[test]
    fn multiplier_cross_checks() {
        let s = make_grid(1, 64, 64).unwrap();
        let u = sample(|x| closed_form::heat(&[x[0] - 0.5], 0.5), &s).unwrap();
        let ones = Symbol::from_fn(&s, |_, _| Complex64::new(1.0, 0.0));
        assert!(real_part(&apply_multiplier(&u, &ones).unwrap()).unwrap().max_diff(&u).unwrap() < 1e-12);

        let p = real_part(&apply_multiplier(&u, &Symbol::poisson(&s, 1.0)).unwrap()).unwrap();
        let direct = convolve(&u, &poisson_kernel(&s, 1.0).unwrap().values).unwrap();
        assert!(p.max_diff(&direct).unwrap() < 1e-4);

        let w = real_part(&apply_multiplier(&u, &Symbol::heat(&s, 0.3)).unwrap()).unwrap();
        let direct = convolve(&u, &heat_kernel(&s, 0.3).unwrap().values).unwrap();
        assert!(w.max_diff(&direct).unwrap() < 1e-8);

        let bad = Symbol::new(s, vec![Complex64::new(1.0, 0.0); 3]);
        assert!(matches!(bad, Err(Error::SymbolSize { .. })));
    }

    #[test]
    fn riesz_on_cosine() {
        let s = make_grid(1, 16, 32).unwrap();
        let k = 2.0 * PI / 16.0;
        let u = sample(|x| (k * x[0]).cos(), &s).unwrap();
        let ru = riesz_transform(&u, 0).unwrap();
        let expected = sample(|x| (k * x[0]).sin(), &s).unwrap();
        assert!(ru.max_diff(&expected).unwrap() < 1e-10);
        // the PV oracle agrees up to its truncation error
        let oracle = riesz_pv_oracle(&u, 0, 4.0 * s.spacing()).unwrap();
        assert!(oracle.max_diff(&expected).unwrap() < 0.05);
    }

    #[test]
    fn riesz_of_poisson_kernel() {
        // large box keeps the image correction of the torus below 3e-4 on |x| <= 16
        let s = make_grid(1, 256, 16).unwrap();
        let p = poisson_kernel(&s, 1.0).unwrap();
        let h = riesz_transform(&p.values, 0).unwrap();
        let torus = sample(|x| closed_form::periodic_conjugate_poisson_1d(x[0], 1.0, 256.0), &s).unwrap();
        assert!(h.max_diff(&torus).unwrap() < 1e-12);
        for i in 0..s.len() {
            let x = s.coordinate(i);
            if x.abs() <= 16.0 {
                assert!((h.values()[i] - closed_form::conjugate_poisson(x, 1.0)).abs() < 1e-3);
            }
        }
    }

    #[test]
    fn riesz_zero_and_constant() {
        let s = make_grid(2, 4, 8).unwrap();
        let zero = GridFunction::<f64>::zeros(s);
        assert_eq!(riesz_transform(&zero, 1).unwrap().max_abs(), 0.0);
        assert_eq!(riesz_pv_oracle(&zero, 0, 0.25).unwrap().max_abs(), 0.0);
        let c = sample(|_| 2.0, &s).unwrap();
        assert!(riesz_transform(&c, 0).unwrap().max_abs() < 1e-14);
        assert!(matches!(riesz_transform(&c, 2), Err(Error::Axis { .. })));
    }

    #[test]
    fn pv_oracle_maps_even_to_odd() {
        let s = make_grid(1, 16, 16).unwrap();
        let u = sample(|x| closed_form::heat(&[x[0]], 0.7), &s).unwrap();
        let out = riesz_pv_oracle(&u, 0, 4.0 * s.spacing()).unwrap();
        let n = s.points_per_axis();
        let c = s.center_index();
        let sym = (0..n).map(|i| (out.values()[i] + out.values()[(2 * c + n - i) % n]).abs()).fold(0.0, f64::max);
        assert!(sym <= 1e-10);
        assert!(riesz_pv_oracle(&u, 0, s.spacing()).is_err());
    }

    #[test]
    fn poisson_extension_examples() {
        let s = make_grid(1, 64, 32).unwrap();
        let ladder = Ladder::dyadic(-2, 2).unwrap();
        let p1 = poisson_kernel(&s, 1.0).unwrap().values;
        let slab = poisson_extend(&p1, &ladder).unwrap();
        for (t, u) in slab.slices() {
            let expected = poisson_kernel(&s, 1.0 + t).unwrap().values;
            assert!(u.max_diff(&expected).unwrap() < 1e-4);
        }
        let c = sample(|_| 1.5, &s).unwrap();
        for (_, u) in poisson_extend(&c, &ladder).unwrap().slices() {
            assert!(u.values().iter().all(|v| (v - 1.5).abs() < 1e-6));
        }
        let z = poisson_extend(&GridFunction::zeros(s), &ladder).unwrap();
        assert!(z.slices().iter().all(|(_, u)| u.max_abs() == 0.0));
    }

    #[test]
    fn heat_extension_examples() {
        let s = make_grid(1, 32, 32).unwrap();
        let ladder = Ladder::dyadic(-4, 2).unwrap();
        let w = heat_kernel(&s, 0.5).unwrap().values;
        for (t, u) in heat_extend(&w, &ladder).unwrap().slices() {
            let expected = heat_kernel(&s, 0.5 + t).unwrap().values;
            assert!(u.max_diff(&expected).unwrap() < 1e-8);
        }
        let c = sample(|_| -0.5, &s).unwrap();
        for (_, u) in heat_extend(&c, &ladder).unwrap().slices() {
            assert!(u.values().iter().all(|v| (v + 0.5).abs() < 1e-12));
        }
    }

    #[test]
    fn heat_boundary_recovery_is_first_order() {
        let s = make_grid(1, 32, 64).unwrap();
        let f = sample(|x| (-x[0] * x[0]).exp(), &s).unwrap();
        let err = |t: f64| {
            let slab = heat_extend(&f, &Ladder::new(t, 2.0, 3).unwrap()).unwrap();
            slab.slice(0).sub(&f).unwrap().l2()
        };
        let order = (err(0.02) / err(0.01)).log2();
        assert!((0.9..=1.1).contains(&order), "order {order}");
    }

    #[test]
    fn mollified_riesz_commutes() {
        let s = make_grid(1, 32, 32).unwrap();
        let f = sample(|x| (-(x[0] - 1.0).powi(2)).exp() - 0.5 * (-(x[0] + 2.0).powi(2)).exp(), &s).unwrap();
        let phi = mollifier(&s, 0.5).unwrap().values;
        let a = riesz_transform(&convolve(&f, &phi).unwrap(), 0).unwrap();
        let b = convolve(&riesz_transform(&f, 0).unwrap(), &phi).unwrap();
        assert!(a.max_diff(&b).unwrap() < 1e-10);
    }

    #[test]
    fn slab_validation() {
        let s = make_grid(1, 4, 4).unwrap();
        let z = GridFunction::<f64>::zeros(s);
        assert!(matches!(Slab::new(vec![(1.0, z.clone()), (2.0, z.clone())]), Err(Error::TooFewSlices { .. })));
        let bad = vec![(1.0, z.clone()), (3.0, z.clone()), (2.0, z.clone())];
        assert_eq!(Slab::new(bad), Err(Error::SliceOrder));
        let other = GridFunction::<f64>::zeros(make_grid(1, 4, 8).unwrap());
        assert_eq!(Slab::new(vec![(1.0, z.clone()), (2.0, z.clone()), (3.0, other)]), Err(Error::SpecMismatch));
    }
}
