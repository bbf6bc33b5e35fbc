//! Convolution kernels on the torus: Poisson, heat, truncated Riesz and two
//! unit-mass mollifiers, each sampled at scale `t`.
//!
//! Samples are the periodizations `sum_k K(x + k S)` of the free-space closed
//! forms, so the torus kernels keep unit mass and satisfy their semigroup laws
//! exactly; the free-space mass left outside the box is reported as
//! `tail_mass`. The free-space formulas are exposed separately in
//! [`closed_form`].

use std::f64::consts::PI;

use num_complex::Complex64;
use statrs::function::{erf::erfc, gamma::gamma};

use crate::error::{Error, Result};
use crate::fft::{signed_index, transform};
use crate::grid::{GridFunction, GridSpec};

/// Free-space closed forms.
pub mod closed_form {
    use super::*;

    /// `Gamma((d+1)/2) / pi^{(d+1)/2}`.
    pub fn poisson_constant(d: usize) -> f64 {
        let a = (d as f64 + 1.0) / 2.0;
        gamma(a) / PI.powf(a)
    }

    fn norm_sq(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum()
    }

    /// `P_t(x) = c_d t / (t^2 + |x|^2)^{(d+1)/2}`.
    pub fn poisson(x: &[f64], t: f64) -> f64 {
        let d = x.len();
        poisson_constant(d) * t / (t * t + norm_sq(x)).powf((d as f64 + 1.0) / 2.0)
    }

    /// `W_t(x) = exp(-|x|^2 / 4t) / (4 pi t)^{d/2}`.
    pub fn heat(x: &[f64], t: f64) -> f64 {
        (-norm_sq(x) / (4.0 * t)).exp() / (4.0 * PI * t).powf(x.len() as f64 / 2.0)
    }

    /// `K_j(x) = c_d x_j / |x|^{d+1}` (zero at the origin).
    pub fn riesz(x: &[f64], j: usize) -> f64 {
        let r2 = norm_sq(x);
        if r2 == 0.0 {
            return 0.0;
        }
        let d = x.len();
        poisson_constant(d) * x[j] / r2.powf((d as f64 + 1.0) / 2.0)
    }

    /// Conjugate Poisson kernel in one dimension, `x / (pi (x^2 + t^2))`.
    pub fn conjugate_poisson(x: f64, t: f64) -> f64 {
        x / (PI * (x * x + t * t))
    }

    /// `(1 - e^-a)^2 + 4 e^-a sin^2 b`, i.e. `2 e^-a (cosh a - cos 2b)`.
    fn periodic_denominator(a: f64, b: f64) -> f64 {
        (-a).exp_m1().powi(2) + 4.0 * (-a).exp() * b.sin().powi(2)
    }

    /// One-dimensional torus Poisson kernel on a circle of length `side`,
    /// `sinh a / (S (cosh a - cos 2b))` with `a = 2 pi t / S`, `b = pi x / S`.
    pub fn periodic_poisson_1d(x: f64, t: f64, side: f64) -> f64 {
        let a = 2.0 * PI * t / side;
        let b = PI * x / side;
        -(-2.0 * a).exp_m1() / (side * periodic_denominator(a, b))
    }

    /// One-dimensional torus conjugate Poisson kernel, `sin 2b / (S (cosh a - cos 2b))`.
    pub fn periodic_conjugate_poisson_1d(x: f64, t: f64, side: f64) -> f64 {
        let a = 2.0 * PI * t / side;
        let b = PI * x / side;
        2.0 * (-a).exp() * (2.0 * b).sin() / (side * periodic_denominator(a, b))
    }

    /// One-dimensional torus Hilbert kernel `cot(pi x / S) / S`.
    pub fn periodic_hilbert_1d(x: f64, side: f64) -> f64 {
        if x == 0.0 {
            return 0.0;
        }
        let b = PI * x / side;
        b.cos() / (b.sin() * side)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MollifierShape {
    /// `exp(-pi |x|^2)`.
    Gaussian,
    /// `cos^2(pi |x| / 2)` on the unit ball.
    CosineBump,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelKind {
    Poisson,
    Heat,
    Riesz { axis: usize, eps: f64 },
    Mollifier(MollifierShape),
}

/// Conditions under which a sampled kernel falls outside its accuracy range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelNote {
    /// Scale is below two grid spacings.
    UnderResolved,
    /// Free-space mass outside the box exceeds the kernel's budget.
    HeavyTail(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelSample {
    pub kind: KernelKind,
    pub t: f64,
    pub values: GridFunction<f64>,
    /// Free-space mass outside the box (zero for the Riesz kernel).
    pub tail_mass: f64,
    pub notes: Vec<KernelNote>,
}

impl KernelSample {
    /// `h^d sum K`.
    pub fn mass(&self) -> f64 {
        self.values.spec().cell_volume() * self.values.values().iter().sum::<f64>()
    }
}

fn check_scale(t: f64) -> Result<()> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::Scale(t));
    }
    Ok(())
}

/// Coordinates of the grid points along one axis (already centred at zero).
fn axis_coords(spec: &GridSpec) -> Vec<f64> {
    (0..spec.points_per_axis()).map(|i| spec.coordinate(i)).collect()
}

/// Periodizes a one-dimensional even profile over `images` copies on each side.
fn periodize_1d(spec: &GridSpec, images: i64, profile: impl Fn(f64) -> f64) -> Vec<f64> {
    let side = spec.side();
    axis_coords(spec)
        .into_iter()
        .map(|x| (-images..=images).map(|k| profile(x + k as f64 * side)).sum())
        .collect()
}

/// Tensor product of a one-dimensional axis profile.
fn tensor(spec: &GridSpec, axis: &[f64]) -> Vec<f64> {
    match spec.dim() {
        1 => axis.to_vec(),
        _ => {
            let mut out = Vec::with_capacity(spec.len());
            for a in axis {
                for b in axis {
                    out.push(a * b);
                }
            }
            out
        }
    }
}

/// Images needed so a Gaussian `exp(-x^2 / (2 sigma^2))` drops below `e^-46`.
fn gaussian_images(sigma: f64, side: f64) -> i64 {
    (((92.0f64).sqrt() * sigma + 0.5 * side) / side).ceil() as i64
}

/// Scale (in grid spacings) from which the two-dimensional Poisson kernel is
/// synthesized from its symbol; the folded frequencies weigh `e^{-pi t m}`.
const SPECTRAL_POISSON_SCALE: f64 = 8.0;

/// `S^-2 sum_k e^{-2 pi t |k| / S} e^{2 pi i k.x / S}` over the grid frequencies.
fn spectral_poisson_2d(spec: &GridSpec, t: f64) -> Vec<f64> {
    let n = spec.points_per_axis();
    let side = spec.side();
    let mut coeffs: Vec<Complex64> = (0..spec.len())
        .map(|flat| {
            let [i, j] = spec.unflatten(flat);
            let (k0, k1) = (signed_index(i, n), signed_index(j, n));
            let xi = ((k0 * k0 + k1 * k1) as f64).sqrt() / side;
            // grid points start at -S/2, which turns into the sign (-1)^(k0 + k1)
            let sign = if (k0 + k1) % 2 == 0 { 1.0 } else { -1.0 };
            Complex64::new(sign * (-2.0 * PI * t * xi).exp(), 0.0)
        })
        .collect();
    transform(&mut coeffs, spec, true);
    let scale = spec.len() as f64 / (side * side);
    coeffs.iter().map(|z| z.re * scale).collect()
}

/// Square image sum of the free kernel; far images are nearly constant across
/// the box, so their mass is restored uniformly.
fn image_poisson_2d(spec: &GridSpec, t: f64, images: i64) -> Vec<f64> {
    let side = spec.side();
    let c = closed_form::poisson_constant(2);
    let coords = axis_coords(spec);
    let mut vals = Vec::with_capacity(spec.len());
    for &x0 in &coords {
        for &x1 in &coords {
            let mut acc = 0.0;
            for k0 in -images..=images {
                let y0 = x0 + k0 as f64 * side;
                for k1 in -images..=images {
                    let y1 = x1 + k1 as f64 * side;
                    let s = t * t + y0 * y0 + y1 * y1;
                    acc += c * t / (s * s.sqrt());
                }
            }
            vals.push(acc);
        }
    }
    let mass = spec.cell_volume() * vals.iter().sum::<f64>();
    let shift = (1.0 - mass) / (side * side);
    vals.iter_mut().for_each(|v| *v += shift);
    vals
}

/// Torus Poisson kernel `P_t`.
pub fn poisson_kernel(spec: &GridSpec, t: f64) -> Result<KernelSample> {
    check_scale(t)?;
    let side = spec.side();
    let half = 0.5 * side;
    let values = match spec.dim() {
        1 => axis_coords(spec).into_iter().map(|x| closed_form::periodic_poisson_1d(x, t, side)).collect(),
        _ if t >= SPECTRAL_POISSON_SCALE * spec.spacing() => spectral_poisson_2d(spec, t),
        _ => image_poisson_2d(spec, t, ((2.0 * t / side).ceil() as i64).max(6)),
    };
    let tail_mass = match spec.dim() {
        1 => 1.0 - 2.0 / PI * (half / t).atan(),
        _ => t / (t * t + half * half).sqrt(),
    };
    let mut notes = Vec::new();
    if t < 2.0 * spec.spacing() {
        notes.push(KernelNote::UnderResolved);
    }
    if tail_mass > 1e-4 {
        notes.push(KernelNote::HeavyTail(tail_mass));
    }
    Ok(KernelSample {
        kind: KernelKind::Poisson,
        t,
        values: GridFunction::new(*spec, values)?,
        tail_mass,
        notes,
    })
}

/// Torus heat kernel `W_t`.
pub fn heat_kernel(spec: &GridSpec, t: f64) -> Result<KernelSample> {
    check_scale(t)?;
    let side = spec.side();
    let sigma = (2.0 * t).sqrt();
    let norm = 1.0 / (4.0 * PI * t).sqrt();
    let axis = periodize_1d(spec, gaussian_images(sigma, side), |x| norm * (-(x * x) / (4.0 * t)).exp());
    let one_axis_tail = erfc(0.5 * side / (2.0 * t.sqrt()));
    let tail_mass = 1.0 - (1.0 - one_axis_tail).powi(spec.dim() as i32);
    let mut notes = Vec::new();
    if t.sqrt() < 2.0 * spec.spacing() {
        notes.push(KernelNote::UnderResolved);
    }
    if t.sqrt() > side / 8.0 {
        notes.push(KernelNote::HeavyTail(tail_mass));
    }
    Ok(KernelSample {
        kind: KernelKind::Heat,
        t,
        values: GridFunction::new(*spec, tensor(spec, &axis))?,
        tail_mass,
        notes,
    })
}

/// Torus Riesz kernel `K_j`, zeroed on the ball `|x| <= eps`.
///
/// In one dimension this is the exact periodization `cot(pi x / S) / S`. In two
/// dimensions the image sum converges only conditionally; the square-shell
/// partial sum is corrected by the linear term that makes it vanish on the
/// half-period plane, where the periodic odd kernel must vanish.
pub fn riesz_kernel_truncated(spec: &GridSpec, j: usize, eps: f64) -> Result<KernelSample> {
    let d = spec.dim();
    if j >= d {
        return Err(Error::Axis { axis: j, dim: d });
    }
    let min = 2.0 * spec.spacing();
    if eps.is_nan() || eps < min {
        return Err(Error::Truncation { eps, min });
    }
    let side = spec.side();
    let values = match d {
        1 => axis_coords(spec)
            .into_iter()
            .map(|x| if x.abs() <= eps { 0.0 } else { closed_form::periodic_hilbert_1d(x, side) })
            .collect(),
        _ => {
            const IMAGES: i64 = 10;
            let c = closed_form::poisson_constant(2);
            let shell_sum = |x0: f64, x1: f64| {
                let mut acc = 0.0;
                for k0 in -IMAGES..=IMAGES {
                    let y0 = x0 + k0 as f64 * side;
                    for k1 in -IMAGES..=IMAGES {
                        let y1 = x1 + k1 as f64 * side;
                        let r2 = y0 * y0 + y1 * y1;
                        if r2 > 0.0 {
                            let yj = if j == 0 { y0 } else { y1 };
                            acc += c * yj / (r2 * r2.sqrt());
                        }
                    }
                }
                acc
            };
            let half = 0.5 * side;
            let slope = if j == 0 { shell_sum(half, 0.0) } else { shell_sum(0.0, half) } / half;
            let coords = axis_coords(spec);
            let mut vals = Vec::with_capacity(spec.len());
            for &x0 in &coords {
                for &x1 in &coords {
                    let xj = if j == 0 { x0 } else { x1 };
                    if x0 * x0 + x1 * x1 <= eps * eps || xj == -half {
                        vals.push(0.0);
                    } else {
                        vals.push(shell_sum(x0, x1) - slope * xj);
                    }
                }
            }
            vals
        }
    };
    Ok(KernelSample {
        kind: KernelKind::Riesz { axis: j, eps },
        t: eps,
        values: GridFunction::new(*spec, values)?,
        tail_mass: 0.0,
        notes: Vec::new(),
    })
}

/// Unit-mass Gaussian mollifier `phi_t`.
pub fn mollifier(spec: &GridSpec, t: f64) -> Result<KernelSample> {
    mollifier_with(spec, t, MollifierShape::Gaussian)
}

/// Unit-mass mollifier of the given shape at scale `t`, renormalized on the grid.
pub fn mollifier_with(spec: &GridSpec, t: f64, shape: MollifierShape) -> Result<KernelSample> {
    check_scale(t)?;
    let side = spec.side();
    let (raw, tail_mass) = match shape {
        MollifierShape::Gaussian => {
            let sigma = t / (2.0 * PI).sqrt();
            let axis = periodize_1d(spec, gaussian_images(sigma, side), |x| {
                let y = x / t;
                (-PI * y * y).exp()
            });
            let one_axis_tail = erfc(PI.sqrt() * 0.5 * side / t);
            (tensor(spec, &axis), 1.0 - (1.0 - one_axis_tail).powi(spec.dim() as i32))
        }
        MollifierShape::CosineBump => {
            let images = (t / side + 0.5).ceil() as i64;
            let coords = axis_coords(spec);
            let bump = |r2: f64| {
                let r = r2.sqrt() / t;
                if r < 1.0 {
                    (0.5 * PI * r).cos().powi(2)
                } else {
                    0.0
                }
            };
            let vals: Vec<f64> = match spec.dim() {
                1 => coords
                    .iter()
                    .map(|&x| (-images..=images).map(|k| bump((x + k as f64 * side).powi(2))).sum())
                    .collect(),
                _ => {
                    let mut v = Vec::with_capacity(spec.len());
                    for &x0 in &coords {
                        for &x1 in &coords {
                            let mut acc = 0.0;
                            for k0 in -images..=images {
                                let y0 = x0 + k0 as f64 * side;
                                for k1 in -images..=images {
                                    let y1 = x1 + k1 as f64 * side;
                                    acc += bump(y0 * y0 + y1 * y1);
                                }
                            }
                            v.push(acc);
                        }
                    }
                    v
                }
            };
            (vals, if t > 0.5 * side { 1.0 } else { 0.0 })
        }
    };
    let mass = spec.cell_volume() * raw.iter().sum::<f64>();
    let values = raw.into_iter().map(|v| v / mass).collect();
    let mut notes = Vec::new();
    if t < 2.0 * spec.spacing() {
        notes.push(KernelNote::UnderResolved);
    }
    Ok(KernelSample {
        kind: KernelKind::Mollifier(shape),
        t,
        values: GridFunction::new(*spec, values)?,
        tail_mass,
        notes,
    })
}
