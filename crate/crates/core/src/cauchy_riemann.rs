//! Harmonic and temperature Cauchy-Riemann systems, their residuals, the
//! half-order time derivative and the caloric norm.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{partial_derivative, second_partial, ComplexGridFunction, GridFunction, GridSpec, Ladder};
use crate::hardy_fofana::Ladders;
use crate::kernels::{heat_kernel, poisson_kernel};
use crate::norms::{amalgam_norm, dilate, Exponents, NormReport};
use crate::transforms::{frequency, riesz_transform, Slab, Spectrum};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemKind {
    Harmonic,
    Temperature,
}

/// Vector field `F = (u_1, .., u_d, u_{d+1})` on `t`-slices.
#[derive(Debug, Clone, PartialEq)]
pub struct CRSystem {
    spec: GridSpec,
    kind: SystemKind,
    slices: Vec<(f64, Vec<GridFunction<f64>>)>,
}

impl CRSystem {
    pub fn new(kind: SystemKind, slices: Vec<(f64, Vec<GridFunction<f64>>)>) -> Result<Self> {
        if slices.len() < Slab::MIN_SLICES {
            return Err(Error::TooFewSlices { needed: Slab::MIN_SLICES, got: slices.len() });
        }
        let spec = *slices[0].1.first().ok_or(Error::Components { expected: 2, got: 0 })?.spec();
        let expected = spec.dim() + 1;
        for (t, comps) in &slices {
            if comps.len() != expected {
                return Err(Error::Components { expected, got: comps.len() });
            }
            if comps.iter().any(|u| *u.spec() != spec) {
                return Err(Error::SpecMismatch);
            }
            if !(t.is_finite() && *t > 0.0) {
                return Err(Error::Scale(*t));
            }
        }
        if slices.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::SliceOrder);
        }
        Ok(Self { spec, kind, slices })
    }

    /// Assembles a system from one slab per component (last one `u_{d+1}`).
    pub fn from_slabs(kind: SystemKind, slabs: &[Slab]) -> Result<Self> {
        let first = slabs.first().ok_or(Error::Empty("component slabs"))?;
        if slabs.iter().any(|s| s.times() != first.times()) {
            return Err(Error::SliceOrder);
        }
        let slices = (0..first.len())
            .map(|i| (first.times()[i], slabs.iter().map(|s| s.slice(i).clone()).collect()))
            .collect();
        Self::new(kind, slices)
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn kind(&self) -> SystemKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }

    pub fn components(&self) -> usize {
        self.spec.dim() + 1
    }

    pub fn times(&self) -> Vec<f64> {
        self.slices.iter().map(|s| s.0).collect()
    }

    pub fn slices(&self) -> &[(f64, Vec<GridFunction<f64>>)] {
        &self.slices
    }

    /// Component `j` (0-based; `d` is the last one) on slice `i`.
    pub fn component(&self, i: usize, j: usize) -> &GridFunction<f64> {
        &self.slices[i].1[j]
    }

    pub fn component_slab(&self, j: usize) -> Result<Slab> {
        if j > self.spec.dim() {
            return Err(Error::Components { expected: self.components(), got: j + 1 });
        }
        Slab::new(self.slices.iter().map(|(t, c)| (*t, c[j].clone())).collect())
    }

    fn map_components(&self, f: impl Fn(usize, &GridFunction<f64>) -> Result<GridFunction<f64>>) -> Result<Self> {
        let slices = self
            .slices
            .iter()
            .map(|(t, c)| Ok((*t, c.iter().enumerate().map(|(j, u)| f(j, u)).collect::<Result<Vec<_>>>()?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.kind, slices)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map_components(|_, u| Ok(u.scale(c))).expect("same layout")
    }

    /// Same system with component `j` negated.
    pub fn with_component_negated(&self, j: usize) -> Self {
        self.map_components(|k, u| Ok(if k == j { u.scale(-1.0) } else { u.clone() })).expect("same layout")
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.kind != other.kind {
            return Err(Error::SystemKind { expected: self.kind, got: other.kind });
        }
        if self.times() != other.times() {
            return Err(Error::SliceOrder);
        }
        let slices = self
            .slices
            .iter()
            .zip(&other.slices)
            .map(|((t, a), (_, b))| Ok((*t, a.iter().zip(b).map(|(u, v)| u.add(v)).collect::<Result<Vec<_>>>()?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.kind, slices)
    }

    /// `St^alpha_rho F(., t / rho)` for harmonic systems; temperature systems
    /// use the parabolic relabelling `t -> rho^2 t`.
    pub fn dilated(&self, alpha: f64, rho: f64) -> Result<Self> {
        let factor = match self.kind {
            SystemKind::Harmonic => rho,
            SystemKind::Temperature => rho * rho,
        };
        let slices = self
            .slices
            .iter()
            .map(|(t, c)| Ok((t * factor, c.iter().map(|u| dilate(u, alpha, rho)).collect::<Result<Vec<_>>>()?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.kind, slices)
    }

    /// Euclidean magnitude `|F(., t_i)|` over the components.
    pub fn magnitude(&self, i: usize) -> GridFunction<f64> {
        let comps = &self.slices[i].1;
        let values = (0..self.spec.len())
            .map(|k| comps.iter().map(|u| u.values()[k].powi(2)).sum::<f64>().sqrt())
            .collect();
        GridFunction::new(self.spec, values).expect("finite components")
    }
}

fn build_system(
    kind: SystemKind,
    f: &GridFunction<f64>,
    t_ladder: &Ladder,
    kernel: impl Fn(&GridSpec, f64) -> Result<crate::kernels::KernelSample> + Sync,
) -> Result<CRSystem> {
    let spec = *f.spec();
    let mut parts = Vec::with_capacity(spec.dim() + 1);
    for j in 0..spec.dim() {
        parts.push(Spectrum::of(&riesz_transform(f, j)?));
    }
    parts.push(Spectrum::of(f));
    let slices = t_ladder
        .members()
        .into_par_iter()
        .map(|t| {
            let k = Spectrum::of_kernel(&kernel(&spec, t)?.values);
            Ok((t, parts.iter().map(|g| Ok(g.convolve(&k)?.re())).collect::<Result<Vec<_>>>()?))
        })
        .collect::<Result<Vec<_>>>()?;
    CRSystem::new(kind, slices)
}

/// `u_j = R_j f * P_t`, `u_{d+1} = f * P_t`.
pub fn harmonic_system(f: &GridFunction<f64>, t_ladder: &Ladder) -> Result<CRSystem> {
    build_system(SystemKind::Harmonic, f, t_ladder, poisson_kernel)
}

/// `L(f) = (R_1 f * W_t, .., R_d f * W_t, f * W_t)`.
pub fn caloric_map(f: &GridFunction<f64>, t_ladder: &Ladder) -> Result<CRSystem> {
    build_system(SystemKind::Temperature, f, t_ladder, heat_kernel)
}

/// Largest deviation of `u_j(., t)` from `R_j(u_{d+1}(., t))` over all slices.
pub fn slice_identity_defect(system: &CRSystem) -> Result<f64> {
    let d = system.spec.dim();
    let mut worst = 0.0f64;
    for i in 0..system.len() {
        let last = system.component(i, d);
        for j in 0..d {
            worst = worst.max(system.component(i, j).max_diff(&riesz_transform(last, j)?)?);
        }
    }
    Ok(worst)
}

/// Relative L2 residual of one condition.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionResidual {
    pub name: String,
    /// `||lhs - rhs|| / scale`, zero when both sides vanish.
    pub residual: f64,
    /// Normalizing L2 magnitude.
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub conditions: Vec<ConditionResidual>,
    /// First and last slice index entering the statistics.
    pub slice_range: (usize, usize),
    pub t_range: (f64, f64),
    pub tolerance: f64,
}

impl ResidualReport {
    pub fn max(&self) -> f64 {
        self.conditions.iter().map(|c| c.residual).fold(0.0, f64::max)
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.conditions.iter().find(|c| c.name == name).map(|c| c.residual)
    }

    pub fn passes(&self) -> bool {
        self.max() <= self.tolerance
    }
}

pub const HARMONIC_TOLERANCE: f64 = 1e-2;
pub const TEMPERATURE_TOLERANCE: f64 = 3e-2;
pub const HEAT_TOLERANCE: f64 = 1e-2;

/// Squared L2 norm on the grid.
fn l2_sq<T: crate::grid::Scalar>(u: &GridFunction<T>) -> f64 {
    u.spec().cell_volume() * u.values().iter().map(|v| v.modulus().powi(2)).sum::<f64>()
}

/// Accumulates `||lhs - rhs||^2` and the chosen normalization over slices.
#[derive(Default)]
struct Accumulator {
    diff: f64,
    scale: f64,
}

impl Accumulator {
    fn finish(&self, name: impl Into<String>) -> ConditionResidual {
        let scale = self.scale.sqrt();
        let diff = self.diff.sqrt();
        let residual = if diff == 0.0 { 0.0 } else { diff / scale };
        ConditionResidual { name: name.into(), residual, scale }
    }
}

/// Three-point derivative at the middle of a nonuniform stencil, written in
/// differences so that constants differentiate to exactly zero.
fn t_derivative(t: [f64; 3], u: [&GridFunction<f64>; 3]) -> Result<GridFunction<f64>> {
    let (hm, hp) = (t[1] - t[0], t[2] - t[1]);
    let denom = hm * hp * (hm + hp);
    let fwd = u[2].sub(u[1])?;
    let bwd = u[1].sub(u[0])?;
    fwd.zip_with(&bwd, |a, b| (hm * hm * a + hp * hp * b) / denom)
}

fn t_second_derivative(t: [f64; 3], u: [&GridFunction<f64>; 3]) -> Result<GridFunction<f64>> {
    let (hm, hp) = (t[1] - t[0], t[2] - t[1]);
    let fwd = u[2].sub(u[1])?;
    let bwd = u[1].sub(u[0])?;
    fwd.zip_with(&bwd, |a, b| 2.0 * (a / hp - b / hm) / (hm + hp))
}

fn stencil(times: &[f64], i: usize) -> [f64; 3] {
    [times[i - 1], times[i], times[i + 1]]
}

fn interior(len: usize) -> std::ops::Range<usize> {
    1..len - 1
}

/// Residuals of `d_k u_j = d_j u_k` (all pairs, `x_{d+1} = t`) and
/// `sum_j d_j u_j = 0`, relative to the L2 norm of the full gradient.
pub fn harmonic_cr_residual(system: &CRSystem) -> Result<ResidualReport> {
    if system.kind != SystemKind::Harmonic {
        return Err(Error::SystemKind { expected: SystemKind::Harmonic, got: system.kind });
    }
    let d = system.spec.dim();
    let n = d + 1;
    let times = system.times();
    let range = interior(system.len());
    // per slice: gradient[j][k] = d_k u_j
    let grads = range
        .clone()
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut row = Vec::with_capacity(n);
                    for k in 0..d {
                        row.push(partial_derivative(system.component(i, j), k)?);
                    }
                    let s = system.slices();
                    row.push(t_derivative(stencil(&times, i), [&s[i - 1].1[j], &s[i].1[j], &s[i + 1].1[j]])?);
                    Ok(row)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let grad_sq: f64 = grads.iter().flat_map(|g| g.iter().flatten()).map(l2_sq).sum();
    let mut conditions = Vec::new();
    for j in 0..n {
        for k in j + 1..n {
            let mut acc = Accumulator { diff: 0.0, scale: grad_sq };
            for g in &grads {
                acc.diff += l2_sq(&g[j][k].sub(&g[k][j])?);
            }
            conditions.push(acc.finish(format!("curl_{}_{}", j + 1, k + 1)));
        }
    }
    let mut acc = Accumulator { diff: 0.0, scale: grad_sq };
    for g in &grads {
        let mut div = g[0][0].clone();
        for (j, row) in g.iter().enumerate().skip(1) {
            div = div.add(&row[j])?;
        }
        acc.diff += l2_sq(&div);
    }
    conditions.push(acc.finish("divergence"));
    Ok(report(conditions, range, &times, HARMONIC_TOLERANCE))
}

fn report(conditions: Vec<ConditionResidual>, range: std::ops::Range<usize>, times: &[f64], tol: f64) -> ResidualReport {
    let (a, b) = (range.start, range.end - 1);
    ResidualReport { conditions, slice_range: (a, b), t_range: (times[a], times[b]), tolerance: tol }
}

/// `du/dt = sum_j d_j^2 u` on interior slices.
pub fn heat_residual(u: &Slab) -> Result<ResidualReport> {
    pde_residual(u, "heat", HEAT_TOLERANCE, |t, s, i| {
        let lhs = t_derivative(stencil(t, i), [s.slice(i - 1), s.slice(i), s.slice(i + 1)])?;
        Ok((lhs, laplacian(s.slice(i))?))
    })
}

/// `d_t^2 u + sum_j d_j^2 u = 0` on interior slices, for Poisson extensions.
pub fn laplacian_residual(u: &Slab) -> Result<ResidualReport> {
    pde_residual(u, "laplace", HARMONIC_TOLERANCE, |t, s, i| {
        let utt = t_second_derivative(stencil(t, i), [s.slice(i - 1), s.slice(i), s.slice(i + 1)])?;
        Ok((utt, laplacian(s.slice(i))?.scale(-1.0)))
    })
}

fn laplacian(u: &GridFunction<f64>) -> Result<GridFunction<f64>> {
    let mut acc = second_partial(u, 0)?;
    for k in 1..u.spec().dim() {
        acc = acc.add(&second_partial(u, k)?)?;
    }
    Ok(acc)
}

/// Residual of `lhs = rhs`, relative to the larger side, over interior slices.
fn pde_residual(
    u: &Slab,
    name: &str,
    tol: f64,
    sides: impl Fn(&[f64], &Slab, usize) -> Result<(GridFunction<f64>, GridFunction<f64>)> + Sync,
) -> Result<ResidualReport> {
    let times = u.times();
    let range = interior(u.len());
    let parts = range
        .clone()
        .into_par_iter()
        .map(|i| {
            let (lhs, rhs) = sides(&times, u, i)?;
            Ok((l2_sq(&lhs.sub(&rhs)?), l2_sq(&lhs), l2_sq(&rhs)))
        })
        .collect::<Result<Vec<_>>>()?;
    let diff = parts.iter().map(|p| p.0).sum();
    let scale = parts.iter().map(|p| p.1).sum::<f64>().max(parts.iter().map(|p| p.2).sum());
    let acc = Accumulator { diff, scale };
    Ok(report(vec![acc.finish(name)], range, &times, tol))
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

const QUADRATURE_NODES: usize = 16;
/// Size of `|g'|`, relative to its largest sampled value, below which the
/// tail of the integral is dropped.
pub const TAIL_THRESHOLD: f64 = 1e-10;

/// `(i / sqrt(pi)) int_t^inf g'(s) / sqrt(s - t) ds` for an explicit `g'`.
///
/// After `s = t + v^2` the integrand is `2 g'(t + v^2)`; the range is cut
/// where `|g'|` stays below [`TAIL_THRESHOLD`] times its largest sampled
/// value, and panels are doubled until
/// two successive composite Gauss-Legendre sums agree.
pub fn half_time_derivative(g_prime: impl Fn(f64) -> f64, t: f64) -> Result<Complex64> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Scale(t));
    }
    let f = |v: f64| 2.0 * g_prime(t + v * v);
    let mut v_max = 1.0;
    let mut scale = (0..8).map(|k| f(k as f64 / 8.0).abs()).fold(0.0, f64::max);
    loop {
        let probes: Vec<f64> = (0..8).map(|k| f(v_max * (1.0 + k as f64 / 8.0)).abs()).collect();
        scale = probes.iter().copied().fold(scale, f64::max);
        if probes.iter().all(|&p| p <= 2.0 * TAIL_THRESHOLD * scale) {
            break;
        }
        v_max *= 2.0;
        if v_max > 1e12 {
            return Err(Error::QuadratureTail(format!("g' does not decay beyond t = {t}")));
        }
    }
    let rule = gauss_legendre(QUADRATURE_NODES);
    let composite = |panels: usize| {
        let w = v_max / panels as f64;
        (0..panels)
            .map(|p| {
                let mid = (p as f64 + 0.5) * w;
                rule.iter().map(|(x, wt)| wt * f(mid + 0.5 * w * x)).sum::<f64>() * 0.5 * w
            })
            .sum::<f64>()
    };
    let mut panels = 4;
    let mut prev = composite(panels);
    loop {
        panels *= 2;
        let next = composite(panels);
        if (next - prev).abs() <= 1e-13 * next.abs().max(1e-300) || panels >= 1 << 16 {
            return Ok(Complex64::new(0.0, next / PI.sqrt()));
        }
        prev = next;
    }
}

/// Linear functional `g |-> d_t^{1/2} g(t_i)` on ladder samples.
///
/// `g` is interpolated by a not-a-knot cubic spline in `ln t`; `g'` comes from
/// the spline and the integral is cut at the last sample, so slabs must reach
/// far enough for `g'` to have decayed there.
#[derive(Debug, Clone, PartialEq)]
pub struct SplineHalfDerivative {
    times: Vec<f64>,
    /// `weights[i][k]`: coefficient of sample `k` in the real factor at `t_i`.
    weights: Vec<Vec<f64>>,
}

impl SplineHalfDerivative {
    pub const MIN_SAMPLES: usize = 5;

    pub fn new(times: &[f64]) -> Result<Self> {
        let n = times.len();
        if n < Self::MIN_SAMPLES {
            return Err(Error::TooFewSlices { needed: Self::MIN_SAMPLES, got: n });
        }
        if times.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(Error::SliceOrder);
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::SliceOrder);
        }
        let s: Vec<f64> = times.iter().map(|t| t.ln()).collect();
        let moments = spline_moments(&s);
        let rule = gauss_legendre(QUADRATURE_NODES);
        let weights = (0..n)
            .map(|i| {
                let mut w = vec![0.0; n];
                for k in i..n - 1 {
                    // s in [s_k, s_{k+1}] <=> v in [sqrt(t_k - t_i), sqrt(t_{k+1} - t_i)]
                    let (va, vb) = ((times[k] - times[i]).sqrt(), (times[k + 1] - times[i]).sqrt());
                    let half = 0.5 * (vb - va);
                    for (x, wt) in &rule {
                        let v = va + half * (1.0 + x);
                        let tt = times[i] + v * v;
                        let coef = spline_derivative_row(&s, &moments, k, tt.ln());
                        for m in 0..n {
                            w[m] += 2.0 * wt * half * coef[m] / tt;
                        }
                    }
                }
                w.iter_mut().for_each(|v| *v /= PI.sqrt());
                w
            })
            .collect();
        Ok(Self { times: times.to_vec(), weights })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// `d_t^{1/2} g(t_i)` from the samples `g(t_k)`.
    pub fn apply(&self, samples: &[f64], i: usize) -> Complex64 {
        let re: f64 = self.weights[i].iter().zip(samples).map(|(w, g)| w * g).sum();
        Complex64::new(0.0, re)
    }

    /// Applies the functional pointwise to a slab.
    pub fn apply_slab(&self, u: &Slab, i: usize) -> Result<ComplexGridFunction> {
        if u.times() != self.times {
            return Err(Error::SliceOrder);
        }
        let w = &self.weights[i];
        let spec = *u.spec();
        let mut acc = vec![0.0; spec.len()];
        for (k, (_, g)) in u.slices().iter().enumerate() {
            if w[k] != 0.0 {
                for (a, v) in acc.iter_mut().zip(g.values()) {
                    *a += w[k] * v;
                }
            }
        }
        GridFunction::new(spec, acc.into_iter().map(|v| Complex64::new(0.0, v)).collect())
    }
}

/// Matrix `D` with spline second derivatives `M = D y` (not-a-knot ends).
fn spline_moments(s: &[f64]) -> DMatrix<f64> {
    let n = s.len();
    let h: Vec<f64> = s.windows(2).map(|w| w[1] - w[0]).collect();
    let mut a = DMatrix::<f64>::zeros(n, n);
    let mut b = DMatrix::<f64>::zeros(n, n);
    // not-a-knot: third derivative continuous across s_1 and s_{n-2}
    a[(0, 0)] = h[1];
    a[(0, 1)] = -(h[0] + h[1]);
    a[(0, 2)] = h[0];
    a[(n - 1, n - 3)] = h[n - 2];
    a[(n - 1, n - 2)] = -(h[n - 3] + h[n - 2]);
    a[(n - 1, n - 1)] = h[n - 3];
    for k in 1..n - 1 {
        a[(k, k - 1)] = h[k - 1];
        a[(k, k)] = 2.0 * (h[k - 1] + h[k]);
        a[(k, k + 1)] = h[k];
        b[(k, k + 1)] = 6.0 / h[k];
        b[(k, k)] = -6.0 / h[k] - 6.0 / h[k - 1];
        b[(k, k - 1)] = 6.0 / h[k - 1];
    }
    a.lu().solve(&b).expect("not-a-knot system is nonsingular")
}

/// Coefficients of `S'(s)` in the samples, for `s` in `[s_k, s_{k+1}]`.
fn spline_derivative_row(s: &[f64], d: &DMatrix<f64>, k: usize, x: f64) -> Vec<f64> {
    let n = s.len();
    let h = s[k + 1] - s[k];
    let (a, b) = ((s[k + 1] - x).powi(2) / (2.0 * h), (x - s[k]).powi(2) / (2.0 * h));
    let mut row: Vec<f64> = (0..n).map(|m| -a * d[(k, m)] + b * d[(k + 1, m)] - (d[(k + 1, m)] - d[(k, m)]) * h / 6.0).collect();
    row[k + 1] += 1.0 / h;
    row[k] -= 1.0 / h;
    row
}

/// Interior slices at which half-derivative statistics are reported: the
/// quadrature needs the slab to reach eight times further.
fn reporting_slices(times: &[f64]) -> Result<std::ops::Range<usize>> {
    let t_max = *times.last().expect("nonempty");
    let end = times.iter().take(times.len() - 1).take_while(|&&t| 8.0 * t <= t_max).count();
    if end <= 1 {
        return Err(Error::QuadratureTail(format!("no interior slice below t_max / 8 = {}", t_max / 8.0)));
    }
    Ok(1..end)
}

/// Residuals of the temperature conditions
/// (1) `sum_j d_j u_j = i d_t^{1/2} u_{d+1}`,
/// (2) `d_k u_j = d_j u_k` for spatial `j, k`,
/// (3) `d_j u_{d+1} = -i d_t^{1/2} u_j`,
/// each relative to the larger of its two sides.
pub fn temperature_cr_residual(system: &CRSystem) -> Result<ResidualReport> {
    if system.kind != SystemKind::Temperature {
        return Err(Error::SystemKind { expected: SystemKind::Temperature, got: system.kind });
    }
    if system.len() < SplineHalfDerivative::MIN_SAMPLES {
        return Err(Error::TooFewSlices { needed: SplineHalfDerivative::MIN_SAMPLES, got: system.len() });
    }
    let d = system.spec.dim();
    let times = system.times();
    let range = reporting_slices(&times)?;
    let half = SplineHalfDerivative::new(&times)?;
    let slabs = (0..=d).map(|j| system.component_slab(j)).collect::<Result<Vec<_>>>()?;
    let i_unit = Complex64::new(0.0, 1.0);

    let per_slice = range
        .clone()
        .into_par_iter()
        .map(|i| {
            let halves = slabs.iter().map(|s| half.apply_slab(s, i)).collect::<Result<Vec<_>>>()?;
            let grads = (0..=d)
                .map(|j| (0..d).map(|k| partial_derivative(system.component(i, j), k)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            let mut out = Vec::new();
            // (1)
            let mut div = grads[0][0].clone();
            for (j, g) in grads.iter().enumerate().take(d).skip(1) {
                div = div.add(&g[j])?;
            }
            let rhs = halves[d].map(|z| i_unit * z);
            out.push(sides(&div.real_to_complex(), &rhs)?);
            // (2)
            for (j, row) in grads.iter().enumerate().take(d) {
                for (k, other) in grads.iter().enumerate().take(d).skip(j + 1) {
                    out.push(sides(&row[k].real_to_complex(), &other[j].real_to_complex())?);
                }
            }
            // (3)
            for j in 0..d {
                let rhs = halves[j].map(|z| -i_unit * z);
                out.push(sides(&grads[d][j].real_to_complex(), &rhs)?);
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut names = vec!["condition_1".to_string()];
    for j in 0..d {
        for k in j + 1..d {
            names.push(format!("condition_2_{}_{}", j + 1, k + 1));
        }
    }
    for j in 0..d {
        names.push(format!("condition_3_{}", j + 1));
    }
    let conditions = names
        .into_iter()
        .enumerate()
        .map(|(c, name)| {
            let diff = per_slice.iter().map(|s| s[c].0).sum();
            let lhs: f64 = per_slice.iter().map(|s| s[c].1).sum();
            let rhs: f64 = per_slice.iter().map(|s| s[c].2).sum();
            Accumulator { diff, scale: lhs.max(rhs) }.finish(name)
        })
        .collect();
    Ok(report(conditions, range, &times, TEMPERATURE_TOLERANCE))
}

fn sides(lhs: &ComplexGridFunction, rhs: &ComplexGridFunction) -> Result<(f64, f64, f64)> {
    Ok((l2_sq(&lhs.zip_with(rhs, |a, b| a - b)?), l2_sq(lhs), l2_sq(rhs)))
}

/// `sup_r sup_t ||St^alpha_r |F(., t)|||_{p,q}`, reported over the `r` ladder.
pub fn caloric_norm(system: &CRSystem, e: &Exponents, ladders: &Ladders) -> Result<NormReport> {
    e.check_theorem(system.spec.dim())?;
    if !ladders.r.is_dyadic() {
        return Err(Error::NotDyadic(ladders.r.ratio()));
    }
    let magnitudes: Vec<GridFunction<f64>> = (0..system.len()).map(|i| system.magnitude(i)).collect();
    let terms = ladders
        .r
        .members()
        .into_par_iter()
        .map(|r| {
            magnitudes
                .iter()
                .map(|m| amalgam_norm(&dilate(m, e.alpha(), r)?, e.p(), e.q()))
                .try_fold(0.0f64, |acc, v| Ok(acc.max(v?)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NormReport::from_terms(ladders.r.clone(), terms))
}

/// Largest defect of the harmonic conditions on the frequency lattice, with
/// `u_j = -i xi_j/|xi|`, `u_{d+1} = 1`, `d_t = -2 pi |xi|`, `d_j = 2 pi i xi_j`.
pub fn harmonic_symbol_defect(spec: &GridSpec) -> f64 {
    symbol_defect(spec, |xi, m| {
        let d = xi.len();
        let u = |j: usize| if j == d { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, -xi[j] / m) };
        let dx = |k: usize| if k == d { Complex64::new(-2.0 * PI * m, 0.0) } else { Complex64::new(0.0, 2.0 * PI * xi[k]) };
        let mut worst = (0..=d).map(|j| dx(j) * u(j)).sum::<Complex64>().norm();
        for j in 0..=d {
            for k in 0..=d {
                worst = worst.max((dx(k) * u(j) - dx(j) * u(k)).norm());
            }
        }
        worst
    })
}

/// Largest defect of the temperature conditions on the frequency lattice, with
/// `d_t^{1/2} e^{-lambda t} = -i sqrt(lambda) e^{-lambda t}`, `lambda = 4 pi^2 |xi|^2`.
pub fn temperature_symbol_defect(spec: &GridSpec) -> f64 {
    symbol_defect(spec, |xi, m| {
        let d = xi.len();
        let i = Complex64::new(0.0, 1.0);
        let half = -i * (2.0 * PI * m);
        let u = |j: usize| if j == d { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, -xi[j] / m) };
        let dx = |k: usize| Complex64::new(0.0, 2.0 * PI * xi[k]);
        let div: Complex64 = (0..d).map(|j| dx(j) * u(j)).sum();
        let mut worst = (div - i * half * u(d)).norm();
        for j in 0..d {
            worst = worst.max((dx(j) * u(d) + i * half * u(j)).norm());
            for k in 0..d {
                worst = worst.max((dx(k) * u(j) - dx(j) * u(k)).norm());
            }
        }
        worst
    })
}

fn symbol_defect(spec: &GridSpec, f: impl Fn(&[f64], f64) -> f64) -> f64 {
    (0..spec.len())
        .map(|flat| {
            let (_, xi) = frequency(spec, flat);
            let xi = &xi[..spec.dim()];
            let m = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
            if m == 0.0 {
                0.0
            } else {
                f(xi, m) / (2.0 * PI * m)
            }
        })
        .fold(0.0, f64::max)
}
