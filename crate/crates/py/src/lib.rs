//! Python bindings: grids, sampled fields, norms, maximal operators,
//! transforms and Cauchy-Riemann residuals.

use std::cell::RefCell;
use std::collections::BTreeMap;

use fofana_core::cauchy_riemann::{
    caloric_map, half_time_derivative, harmonic_cr_residual, harmonic_system, heat_residual, laplacian_residual,
    temperature_cr_residual,
};
use fofana_core::hardy_fofana::{characterize, hardy_fofana_norm, Ladders};
use fofana_core::maximal::{grand_maximal, hl_maximal};
use fofana_core::transforms::{heat_extend, poisson_extend, riesz_transform};
use fofana_core::{
    amalgam_norm, dilate, fofana_norm, lp_norm, make_grid, Exponents, GridFunction, GridSpec, MollifierShape,
    ResidualReport,
};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyComplex;

fn err(e: fofana_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "Grid", frozen, skip_from_py_object)]
#[derive(Clone)]
struct Grid {
    spec: GridSpec,
}

#[pymethods]
impl Grid {
    #[new]
    fn new(d: usize, side: usize, per_unit: usize) -> PyResult<Self> {
        Ok(Self { spec: make_grid(d, side, per_unit).map_err(err)? })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.spec.dim()
    }

    #[getter]
    fn side(&self) -> f64 {
        self.spec.side()
    }

    #[getter]
    fn spacing(&self) -> f64 {
        self.spec.spacing()
    }

    fn __len__(&self) -> usize {
        self.spec.len()
    }

    fn refined(&self) -> Self {
        Self { spec: self.spec.refined() }
    }

    /// Coordinates of every grid point, in storage order.
    fn points(&self) -> Vec<Vec<f64>> {
        (0..self.spec.len()).map(|k| self.spec.point(k)[..self.spec.dim()].to_vec()).collect()
    }

    /// Samples `f(x)` at every grid point; `x` is a list of coordinates.
    fn sample(&self, f: &Bound<'_, PyAny>) -> PyResult<Field> {
        let values = self.points().into_iter().map(|x| f.call1((x,))?.extract::<f64>()).collect::<PyResult<Vec<_>>>()?;
        self.field(values)
    }

    fn field(&self, values: Vec<f64>) -> PyResult<Field> {
        Ok(Field { inner: GridFunction::new(self.spec, values).map_err(err)? })
    }

    fn __repr__(&self) -> String {
        format!("Grid(d={}, side={}, spacing={})", self.spec.dim(), self.spec.side(), self.spec.spacing())
    }
}

#[pyclass(name = "Ladder", frozen, from_py_object)]
#[derive(Clone)]
struct Ladder {
    inner: fofana_core::Ladder,
}

#[pymethods]
impl Ladder {
    #[new]
    fn new(base: f64, ratio: f64, count: usize) -> PyResult<Self> {
        Ok(Self { inner: fofana_core::Ladder::new(base, ratio, count).map_err(err)? })
    }

    #[staticmethod]
    fn dyadic(lo: i32, hi: i32) -> PyResult<Self> {
        Ok(Self { inner: fofana_core::Ladder::dyadic(lo, hi).map_err(err)? })
    }

    fn members(&self) -> Vec<f64> {
        self.inner.members()
    }

    fn __len__(&self) -> usize {
        self.inner.count()
    }
}

fn exponents(p: f64, q: f64, alpha: f64) -> PyResult<Exponents> {
    Exponents::new(p, q, alpha).map_err(err)
}

fn residuals(report: ResidualReport) -> BTreeMap<String, f64> {
    report.conditions.into_iter().map(|c| (c.name, c.residual)).collect()
}

#[pyclass(name = "Field", skip_from_py_object)]
#[derive(Clone)]
struct Field {
    inner: GridFunction<f64>,
}

impl Field {
    fn wrap(inner: GridFunction<f64>) -> Self {
        Self { inner }
    }

    fn ladders(&self, t: Option<Ladder>, r: Option<Ladder>) -> Ladders {
        let default = Ladders::default_for(self.inner.spec());
        Ladders::new(t.map_or(default.t, |l| l.inner), r.map_or(default.r, |l| l.inner))
    }
}

#[pymethods]
impl Field {
    #[getter]
    fn grid(&self) -> Grid {
        Grid { spec: *self.inner.spec() }
    }

    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    fn __len__(&self) -> usize {
        self.inner.values().len()
    }

    fn __add__(&self, other: &Field) -> PyResult<Field> {
        Ok(Self::wrap(self.inner.add(&other.inner).map_err(err)?))
    }

    fn __sub__(&self, other: &Field) -> PyResult<Field> {
        Ok(Self::wrap(self.inner.sub(&other.inner).map_err(err)?))
    }

    fn __mul__(&self, c: f64) -> Field {
        Self::wrap(self.inner.scale(c))
    }

    fn __rmul__(&self, c: f64) -> Field {
        self.__mul__(c)
    }

    fn max_abs(&self) -> f64 {
        self.inner.max_abs()
    }

    fn lp_norm(&self, p: f64) -> PyResult<f64> {
        lp_norm(&self.inner, p).map_err(err)
    }

    fn amalgam_norm(&self, p: f64, q: f64) -> PyResult<f64> {
        amalgam_norm(&self.inner, p, q).map_err(err)
    }

    /// `sup_r ||St^alpha_r u||_{p,q}`; `r` defaults to `2^-6 .. 2^6`.
    #[pyo3(signature = (p, q, alpha, r=None))]
    fn fofana_norm(&self, p: f64, q: f64, alpha: f64, r: Option<Ladder>) -> PyResult<f64> {
        let r = r.map_or_else(fofana_core::norms::default_dilation_ladder, |l| l.inner);
        Ok(fofana_norm(&self.inner, &exponents(p, q, alpha)?, &r).map_err(err)?.value)
    }

    fn dilate(&self, alpha: f64, r: f64) -> PyResult<Field> {
        Ok(Self::wrap(dilate(&self.inner, alpha, r).map_err(err)?))
    }

    fn riesz(&self, j: usize) -> PyResult<Field> {
        Ok(Self::wrap(riesz_transform(&self.inner, j).map_err(err)?))
    }

    #[pyo3(signature = (t, cosine_bump=false))]
    fn grand_maximal(&self, t: &Ladder, cosine_bump: bool) -> PyResult<Field> {
        let shape = if cosine_bump { MollifierShape::CosineBump } else { MollifierShape::Gaussian };
        Ok(Self::wrap(grand_maximal(&self.inner, &t.inner, shape).map_err(err)?))
    }

    fn hl_maximal(&self, radii: &Ladder) -> PyResult<Field> {
        Ok(Self::wrap(hl_maximal(&self.inner, &radii.inner).map_err(err)?))
    }

    #[pyo3(signature = (p, q, alpha, t=None, r=None))]
    fn hardy_fofana_norm(&self, p: f64, q: f64, alpha: f64, t: Option<Ladder>, r: Option<Ladder>) -> PyResult<f64> {
        let l = self.ladders(t, r);
        Ok(hardy_fofana_norm(&self.inner, &exponents(p, q, alpha)?, &l).map_err(err)?.value)
    }

    /// The maximal, Poisson, Riesz and dilation functionals by name.
    #[pyo3(signature = (p, q, alpha, t=None, r=None))]
    fn characterize(
        &self,
        p: f64,
        q: f64,
        alpha: f64,
        t: Option<Ladder>,
        r: Option<Ladder>,
    ) -> PyResult<BTreeMap<&'static str, f64>> {
        let l = self.ladders(t, r);
        let report = characterize(&self.inner, &exponents(p, q, alpha)?, &l).map_err(err)?;
        Ok(fofana_core::CharacterizationReport::NAMES.into_iter().zip(report.values()).collect())
    }

    fn harmonic_cr_residual(&self, slab: &Ladder) -> PyResult<BTreeMap<String, f64>> {
        let system = harmonic_system(&self.inner, &slab.inner).map_err(err)?;
        Ok(residuals(harmonic_cr_residual(&system).map_err(err)?))
    }

    fn temperature_cr_residual(&self, slab: &Ladder) -> PyResult<BTreeMap<String, f64>> {
        let system = caloric_map(&self.inner, &slab.inner).map_err(err)?;
        Ok(residuals(temperature_cr_residual(&system).map_err(err)?))
    }

    fn laplacian_residual(&self, slab: &Ladder) -> PyResult<BTreeMap<String, f64>> {
        let u = poisson_extend(&self.inner, &slab.inner).map_err(err)?;
        Ok(residuals(laplacian_residual(&u).map_err(err)?))
    }

    fn heat_residual(&self, slab: &Ladder) -> PyResult<BTreeMap<String, f64>> {
        let u = heat_extend(&self.inner, &slab.inner).map_err(err)?;
        Ok(residuals(heat_residual(&u).map_err(err)?))
    }
}

/// `d^{1/2}/dt^{1/2} g` at `t` from `g'`, as a complex number.
#[pyfunction(name = "half_time_derivative")]
fn py_half_time_derivative<'py>(py: Python<'py>, g_prime: &Bound<'py, PyAny>, t: f64) -> PyResult<Bound<'py, PyComplex>> {
    let failure = RefCell::new(None);
    let z = half_time_derivative(
        |s| match g_prime.call1((s,)).and_then(|v| v.extract::<f64>()) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        t,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let z = z.map_err(err)?;
    Ok(PyComplex::from_doubles(py, z.re, z.im))
}

#[pymodule]
fn fofana(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", fofana_core::VERSION)?;
    m.add_class::<Grid>()?;
    m.add_class::<Ladder>()?;
    m.add_class::<Field>()?;
    m.add_function(wrap_pyfunction!(py_half_time_derivative, m)?)?;
    Ok(())
}
