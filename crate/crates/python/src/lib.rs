//! Python module `pycoulombx`.
//!
//! Arguments accept Python `complex`, `float` or `int`; results are `complex`.
//! Numerical failures raise `pycoulombx.CoulombError` with the error kind as
//! the message prefix.

use std::path::PathBuf;

use coulombx::coulomb::{self, CVariant, CoulombParams, Evaluation, FunctionName, Sign};
use coulombx::render::{self, GridSpec, Plane, Target};
use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(pycoulombx, CoulombError, PyException);

fn err(e: coulombx::CoulombError) -> PyErr {
    CoulombError::new_err(format!("{}: {e}", e.kind()))
}

fn sign(s: &str) -> PyResult<Sign> {
    match s {
        "+" | "plus" => Ok(Sign::Plus),
        "-" | "minus" => Ok(Sign::Minus),
        _ => Err(PyValueError::new_err(format!("sign must be '+' or '-', got '{s}'"))),
    }
}

fn variant(s: &str) -> PyResult<CVariant> {
    match s {
        "sqrtgamma" | "a" => Ok(CVariant::SqrtGamma),
        "euler" | "b" => Ok(CVariant::EulerReflection),
        "loggamma" | "c" => Ok(CVariant::LogGamma),
        _ => Err(PyValueError::new_err(format!("variant must be sqrtgamma, euler or loggamma, got '{s}'"))),
    }
}

fn sheet(s: i8) -> PyResult<i8> {
    if s == 1 || s == -1 {
        Ok(s)
    } else {
        Err(PyValueError::new_err("sheet must be 1 or -1"))
    }
}

/// Parameters (η, ℓ, ρ) of the Coulomb equation.
#[pyclass(name = "Params", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyParams(CoulombParams);

#[pymethods]
impl PyParams {
    #[new]
    #[pyo3(signature = (eta, ell = Complex64::new(0.0, 0.0), rho = Complex64::new(0.0, 0.0)))]
    fn new(eta: Complex64, ell: Complex64, rho: Complex64) -> PyResult<Self> {
        CoulombParams::new(eta, ell, rho).map(PyParams).map_err(err)
    }

    /// η = 1/(a_B k), ρ = k r.
    #[staticmethod]
    #[pyo3(signature = (k, r, bohr_radius, ell = Complex64::new(0.0, 0.0)))]
    fn from_physical(k: Complex64, r: f64, bohr_radius: f64, ell: Complex64) -> PyResult<Self> {
        CoulombParams::from_physical(k, r, bohr_radius, ell).map(PyParams).map_err(err)
    }

    #[staticmethod]
    fn from_inverse_eta(inverse_eta: Complex64, ell: Complex64, rho: Complex64) -> PyResult<Self> {
        CoulombParams::from_inverse_eta(inverse_eta, ell, rho).map(PyParams).map_err(err)
    }

    #[getter]
    fn eta(&self) -> Complex64 {
        self.0.eta
    }

    #[getter]
    fn ell(&self) -> Complex64 {
        self.0.ell
    }

    #[getter]
    fn rho(&self) -> Complex64 {
        self.0.rho
    }

    /// Energy in units where ħ²/(2m) = 1 and a_B = 1.
    fn energy(&self) -> PyResult<Complex64> {
        self.0.energy().map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Params(eta={}, ell={}, rho={})", self.0.eta, self.0.ell, self.0.rho)
    }
}

fn params(eta: Complex64, ell: Complex64, rho: Complex64) -> PyResult<CoulombParams> {
    CoulombParams::new(eta, ell, rho).map_err(err)
}

/// Evaluates any function of the family by name (F, G, Hp, Hm, Phi, Psi, I,
/// C, w, h, g, theta).
#[pyfunction]
#[pyo3(signature = (name, eta, ell, rho = Complex64::new(0.0, 0.0), variant = "loggamma", sign = "+", sheet = 1, winding = 0))]
#[allow(clippy::too_many_arguments)]
fn evaluate(
    name: &str,
    eta: Complex64,
    ell: Complex64,
    rho: Complex64,
    variant: &str,
    sign: &str,
    sheet: i8,
    winding: i64,
) -> PyResult<Complex64> {
    let function: FunctionName = name.parse().map_err(PyValueError::new_err)?;
    let ev = Evaluation {
        function,
        variant: self::variant(variant)?,
        sign: self::sign(sign)?,
        sheet_sign: self::sheet(sheet)?,
        winding,
    };
    ev.evaluate(&params(eta, ell, rho)?).map_err(err)
}

/// Regular solution F_{ηℓ}(ρ).
#[pyfunction]
#[pyo3(signature = (eta, ell, rho, sheet = 1))]
fn coulomb_f(eta: Complex64, ell: Complex64, rho: Complex64, sheet: i8) -> PyResult<Complex64> {
    Ok(coulomb::coulomb_f(&params(eta, ell, rho)?, self::sheet(sheet)?).map_err(err)?.value)
}

/// Irregular solution G_{ηℓ}(ρ), optionally continued `winding` times around ρ = 0.
#[pyfunction]
#[pyo3(signature = (eta, ell, rho, sheet = 1, winding = 0))]
fn coulomb_g(eta: Complex64, ell: Complex64, rho: Complex64, sheet: i8, winding: i64) -> PyResult<Complex64> {
    Ok(coulomb::continue_g(&params(eta, ell, rho)?, winding, self::sheet(sheet)?).map_err(err)?.value)
}

#[pyfunction]
#[pyo3(signature = (eta, ell, rho, sign = "+", sheet = 1))]
fn coulomb_h(eta: Complex64, ell: Complex64, rho: Complex64, sign: &str, sheet: i8) -> PyResult<Complex64> {
    let p = params(eta, ell, rho)?;
    Ok(coulomb::coulomb_h(&p, self::sign(sign)?, self::sheet(sheet)?).map_err(err)?.value)
}

#[pyfunction]
#[pyo3(signature = (eta, ell, variant = "loggamma"))]
fn coulomb_c(eta: Complex64, ell: Complex64, variant: &str) -> PyResult<Complex64> {
    coulomb::coulomb_c(eta, ell, self::variant(variant)?).map_err(err)
}

/// F, F', G, G' at real or complex arguments, with the precision flag.
#[pyfunction]
#[pyo3(signature = (eta, ell, rho, sheet = 1))]
fn values<'py>(
    py: Python<'py>,
    eta: Complex64,
    ell: Complex64,
    rho: Complex64,
    sheet: i8,
) -> PyResult<Bound<'py, PyDict>> {
    let v = coulomb::coulomb_values(&params(eta, ell, rho)?, self::sheet(sheet)?).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("F", v.f)?;
    d.set_item("dF", v.df)?;
    d.set_item("G", v.g)?;
    d.set_item("dG", v.dg)?;
    d.set_item("low_precision", v.low_precision)?;
    Ok(d)
}

/// Renders a phase plot to a binary PPM and returns the detected features as
/// (kind, z, plaquettes) tuples.
#[pyfunction]
#[pyo3(signature = (name, path, window = (-2.0, -2.0, 2.0, 2.0), size = (256, 256), plane = "inverse_eta", eta = Complex64::new(1.0, 0.0), ell = Complex64::new(0.0, 0.0), rho = Complex64::new(0.5, 0.0), variant = "loggamma", sign = "+"))]
#[allow(clippy::too_many_arguments)]
fn plot(
    py: Python<'_>,
    name: &str,
    path: PathBuf,
    window: (f64, f64, f64, f64),
    size: (usize, usize),
    plane: &str,
    eta: Complex64,
    ell: Complex64,
    rho: Complex64,
    variant: &str,
    sign: &str,
) -> PyResult<Vec<(String, Complex64, usize)>> {
    let plane = match plane {
        "inverse_eta" => Plane::InverseEta,
        "rho" => Plane::Rho,
        _ => return Err(PyValueError::new_err("plane must be 'inverse_eta' or 'rho'")),
    };
    let function: FunctionName = name.parse().map_err(PyValueError::new_err)?;
    let evaluation = Evaluation { function, variant: self::variant(variant)?, sign: self::sign(sign)?, sheet_sign: 1, winding: 0 };
    let target = Target::Coulomb { evaluation, template: params(eta, ell, rho)? };
    let spec = GridSpec::from_window([window.0, window.1, window.2, window.3], size.0, size.1, plane).map_err(err)?;
    let rendered = py.detach(|| render::render_grid(&spec, &target));
    render::write_image(&rendered.image, &path).map_err(err)?;
    Ok(rendered.report.features.iter().map(|f| (f.kind.as_str().to_string(), f.at, f.plaquettes)).collect())
}

/// Runs the built-in invariant checks; returns (name, error or None) pairs.
#[pyfunction]
fn selftest(py: Python<'_>) -> Vec<(String, Option<String>)> {
    py.detach(coulombx::selftest::run_all)
        .into_iter()
        .map(|o| (o.name.to_string(), o.result.err()))
        .collect()
}

#[pymodule]
fn pycoulombx(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("CoulombError", m.py().get_type::<CoulombError>())?;
    m.add_class::<PyParams>()?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(coulomb_f, m)?)?;
    m.add_function(wrap_pyfunction!(coulomb_g, m)?)?;
    m.add_function(wrap_pyfunction!(coulomb_h, m)?)?;
    m.add_function(wrap_pyfunction!(coulomb_c, m)?)?;
    m.add_function(wrap_pyfunction!(values, m)?)?;
    m.add_function(wrap_pyfunction!(plot, m)?)?;
    m.add_function(wrap_pyfunction!(selftest, m)?)?;
    Ok(())
}
