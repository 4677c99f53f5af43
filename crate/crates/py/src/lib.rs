//! Python bindings. Inputs are expression strings (or curve names / JSON
//! curve text); reports come back as plain dicts.

use moment_kernel_core::algebra::{parse_laurent, parse_rational};
use moment_kernel_core::branches::BranchSystem;
use moment_kernel_core::constellation::skeleton;
use moment_kernel_core::laurent_moment;
use moment_kernel_core::moments::{self, rationality::avoid_values, TestOptions};
use moment_kernel_core::qmodule;
use moment_kernel_core::{Curve, LaurentPolynomial, RationalFunction};
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

fn err(e: moment_kernel_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn rational(s: &str) -> PyResult<RationalFunction> {
    parse_rational(s).map_err(err)
}

fn laurent(s: &str) -> PyResult<LaurentPolynomial> {
    parse_laurent(s).map_err(err)
}

fn curve(s: &str) -> PyResult<Curve> {
    Curve::parse(s).map_err(err)
}

/// Serialize through JSON so the result is an ordinary dict.
fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn options(tol: Option<f64>, samples: Option<usize>) -> TestOptions {
    let d = TestOptions::default();
    TestOptions { tol: tol.unwrap_or(d.tol), samples: samples.unwrap_or(d.samples), ..d }
}

/// Moments m_0..m_n of ∫ Pⁱ q dz along the curve.
#[pyfunction]
#[pyo3(signature = (p, q, gamma = "unit_circle", n = 10))]
fn moment_sequence<'py>(py: Python<'py>, p: &str, q: &str, gamma: &str, n: usize) -> PyResult<Bound<'py, PyAny>> {
    let m = moments::moment_sequence(&rational(p)?, &rational(q)?, &curve(gamma)?, n).map_err(err)?;
    to_py(py, &m.report())
}

/// I(t) = (1/2πi)∫ q dz/(P − t) by the residue formula.
#[pyfunction]
#[pyo3(signature = (p, q, t, gamma = "unit_circle"))]
fn eval_i(p: &str, q: &str, t: Complex64, gamma: &str) -> PyResult<Complex64> {
    moments::eval_i(&rational(p)?, &rational(q)?, &curve(gamma)?, t).map_err(err)
}

/// I(t) by direct quadrature.
#[pyfunction]
#[pyo3(signature = (p, q, t, gamma = "unit_circle"))]
fn eval_i_quadrature(p: &str, q: &str, t: Complex64, gamma: &str) -> PyResult<Complex64> {
    moments::eval_i_quadrature(&rational(p)?, &rational(q)?, &curve(gamma)?, t).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (p, q, gamma = "unit_circle", tol = None, samples = None))]
fn rationality<'py>(
    py: Python<'py>,
    p: &str,
    q: &str,
    gamma: &str,
    tol: Option<f64>,
    samples: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let v = moments::rationality_test_with(&rational(p)?, &rational(q)?, &curve(gamma)?, &options(tol, samples))
        .map_err(err)?;
    to_py(py, &v)
}

#[pyfunction]
#[pyo3(signature = (p, q, gamma = "unit_circle", tol = None, samples = None))]
fn vanishing<'py>(
    py: Python<'py>,
    p: &str,
    q: &str,
    gamma: &str,
    tol: Option<f64>,
    samples: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let v = moments::vanishing_test_with(&rational(p)?, &rational(q)?, &curve(gamma)?, &options(tol, samples))
        .map_err(err)?;
    to_py(py, &v)
}

#[pyfunction]
fn monodromy<'py>(py: Python<'py>, p: &str) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &BranchSystem::new(&rational(p)?).map_err(err)?.report())
}

#[pyfunction]
#[pyo3(signature = (p, gamma = "unit_circle"))]
fn constellation<'py>(py: Python<'py>, p: &str, gamma: &str) -> PyResult<Bound<'py, PyAny>> {
    let p = rational(p)?;
    let sk = skeleton(&p, &curve(gamma)?, &avoid_values(&p, &RationalFunction::zero())).map_err(err)?;
    to_py(py, &sk.report())
}

/// Doubly transitive criterion with rationality-test fallback.
#[pyfunction]
#[pyo3(signature = (p, q, gamma = "unit_circle"))]
fn generic_criterion<'py>(py: Python<'py>, p: &str, q: &str, gamma: &str) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &moments::generic_criterion(&rational(p)?, &rational(q)?, &curve(gamma)?).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (p, q, gamma = "unit_circle", imax = 5, jmax = 5))]
fn double_moments<'py>(
    py: Python<'py>,
    p: &str,
    q: &str,
    gamma: &str,
    imax: usize,
    jmax: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let r = moments::double_moment_check(&rational(p)?, &rational(q)?, &curve(gamma)?, imax, jmax, None)
        .map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
fn condition_lau<'py>(py: Python<'py>, l: &str, m: &str) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &laurent_moment::condition_lau(&laurent(l)?, &laurent(m)?).map_err(err)?)
}

#[pyfunction]
fn dvdk<'py>(py: Python<'py>, l: &str) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &laurent_moment::dvdk_check(&laurent(l)?).map_err(err)?)
}

#[pyfunction]
fn bautin<'py>(py: Python<'py>, l: &str, mdeg: usize) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &laurent_moment::bautin_index(&laurent(l)?, mdeg).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (p, gamma = "unit_circle"))]
fn admissible<'py>(py: Python<'py>, p: &str, gamma: &str) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &qmodule::admissibility(&rational(p)?, &curve(gamma)?).map_err(err)?)
}

#[pyfunction]
fn s5_demo(py: Python<'_>) -> PyResult<Bound<'_, PyAny>> {
    to_py(py, &qmodule::s5_example_suite().map_err(err)?)
}

#[pymodule]
fn moment_kernel(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_function(wrap_pyfunction!(moment_sequence, m)?)?;
    m.add_function(wrap_pyfunction!(eval_i, m)?)?;
    m.add_function(wrap_pyfunction!(eval_i_quadrature, m)?)?;
    m.add_function(wrap_pyfunction!(rationality, m)?)?;
    m.add_function(wrap_pyfunction!(vanishing, m)?)?;
    m.add_function(wrap_pyfunction!(monodromy, m)?)?;
    m.add_function(wrap_pyfunction!(constellation, m)?)?;
    m.add_function(wrap_pyfunction!(generic_criterion, m)?)?;
    m.add_function(wrap_pyfunction!(double_moments, m)?)?;
    m.add_function(wrap_pyfunction!(condition_lau, m)?)?;
    m.add_function(wrap_pyfunction!(dvdk, m)?)?;
    m.add_function(wrap_pyfunction!(bautin, m)?)?;
    m.add_function(wrap_pyfunction!(admissible, m)?)?;
    m.add_function(wrap_pyfunction!(s5_demo, m)?)?;
    Ok(())
}
