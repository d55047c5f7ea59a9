use engine::amplitude::{evaluate_w, layout_of, mc_oracle_w, required_test_form_degree};
use engine::anomaly::{anomaly_symbol, anomaly_vanishes_exactly, quadratic_residual};
use engine::polys::{kirchhoff_polynomial, laplacian_determinant_times_t, m_inverse};
use engine::quadrature::QuadConfig;
use engine::testform::{TestForm, TestFormSpec};
use engine::{DecoratedGraph, EdgeSubset, Error};
use num_complex::Complex64;
use pyo3::exceptions::{PyArithmeticError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyTuple};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::NonConvergence { .. } => PyArithmeticError::new_err(e.to_string()),
        Error::AssertionFailed(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn parse(graph: &str, d: Option<usize>) -> PyResult<DecoratedGraph> {
    let g: DecoratedGraph = graph.parse().map_err(to_py)?;
    Ok(match d {
        Some(d) if d != g.dim() => g.with_dim(d),
        _ => g,
    })
}

fn one_based(s: &EdgeSubset) -> Vec<usize> {
    s.indices().iter().map(|e| e + 1).collect()
}

/// Form of the given degree shift relative to the top degree `r`; parsed from JSON when given.
fn form(g: &DecoratedGraph, phi: Option<&str>, shift: i64) -> PyResult<TestForm> {
    let l = layout_of(g);
    let degree = (required_test_form_degree(g, g.dim()) - shift).max(0) as usize;
    match phi {
        None => Ok(TestForm::generic_packet(l.d, l.n_rel, degree)),
        Some(text) => TestFormSpec::from_json(text).and_then(|s| s.build(l.d, l.n_rel, degree)).map_err(to_py),
    }
}

/// Laman verdict, 1-based witness subset and vanishing certificate as a dict.
#[pyfunction]
#[pyo3(signature = (graph, d=None))]
fn classify<'py>(py: Python<'py>, graph: &str, d: Option<usize>) -> PyResult<Bound<'py, PyDict>> {
    let g = parse(graph, d)?;
    let v = g.is_laman(g.dim()).map_err(to_py)?;
    let cert = anomaly_vanishes_exactly(&g, g.dim()).map_err(to_py)?;
    let out = PyDict::new(py);
    out.set_item("laman", v.is_laman)?;
    out.set_item("witness", v.witness.as_ref().map(one_based))?;
    out.set_item("first_betti", g.first_betti())?;
    out.set_item("anomaly_vanishes", cert.vanishes)?;
    out.set_item("power", cert.power)?;
    Ok(out)
}

/// Kirchhoff polynomial as text, checked against the determinant route.
#[pyfunction]
fn kirchhoff(graph: &str) -> PyResult<String> {
    let g = parse(graph, None)?;
    let k = kirchhoff_polynomial(&g).map_err(to_py)?;
    let det = laplacian_determinant_times_t(&g).map_err(to_py)?;
    if k != det {
        return Err(PyRuntimeError::new_err(format!("tree sum {} differs from determinant {}", k, det)));
    }
    Ok(k.to_string())
}

#[pyfunction]
fn minverse(graph: &str) -> PyResult<Vec<Vec<String>>> {
    let g = parse(graph, None)?;
    let inv = m_inverse(&g).map_err(to_py)?;
    Ok(inv.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect())
}

/// Regularized amplitude and its error estimate.
#[pyfunction]
#[pyo3(signature = (graph, eps=0.0, l=f64::INFINITY, phi=None, d=None, rtol=1e-6, atol=1e-12, max_evals=2_000_000))]
#[allow(clippy::too_many_arguments)]
fn eval_w(graph: &str, eps: f64, l: f64, phi: Option<&str>, d: Option<usize>, rtol: f64, atol: f64, max_evals: usize) -> PyResult<(Complex64, f64)> {
    let g = parse(graph, d)?;
    let f = form(&g, phi, 0)?;
    let r = evaluate_w(&g, &f, eps, l, &QuadConfig::new(rtol, atol, max_evals)).map_err(to_py)?;
    Ok((r.value, r.error))
}

#[pyfunction]
#[pyo3(signature = (graph, eps, l, samples, seed, phi=None, d=None))]
fn mc_oracle(graph: &str, eps: f64, l: f64, samples: usize, seed: u64, phi: Option<&str>, d: Option<usize>) -> PyResult<(Complex64, f64)> {
    let g = parse(graph, d)?;
    let f = form(&g, phi, 0)?;
    let r = mc_oracle_w(&g, &f, eps, l, samples, seed).map_err(to_py)?;
    Ok((r.value, r.error))
}

/// Symbol coefficients keyed by multi-index; empty when the anomaly vanishes identically.
#[pyfunction]
#[pyo3(signature = (graph, d=None, rtol=1e-6))]
fn anomaly<'py>(py: Python<'py>, graph: &str, d: Option<usize>, rtol: f64) -> PyResult<Bound<'py, PyDict>> {
    let g = parse(graph, d)?;
    let out = PyDict::new(py);
    if anomaly_vanishes_exactly(&g, g.dim()).map_err(to_py)?.vanishes {
        return Ok(out);
    }
    let sym = anomaly_symbol(&g, &QuadConfig::new(rtol, 1e-12, 2_000_000)).map_err(to_py)?;
    for (alpha, c) in &sym.coefficients {
        out.set_item(PyTuple::new(py, alpha)?, *c)?;
    }
    Ok(out)
}

/// Signed sum of composed anomaly terms: `(residual, relative_residual, max_term)`.
#[pyfunction]
#[pyo3(signature = (graph, phi=None, d=None, rtol=1e-6))]
fn quadratic_check(graph: &str, phi: Option<&str>, d: Option<usize>, rtol: f64) -> PyResult<(Complex64, f64, f64)> {
    let g = parse(graph, d)?;
    let f = form(&g, phi, 2)?;
    let rep = quadratic_residual(&g, &f, &QuadConfig::new(rtol, 1e-12, 2_000_000)).map_err(to_py)?;
    Ok((rep.residual, rep.relative_residual(), rep.max_term))
}

#[pymodule]
fn holofeyn(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(kirchhoff, m)?)?;
    m.add_function(wrap_pyfunction!(minverse, m)?)?;
    m.add_function(wrap_pyfunction!(eval_w, m)?)?;
    m.add_function(wrap_pyfunction!(mc_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(anomaly, m)?)?;
    m.add_function(wrap_pyfunction!(quadratic_check, m)?)?;
    Ok(())
}
