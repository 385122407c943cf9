//! Python bindings: flat functions over the exact-arithmetic,
//! special-function, q-expansion, coefficient, and relation layers.
//!
//! Conventions at the language boundary:
//!
//! * exact rationals cross as `"p/q"` strings (exactness is the product;
//!   floats would silently corrupt them);
//! * q-expansions cross as `{"lowest_exponent": int, "trunc_order": int,
//!   "coeffs": [str]}`;
//! * relations cross as `{"k": str, "N": int, "coeffs": {str: str},
//!   "provenance": str}`, the same shape the CLI reads and writes;
//! * analytic results cross as dicts carrying the value together with its
//!   tail/rounding error split — the bound is part of the answer;
//! * every library error surfaces as `ValueError` with the library message.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyBool, PyComplex, PyDict, PyList};
use qpoincare::exactarith as ea;
use qpoincare::exactarith::WeightProfile;
use qpoincare::poincare as pc;
use qpoincare::poincare::{CoeffResult, NumericConfig};
use qpoincare::qseries as qs;
use qpoincare::qseries::{PrincipalPart, QSeries};
use qpoincare::relations as rl;
use qpoincare::relations::Relation;
use rug::{Float, Rational};

fn lib_err(e: qpoincare::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

// ---------------------------------------------------------------------------
// JSON bridge: the library's serialized forms become plain Python objects.
// ---------------------------------------------------------------------------

fn json_to_py(py: Python<'_>, v: &serde_json::Value) -> PyResult<PyObject> {
    Ok(match v {
        serde_json::Value::Null => py.None(),
        serde_json::Value::Bool(b) => b.into_py(py),
        serde_json::Value::Number(num) => {
            if let Some(i) = num.as_i64() {
                i.into_py(py)
            } else if let Some(u) = num.as_u64() {
                u.into_py(py)
            } else {
                num.as_f64().into_py(py)
            }
        }
        serde_json::Value::String(s) => s.into_py(py),
        serde_json::Value::Array(items) => {
            let list = PyList::empty_bound(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_py(py)
        }
        serde_json::Value::Object(map) => {
            let dict = PyDict::new_bound(py);
            for (key, value) in map {
                dict.set_item(key, json_to_py(py, value)?)?;
            }
            dict.into_py(py)
        }
    })
}

fn py_to_json(obj: &Bound<'_, PyAny>) -> PyResult<serde_json::Value> {
    if obj.is_none() {
        return Ok(serde_json::Value::Null);
    }
    if let Ok(b) = obj.downcast::<PyBool>() {
        return Ok(serde_json::Value::Bool(b.is_true()));
    }
    if let Ok(i) = obj.extract::<i64>() {
        return Ok(serde_json::Value::from(i));
    }
    if let Ok(u) = obj.extract::<u64>() {
        return Ok(serde_json::Value::from(u));
    }
    if let Ok(f) = obj.extract::<f64>() {
        return Ok(serde_json::Value::from(f));
    }
    if let Ok(s) = obj.extract::<String>() {
        return Ok(serde_json::Value::String(s));
    }
    if let Ok(dict) = obj.downcast::<PyDict>() {
        let mut map = serde_json::Map::new();
        for (key, value) in dict.iter() {
            // Integer keys are a natural way to write {m: "alpha"} in
            // Python; the serialized form always uses string keys.
            let key = if let Ok(k) = key.extract::<String>() {
                k
            } else if let Ok(k) = key.extract::<i64>() {
                k.to_string()
            } else {
                return Err(PyValueError::new_err(
                    "dict keys must be strings or integers",
                ));
            };
            map.insert(key, py_to_json(&value)?);
        }
        return Ok(serde_json::Value::Object(map));
    }
    if let Ok(list) = obj.downcast::<PyList>() {
        let mut items = Vec::with_capacity(list.len());
        for item in list.iter() {
            items.push(py_to_json(&item)?);
        }
        return Ok(serde_json::Value::Array(items));
    }
    Err(PyValueError::new_err(format!(
        "cannot convert {} to a JSON value",
        obj.get_type().name()?
    )))
}

fn series_to_py(py: Python<'_>, f: &QSeries) -> PyResult<PyObject> {
    json_to_py(py, &f.to_json())
}

fn relation_from_py(obj: &Bound<'_, PyAny>) -> PyResult<Relation> {
    Relation::from_json(&py_to_json(obj)?).map_err(lib_err)
}

// ---------------------------------------------------------------------------
// exactarith
// ---------------------------------------------------------------------------

/// Kronecker symbol (a/b), fully extended.
#[pyfunction]
fn kronecker_symbol(a: i64, b: i64) -> i32 {
    ea::kronecker_symbol(a, b)
}

/// The fourth root of unity by d mod 4 (1 for d = 1, i for d = 3 mod 4),
/// returned as a Python complex; odd d required.
#[pyfunction]
fn epsilon(py: Python<'_>, d: i64) -> PyResult<PyObject> {
    let (re, im) = ea::epsilon(d).map_err(lib_err)?.to_pair();
    Ok(PyComplex::from_doubles_bound(py, re as f64, im as f64).into_py(py))
}

/// Euler's totient of n >= 1.
#[pyfunction]
fn euler_phi(n: u64) -> PyResult<u64> {
    if n == 0 {
        return Err(PyValueError::new_err("euler_phi needs n >= 1"));
    }
    Ok(ea::euler_phi(n))
}

/// Inverse of a modulo m, or None when gcd(a, m) > 1.
#[pyfunction]
fn mod_inv(a: u64, m: u64) -> Option<u64> {
    ea::mod_inv(a, m)
}

/// Dimension of the cusp forms of even weight k >= 4 at level one.
#[pyfunction]
fn dim_cusp_forms_level1(k: i64) -> PyResult<u64> {
    ea::dim_cusp_forms_level1(k).map_err(lib_err)
}

/// Kloosterman sum K_k(m, n, c) for weight k = two_k / 2, as a dict with
/// the complex value and its per-component rounding bound.
#[pyfunction]
#[pyo3(signature = (two_k, m, n, c, precision = 128))]
fn kloosterman(
    py: Python<'_>,
    two_k: i64,
    m: i64,
    n: i64,
    c: u64,
    precision: u32,
) -> PyResult<PyObject> {
    let kv = ea::kloosterman(two_k, m, n, c, precision).map_err(lib_err)?;
    let dict = PyDict::new_bound(py);
    dict.set_item("re", kv.re.to_f64())?;
    dict.set_item("im", kv.im.to_f64())?;
    dict.set_item("rounding_bound", kv.rounding_bound)?;
    dict.set_item("modulus", kv.modulus)?;
    dict.set_item("terms", kv.terms)?;
    Ok(dict.into_py(py))
}

// ---------------------------------------------------------------------------
// special
// ---------------------------------------------------------------------------

fn bounded_to_py(py: Python<'_>, value: f64, abs_error: f64) -> PyResult<PyObject> {
    let dict = PyDict::new_bound(py);
    dict.set_item("value", value)?;
    dict.set_item("abs_error", abs_error)?;
    Ok(dict.into_py(py))
}

/// Bessel J of order two_nu / 2 at x >= 0, with a rigorous absolute error.
#[pyfunction]
#[pyo3(signature = (two_nu, x, precision = 128))]
fn bessel_j(py: Python<'_>, two_nu: i64, x: f64, precision: u32) -> PyResult<PyObject> {
    let xf = Float::with_val(precision.max(53), x);
    let b = qpoincare::special::bessel_j(two_nu, &xf, precision).map_err(lib_err)?;
    bounded_to_py(py, b.value.to_f64(), b.abs_error)
}

/// Bessel I of order two_nu / 2 at x >= 0, with a rigorous absolute error.
#[pyfunction]
#[pyo3(signature = (two_nu, x, precision = 128))]
fn bessel_i(py: Python<'_>, two_nu: i64, x: f64, precision: u32) -> PyResult<PyObject> {
    let xf = Float::with_val(precision.max(53), x);
    let b = qpoincare::special::bessel_i(two_nu, &xf, precision).map_err(lib_err)?;
    bounded_to_py(py, b.value.to_f64(), b.abs_error)
}

/// Upper incomplete gamma Γ(s, x) for rational s > 0 (as a "p/q" string)
/// and x > 0, with a rigorous absolute error.
#[pyfunction]
#[pyo3(signature = (s, x, precision = 128))]
fn incomplete_gamma_upper(py: Python<'_>, s: &str, x: f64, precision: u32) -> PyResult<PyObject> {
    let s = ea::parse_rational(s).map_err(lib_err)?;
    let xf = Float::with_val(precision.max(53), x);
    let b = qpoincare::special::incomplete_gamma_upper(&s, &xf, precision).map_err(lib_err)?;
    bounded_to_py(py, b.value.to_f64(), b.abs_error)
}

// ---------------------------------------------------------------------------
// qseries
// ---------------------------------------------------------------------------

/// Normalized Eisenstein series E_s through q^order.
#[pyfunction]
fn eisenstein(py: Python<'_>, s: u32, order: i64) -> PyResult<PyObject> {
    series_to_py(py, &qs::eisenstein(s, order).map_err(lib_err)?)
}

/// The discriminant cusp form Δ = q ∏ (1 - q^n)^24 through q^order.
#[pyfunction]
fn delta(py: Python<'_>, order: i64) -> PyResult<PyObject> {
    series_to_py(py, &qs::delta(order).map_err(lib_err)?)
}

/// The modular j-invariant, starting q^{-1} + 744 + ...
#[pyfunction]
fn j_invariant(py: Python<'_>, order: i64) -> PyResult<PyObject> {
    series_to_py(py, &qs::j_invariant(order).map_err(lib_err)?)
}

/// The quotient E_s / Δ^r through q^order; its coefficients supply exact
/// relation coefficients.
#[pyfunction]
fn tau_coeffs(py: Python<'_>, r: u32, s: u32, order: i64) -> PyResult<PyObject> {
    series_to_py(py, &qs::tau_coeffs(r, s, order).map_err(lib_err)?)
}

/// The weight 2 - k form (E_s / Δ^r) F(j) for the admissible (s, r) of k,
/// where F has the given rational coefficients c0, c1, ... ("p/q" strings).
#[pyfunction]
fn weakly_holomorphic_level1(
    py: Python<'_>,
    k: i64,
    coeffs: Vec<String>,
    order: i64,
) -> PyResult<PyObject> {
    let f: Vec<Rational> = coeffs
        .iter()
        .map(|s| ea::parse_rational(s))
        .collect::<qpoincare::Result<_>>()
        .map_err(lib_err)?;
    series_to_py(py, &qs::weakly_holomorphic_level1(k, &f, order).map_err(lib_err)?)
}

/// The echelonized basis g_i = q^i + O(q^{d+1}) of the weight-k cusp forms
/// at level one, each through q^order.
#[pyfunction]
fn cusp_basis_level1(py: Python<'_>, k: i64, order: i64) -> PyResult<PyObject> {
    let basis = qs::cusp_basis_level1(k, order).map_err(lib_err)?;
    let list = PyList::empty_bound(py);
    for g in &basis {
        list.append(series_to_py(py, g)?)?;
    }
    Ok(list.into_py(py))
}

// ---------------------------------------------------------------------------
// poincare
// ---------------------------------------------------------------------------

fn profile(k: &str, level: u64) -> PyResult<WeightProfile> {
    let k = ea::parse_rational(k).map_err(lib_err)?;
    let two_k = k * Rational::from(2);
    if !two_k.is_integer() {
        return Err(PyValueError::new_err("k must lie in (1/2)Z"));
    }
    let two_k = two_k
        .numer()
        .to_i64()
        .ok_or_else(|| PyValueError::new_err("weight out of range"))?;
    WeightProfile::new(two_k, level).map_err(lib_err)
}

fn coeff_to_py(py: Python<'_>, r: &CoeffResult) -> PyResult<PyObject> {
    let (re, im) = r.value_f64();
    let dict = PyDict::new_bound(py);
    dict.set_item("re", re)?;
    dict.set_item("im", im)?;
    dict.set_item("tail_bound", r.tail_bound)?;
    dict.set_item("rounding_bound", r.rounding_bound)?;
    dict.set_item("total_bound", r.total_bound())?;
    dict.set_item("c_used", r.c_used)?;
    dict.set_item("heuristic", r.heuristic)?;
    dict.set_item("m", r.m)?;
    dict.set_item("n", r.n)?;
    Ok(dict.into_py(py))
}

fn numeric(precision: u32) -> NumericConfig {
    NumericConfig {
        precision_bits: precision,
        ..NumericConfig::default()
    }
}

/// Coefficient a(m, k, N; n) of the classical Poincare series, with a
/// certified error bound.  k is an exact rational string such as "24" or
/// "15/2" (half-integral weights need 4 | N).
#[pyfunction]
#[pyo3(signature = (m, k, n, level = 1, target_error = 1e-9, precision = 128))]
fn classical_coeff(
    py: Python<'_>,
    m: u64,
    k: &str,
    n: u64,
    level: u64,
    target_error: f64,
    precision: u32,
) -> PyResult<PyObject> {
    let w = profile(k, level)?;
    let r = pc::classical_coeff(&w, m, n, target_error, &numeric(precision)).map_err(lib_err)?;
    coeff_to_py(py, &r)
}

/// Coefficient b(-m, k, N; n), n >= 1, of the Maass-Poincare series.
#[pyfunction]
#[pyo3(signature = (m, k, n, level = 1, target_error = 1e-9, precision = 128))]
fn maass_coeff_positive(
    py: Python<'_>,
    m: u64,
    k: &str,
    n: u64,
    level: u64,
    target_error: f64,
    precision: u32,
) -> PyResult<PyObject> {
    let w = profile(k, level)?;
    let r =
        pc::maass_coeff_positive(&w, m, n, target_error, &numeric(precision)).map_err(lib_err)?;
    coeff_to_py(py, &r)
}

/// Constant-term coefficient b(-m, k, N; 0) of the Maass-Poincare series.
#[pyfunction]
#[pyo3(signature = (m, k, level = 1, target_error = 1e-9, precision = 128))]
fn maass_coeff_zero(
    py: Python<'_>,
    m: u64,
    k: &str,
    level: u64,
    target_error: f64,
    precision: u32,
) -> PyResult<PyObject> {
    let w = profile(k, level)?;
    let r = pc::maass_coeff_zero(&w, m, target_error, &numeric(precision)).map_err(lib_err)?;
    coeff_to_py(py, &r)
}

/// Coefficient b(-m, k, N; n), n <= -1, of the Maass-Poincare series.
#[pyfunction]
#[pyo3(signature = (m, k, n, level = 1, target_error = 1e-9, precision = 128))]
fn maass_coeff_negative(
    py: Python<'_>,
    m: u64,
    k: &str,
    n: i64,
    level: u64,
    target_error: f64,
    precision: u32,
) -> PyResult<PyObject> {
    let w = profile(k, level)?;
    let r =
        pc::maass_coeff_negative(&w, m, n, target_error, &numeric(precision)).map_err(lib_err)?;
    coeff_to_py(py, &r)
}

// ---------------------------------------------------------------------------
// relations
// ---------------------------------------------------------------------------

/// The distinguished relation among P(1..d_k+1, k, 1) from the generator
/// E_s / Δ^{d_k+1}.
#[pyfunction]
fn corollary_relation(py: Python<'_>, k: i64) -> PyResult<PyObject> {
    json_to_py(py, &rl::corollary_relation(k).map_err(lib_err)?.to_json())
}

/// All reduced relations with support in {1..d_k} plus one index <= mmax.
#[pyfunction]
fn find_relations(py: Python<'_>, k: i64, mmax: u64) -> PyResult<PyObject> {
    let rels = rl::find_relations(k, mmax).map_err(lib_err)?;
    let list = PyList::empty_bound(py);
    for rel in &rels {
        list.append(json_to_py(py, &rel.to_json())?)?;
    }
    Ok(list.into_py(py))
}

/// Realize a principal part {m: "p/q"} as a weight 2 - k weakly holomorphic
/// form at level one, or return None when it is obstructed.
#[pyfunction]
#[pyo3(signature = (k, principal_part, order = 64))]
fn solve_principal_part_level1(
    py: Python<'_>,
    k: i64,
    principal_part: &Bound<'_, PyAny>,
    order: i64,
) -> PyResult<PyObject> {
    let pp = PrincipalPart::from_json(&py_to_json(principal_part)?).map_err(lib_err)?;
    match rl::solve_principal_part_level1(k, &pp, order).map_err(lib_err)? {
        Some(f) => series_to_py(py, &f),
        None => Ok(py.None()),
    }
}

/// Exact test of a relation dict against the cusp-form pairing: true iff
/// the relation's principal part pairs to zero with every basis form.
#[pyfunction]
fn dual_pairing_oracle(relation: &Bound<'_, PyAny>) -> PyResult<bool> {
    rl::dual_pairing_oracle(&relation_from_py(relation)?).map_err(lib_err)
}

/// Recompute the coefficient columns n = 1..=nmax of a relation dict with
/// certified errors and judge the residuals; returns the full report.
#[pyfunction]
#[pyo3(signature = (relation, nmax = 5, target_error = 1e-9, precision = 128))]
fn verify_relation(
    py: Python<'_>,
    relation: &Bound<'_, PyAny>,
    nmax: u64,
    target_error: f64,
    precision: u32,
) -> PyResult<PyObject> {
    let rel = relation_from_py(relation)?;
    let report = rl::verify_relation_numeric(&rel, nmax, target_error, &numeric(precision))
        .map_err(lib_err)?;
    json_to_py(py, &report.to_json())
}

#[pymodule]
fn qpoincare_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(kronecker_symbol, m)?)?;
    m.add_function(wrap_pyfunction!(epsilon, m)?)?;
    m.add_function(wrap_pyfunction!(euler_phi, m)?)?;
    m.add_function(wrap_pyfunction!(mod_inv, m)?)?;
    m.add_function(wrap_pyfunction!(dim_cusp_forms_level1, m)?)?;
    m.add_function(wrap_pyfunction!(kloosterman, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_j, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_i, m)?)?;
    m.add_function(wrap_pyfunction!(incomplete_gamma_upper, m)?)?;
    m.add_function(wrap_pyfunction!(eisenstein, m)?)?;
    m.add_function(wrap_pyfunction!(delta, m)?)?;
    m.add_function(wrap_pyfunction!(j_invariant, m)?)?;
    m.add_function(wrap_pyfunction!(tau_coeffs, m)?)?;
    m.add_function(wrap_pyfunction!(weakly_holomorphic_level1, m)?)?;
    m.add_function(wrap_pyfunction!(cusp_basis_level1, m)?)?;
    m.add_function(wrap_pyfunction!(classical_coeff, m)?)?;
    m.add_function(wrap_pyfunction!(maass_coeff_positive, m)?)?;
    m.add_function(wrap_pyfunction!(maass_coeff_zero, m)?)?;
    m.add_function(wrap_pyfunction!(maass_coeff_negative, m)?)?;
    m.add_function(wrap_pyfunction!(corollary_relation, m)?)?;
    m.add_function(wrap_pyfunction!(find_relations, m)?)?;
    m.add_function(wrap_pyfunction!(solve_principal_part_level1, m)?)?;
    m.add_function(wrap_pyfunction!(dual_pairing_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(verify_relation, m)?)?;
    Ok(())
}
