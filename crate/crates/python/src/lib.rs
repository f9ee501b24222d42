//! Python bindings: `pymultinorm.Field`, `sha`, `decide` and `knot`.
//!
//! Results come back as plain dicts with the same layout as the CLI's JSON output.

use multinorm::sha_core::{compute_sha, find_cyclic_pivot, Limits};
use multinorm::{parse_rational, AbelianFieldQ, Error, Multinorm, Verdict};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::ModulusTooLarge { .. }
        | Error::GaloisTooLarge { .. }
        | Error::AmbientTooLarge { .. }
        | Error::Inconsistent(_)
        | Error::Mismatch { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_py<'py>(py: Python<'py>, value: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (value.to_string(),))
}

/// An abelian number field, given by a spec such as `quad:-3`, `cyclo:7` or `cyclosub:13:4`.
#[pyclass(name = "Field", frozen)]
struct PyField {
    inner: AbelianFieldQ,
}

#[pymethods]
impl PyField {
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        AbelianFieldQ::parse(spec).map(|inner| Self { inner }).map_err(to_py_err)
    }

    /// Field of degree `d` inside the `n`-th cyclotomic field, when it is unique.
    #[staticmethod]
    fn cyclotomic_subfield(n: u64, d: u64) -> PyResult<Self> {
        AbelianFieldQ::cyclotomic_subfield(n, d).map(|inner| Self { inner }).map_err(to_py_err)
    }

    #[getter]
    fn degree(&self) -> u64 {
        self.inner.degree()
    }

    #[getter]
    fn conductor(&self) -> u64 {
        self.inner.conductor()
    }

    fn is_cyclic(&self) -> bool {
        self.inner.is_cyclic()
    }

    fn compositum(&self, other: &PyField) -> Self {
        Self { inner: self.inner.compositum(&other.inner) }
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Field('{}')", self.inner)
    }

    fn __eq__(&self, other: &PyField) -> bool {
        self.inner == other.inner
    }
}

fn fields(factors: &[Bound<'_, PyAny>]) -> PyResult<Vec<AbelianFieldQ>> {
    if factors.is_empty() {
        return Err(PyValueError::new_err("at least one factor is required"));
    }
    factors
        .iter()
        .map(|f| match f.extract::<PyRef<'_, PyField>>() {
            Ok(field) => Ok(field.inner.clone()),
            Err(_) => AbelianFieldQ::parse(&f.extract::<String>()?).map_err(to_py_err),
        })
        .collect()
}

fn limits(modulus_limit: Option<u64>, ambient_limit: Option<u64>) -> Limits {
    let default = Limits::default();
    Limits {
        modulus_limit: modulus_limit.unwrap_or(default.modulus_limit),
        ambient_limit: ambient_limit.unwrap_or(default.ambient_limit),
    }
}

fn multinorm(
    factors: &[Bound<'_, PyAny>],
    pivot: Option<usize>,
    modulus_limit: Option<u64>,
    ambient_limit: Option<u64>,
) -> PyResult<Multinorm> {
    Multinorm::new(&fields(factors)?, pivot, &limits(modulus_limit, ambient_limit)).map_err(to_py_err)
}

/// Ш(L) for the étale algebra with the given factors, as a dict.
#[pyfunction]
#[pyo3(signature = (factors, pivot=None, modulus_limit=None, ambient_limit=None))]
fn sha<'py>(
    py: Python<'py>,
    factors: Vec<Bound<'py, PyAny>>,
    pivot: Option<usize>,
    modulus_limit: Option<u64>,
    ambient_limit: Option<u64>,
) -> PyResult<Bound<'py, PyAny>> {
    let l = fields(&factors)?;
    let pivot = match pivot {
        Some(i) => i,
        None => find_cyclic_pivot(&l).map_err(to_py_err)?,
    };
    let sha = compute_sha(&l, pivot, &limits(modulus_limit, ambient_limit)).map_err(to_py_err)?;
    to_py(py, &sha.to_json())
}

/// Decide `N_{L/Q}(t) = c`; `c` is an int, a `Fraction` or a string such as `"7/3"`.
#[pyfunction]
#[pyo3(signature = (factors, c, pivot=None, modulus_limit=None, ambient_limit=None))]
fn decide<'py>(
    py: Python<'py>,
    factors: Vec<Bound<'py, PyAny>>,
    c: Bound<'py, PyAny>,
    pivot: Option<usize>,
    modulus_limit: Option<u64>,
    ambient_limit: Option<u64>,
) -> PyResult<Bound<'py, PyAny>> {
    let mn = multinorm(&factors, pivot, modulus_limit, ambient_limit)?;
    let c = parse_rational(&c.str()?.to_string()).map_err(to_py_err)?;
    let verdict = mn.decide(&c).map_err(to_py_err)?;
    let mut out = verdict.to_json();
    out["c"] = serde_json::Value::String(c.to_string());
    if let Verdict::Obstructed(o) = &verdict {
        out["character"] = serde_json::json!(o.character(mn.sha()));
    }
    to_py(py, &out)
}

/// Representatives of the knot group found among rationals of height at most `bound`.
#[pyfunction]
#[pyo3(signature = (factors, bound=100, pivot=None, modulus_limit=None, ambient_limit=None))]
fn knot<'py>(
    py: Python<'py>,
    factors: Vec<Bound<'py, PyAny>>,
    bound: u64,
    pivot: Option<usize>,
    modulus_limit: Option<u64>,
    ambient_limit: Option<u64>,
) -> PyResult<Bound<'py, PyAny>> {
    let mn = multinorm(&factors, pivot, modulus_limit, ambient_limit)?;
    let knot = mn.knot_group(bound).map_err(to_py_err)?;
    to_py(py, &serde_json::to_value(&knot).map_err(|e| PyRuntimeError::new_err(e.to_string()))?)
}

#[pymodule]
fn pymultinorm(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyField>()?;
    m.add_function(wrap_pyfunction!(sha, m)?)?;
    m.add_function(wrap_pyfunction!(decide, m)?)?;
    m.add_function(wrap_pyfunction!(knot, m)?)?;
    Ok(())
}
