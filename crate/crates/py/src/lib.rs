//! Python bindings: the rational-function field, tableaux and charges, K-matrices,
//! identity checks, the K-class transform and the polarization solver.
//!
//! Structured results (reports, verdicts, certificates) cross over as plain
//! dicts and lists with the same keys as the CLI's JSON.

use pyo3::exceptions::{PyValueError, PyZeroDivisionError};
use pyo3::prelude::*;
use pyo3::types::{PyBool, PyDict, PyList, PyString};
use serde::Serialize;
use serde_json::Value;

use tyangian::dynkin::{cartan_matrix, invast, longest_word, DynkinType, TypeSign};
use tyangian::kclass::longest_reflection_transform;
use tyangian::polarization::{self, build_instance, check_choice, solve_with, Choice, Label, Point};
use tyangian::ratfield::{RatFunc, Var, VerifyMode};
use tyangian::relations::{check_reflection, default_mode, Scenario};
use tyangian::rkmat::{FlagPlacement, KMatrixKind};
use tyangian::tableaux::{self, InstantonKind};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse<T: std::str::FromStr>(s: &str) -> PyResult<T>
where
    T::Err: std::fmt::Display,
{
    s.parse().map_err(value_err)
}

fn json_to_py(py: Python<'_>, v: &Value) -> PyResult<Py<PyAny>> {
    Ok(match v {
        Value::Null => py.None(),
        Value::Bool(b) => PyBool::new(py, *b).to_owned().into_any().unbind(),
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => i.into_pyobject(py)?.into_any().unbind(),
            (None, Some(u)) => u.into_pyobject(py)?.into_any().unbind(),
            _ => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any().unbind(),
        },
        Value::String(s) => PyString::new(py, s).into_any().unbind(),
        Value::Array(xs) => {
            let items = xs.iter().map(|x| json_to_py(py, x)).collect::<PyResult<Vec<_>>>()?;
            PyList::new(py, items)?.into_any().unbind()
        }
        Value::Object(m) => {
            let d = PyDict::new(py);
            for (k, x) in m {
                d.set_item(k, json_to_py(py, x)?)?;
            }
            d.into_any().unbind()
        }
    })
}

fn to_py(py: Python<'_>, v: impl Serialize) -> PyResult<Py<PyAny>> {
    json_to_py(py, &serde_json::to_value(v).map_err(value_err)?)
}

/// An element of Q(ℏ, u, u1, …) in canonical form.
#[pyclass(name = "RatFunc", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyRatFunc(RatFunc);

#[pymethods]
impl PyRatFunc {
    #[new]
    fn new(expr: &str) -> PyResult<Self> {
        parse(expr).map(PyRatFunc)
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn __add__(&self, o: &Self) -> Self {
        PyRatFunc(&self.0 + &o.0)
    }

    fn __sub__(&self, o: &Self) -> Self {
        PyRatFunc(&self.0 - &o.0)
    }

    fn __mul__(&self, o: &Self) -> Self {
        PyRatFunc(&self.0 * &o.0)
    }

    fn __truediv__(&self, o: &Self) -> PyResult<Self> {
        self.0.checked_div(&o.0).map(PyRatFunc).map_err(|e| PyZeroDivisionError::new_err(e.to_string()))
    }

    fn __neg__(&self) -> Self {
        PyRatFunc(-&self.0)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("RatFunc('{}')", self.0)
    }
}

/// A fixed-point tableau; rows are keyed by signed index.
#[pyclass(name = "Tableau", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyTableau(tableaux::Tableau);

#[pymethods]
impl PyTableau {
    /// The tableau with the given first entries on rows 1, 2, …; negative rows follow by symmetry.
    #[staticmethod]
    fn from_positive_rows(ell: u8, rows: Vec<u8>) -> Self {
        PyTableau(tableaux::Tableau::from_positive_rows(ell, &rows))
    }

    #[getter]
    fn ell(&self) -> u8 {
        self.0.ell
    }

    fn rows(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.0.rows)
    }

    fn positive_rows(&self) -> Vec<u8> {
        self.0.positive_rows()
    }

    /// Charge statistics: `l`, `lSp`, `lSo`, `diagonal`.
    fn charges(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, tableaux::charges(&self.0).map_err(value_err)?)
    }

    fn tangent_dimension(&self, kind: &str) -> PyResult<usize> {
        Ok(tableaux::tangent_dimension(&self.0, parse(kind)?))
    }

    fn __repr__(&self) -> String {
        format!("Tableau(ell={}, rows={:?})", self.0.ell, self.0.rows)
    }
}

/// Every fixed point for the given `ell` and `w1`.
#[pyfunction]
fn enumerate_instanton_tableaux(ell: u8, w1: usize) -> Vec<PyTableau> {
    tableaux::enumerate_instanton_tableaux(ell, w1).into_iter().map(PyTableau).collect()
}

/// Betti numbers `[b0, b1, …]` of the fixed locus; `kind` is "sp" or "so".
#[pyfunction]
fn poincare_polynomial(kind: &str, ell: u8, w1: usize) -> PyResult<Vec<u64>> {
    let kind: InstantonKind = parse(kind)?;
    Ok(tableaux::poincare_polynomial(kind, ell, w1).map_err(value_err)?.0)
}

/// Cartan matrix, Coxeter number, `invast` and a reduced word for the longest element.
#[pyfunction]
fn dynkin_info(py: Python<'_>, dynkin_type: &str) -> PyResult<Py<PyAny>> {
    let t: DynkinType = parse(dynkin_type)?;
    let c = cartan_matrix(t);
    to_py(
        py,
        serde_json::json!({
            "cartan": c.cartan,
            "coxeter": c.coxeter_number,
            "invast": invast(t),
            "longestWord": longest_word(t),
        }),
    )
}

/// `[(vertex, target, coefficient)]` of the composite reflection transform.
#[pyfunction]
fn longest_reflection_transform_of(dynkin_type: &str) -> PyResult<Vec<(usize, usize, String)>> {
    let entries = longest_reflection_transform(parse(dynkin_type)?).map_err(value_err)?;
    Ok(entries.into_iter().map(|e| (e.vertex, e.target, e.coefficient.to_string())).collect())
}

fn scenario(kind: &str, ell: usize, placement: &str) -> PyResult<Scenario> {
    let placement = match placement {
        "anti-diagonal" => FlagPlacement::AntiDiagonal,
        "diagonal" => FlagPlacement::Diagonal,
        p => return Err(PyValueError::new_err(format!("unknown placement '{p}'"))),
    };
    Ok(Scenario::new(parse::<KMatrixKind>(kind)?, ell).with_placement(placement))
}

/// The K-matrix of `kind` in the spectral variable `u`, as rows of `RatFunc`.
#[pyfunction]
#[pyo3(signature = (kind, ell, placement = "anti-diagonal"))]
fn k_matrix(kind: &str, ell: usize, placement: &str) -> PyResult<Vec<Vec<PyRatFunc>>> {
    let k = scenario(kind, ell, placement)?.k(&RatFunc::var(Var::U)).map_err(value_err)?;
    Ok(k.to_dense().into_iter().map(|r| r.into_iter().map(PyRatFunc).collect()).collect())
}

/// The reflection equation for one scenario; returns the verdict dict.
#[pyfunction]
#[pyo3(signature = (kind, ell, placement = "anti-diagonal", mode = None))]
fn verify_reflection(py: Python<'_>, kind: &str, ell: usize, placement: &str, mode: Option<&str>) -> PyResult<Py<PyAny>> {
    let s = scenario(kind, ell, placement)?;
    let mode = match mode {
        Some(m) => parse::<VerifyMode>(m)?,
        None => default_mode(ell * ell),
    };
    let v = py.detach(|| check_reflection(&s, mode)).map_err(value_err)?;
    to_py(py, v)
}

/// The polarization problem for a sign ("+"/"-") and `ell`.
#[pyclass(name = "PolarizationInstance", frozen)]
struct PyPolarization(polarization::PolarizationInstance);

#[pymethods]
impl PyPolarization {
    #[new]
    fn new(sign: &str, ell: u8) -> PyResult<Self> {
        let sign: TypeSign = parse(sign)?;
        build_instance(sign, ell).map(PyPolarization).map_err(value_err)
    }

    /// SAT with a witness, or UNSAT with a certificate.
    #[pyo3(signature = (strategy = None))]
    fn solve(&self, py: Python<'_>, strategy: Option<&str>) -> PyResult<Py<PyAny>> {
        let st = match strategy {
            Some(s) => parse(s)?,
            None => polarization::Strategy::default_for(self.0.ell),
        };
        let r = py.detach(|| solve_with(&self.0, st));
        to_py(py, r)
    }

    /// Checks a choice given as `[(s, t, "C(a,b)"), …]`, one label per dual pair.
    fn check(&self, py: Python<'_>, selected: Vec<(u8, u8, String)>) -> PyResult<Py<PyAny>> {
        let sel = selected
            .into_iter()
            .map(|(s, t, l)| Ok((Point(s, t), parse::<Label>(&l)?)))
            .collect::<PyResult<Vec<_>>>()?;
        let c = Choice::from_selected(&self.0, sel).map_err(value_err)?;
        to_py(py, check_choice(&self.0, &c).map_err(value_err)?)
    }

    fn tangent_dimension(&self, s: u8, t: u8) -> usize {
        self.0.tangent_dimension(Point(s, t))
    }
}

/// Runs the acceptance criteria; one dict per criterion.
#[pyfunction]
fn run_acceptance(py: Python<'_>) -> PyResult<Py<PyAny>> {
    let rs = py.detach(tyangian::acceptance::run_all);
    to_py(py, rs)
}

#[pymodule]
pub fn tyangian_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRatFunc>()?;
    m.add_class::<PyTableau>()?;
    m.add_class::<PyPolarization>()?;
    m.add_function(wrap_pyfunction!(enumerate_instanton_tableaux, m)?)?;
    m.add_function(wrap_pyfunction!(poincare_polynomial, m)?)?;
    m.add_function(wrap_pyfunction!(dynkin_info, m)?)?;
    m.add_function(wrap_pyfunction!(longest_reflection_transform_of, m)?)?;
    m.add_function(wrap_pyfunction!(k_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(verify_reflection, m)?)?;
    m.add_function(wrap_pyfunction!(run_acceptance, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
