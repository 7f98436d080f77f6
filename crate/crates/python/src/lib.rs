//! Python bindings: an `Operator` class over Gaussian-rational Weyl elements
//! and module-level functions for the constructions in `pso-core`.

use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use pso_core::classify;
use pso_core::exact::{GaussianRational, Poly, Rational, Var};
use pso_core::fourier::{psi, psi_inverse};
use pso_core::hermite::hermite as hermite_poly;
use pso_core::ore::{intersection_operator, lclm_weyl, mixture_stein_operator, semicircle_annihilator, MixtureSpec};
use pso_core::pso::{basis_decompose, divide_by_g, is_member as member_test};
use pso_core::syntax::{parse, parse_poly};
use pso_core::verify::{parse_rational, suite_table, DistributionSpec};
use pso_core::{Error, WeylElement};

type C = GaussianRational;

fn engine_err(e: Error) -> PyErr {
    match e {
        Error::InvalidParameter(_)
        | Error::DuplicateVariance(_)
        | Error::VarMismatch { .. }
        | Error::WrongVariable { .. } => PyValueError::new_err(e.to_string()),
        _ => PyArithmeticError::new_err(e.to_string()),
    }
}

fn variable(name: &str) -> PyResult<Var> {
    match name {
        "x" => Ok(Var::X),
        "t" => Ok(Var::T),
        _ => Err(PyValueError::new_err(format!("variable must be 'x' or 't', got {name:?}"))),
    }
}

/// Accepts int, `fractions.Fraction`, or a string such as `"3/4"` or `"0.5"`.
fn rational(obj: &Bound<'_, PyAny>) -> PyResult<Rational> {
    parse_rational(&obj.str()?.to_cow()?).map_err(engine_err)
}

fn fraction<'py>(py: Python<'py>, r: &Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((format!("{}/{}", r.numer(), r.denom()),))
}

/// A Weyl-algebra element in normal order, in `x` (space) or `t` (Fourier).
#[pyclass(module = "pso_py", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
pub struct Operator {
    inner: WeylElement<C>,
}

impl Operator {
    fn real(&self) -> PyResult<WeylElement<Rational>> {
        self.inner.to_real().map_err(engine_err)
    }

    fn from_real(op: WeylElement<Rational>) -> Self {
        Operator { inner: op.to_complex() }
    }
}

#[pymethods]
impl Operator {
    #[new]
    #[pyo3(signature = (src, variable = "x"))]
    fn new(src: &str, variable: &str) -> PyResult<Self> {
        let var = self::variable(variable)?;
        parse(src, var).map(|inner| Operator { inner }).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[getter]
    fn variable(&self) -> &'static str {
        self.inner.var().name()
    }

    /// Order in `D`; `None` for the zero operator.
    #[getter]
    fn order(&self) -> Option<usize> {
        self.inner.d_order()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Operator({:?}, variable={:?})", self.inner.to_string(), self.inner.var().name())
    }

    fn __add__(&self, other: &Operator) -> PyResult<Operator> {
        self.inner.checked_add(&other.inner).map(|inner| Operator { inner }).map_err(engine_err)
    }

    fn __sub__(&self, other: &Operator) -> PyResult<Operator> {
        self.inner.checked_sub(&other.inner).map(|inner| Operator { inner }).map_err(engine_err)
    }

    fn __mul__(&self, other: &Operator) -> PyResult<Operator> {
        self.inner.checked_mul(&other.inner).map(|inner| Operator { inner }).map_err(engine_err)
    }

    fn __neg__(&self) -> Operator {
        Operator { inner: -&self.inner }
    }

    /// Apply to a polynomial given as text in the same variable.
    fn apply(&self, poly: &str) -> PyResult<String> {
        let f: Poly<C> = parse_poly(poly, self.inner.var()).map_err(|e| PyValueError::new_err(e.to_string()))?;
        self.inner.apply(&f).map(|p| p.to_string()).map_err(engine_err)
    }

    fn is_member(&self) -> PyResult<bool> {
        Ok(member_test(&self.real()?).map_err(engine_err)?.is_member)
    }

    /// Coefficients `{(k, t): Fraction}` on `H_k D^t - H_{k+t}`.
    fn basis<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let dec = basis_decompose(&self.real()?).map_err(engine_err)?;
        let out = PyDict::new(py);
        for ((k, t), c) in dec.iter() {
            out.set_item((k, t), fraction(py, c)?)?;
        }
        Ok(out)
    }

    /// `(cofactor, remainder)` with `self = (D - x) * cofactor + remainder`.
    fn factor(&self) -> PyResult<(Operator, String)> {
        let g = divide_by_g(&self.real()?).map_err(engine_err)?;
        Ok((Operator::from_real(g.cofactor), g.remainder.to_string()))
    }

    /// Fourier image `x -> i D`, `D -> i t` (or its inverse for `t` operators).
    fn fourier(&self) -> PyResult<Operator> {
        let image = match self.inner.var() {
            Var::X => psi(&self.inner),
            Var::T => psi_inverse(&self.inner),
        };
        image.map(|inner| Operator { inner }).map_err(engine_err)
    }
}

#[pyfunction]
fn hermite(n: usize) -> String {
    hermite_poly(n).to_string()
}

#[pyfunction]
fn lclm(a: &Operator, b: &Operator) -> PyResult<Operator> {
    lclm_weyl(&a.inner, &b.inner).map(|inner| Operator { inner }).map_err(engine_err)
}

/// Stein operator shared by all centred Gaussian mixtures with the given
/// component variances; `weights` default to uniform.
#[pyfunction]
#[pyo3(name = "mixture_stein_operator", signature = (variances, weights = None))]
fn mixture_stein_operator_py(
    variances: Vec<Bound<'_, PyAny>>,
    weights: Option<Vec<Bound<'_, PyAny>>>,
) -> PyResult<Operator> {
    let variances = variances.iter().map(rational).collect::<PyResult<Vec<_>>>()?;
    let spec = match weights {
        Some(w) => MixtureSpec::new(variances, w.iter().map(rational).collect::<PyResult<Vec<_>>>()?),
        None => MixtureSpec::with_equal_weights(variances),
    }
    .map_err(engine_err)?;
    mixture_stein_operator(&spec).map(Operator::from_real).map_err(engine_err)
}

/// Operator annihilating polynomial expectations under both N(0, 1) and the
/// semicircle law of the given radius.
#[pyfunction]
#[pyo3(signature = (radius = None))]
fn intersection(radius: Option<Bound<'_, PyAny>>) -> PyResult<Operator> {
    let r = match radius {
        Some(r) => rational(&r)?,
        None => Rational::from_integer(1.into()),
    };
    if r <= Rational::from_integer(0.into()) {
        return Err(PyValueError::new_err("radius must be positive"));
    }
    intersection_operator(&semicircle_annihilator(&r)).map(Operator::from_real).map_err(engine_err)
}

/// `{"m", "characterising", "branches": [{"j", "exponent", "behaviour"}]}`.
#[pyfunction]
#[pyo3(name = "classify")]
fn classify_py<'py>(py: Python<'py>, m: usize) -> PyResult<Bound<'py, PyDict>> {
    let report = classify::classify(m).map_err(engine_err)?;
    let out = PyDict::new(py);
    out.set_item("m", report.m)?;
    out.set_item("characterising", report.characterising)?;
    let mut branches = Vec::new();
    for b in &report.branches {
        let d = PyDict::new(py);
        d.set_item("j", b.j)?;
        d.set_item("exponent", (b.exponent.0, b.exponent.1))?;
        d.set_item("behaviour", b.behaviour.name())?;
        branches.push(d);
    }
    out.set_item("branches", branches)?;
    Ok(out)
}

/// Quadrature estimates of `E[S f]` over the built-in test suite, as
/// `[(function, value)]`.
#[pyfunction]
#[pyo3(signature = (op, dist = "gaussian(mu=0,sigma2=1)", nodes = 64))]
fn verify(op: &Operator, dist: &str, nodes: usize) -> PyResult<Vec<(String, f64)>> {
    let dist: DistributionSpec = dist.parse().map_err(engine_err)?;
    let rows = suite_table(&op.real()?, &dist, nodes).map_err(engine_err)?;
    Ok(rows.into_iter().map(|r| (r.function, r.estimate.value)).collect())
}

#[pymodule]
fn pso_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Operator>()?;
    m.add_function(wrap_pyfunction!(hermite, m)?)?;
    m.add_function(wrap_pyfunction!(lclm, m)?)?;
    m.add_function(wrap_pyfunction!(mixture_stein_operator_py, m)?)?;
    m.add_function(wrap_pyfunction!(intersection, m)?)?;
    m.add_function(wrap_pyfunction!(classify_py, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
