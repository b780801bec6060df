//! Python bindings for nilflow.
//!
//! Indices are 1-based on the Python side, matching the JSON formats.
//! Composite results come back as plain dicts and lists.

use std::str::FromStr;

use nilflow::catalog;
use nilflow::curvature::{exact_certificate, DEFAULT_SOLITON_TOL};
use nilflow::projective::{self, pu_kernel};
use nilflow::{
    BracketEntry, BracketSpec, DiagonalMetric, Error, FlowState, IntegratorConfig, Provenance,
    Rational,
};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyFloat, PyInt, PyString};
use serde::Serialize;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py, T: Serialize + ?Sized>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(err)?;
    py.import("json")?.call_method1("loads", (text,))
}

fn parse_alpha(value: &Bound<'_, PyAny>) -> PyResult<(f64, Option<Rational>)> {
    if value.is_instance_of::<PyInt>() {
        let v: i64 = value.extract()?;
        return Ok((v as f64, Some(Rational::from_integer(v.into()))));
    }
    if value.is_instance_of::<PyString>() {
        let text: String = value.extract()?;
        let r = Rational::from_str(text.trim()).map_err(|_| err(format!("bad rational {text:?}")))?;
        return Ok((0.0, Some(r)));
    }
    if value.is_instance_of::<PyFloat>() {
        return Ok((value.extract()?, None));
    }
    Err(err("structure constant must be int, float or a \"p/q\" string"))
}

/// A nilpotent Lie algebra given by structure constants over a nice basis.
#[pyclass(name = "Algebra", module = "nilflow", frozen)]
struct PyAlgebra {
    spec: BracketSpec,
    default_metric: Option<DiagonalMetric>,
}

impl PyAlgebra {
    fn metric(&self, q: Option<Vec<f64>>) -> PyResult<DiagonalMetric> {
        let metric = match q {
            Some(q) => DiagonalMetric::new(q).map_err(err)?,
            None => self
                .default_metric
                .clone()
                .unwrap_or_else(|| DiagonalMetric::ones(self.spec.dim())),
        };
        if metric.dim() != self.spec.dim() {
            return Err(err(Error::DimensionMismatch { expected: self.spec.dim(), found: metric.dim() }));
        }
        Ok(metric)
    }
}

#[pymethods]
impl PyAlgebra {
    /// `brackets` holds `(j, k, l, alpha)` with `j < k`, meaning
    /// `[x_j, x_k] = alpha x_l + ...`. Integer and `"p/q"` constants are exact.
    #[new]
    fn new(dim: usize, brackets: Vec<(usize, usize, usize, Bound<'_, PyAny>)>) -> PyResult<Self> {
        let mut entries = Vec::with_capacity(brackets.len());
        for (j, k, l, alpha) in brackets {
            if j == 0 || k == 0 || l == 0 {
                return Err(err(Error::IndexOutOfRange { index: 0, dim }));
            }
            entries.push(match parse_alpha(&alpha)? {
                (_, Some(r)) => BracketEntry::rational(j - 1, k - 1, l - 1, r),
                (x, None) => BracketEntry::real(j - 1, k - 1, l - 1, x),
            });
        }
        let spec = BracketSpec::new(dim, entries).map_err(err)?;
        Ok(Self { spec, default_metric: None })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let spec = nilflow::io::parse_algebra(text).map_err(err)?;
        Ok(Self { spec, default_metric: None })
    }

    fn to_json(&self) -> String {
        nilflow::io::export_algebra(&self.spec)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.spec.dim()
    }

    /// `(j, k, l, alpha)` entries in dictionary order.
    fn brackets(&self) -> Vec<(usize, usize, usize, f64)> {
        self.spec
            .entries()
            .iter()
            .map(|e| {
                let (j, k, l) = e.triple.one_based();
                (j, k, l, e.alpha)
            })
            .collect()
    }

    /// Catalog soliton metric, when the algebra came from the catalog.
    fn soliton_metric(&self) -> Option<Vec<f64>> {
        self.default_metric.as_ref().map(|m| m.values().to_vec())
    }

    fn validate<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &nilflow::validate_jacobi(&self.spec))
    }

    fn is_valid(&self) -> bool {
        nilflow::validate_jacobi(&self.spec).passed() && nilflow::nilpotency_class(&self.spec).is_ok()
    }

    fn nilpotency_class(&self) -> PyResult<usize> {
        nilflow::nilpotency_class(&self.spec).map_err(err)
    }

    fn triples(&self) -> Vec<(usize, usize, usize)> {
        self.spec.triples().iter().map(|t| t.one_based()).collect()
    }

    fn root_matrix(&self) -> PyResult<Vec<Vec<i64>>> {
        Ok(nilflow::root_system(&self.spec).map_err(err)?.root_matrix().to_vec())
    }

    fn gram(&self) -> PyResult<Vec<Vec<i64>>> {
        Ok(nilflow::root_system(&self.spec).map_err(err)?.gram().to_vec())
    }

    #[pyo3(signature = (q=None))]
    fn structure_vector(&self, q: Option<Vec<f64>>) -> PyResult<Vec<f64>> {
        let metric = self.metric(q)?;
        Ok(nilflow::structure_vector(&self.spec, &metric).map_err(err)?.0)
    }

    #[pyo3(signature = (q=None))]
    fn ricci_vector(&self, q: Option<Vec<f64>>) -> PyResult<Vec<f64>> {
        let metric = self.metric(q)?;
        let roots = nilflow::root_system(&self.spec).map_err(err)?;
        let a = nilflow::structure_vector(&self.spec, &metric).map_err(err)?;
        Ok(nilflow::ricci_vector(&roots, &a.0))
    }

    /// Full Ricci form in the orthonormal basis, computed from `ad` directly.
    #[pyo3(signature = (q=None))]
    fn ricci_form(&self, q: Option<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
        let metric = self.metric(q)?;
        Ok(nilflow::ricci_form_oracle(&self.spec, &metric).map_err(err)?.ricci_form)
    }

    fn is_stably_ricci_diagonal<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &nilflow::is_stably_ricci_diagonal(&self.spec))
    }

    /// Soliton certificate of the metric, or `None`.
    #[pyo3(signature = (q=None, tol=DEFAULT_SOLITON_TOL))]
    fn soliton_test<'py>(
        &self,
        py: Python<'py>,
        q: Option<Vec<f64>>,
        tol: f64,
    ) -> PyResult<Option<Bound<'py, PyAny>>> {
        let metric = self.metric(q)?;
        let roots = nilflow::root_system(&self.spec).map_err(err)?;
        let a = nilflow::structure_vector(&self.spec, &metric).map_err(err)?;
        nilflow::soliton_test(&roots, &a, tol).map(|c| to_py(py, &c)).transpose()
    }

    /// Exact soliton data as `"p/q"` strings. Needs rational structure
    /// constants; float metric entries are converted exactly.
    #[pyo3(signature = (q=None))]
    fn exact_soliton<'py>(&self, py: Python<'py>, q: Option<Vec<f64>>) -> PyResult<Option<Bound<'py, PyAny>>> {
        let metric = self.metric(q)?;
        let exact = match metric.exact_values() {
            Some(v) => v.to_vec(),
            None => metric.values().iter().map(|&x| Rational::from_float(x).expect("finite")).collect(),
        };
        let metric = DiagonalMetric::exact(exact).map_err(err)?;
        let Some(cert) = exact_certificate(&self.spec, &metric).map_err(err)? else {
            return Ok(None);
        };
        let show = |v: &[Rational]| v.iter().map(|r| r.to_string()).collect::<Vec<_>>();
        let doc = serde_json::json!({
            "beta": cert.beta.to_string(),
            "a_star": show(&cert.a_star),
            "ricci_vector": show(&cert.ricci_vector),
            "derivation_diag": show(&cert.derivation_diag),
        });
        to_py(py, &doc).map(Some)
    }

    /// Soliton metric search; `None` when `U v = lambda 1` has no positive solution.
    #[pyo3(signature = (tol=DEFAULT_SOLITON_TOL))]
    fn find_soliton_metric<'py>(&self, py: Python<'py>, tol: f64) -> PyResult<Option<Bound<'py, PyAny>>> {
        match nilflow::find_soliton_metric(&self.spec, tol) {
            Ok(found) => to_py(py, &found).map(Some),
            Err(Error::NoPositiveSolution { .. }) => Ok(None),
            Err(e) => Err(err(e)),
        }
    }

    /// Exponent vectors `d` with `q^d` constant along the Ricci flow.
    fn conserved_monomials(&self) -> PyResult<Vec<Vec<i64>>> {
        Ok(nilflow::conserved_monomials(&nilflow::root_system(&self.spec).map_err(err)?))
    }

    /// Ricci flow of the diagonal metric, coupled with the bracket flow.
    /// Returns `{"t", "q", "a", "invariants", "invariant_drift", "step_stats"}`.
    #[pyo3(signature = (q=None, t_end=10.0, samples=100, rtol=1e-9, atol=1e-12))]
    fn integrate<'py>(
        &self,
        py: Python<'py>,
        q: Option<Vec<f64>>,
        t_end: f64,
        samples: usize,
        rtol: f64,
        atol: f64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let metric = self.metric(q)?;
        let roots = nilflow::root_system(&self.spec).map_err(err)?;
        let a = nilflow::structure_vector(&self.spec, &metric).map_err(err)?;
        let state = FlowState::new(0.0, metric.values().to_vec(), a.0).map_err(err)?;
        let cfg = IntegratorConfig { rtol, atol, samples, ..IntegratorConfig::with_t_end(t_end) };
        let traj = py
            .detach(|| nilflow::integrate(&roots, &state, &cfg))
            .map_err(err)?;
        let doc = serde_json::json!({
            "t": traj.samples.iter().map(|s| s.t).collect::<Vec<_>>(),
            "q": traj.samples.iter().map(|s| &s.q).collect::<Vec<_>>(),
            "a": traj.samples.iter().map(|s| &s.a).collect::<Vec<_>>(),
            "invariants": traj.invariants,
            "invariant_drift": traj.invariant_drift,
            "step_stats": traj.step_stats,
        });
        to_py(py, &doc)
    }

    fn projective(&self) -> PyResult<PyProjective> {
        let roots = nilflow::root_system(&self.spec).map_err(err)?;
        Ok(PyProjective { sys: nilflow::ProjectiveSystem::from_roots(&roots).map_err(err)? })
    }

    fn __repr__(&self) -> String {
        format!("Algebra(dim={}, brackets={})", self.spec.dim(), self.spec.entries().len())
    }
}

/// Projectivized bracket flow `s = a / a_m` on the chart `a_m = 1`.
#[pyclass(name = "ProjectiveSystem", module = "nilflow", frozen)]
struct PyProjective {
    sys: nilflow::ProjectiveSystem,
}

#[pymethods]
impl PyProjective {
    /// Builds a system from a Gram matrix alone.
    #[new]
    fn new(gram: Vec<Vec<i64>>) -> PyResult<Self> {
        Ok(Self { sys: nilflow::ProjectiveSystem::new(gram, Provenance::GramOnly).map_err(err)? })
    }

    #[getter]
    fn m(&self) -> usize {
        self.sys.m()
    }

    #[getter]
    fn provenance(&self) -> &'static str {
        match self.sys.provenance() {
            Provenance::Algebra => "algebra",
            Provenance::GramOnly => "gram-only",
        }
    }

    fn gram(&self) -> Vec<Vec<i64>> {
        self.sys.gram().to_vec()
    }

    fn eta(&self, s: Vec<f64>) -> PyResult<Vec<f64>> {
        if s.len() + 1 != self.sys.m() {
            return Err(err(Error::DimensionMismatch { expected: self.sys.m() - 1, found: s.len() }));
        }
        Ok(projective::eta(&self.sys, &s))
    }

    /// Integer basis of `ker PU`.
    fn kernel(&self) -> Vec<Vec<i64>> {
        pu_kernel(&self.sys)
    }

    /// Integrates in time-changed time. Returns `{"times", "states",
    /// "converged", "nearest", "step_stats"}`.
    #[pyo3(signature = (s0, t_end=20.0, samples=100, rtol=1e-9, atol=1e-12))]
    fn integrate<'py>(
        &self,
        py: Python<'py>,
        s0: Vec<f64>,
        t_end: f64,
        samples: usize,
        rtol: f64,
        atol: f64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let cfg = IntegratorConfig { rtol, atol, samples, ..IntegratorConfig::with_t_end(t_end) };
        let traj = py
            .detach(|| projective::integrate_projective(&self.sys, &s0, &cfg))
            .map_err(err)?;
        to_py(py, &traj)
    }

    #[pyo3(signature = (max_m=projective::DEFAULT_MAX_M))]
    fn equilibria<'py>(&self, py: Python<'py>, max_m: usize) -> PyResult<Bound<'py, PyAny>> {
        let set = py.detach(|| projective::equilibria(&self.sys, max_m)).map_err(err)?;
        to_py(py, &set.points)
    }

    fn __repr__(&self) -> String {
        format!("ProjectiveSystem(m={}, provenance={:?})", self.sys.m(), self.provenance())
    }
}

/// Names of the built-in catalog entries.
#[pyfunction]
fn catalog_names() -> Vec<&'static str> {
    catalog::list().into_iter().map(|l| l.name).collect()
}

/// Algebra for a catalog entry, carrying its soliton metric as the default.
#[pyfunction]
fn catalog_algebra(name: &str) -> PyResult<PyAlgebra> {
    let entry = catalog::get(name).map_err(err)?;
    let spec = entry.require_spec().map_err(err)?.clone();
    Ok(PyAlgebra { spec, default_metric: entry.soliton_metric })
}

/// Projective system for any catalog entry, including Gram-only ones.
#[pyfunction]
fn catalog_projective(name: &str) -> PyResult<PyProjective> {
    let entry = catalog::get(name).map_err(err)?;
    let prov = if entry.is_gram_only() { Provenance::GramOnly } else { Provenance::Algebra };
    Ok(PyProjective { sys: nilflow::ProjectiveSystem::new(entry.gram().to_vec(), prov).map_err(err)? })
}

#[pymodule]
#[pyo3(name = "nilflow")]
fn nilflow_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyAlgebra>()?;
    m.add_class::<PyProjective>()?;
    m.add_function(wrap_pyfunction!(catalog_names, m)?)?;
    m.add_function(wrap_pyfunction!(catalog_algebra, m)?)?;
    m.add_function(wrap_pyfunction!(catalog_projective, m)?)?;
    Ok(())
}
