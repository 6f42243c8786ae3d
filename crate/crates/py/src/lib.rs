//! Python bindings for `gframe`.

use gframe::cli::{analyze, scenario_to_json, ScenarioFile};
use gframe::io::to_json_string;
use gframe::verifier::{self, SuiteOptions};
use gframe::{
    generators, AlgebraElement, Complex64, ControlledScenario, Flavor, GeneratorSpec, ModuleOperator, ModuleVector,
};
use nalgebra::DMatrix;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

create_exception!(gframe_py, GFrameError, PyValueError);
create_exception!(gframe_py, NotAFrameError, GFrameError);

fn err(e: gframe::GFrameError) -> PyErr {
    match e {
        gframe::GFrameError::NotAFrame { .. } => NotAFrameError::new_err(e.to_string()),
        _ => GFrameError::new_err(e.to_string()),
    }
}

fn matrix(rows: &[Vec<Complex64>]) -> PyResult<DMatrix<Complex64>> {
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || ncols == 0 || rows.iter().any(|r| r.len() != ncols) {
        return Err(GFrameError::new_err("expected a non-empty rectangular list of rows"));
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

fn rows(m: &DMatrix<Complex64>) -> Vec<Vec<Complex64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

fn json_value<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

/// Element of the matrix algebra M_n(C).
#[pyclass(name = "AlgebraElement", module = "gframe_py", frozen, from_py_object)]
#[derive(Clone)]
struct PyAlgebraElement(AlgebraElement);

#[pymethods]
impl PyAlgebraElement {
    #[new]
    fn new(rows: Vec<Vec<Complex64>>) -> PyResult<Self> {
        AlgebraElement::from_matrix(matrix(&rows)?).map(Self).map_err(err)
    }

    #[staticmethod]
    fn identity(n: usize) -> Self {
        Self(AlgebraElement::identity(n))
    }

    #[staticmethod]
    fn diagonal(values: Vec<f64>) -> PyResult<Self> {
        AlgebraElement::diagonal(&values).map(Self).map_err(err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn to_list(&self) -> Vec<Vec<Complex64>> {
        rows(self.0.matrix())
    }

    fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    fn sqrt(&self) -> PyResult<Self> {
        self.0.sqrt().map(Self).map_err(err)
    }

    fn norm(&self) -> f64 {
        self.0.norm()
    }

    fn eigenvalues(&self) -> Vec<f64> {
        self.0.eigenvalues()
    }

    #[pyo3(signature = (tol = gframe::DEFAULT_TOL))]
    fn is_positive(&self, tol: f64) -> bool {
        self.0.is_positive(tol)
    }

    #[pyo3(signature = (other, tol = gframe::DEFAULT_TOL))]
    fn loewner_leq(&self, other: &Self, tol: f64) -> PyResult<bool> {
        self.0.loewner_leq(&other.0, tol).map_err(err)
    }

    fn __add__(&self, other: &Self) -> PyResult<Self> {
        self.0.checked_add(&other.0).map(Self).map_err(err)
    }

    fn __sub__(&self, other: &Self) -> PyResult<Self> {
        self.0.checked_sub(&other.0).map(Self).map_err(err)
    }

    fn __matmul__(&self, other: &Self) -> PyResult<Self> {
        self.0.checked_mul(&other.0).map(Self).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("AlgebraElement(n={}, norm={:e})", self.0.dim(), self.0.norm())
    }
}

/// Vector of the free module A^d.
#[pyclass(name = "ModuleVector", module = "gframe_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyModuleVector(ModuleVector);

#[pymethods]
impl PyModuleVector {
    #[new]
    fn new(blocks: Vec<PyAlgebraElement>) -> PyResult<Self> {
        let blocks: Vec<AlgebraElement> = blocks.into_iter().map(|b| b.0).collect();
        ModuleVector::from_blocks(&blocks).map(Self).map_err(err)
    }

    #[staticmethod]
    fn random(n: usize, d: usize, seed: u64) -> Self {
        Self(generators::random_vectors(n, d, 1, seed).remove(0))
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.algebra_dim()
    }

    #[getter]
    fn d(&self) -> usize {
        self.0.rank()
    }

    fn blocks(&self) -> Vec<PyAlgebraElement> {
        self.0.blocks().into_iter().map(PyAlgebraElement).collect()
    }

    /// A-valued inner product <self, other>.
    fn inner(&self, other: &Self) -> PyResult<PyAlgebraElement> {
        self.0.inner(&other.0).map(PyAlgebraElement).map_err(err)
    }

    fn norm(&self) -> f64 {
        self.0.norm()
    }

    fn left_mul(&self, a: &PyAlgebraElement) -> PyResult<Self> {
        self.0.left_mul(&a.0).map(Self).map_err(err)
    }

    fn __add__(&self, other: &Self) -> PyResult<Self> {
        self.0.checked_add(&other.0).map(Self).map_err(err)
    }

    fn __sub__(&self, other: &Self) -> PyResult<Self> {
        self.0.checked_sub(&other.0).map(Self).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("ModuleVector(n={}, d={}, norm={:e})", self.0.algebra_dim(), self.0.rank(), self.0.norm())
    }
}

/// Adjointable operator A^d -> A^e, given by its right-action matrix.
#[pyclass(name = "ModuleOperator", module = "gframe_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyModuleOperator(ModuleOperator);

#[pymethods]
impl PyModuleOperator {
    #[new]
    fn new(n: usize, d: usize, e: usize, action: Vec<Vec<Complex64>>) -> PyResult<Self> {
        ModuleOperator::new(n, d, e, matrix(&action)?).map(Self).map_err(err)
    }

    #[staticmethod]
    fn identity(n: usize, d: usize) -> Self {
        Self(ModuleOperator::identity(n, d))
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.algebra_dim()
    }

    #[getter]
    fn domain_rank(&self) -> usize {
        self.0.domain_rank()
    }

    #[getter]
    fn codomain_rank(&self) -> usize {
        self.0.codomain_rank()
    }

    fn action(&self) -> Vec<Vec<Complex64>> {
        rows(self.0.action())
    }

    fn apply(&self, x: &PyModuleVector) -> PyResult<PyModuleVector> {
        self.0.apply(&x.0).map(PyModuleVector).map_err(err)
    }

    fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    /// self ∘ inner
    fn compose(&self, inner: &Self) -> PyResult<Self> {
        self.0.compose(&inner.0).map(Self).map_err(err)
    }

    fn norm(&self) -> f64 {
        self.0.norm()
    }

    fn eigenvalues(&self) -> Vec<f64> {
        self.0.eigenvalues()
    }

    #[pyo3(signature = (tol = gframe::DEFAULT_TOL))]
    fn is_positive(&self, tol: f64) -> bool {
        self.0.is_positive(tol)
    }

    #[pyo3(signature = (tol = gframe::operators::SURJECTIVITY_TOL))]
    fn is_surjective(&self, tol: f64) -> bool {
        self.0.is_surjective(tol)
    }

    fn lemma1_check(&self, x: &PyModuleVector) -> PyResult<bool> {
        self.0.lemma1_check(&x.0).map_err(err)
    }

    fn lemma3_check(&self) -> PyResult<bool> {
        self.0.lemma3_check().map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "ModuleOperator(n={}, d={}, e={}, norm={:e})",
            self.0.algebra_dim(),
            self.0.domain_rank(),
            self.0.codomain_rank(),
            self.0.norm()
        )
    }
}

/// A g-frame family together with its controls.
#[pyclass(name = "Scenario", module = "gframe_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyScenario(ControlledScenario);

#[pymethods]
impl PyScenario {
    /// Parses the scenario-file JSON format.
    #[staticmethod]
    #[pyo3(signature = (text, tol = gframe::DEFAULT_TOL))]
    fn from_json(text: &str, tol: f64) -> PyResult<Self> {
        ScenarioFile::parse(text).and_then(|f| f.into_scenario(tol)).map(Self).map_err(err)
    }

    fn to_json(&self) -> String {
        scenario_to_json(&self.0)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.family().algebra_dim()
    }

    #[getter]
    fn d(&self) -> usize {
        self.0.family().module_rank()
    }

    fn __len__(&self) -> usize {
        self.0.family().len()
    }

    fn weights(&self) -> Vec<f64> {
        self.0.family().points().iter().map(|p| p.weight).collect()
    }

    fn lambdas(&self) -> Vec<PyModuleOperator> {
        self.0.family().points().iter().map(|p| PyModuleOperator(p.lambda.clone())).collect()
    }

    fn frame_operator(&self) -> PyModuleOperator {
        PyModuleOperator(self.0.family().frame_operator())
    }

    fn controlled_frame_operator(&self) -> PyResult<PyModuleOperator> {
        self.0.controlled_frame_operator().map(PyModuleOperator).map_err(err)
    }

    fn synthesis_operator(&self) -> PyResult<PyModuleOperator> {
        self.0.synthesis_operator().map(PyModuleOperator).map_err(err)
    }

    /// Classification report as a dict: verdict, bounds, controlled bounds,
    /// commutation certificate and condition numbers.
    #[pyo3(signature = (tol = gframe::DEFAULT_TOL))]
    fn analyze<'py>(&self, py: Python<'py>, tol: f64) -> PyResult<Bound<'py, PyAny>> {
        let report = analyze(&self.0, tol).map_err(err)?;
        json_value(py, &to_json_string(&report))
    }

    /// Returns (xhat, error, bound); raises NotAFrameError when S_CC' is
    /// not invertible.
    fn reconstruct(&self, x: &PyModuleVector) -> PyResult<(PyModuleVector, f64, f64)> {
        let r = self.0.reconstruct(&x.0).map_err(err)?;
        Ok((PyModuleVector(r.xhat), r.error, r.bound))
    }

    fn __repr__(&self) -> String {
        let f = self.0.family();
        format!("Scenario(n={}, d={}, points={})", f.algebra_dim(), f.module_rank(), f.len())
    }
}

fn flavor(name: &str) -> PyResult<Flavor> {
    serde_json::from_value(serde_json::Value::from(name))
        .map_err(|_| GFrameError::new_err(format!("unknown flavor {name:?}")))
}

/// Builds a seeded scenario.
#[pyfunction]
#[pyo3(signature = (seed, n, d, m, flavor_name = "commuting"))]
fn generate(seed: u64, n: usize, d: usize, m: usize, flavor_name: &str) -> PyResult<PyScenario> {
    let spec = GeneratorSpec::new(seed, n, d, m, flavor(flavor_name)?);
    generators::generate(&spec).map(PyScenario).map_err(err)
}

/// Runs the theorem checks; `specs` is a list of spec dicts (the default
/// 200-scenario batch when omitted). Returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (specs = None, tol = gframe::DEFAULT_TOL))]
fn verify<'py>(py: Python<'py>, specs: Option<&Bound<'py, PyAny>>, tol: f64) -> PyResult<Bound<'py, PyAny>> {
    let batch: Vec<GeneratorSpec> = match specs {
        None => generators::default_batch(),
        Some(obj) => {
            let text: String = py.import("json")?.call_method1("dumps", (obj,))?.extract()?;
            serde_json::from_str(&text).map_err(|e| GFrameError::new_err(format!("invalid spec list: {e}")))?
        }
    };
    let opts = SuiteOptions { tol, ..SuiteOptions::default() };
    let report = py.detach(|| verifier::run_suite(&batch, &opts)).map_err(err)?;
    json_value(py, &to_json_string(&report))
}

#[pymodule]
fn gframe_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("GFrameError", m.py().get_type::<GFrameError>())?;
    m.add("NotAFrameError", m.py().get_type::<NotAFrameError>())?;
    m.add_class::<PyAlgebraElement>()?;
    m.add_class::<PyModuleVector>()?;
    m.add_class::<PyModuleOperator>()?;
    m.add_class::<PyScenario>()?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add("DEFAULT_TOL", gframe::DEFAULT_TOL)?;
    Ok(())
}
