//! Python bindings: instances in, plain dictionaries out.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use quiverstab::cli::{execute, ClassArg, Command, Common, ConventionArg};
use quiverstab::error::Error;
use quiverstab::gen::{gen_instance as generate, GenSpec, InstanceClass};
use quiverstab::oracles::{koenig_disc as koenig, PatternSpace};
use quiverstab::shrunk::{verify_certificate as verify, ShrunkCertificate, DEFAULT_BUDGET};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Validation(_) | Error::Invariant(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn loads<'py>(py: Python<'py>, value: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (value.to_string(),))
}

/// A quiver representation with a stability weight `theta` and a positive
/// weight `kappa`.
#[pyclass(name = "Instance", module = "quiverstab", skip_from_py_object)]
#[derive(Clone)]
pub struct PyInstance {
    inner: quiverstab::quiver::Instance,
}

#[pymethods]
impl PyInstance {
    /// Parses the JSON instance format.
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        quiverstab::quiver::Instance::from_json(text).map(|inner| PyInstance { inner }).map_err(to_py)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Self::new(text)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn vertices(&self) -> Vec<String> {
        self.inner.rep.quiver().vertices().to_vec()
    }

    #[getter]
    fn dims(&self) -> Vec<usize> {
        self.inner.rep.dims().to_vec()
    }

    #[getter]
    fn theta(&self) -> Vec<i64> {
        self.inner.theta.0.clone()
    }

    #[getter]
    fn kappa(&self) -> Vec<i64> {
        self.inner.kappa.0.clone()
    }

    fn __repr__(&self) -> String {
        format!("Instance(vertices={:?}, dims={:?})", self.vertices(), self.dims())
    }
}

fn common(seed: u64, budget: usize) -> Common {
    Common { input: "-".into(), seed, budget }
}

fn run<'py>(py: Python<'py>, command: Command, inst: &PyInstance) -> PyResult<Bound<'py, PyAny>> {
    let v = execute(&command, &inst.inner.to_json()).map_err(to_py)?;
    loads(py, &v)
}

/// Semistability and `G(M)`.
#[pyfunction]
#[pyo3(signature = (inst, seed = 0, budget = DEFAULT_BUDGET))]
fn check<'py>(py: Python<'py>, inst: &PyInstance, seed: u64, budget: usize) -> PyResult<Bound<'py, PyAny>> {
    run(py, Command::Check(common(seed, budget)), inst)
}

/// `disc(M, theta)` with witness and certificate; `slope=True` uses the
/// slope weight instead of `theta`.
#[pyfunction]
#[pyo3(signature = (inst, seed = 0, budget = DEFAULT_BUDGET, slope = false))]
fn disc<'py>(py: Python<'py>, inst: &PyInstance, seed: u64, budget: usize, slope: bool) -> PyResult<Bound<'py, PyAny>> {
    run(py, Command::Disc { common: common(seed, budget), slope }, inst)
}

/// Harder-Narasimhan filtration with its verification report.
#[pyfunction]
#[pyo3(signature = (inst, seed = 0, budget = DEFAULT_BUDGET))]
fn hn<'py>(py: Python<'py>, inst: &PyInstance, seed: u64, budget: usize) -> PyResult<Bound<'py, PyAny>> {
    run(py, Command::Hn(common(seed, budget)), inst)
}

/// Maximally destabilizing one-parameter subgroup.
#[pyfunction]
#[pyo3(signature = (inst, seed = 0, budget = DEFAULT_BUDGET, convention = "t0"))]
fn kempf<'py>(py: Python<'py>, inst: &PyInstance, seed: u64, budget: usize, convention: &str) -> PyResult<Bound<'py, PyAny>> {
    let convention = match convention {
        "t0" => ConventionArg::T0,
        "tinf" => ConventionArg::Tinf,
        other => return Err(PyValueError::new_err(format!("unknown convention {other:?}; expected t0 or tinf"))),
    };
    run(py, Command::Kempf { common: common(seed, budget), convention }, inst)
}

/// Exhaustive oracles for one-layer bipartite instances.
#[pyfunction]
fn oracle<'py>(py: Python<'py>, inst: &PyInstance) -> PyResult<Bound<'py, PyAny>> {
    run(py, Command::Oracle(common(0, DEFAULT_BUDGET)), inst)
}

/// The `index`-th instance of a generated stream.
#[pyfunction]
#[pyo3(signature = (seed, index, class_name = "general"))]
fn gen_instance(seed: u64, index: u64, class_name: &str) -> PyResult<PyInstance> {
    let class = match class_name {
        "general" => ClassArg::General,
        "general-zero-theta" => ClassArg::GeneralZeroTheta,
        "bipartite" => ClassArg::Bipartite,
        other => return Err(PyValueError::new_err(format!("unknown class {other:?}"))),
    };
    Ok(PyInstance { inner: generate(&GenSpec::new(seed, InstanceClass::from(class)), index) })
}

/// `(c, S)` for the pattern space on `support`: the deficiency and a column
/// set attaining it.
#[pyfunction]
fn koenig_disc(n: usize, support: Vec<(usize, usize)>) -> PyResult<(usize, Vec<usize>)> {
    let p = PatternSpace::new(n, support).map_err(to_py)?;
    Ok(koenig(&p))
}

/// Re-checks a certificate given as a dictionary or JSON text, either bare
/// or inside the output of `disc`.
#[pyfunction]
fn verify_certificate<'py>(py: Python<'py>, cert: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyDict>> {
    let text: String = if cert.is_instance_of::<PyDict>() {
        py.import("json")?.call_method1("dumps", (cert,))?.extract()?
    } else {
        cert.extract()?
    };
    let doc: serde_json::Value = serde_json::from_str(&text).map_err(|e| to_py(e.into()))?;
    let c = ShrunkCertificate::from_json_value(doc.get("certificate").unwrap_or(&doc)).map_err(to_py)?;
    let check = verify(&c).map_err(to_py)?;
    let out = PyDict::new(py);
    out.set_item("valid", check.valid)?;
    out.set_item("dim_U", check.dim_u)?;
    out.set_item("dim_BU", check.dim_bu)?;
    out.set_item("c", c.c)?;
    out.set_item("image_matches", check.image_matches)?;
    out.set_item("shrunk_ok", check.shrunk_ok)?;
    out.set_item("recomputed_rank", check.recomputed_rank)?;
    out.set_item("rank_method", check.rank_method)?;
    out.set_item("rank_ok", check.rank_ok)?;
    Ok(out)
}

#[pymodule]
#[pyo3(name = "quiverstab")]
fn quiverstab_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyInstance>()?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(disc, m)?)?;
    m.add_function(wrap_pyfunction!(hn, m)?)?;
    m.add_function(wrap_pyfunction!(kempf, m)?)?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    m.add_function(wrap_pyfunction!(gen_instance, m)?)?;
    m.add_function(wrap_pyfunction!(koenig_disc, m)?)?;
    m.add_function(wrap_pyfunction!(verify_certificate, m)?)?;
    Ok(())
}
