use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use schrodhelm::experiment::{self, ExperimentConfig};
use schrodhelm::helmholtz::{self, DiscreteHelmholtz, HelmholtzProblem, PreconditionMode};
use schrodhelm::Error;

fn to_py(err: Error) -> PyErr {
    if err.is_config() {
        PyValueError::new_err(err.to_string())
    } else {
        PyRuntimeError::new_err(err.to_string())
    }
}

fn to_vec(v: impl IntoIterator<Item = Complex64>) -> Vec<Complex64> {
    v.into_iter().collect()
}

/// Shifted wavenumber (2/h) sin(kh/2).
#[pyfunction]
fn shifted_wavenumber(k: f64, h: f64) -> PyResult<f64> {
    helmholtz::shifted_wavenumber(k, h).map_err(to_py)
}

/// Closed-form solution of the model problem at x.
#[pyfunction]
fn exact_solution(k: f64, x: f64) -> Complex64 {
    helmholtz::exact_solution(k, x)
}

/// T = log(1/ε)/σ_min rounded up to three significant digits.
#[pyfunction]
fn stopping_time(sigma_min: f64, epsilon: f64) -> f64 {
    schrodhelm::dds::stopping_time(sigma_min, epsilon)
}

/// Discretized 1D Helmholtz system on (0, 1).
#[pyclass(name = "HelmholtzSystem", frozen)]
struct PyHelmholtzSystem {
    inner: DiscreteHelmholtz,
}

#[pymethods]
impl PyHelmholtzSystem {
    #[new]
    #[pyo3(signature = (k, n = 4, cells = None))]
    fn new(k: f64, n: u32, cells: Option<usize>) -> PyResult<Self> {
        let problem = match cells {
            Some(c) => HelmholtzProblem::with_cells(k, c),
            None => HelmholtzProblem::new(k, n),
        }
        .map_err(to_py)?;
        let inner = helmholtz::build_system(&problem).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn h(&self) -> f64 {
        self.inner.h
    }

    #[getter]
    fn k_hat(&self) -> f64 {
        self.inner.k_hat
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn nodes(&self) -> Vec<f64> {
        self.inner.nodes.clone()
    }

    #[getter]
    fn rhs(&self) -> Vec<Complex64> {
        to_vec(self.inner.rhs.iter().copied())
    }

    /// Dense matrix as a list of rows.
    fn matrix(&self) -> Vec<Vec<Complex64>> {
        let a = self.inner.dense();
        a.row_iter().map(|r| to_vec(r.iter().copied())).collect()
    }

    fn solve(&self) -> PyResult<Vec<Complex64>> {
        self.inner.solve().map(|x| to_vec(x.iter().copied())).map_err(to_py)
    }

    fn exact(&self) -> Vec<Complex64> {
        to_vec(self.inner.exact_at_nodes().iter().copied())
    }

    /// (σ_min, σ_max) of the system matrix, or of PA when `precondition` is set.
    #[pyo3(signature = (precondition = "none"))]
    fn singular_values(&self, precondition: &str) -> PyResult<(f64, f64)> {
        let mode: PreconditionMode = precondition.parse().map_err(to_py)?;
        let sv = match mode {
            PreconditionMode::None => self.inner.singular_values,
            _ => helmholtz::build_preconditioned(&self.inner, mode).map_err(to_py)?.singular_values,
        };
        Ok((sv.min, sv.max))
    }

    fn condition_number(&self) -> f64 {
        self.inner.condition_number()
    }

    fn __repr__(&self) -> String {
        format!("HelmholtzSystem(dim={}, h={}, k_hat={})", self.inner.dim(), self.inner.h, self.inner.k_hat)
    }
}

/// Runs the full pipeline; options mirror the CLI config keys.
#[pyfunction]
#[pyo3(signature = (**options))]
fn run_experiment<'py>(py: Python<'py>, options: Option<&Bound<'py, PyDict>>) -> PyResult<Bound<'py, PyDict>> {
    let mut cfg = ExperimentConfig::default();
    if let Some(opts) = options {
        for (key, value) in opts.iter() {
            let key: String = key.extract()?;
            let value = match value.extract::<bool>() {
                Ok(b) => b.to_string(),
                Err(_) => value.str()?.to_string(),
            };
            cfg.set(&key, &value).map_err(to_py)?;
        }
    }
    let report = py.detach(|| experiment::run_experiment(&cfg)).map_err(to_py)?;
    let out = PyDict::new(py);
    let metrics = PyDict::new(py);
    for (k, v) in &report.metrics {
        metrics.set_item(*k, *v)?;
    }
    out.set_item("metrics", metrics)?;
    out.set_item("x", report.nodes.clone())?;
    out.set_item("u_exact", to_vec(report.u_exact.iter().copied()))?;
    out.set_item("discrete", to_vec(report.discrete.iter().copied()))?;
    out.set_item("v", to_vec(report.v.iter().copied()))?;
    let series: Vec<(f64, f64, f64)> = report.checkpoints.iter().map(|c| (c.t, c.err_inf, c.err_rel)).collect();
    out.set_item("checkpoints", series)?;
    out.set_item("warnings", report.warnings.clone())?;
    let files: Vec<String> = report.files.iter().map(|p| p.display().to_string()).collect();
    out.set_item("files", files)?;
    Ok(out)
}

#[pymodule]
fn pyschrodhelm(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(shifted_wavenumber, m)?)?;
    m.add_function(wrap_pyfunction!(exact_solution, m)?)?;
    m.add_function(wrap_pyfunction!(stopping_time, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_class::<PyHelmholtzSystem>()?;
    Ok(())
}
