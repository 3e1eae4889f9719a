//! Python bindings for `pfairdp`.
//!
//! Exposes the objective transforms, the privacy accountant, fairness
//! metrics, Pareto utilities, pipeline evaluation and the three search
//! procedures on the synthetic or Adult task.

use pfairdp::cli::{load_experiment, DatasetChoice};
use pfairdp::fairness;
use pfairdp::mobo::{self, EvalOutcome, Method, MoboSettings};
use pfairdp::pipeline::{self, evaluate_detailed, Splits, Task};
use pfairdp::privacy;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use std::path::PathBuf;

fn value_err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err<E: std::fmt::Display>(e: E) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

/// `(accuracy, spd, epsilon) -> (utility, fairness, privacy)` in maximization space.
#[pyfunction]
fn objective_transform(accuracy: f64, spd: f64, epsilon: f64) -> (f64, f64, f64) {
    let t = pipeline::objective_transform(accuracy, spd, epsilon);
    (t[0], t[1], t[2])
}

#[pyfunction]
fn inverse_transform(utility: f64, fairness: f64, privacy: f64) -> (f64, f64, f64) {
    pipeline::inverse_transform([utility, fairness, privacy])
}

/// Per-order RDP of the Poisson-subsampled Gaussian mechanism.
#[pyfunction]
#[pyo3(signature = (q, sigma, orders=None))]
fn rdp_subsampled_gaussian(q: f64, sigma: f64, orders: Option<Vec<u32>>) -> PyResult<Vec<f64>> {
    let orders = orders.unwrap_or_else(privacy::default_orders);
    privacy::rdp_subsampled_gaussian(q, sigma, &orders).map_err(value_err)
}

/// Epsilon after `steps` DP-SGD steps.
#[pyfunction]
#[pyo3(signature = (sigma, q, steps, delta=1e-5))]
fn compute_epsilon(sigma: f64, q: f64, steps: u64, delta: f64) -> PyResult<f64> {
    privacy::compute_spend(sigma, q, steps, delta)
        .map(|s| s.epsilon)
        .map_err(value_err)
}

#[pyfunction]
#[pyo3(signature = (target_epsilon, q, steps, delta=1e-5))]
fn noise_for_target_epsilon(target_epsilon: f64, q: f64, steps: u64, delta: f64) -> PyResult<f64> {
    privacy::noise_for_target_epsilon(target_epsilon, q, steps, delta).map_err(value_err)
}

#[pyfunction]
fn statistical_parity_difference(preds: Vec<u8>, protected: Vec<u8>) -> PyResult<f64> {
    fairness::statistical_parity_difference(&preds, &protected).map_err(value_err)
}

#[pyfunction]
fn disparate_impact(preds: Vec<u8>, protected: Vec<u8>) -> PyResult<f64> {
    fairness::disparate_impact(&preds, &protected).map_err(value_err)
}

#[pyfunction]
fn dominates(a: Vec<f64>, b: Vec<f64>) -> bool {
    mobo::dominates(&a, &b)
}

/// Indices of the non-dominated points (maximization), ascending.
#[pyfunction]
fn pareto_filter(points: Vec<Vec<f64>>) -> Vec<usize> {
    mobo::pareto_filter(&points)
}

/// Exact hypervolume of up to three objectives above `reference`.
#[pyfunction]
fn hypervolume(points: Vec<Vec<f64>>, reference: Vec<f64>) -> PyResult<f64> {
    if points.iter().any(|p| p.len() != reference.len()) {
        return Err(PyValueError::new_err(
            "points and reference differ in length",
        ));
    }
    if !(1..=3).contains(&reference.len()) {
        return Err(PyValueError::new_err(
            "hypervolume supports 1 to 3 objectives",
        ));
    }
    Ok(mobo::hypervolume(&points, &reference))
}

/// One pipeline configuration.
#[pyclass(name = "PipelineConfig", from_py_object)]
#[derive(Clone)]
struct PyPipelineConfig {
    inner: pipeline::PipelineConfig,
}

#[pymethods]
impl PyPipelineConfig {
    /// Parse a JSON object with the `PipelineConfig` fields.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner: pipeline::PipelineConfig = serde_json::from_str(text).map_err(value_err)?;
        inner.validate().map_err(value_err)?;
        Ok(Self { inner })
    }

    /// Named replication preset, e.g. `"DPF-NN"` or `"PFLR"` with `epsilon=1.0`.
    #[staticmethod]
    #[pyo3(signature = (name, epsilon=None))]
    fn preset(name: &str, epsilon: Option<f64>) -> PyResult<Self> {
        let inner = pipeline::replication_preset(name, epsilon).map_err(value_err)?;
        Ok(Self { inner })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(runtime_err)
    }

    fn with_seed(&self, seed: u64) -> Self {
        Self {
            inner: self.inner.with_seed(seed),
        }
    }

    #[getter]
    fn repair_level(&self) -> f64 {
        self.inner.repair_level
    }

    #[getter]
    fn noise_multiplier(&self) -> f64 {
        self.inner.noise_multiplier
    }

    #[getter]
    fn clipping_norm(&self) -> f64 {
        self.inner.clipping_norm
    }

    #[getter]
    fn epochs(&self) -> usize {
        self.inner.epochs
    }

    #[getter]
    fn learning_rate(&self) -> f64 {
        self.inner.learning_rate
    }

    #[getter]
    fn batch_size(&self) -> usize {
        self.inner.batch_size
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    fn __repr__(&self) -> String {
        format!("PipelineConfig({})", self.to_json().unwrap_or_default())
    }
}

/// Loaded splits and model settings of one task.
#[pyclass(name = "Experiment")]
struct PyExperiment {
    splits: Splits,
    task: Task,
    dataset: DatasetChoice,
    postprocessing: bool,
}

#[pymethods]
impl PyExperiment {
    /// MEPS-like synthetic task; `postprocessing` keeps a dev split for ROC.
    #[staticmethod]
    #[pyo3(signature = (seed=0, n_records=None, postprocessing=false))]
    fn synthetic(seed: u64, n_records: Option<usize>, postprocessing: bool) -> PyResult<Self> {
        Self::load(DatasetChoice::Synthetic { n_records }, postprocessing, seed)
    }

    /// Adult task from a directory holding `adult.data` / `adult.test`.
    #[staticmethod]
    #[pyo3(signature = (data_path, seed=0, postprocessing=false))]
    fn adult(data_path: PathBuf, seed: u64, postprocessing: bool) -> PyResult<Self> {
        Self::load(DatasetChoice::Adult { data_path }, postprocessing, seed)
    }

    #[getter]
    fn n_train(&self) -> usize {
        self.splits.train.len()
    }

    #[getter]
    fn n_test(&self) -> usize {
        self.splits.test.len()
    }

    /// Train and score one configuration. Returns a dict with the raw and
    /// transformed objectives and the failure message, if any.
    fn evaluate<'py>(
        &self,
        py: Python<'py>,
        config: &PyPipelineConfig,
    ) -> PyResult<Bound<'py, PyDict>> {
        if config.inner.modules.postprocessing && !self.postprocessing {
            return Err(PyValueError::new_err(
                "configuration enables postprocessing but the experiment has no dev split",
            ));
        }
        let e = evaluate_detailed(&config.inner, &self.task, &self.splits).map_err(runtime_err)?;
        let d = PyDict::new(py);
        d.set_item("accuracy", e.objectives.accuracy)?;
        d.set_item("spd", e.objectives.spd)?;
        d.set_item("epsilon", e.objectives.epsilon)?;
        d.set_item("transformed", e.objectives.transformed.to_vec())?;
        d.set_item("noise_multiplier", e.noise_multiplier)?;
        d.set_item("failure", e.failure)?;
        Ok(d)
    }

    /// Run `method` ("mobo", "random" or "grid") over the desk-scale domain.
    /// `budget` is ignored for grid search, which uses `grid_levels`.
    #[pyo3(signature = (method, budget=30, seed=0, grid_levels=3, paper_scale=false))]
    fn search(
        &self,
        method: &str,
        budget: usize,
        seed: u64,
        grid_levels: usize,
        paper_scale: bool,
    ) -> PyResult<PyParetoArchive> {
        let method: Method = method.parse().map_err(value_err)?;
        let domain = if paper_scale {
            mobo::SearchDomain::paper()
        } else {
            mobo::SearchDomain::desk()
        };
        if domain.modules.postprocessing && !self.postprocessing {
            return Err(PyValueError::new_err("search domain needs a dev split"));
        }
        let mut evaluate = |c: &pipeline::PipelineConfig| -> mobo::Result<EvalOutcome> {
            Ok(EvalOutcome::from(&evaluate_detailed(
                c,
                &self.task,
                &self.splits,
            )?))
        };
        let archive = match method {
            Method::Mobo => {
                mobo::run_mobo(&domain, &MoboSettings::new(budget, seed), &mut evaluate)
            }
            Method::Random => mobo::run_random_search(&domain, budget, seed, &mut evaluate),
            Method::Grid => mobo::run_grid_search(&domain, grid_levels, seed, &mut evaluate),
        }
        .map_err(runtime_err)?;
        Ok(PyParetoArchive { inner: archive })
    }

    fn __repr__(&self) -> String {
        let name = match &self.dataset {
            DatasetChoice::Adult { .. } => "adult",
            DatasetChoice::Synthetic { .. } => "synthetic",
        };
        format!(
            "Experiment({name}, train={}, test={})",
            self.n_train(),
            self.n_test()
        )
    }
}

impl PyExperiment {
    fn load(dataset: DatasetChoice, postprocessing: bool, seed: u64) -> PyResult<Self> {
        let (splits, task) =
            load_experiment(&dataset, postprocessing, seed).map_err(runtime_err)?;
        Ok(Self {
            splits,
            task,
            dataset,
            postprocessing,
        })
    }
}

/// Every evaluated configuration with its objectives, the current front and
/// the hypervolume trace.
#[pyclass(name = "ParetoArchive")]
struct PyParetoArchive {
    inner: mobo::ParetoArchive,
}

#[pymethods]
impl PyParetoArchive {
    #[new]
    fn new() -> Self {
        Self {
            inner: mobo::ParetoArchive::new(mobo::default_reference()),
        }
    }

    /// Record one evaluation given its raw objectives.
    #[pyo3(signature = (config, accuracy, spd, epsilon, failed=false))]
    fn push(
        &mut self,
        config: &PyPipelineConfig,
        accuracy: f64,
        spd: f64,
        epsilon: f64,
        failed: bool,
    ) {
        self.inner.push(
            config.inner,
            pipeline::ObjectiveTriple::new(accuracy, spd, epsilon),
            failed,
        );
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// Indices of the current front in evaluation order.
    fn front(&self) -> Vec<usize> {
        self.inner.front().to_vec()
    }

    fn hypervolume(&self) -> f64 {
        self.inner.hypervolume()
    }

    fn hv_trace(&self) -> Vec<f64> {
        self.inner.hv_trace().to_vec()
    }

    fn reference(&self) -> (f64, f64, f64) {
        let r = self.inner.reference();
        (r[0], r[1], r[2])
    }

    /// `(accuracy, spd, epsilon)` of entry `i`.
    fn objectives(&self, i: usize) -> PyResult<(f64, f64, f64)> {
        let e = self
            .inner
            .entries()
            .get(i)
            .ok_or_else(|| PyValueError::new_err("index out of range"))?;
        Ok((
            e.objectives.accuracy,
            e.objectives.spd,
            e.objectives.epsilon,
        ))
    }

    fn config(&self, i: usize) -> PyResult<PyPipelineConfig> {
        let e = self
            .inner
            .entries()
            .get(i)
            .ok_or_else(|| PyValueError::new_err("index out of range"))?;
        Ok(PyPipelineConfig { inner: e.config })
    }
}

#[pymodule]
fn pfairdp_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(objective_transform, m)?)?;
    m.add_function(wrap_pyfunction!(inverse_transform, m)?)?;
    m.add_function(wrap_pyfunction!(rdp_subsampled_gaussian, m)?)?;
    m.add_function(wrap_pyfunction!(compute_epsilon, m)?)?;
    m.add_function(wrap_pyfunction!(noise_for_target_epsilon, m)?)?;
    m.add_function(wrap_pyfunction!(statistical_parity_difference, m)?)?;
    m.add_function(wrap_pyfunction!(disparate_impact, m)?)?;
    m.add_function(wrap_pyfunction!(dominates, m)?)?;
    m.add_function(wrap_pyfunction!(pareto_filter, m)?)?;
    m.add_function(wrap_pyfunction!(hypervolume, m)?)?;
    m.add_class::<PyPipelineConfig>()?;
    m.add_class::<PyExperiment>()?;
    m.add_class::<PyParetoArchive>()?;
    Ok(())
}
