//! Python bindings: the statevector simulator, the variational layer with
//! its parameter-shift Jacobians, classification metrics, the synthetic data
//! generator and the experiment runner.

use std::path::PathBuf;

use adsb_hqnn::data::{generate_synthetic, FeatureMatrix};
use adsb_hqnn::experiment::{cmd_eval, cmd_train, EvalOptions, ExperimentConfig, PartialConfig};
use adsb_hqnn::metrics::ConfusionMatrix;
use adsb_hqnn::statevector::{Gate1Q, Gate2Q, Statevector};
use adsb_hqnn::vqc::{self, CircuitSpec, VqcWeights};
use adsb_hqnn::Error;
use ndarray::Array3;
use num_complex::Complex64;
use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: Error) -> PyErr {
    let msg = e.to_string();
    match e.root() {
        Error::Io { .. } => PyIOError::new_err(msg),
        Error::Training { .. } => PyRuntimeError::new_err(msg),
        _ => PyValueError::new_err(msg),
    }
}

/// Pure state of `n_qubits` qubits, starting in |0…0⟩. Qubit 0 is the most
/// significant bit of the basis index.
#[pyclass(name = "Statevector")]
struct PyStatevector {
    inner: Statevector,
}

#[pymethods]
impl PyStatevector {
    #[new]
    fn new(n_qubits: usize) -> PyResult<Self> {
        Ok(Self {
            inner: Statevector::zero(n_qubits).map_err(to_py)?,
        })
    }

    #[getter]
    fn n_qubits(&self) -> usize {
        self.inner.n_qubits()
    }

    fn rx(&mut self, wire: usize, theta: f64) -> PyResult<()> {
        self.inner.apply_1q_in_place(&Gate1Q::rx(wire, theta)).map_err(to_py)
    }

    fn ry(&mut self, wire: usize, theta: f64) -> PyResult<()> {
        self.inner.apply_1q_in_place(&Gate1Q::ry(wire, theta)).map_err(to_py)
    }

    fn rz(&mut self, wire: usize, theta: f64) -> PyResult<()> {
        self.inner.apply_1q_in_place(&Gate1Q::rz(wire, theta)).map_err(to_py)
    }

    /// `RZ(a) · RY(b) · RZ(c)`; `c` acts first.
    fn rot(&mut self, wire: usize, a: f64, b: f64, c: f64) -> PyResult<()> {
        self.inner.apply_1q_in_place(&Gate1Q::rot(wire, [a, b, c])).map_err(to_py)
    }

    fn cnot(&mut self, control: usize, target: usize) -> PyResult<()> {
        self.inner.apply_2q_in_place(&Gate2Q::cnot(control, target)).map_err(to_py)
    }

    fn amplitudes(&self) -> Vec<Complex64> {
        self.inner.amplitudes().to_vec()
    }

    fn norm_sqr(&self) -> f64 {
        self.inner.norm_sqr()
    }

    fn expval_z(&self, wire: usize) -> PyResult<f64> {
        self.inner.expval_z(wire).map_err(to_py)
    }

    fn expval_z_all(&self) -> Vec<f64> {
        self.inner.expval_z_all()
    }

    fn __repr__(&self) -> String {
        format!("Statevector(n_qubits={})", self.inner.n_qubits())
    }
}

fn circuit_inputs(n_qubits: usize, n_layers: usize, weights: Vec<f64>) -> PyResult<(CircuitSpec, VqcWeights)> {
    let spec = CircuitSpec::new(n_qubits, n_layers).map_err(to_py)?;
    let values = Array3::from_shape_vec(spec.weight_shape(), weights).map_err(|_| {
        PyValueError::new_err(format!(
            "expected {} weights (layers × qubits × 3)",
            spec.n_params()
        ))
    })?;
    let weights = VqcWeights::from_array(&spec, values).map_err(to_py)?;
    Ok((spec, weights))
}

/// `⟨Z⟩` on every wire after angle embedding and strongly entangling layers.
/// `weights` is flat in `(layer, wire, angle)` order.
#[pyfunction]
fn vqc_forward(n_qubits: usize, n_layers: usize, weights: Vec<f64>, inputs: Vec<f64>) -> PyResult<Vec<f64>> {
    let (spec, w) = circuit_inputs(n_qubits, n_layers, weights)?;
    Ok(vqc::forward(&spec, &w, &inputs).map_err(to_py)?.expectations)
}

/// `(outputs, d_outputs/d_weights, d_outputs/d_inputs)` by the parameter-shift rule.
#[pyfunction]
#[allow(clippy::type_complexity)]
fn vqc_gradient(
    n_qubits: usize,
    n_layers: usize,
    weights: Vec<f64>,
    inputs: Vec<f64>,
) -> PyResult<(Vec<f64>, Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let (spec, w) = circuit_inputs(n_qubits, n_layers, weights)?;
    let g = vqc::parameter_shift_grad(&spec, &w, &inputs).map_err(to_py)?;
    let rows = |a: &ndarray::Array2<f64>| a.rows().into_iter().map(|r| r.to_vec()).collect();
    Ok((g.output.expectations, rows(&g.weights), rows(&g.inputs)))
}

/// Confusion counts and scores for the attack class (label 1).
#[pyfunction]
fn classification_metrics<'py>(py: Python<'py>, pred: Vec<u8>, truth: Vec<u8>) -> PyResult<Bound<'py, PyDict>> {
    let cm = ConfusionMatrix::from_labels(&pred, &truth).map_err(to_py)?;
    let m = cm.derive().map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("tp", cm.true_pos)?;
    d.set_item("tn", cm.true_neg)?;
    d.set_item("fp", cm.false_pos)?;
    d.set_item("fn", cm.false_neg)?;
    d.set_item("accuracy", m.accuracy)?;
    d.set_item("precision", m.precision)?;
    d.set_item("recall", m.recall)?;
    d.set_item("f1", m.f1)?;
    Ok(d)
}

type Table = (Vec<String>, Vec<Vec<f64>>, Vec<u8>);

/// ADS-B-like rows: `(feature_names, rows, labels)`.
#[pyfunction]
fn synthetic_flights(n_normal: usize, n_attack: usize, seed: u64) -> PyResult<Table> {
    let m = FeatureMatrix::from_records(&generate_synthetic(n_normal, n_attack, seed)).map_err(to_py)?;
    let rows = m.values.rows().into_iter().map(|r| r.to_vec()).collect();
    Ok((m.feature_names, rows, m.labels))
}

/// The built-in defaults as a JSON object.
#[pyfunction]
fn default_config() -> PyResult<String> {
    serde_json::to_string(&ExperimentConfig::default()).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Runs the full training pipeline and returns the run report as JSON.
/// Keyword arguments take the config-file keys (`model`, `epochs`, `lr`, ...).
#[pyfunction]
#[pyo3(signature = (**settings))]
fn train(py: Python<'_>, settings: Option<&Bound<'_, PyDict>>) -> PyResult<String> {
    let flags: PartialConfig = match settings {
        Some(d) => {
            let json: String = py.import("json")?.call_method1("dumps", (d,))?.extract()?;
            serde_json::from_str(&json).map_err(|e| PyValueError::new_err(e.to_string()))?
        }
        None => PartialConfig::default(),
    };
    let config = ExperimentConfig::resolve(None, &flags).map_err(to_py)?;
    let report = py.detach(|| cmd_train(&config)).map_err(to_py)?;
    report.to_json().map_err(to_py)
}

/// Scores a checkpoint on a fresh split and returns the report as JSON.
#[pyfunction]
#[pyo3(signature = (checkpoint, dataset=None, seed=None))]
fn evaluate(py: Python<'_>, checkpoint: PathBuf, dataset: Option<String>, seed: Option<u64>) -> PyResult<String> {
    let options = EvalOptions {
        checkpoint,
        dataset,
        seed,
        ..Default::default()
    };
    let report = py.detach(|| cmd_eval(&options)).map_err(to_py)?;
    report.to_json().map_err(to_py)
}

#[pymodule]
fn adsb_hqnn_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyStatevector>()?;
    m.add_function(wrap_pyfunction!(vqc_forward, m)?)?;
    m.add_function(wrap_pyfunction!(vqc_gradient, m)?)?;
    m.add_function(wrap_pyfunction!(classification_metrics, m)?)?;
    m.add_function(wrap_pyfunction!(synthetic_flights, m)?)?;
    m.add_function(wrap_pyfunction!(default_config, m)?)?;
    m.add_function(wrap_pyfunction!(train, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    Ok(())
}
