use std::fmt;
use std::str::FromStr;

use ndarray::{Array2, Axis};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::adam::Parameters;
use super::dense::{relu, relu_backward, DenseLayer, Tensor2};
use super::loss::loss_and_grad;
use crate::data::Targets;
use crate::error::{Error, Result};
use crate::vqc::{self, CircuitSpec, VqcGradient, VqcWeights};

/// Both models emit two logits.
pub const N_OUTPUTS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// Dense → dense+ReLU → quantum layer → dense.
    Hfqnn,
    /// Dense → dense+ReLU → dense+ReLU → dense.
    Fnn,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Hfqnn => "hfqnn",
            ModelKind::Fnn => "fnn",
        })
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "").as_str() {
            "hfqnn" => Ok(ModelKind::Hfqnn),
            "fnn" => Ok(ModelKind::Fnn),
            other => Err(Error::Config(format!(
                "unknown model {other:?} (expected hfqnn or fnn)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub n_features: usize,
    /// Qubit count (HFQNN) or width of the replacing dense layer (FNN).
    pub width: usize,
    pub n_outputs: usize,
    /// Present exactly for HFQNN.
    pub circuit: Option<CircuitSpec>,
}

impl ModelSpec {
    pub fn hfqnn(n_features: usize, circuit: CircuitSpec) -> Result<Self> {
        let spec = Self {
            kind: ModelKind::Hfqnn,
            n_features,
            width: circuit.n_qubits,
            n_outputs: N_OUTPUTS,
            circuit: Some(circuit),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn fnn(n_features: usize, width: usize) -> Result<Self> {
        let spec = Self {
            kind: ModelKind::Fnn,
            n_features,
            width,
            n_outputs: N_OUTPUTS,
            circuit: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_features == 0 || self.width == 0 {
            return Err(Error::Config("feature count and width must be positive".into()));
        }
        if self.n_outputs != N_OUTPUTS {
            return Err(Error::Config(format!(
                "models have {N_OUTPUTS} outputs, spec says {}",
                self.n_outputs
            )));
        }
        match (self.kind, &self.circuit) {
            (ModelKind::Hfqnn, Some(c)) => {
                c.validate()?;
                if c.n_qubits != self.width {
                    return Err(Error::Config(format!(
                        "circuit has {} qubits but the model width is {}",
                        c.n_qubits, self.width
                    )));
                }
                Ok(())
            }
            (ModelKind::Hfqnn, None) => Err(Error::Config("hfqnn model without a circuit".into())),
            (ModelKind::Fnn, Some(_)) => Err(Error::Config("fnn model with a circuit".into())),
            (ModelKind::Fnn, None) => Ok(()),
        }
    }
}

/// The third layer: quantum circuit or its dense replacement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MiddleLayer {
    Quantum(VqcWeights),
    Dense(DenseLayer),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// `n_features → n_features`, ReLU.
    pub input: DenseLayer,
    /// `n_features → width`, ReLU.
    pub hidden: DenseLayer,
    pub middle: MiddleLayer,
    /// `width → 2`, no activation.
    pub output: DenseLayer,
}

impl ModelParams {
    pub fn init<R: Rng + ?Sized>(spec: &ModelSpec, rng: &mut R) -> Result<Self> {
        spec.validate()?;
        let (f, w) = (spec.n_features, spec.width);
        let input = DenseLayer::init(f, f, rng);
        let hidden = DenseLayer::init(f, w, rng);
        let middle = match &spec.circuit {
            Some(c) => MiddleLayer::Quantum(VqcWeights::random(c, rng)),
            None => MiddleLayer::Dense(DenseLayer::init(w, w, rng)),
        };
        let output = DenseLayer::init(w, spec.n_outputs, rng);
        Ok(Self {
            input,
            hidden,
            middle,
            output,
        })
    }

    /// Same structure, every value zero. Used to accumulate gradients.
    pub fn zeros_like(&self) -> Self {
        let mut z = self.clone();
        for t in z.tensors_mut() {
            t.fill(0.0);
        }
        z
    }

    pub fn check(&self, spec: &ModelSpec) -> Result<()> {
        let (f, w) = (spec.n_features, spec.width);
        let dense_ok = |l: &DenseLayer, i: usize, o: usize, name: &str| {
            if l.n_in() != i || l.n_out() != o || l.bias.len() != o {
                Err(Error::Shape(format!(
                    "{name} layer is {}→{}, model needs {i}→{o}",
                    l.n_in(),
                    l.n_out()
                )))
            } else {
                Ok(())
            }
        };
        dense_ok(&self.input, f, f, "input")?;
        dense_ok(&self.hidden, f, w, "hidden")?;
        dense_ok(&self.output, w, spec.n_outputs, "output")?;
        match (&self.middle, &spec.circuit) {
            (MiddleLayer::Quantum(q), Some(c)) => q.check(c),
            (MiddleLayer::Dense(d), None) => dense_ok(d, w, w, "middle"),
            _ => Err(Error::Kind {
                expected: spec.kind.to_string(),
                found: match self.middle {
                    MiddleLayer::Quantum(_) => "hfqnn".into(),
                    MiddleLayer::Dense(_) => "fnn".into(),
                },
            }),
        }
    }
}

impl Parameters for ModelParams {
    fn tensors(&self) -> Vec<&[f64]> {
        fn dense(l: &DenseLayer) -> [&[f64]; 2] {
            [
                l.weights.as_slice().expect("standard layout"),
                l.bias.as_slice().expect("standard layout"),
            ]
        }
        let mut out = Vec::with_capacity(8);
        out.extend(dense(&self.input));
        out.extend(dense(&self.hidden));
        match &self.middle {
            MiddleLayer::Quantum(q) => out.push(q.values.as_slice().expect("standard layout")),
            MiddleLayer::Dense(d) => out.extend(dense(d)),
        }
        out.extend(dense(&self.output));
        out
    }

    fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        fn dense(l: &mut DenseLayer) -> [&mut [f64]; 2] {
            [
                l.weights.as_slice_mut().expect("standard layout"),
                l.bias.as_slice_mut().expect("standard layout"),
            ]
        }
        let mut out = Vec::with_capacity(8);
        out.extend(dense(&mut self.input));
        out.extend(dense(&mut self.hidden));
        match &mut self.middle {
            MiddleLayer::Quantum(q) => out.push(q.values.as_slice_mut().expect("standard layout")),
            MiddleLayer::Dense(d) => out.extend(dense(d)),
        }
        out.extend(dense(&mut self.output));
        out
    }
}

/// Intermediate activations kept for the backward pass.
struct Trace {
    z1: Tensor2,
    h1: Tensor2,
    z2: Tensor2,
    h2: Tensor2,
    /// Pre-activation of the dense middle layer (FNN only).
    z3: Option<Tensor2>,
    /// Per-row circuit Jacobians (HFQNN, only when requested).
    jacobians: Vec<VqcGradient>,
    m: Tensor2,
    logits: Tensor2,
}

fn quantum_layer(
    circuit: &CircuitSpec,
    weights: &VqcWeights,
    h: &Tensor2,
    with_grad: bool,
) -> Result<(Tensor2, Vec<VqcGradient>)> {
    let rows: Vec<Vec<f64>> = h.rows().into_iter().map(|r| r.to_vec()).collect();
    let n = circuit.n_qubits;
    let mut out = Array2::zeros((rows.len(), n));
    if with_grad {
        // Order-preserving parallel map; reductions happen later, sequentially.
        let grads = rows
            .par_iter()
            .map(|x| vqc::parameter_shift_grad(circuit, weights, x))
            .collect::<Result<Vec<_>>>()?;
        for (mut row, g) in out.rows_mut().into_iter().zip(&grads) {
            row.assign(&ndarray::ArrayView1::from(&g.output.expectations));
        }
        Ok((out, grads))
    } else {
        let outs = rows
            .par_iter()
            .map(|x| vqc::forward(circuit, weights, x))
            .collect::<Result<Vec<_>>>()?;
        for (mut row, o) in out.rows_mut().into_iter().zip(&outs) {
            row.assign(&ndarray::ArrayView1::from(&o.expectations));
        }
        Ok((out, Vec::new()))
    }
}

fn trace(spec: &ModelSpec, params: &ModelParams, x: &Tensor2, with_grad: bool) -> Result<Trace> {
    if x.ncols() != spec.n_features {
        return Err(Error::Shape(format!(
            "model expects {} features, batch has {}",
            spec.n_features,
            x.ncols()
        )));
    }
    params.check(spec)?;
    let z1 = params.input.forward(x)?;
    let h1 = relu(&z1);
    let z2 = params.hidden.forward(&h1)?;
    let h2 = relu(&z2);
    let (z3, jacobians, m) = match (&params.middle, &spec.circuit) {
        (MiddleLayer::Quantum(w), Some(c)) => {
            let (m, jac) = quantum_layer(c, w, &h2, with_grad)?;
            (None, jac, m)
        }
        (MiddleLayer::Dense(d), None) => {
            let z3 = d.forward(&h2)?;
            let m = relu(&z3);
            (Some(z3), Vec::new(), m)
        }
        _ => unreachable!("params.check() matched layer kinds"),
    };
    let logits = params.output.forward(&m)?;
    Ok(Trace {
        z1,
        h1,
        z2,
        h2,
        z3,
        jacobians,
        m,
        logits,
    })
}

/// Logits `[B, 2]`; no output activation.
pub fn model_forward(spec: &ModelSpec, params: &ModelParams, x: &Tensor2) -> Result<Tensor2> {
    Ok(trace(spec, params, x, false)?.logits)
}

/// Batch loss and its exact gradient with respect to every parameter.
pub fn model_backward(
    spec: &ModelSpec,
    params: &ModelParams,
    x: &Tensor2,
    targets: &Targets,
) -> Result<(f64, ModelParams)> {
    if targets.len() != x.nrows() {
        return Err(Error::Shape(format!(
            "{} targets for a batch of {}",
            targets.len(),
            x.nrows()
        )));
    }
    let t = trace(spec, params, x, true)?;
    let (loss, g_logits) = loss_and_grad(&t.logits, targets)?;

    let out = params.output.backward(&t.m, &g_logits);
    let (middle, g_h2) = match (&params.middle, &spec.circuit) {
        (MiddleLayer::Quantum(_), Some(c)) => {
            let mut gw = ndarray::Array3::zeros(c.weight_shape());
            let mut g_h2 = Array2::zeros(t.h2.raw_dim());
            for ((jac, upstream), mut g_row) in t
                .jacobians
                .iter()
                .zip(out.input.rows())
                .zip(g_h2.rows_mut())
            {
                let (w, xg) = jac.pullback(c, upstream.as_slice().expect("contiguous row"));
                gw += &w;
                g_row.assign(&ndarray::ArrayView1::from(&xg));
            }
            (MiddleLayer::Quantum(VqcWeights { values: gw }), g_h2)
        }
        (MiddleLayer::Dense(d), None) => {
            let z3 = t.z3.as_ref().expect("dense middle keeps its pre-activation");
            let g_z3 = relu_backward(z3, &out.input);
            let g = d.backward(&t.h2, &g_z3);
            (
                MiddleLayer::Dense(DenseLayer {
                    weights: g.weights,
                    bias: g.bias,
                }),
                g.input,
            )
        }
        _ => unreachable!("params.check() matched layer kinds"),
    };
    let g_z2 = relu_backward(&t.z2, &g_h2);
    let hidden = params.hidden.backward(&t.h1, &g_z2);
    let g_z1 = relu_backward(&t.z1, &hidden.input);
    let input = params.input.backward(x, &g_z1);

    let grads = ModelParams {
        input: DenseLayer {
            weights: input.weights,
            bias: input.bias,
        },
        hidden: DenseLayer {
            weights: hidden.weights,
            bias: hidden.bias,
        },
        middle,
        output: DenseLayer {
            weights: out.weights,
            bias: out.bias,
        },
    };
    Ok((loss, grads))
}

/// Argmax of the two logits per row.
pub fn predict(spec: &ModelSpec, params: &ModelParams, x: &Tensor2) -> Result<Vec<u8>> {
    let logits = model_forward(spec, params, x)?;
    Ok(logits
        .axis_iter(Axis(0))
        .map(|r| u8::from(r[1] > r[0]))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::encode_labels;
    use crate::nn::LossKind;
    use ndarray::{array, Array1};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn hfqnn(n_features: usize, n_qubits: usize) -> ModelSpec {
        ModelSpec::hfqnn(n_features, CircuitSpec::new(n_qubits, 2).unwrap()).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(ModelSpec::fnn(0, 3).is_err());
        let mut s = hfqnn(3, 2);
        s.width = 3;
        assert!(s.validate().is_err());
        let mut s = ModelSpec::fnn(3, 2).unwrap();
        s.n_outputs = 3;
        assert!(s.validate().is_err());
        assert_eq!("H-FQNN".parse::<ModelKind>().unwrap(), ModelKind::Hfqnn);
    }

    #[test]
    fn zero_output_layer_gives_zero_logits() {
        let spec = hfqnn(4, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut p = ModelParams::init(&spec, &mut rng).unwrap();
        p.output = DenseLayer::zeros(3, 2);
        let x = Array2::from_shape_fn((5, 4), |(i, j)| (i * 4 + j) as f64 * 0.3 - 2.0);
        assert_eq!(model_forward(&spec, &p, &x).unwrap(), Array2::<f64>::zeros((5, 2)));
    }

    #[test]
    fn both_models_emit_two_logits() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = Array2::from_shape_fn((7, 5), |(i, j)| ((i + 2 * j) as f64).sin());
        for spec in [hfqnn(5, 3), ModelSpec::fnn(5, 3).unwrap()] {
            let p = ModelParams::init(&spec, &mut rng).unwrap();
            assert_eq!(model_forward(&spec, &p, &x).unwrap().dim(), (7, 2));
        }
    }

    #[test]
    fn hand_trace_through_quantum_layer() {
        let circuit = CircuitSpec::new(2, 1).unwrap();
        let spec = ModelSpec::hfqnn(2, circuit.clone()).unwrap();
        let weights = VqcWeights::from_array(
            &circuit,
            ndarray::Array3::from_shape_vec((1, 2, 3), vec![0.1, 0.2, 0.3, -0.4, 0.5, -0.6]).unwrap(),
        )
        .unwrap();
        let p = ModelParams {
            input: DenseLayer::new(array![[1.0, 0.5], [-0.5, 1.0]], array![0.1, 0.0]).unwrap(),
            hidden: DenseLayer::new(array![[0.7, 0.0], [0.2, 0.9]], array![0.0, 0.3]).unwrap(),
            middle: MiddleLayer::Quantum(weights.clone()),
            output: DenseLayer::new(array![[1.0, -1.0], [0.5, 2.0]], array![0.0, -0.1]).unwrap(),
        };
        let x = array![[0.8, -0.4]];
        // input: [0.8 - 0.2 + 0.1, -0.4 - 0.4] = [0.7, -0.8] → relu [0.7, 0]
        // hidden: [0.49, 0.14 + 0.3] = [0.49, 0.44] → relu unchanged
        let z = vqc::forward(&circuit, &weights, &[0.49, 0.44]).unwrap().expectations;
        let expected = [z[0] - z[1], 0.5 * z[0] + 2.0 * z[1] - 0.1];
        let logits = model_forward(&spec, &p, &x).unwrap();
        assert!((logits[[0, 0]] - expected[0]).abs() < 1e-12);
        assert!((logits[[0, 1]] - expected[1]).abs() < 1e-12);
    }

    #[test]
    fn feature_count_mismatch() {
        let spec = ModelSpec::fnn(3, 2).unwrap();
        let p = ModelParams::init(&spec, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert!(matches!(
            model_forward(&spec, &p, &Array2::zeros((1, 4))),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn params_of_other_kind_are_rejected() {
        let fnn = ModelSpec::fnn(3, 2).unwrap();
        let p = ModelParams::init(&hfqnn(3, 2), &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert!(matches!(p.check(&fnn), Err(Error::Kind { .. })));
    }

    #[test]
    fn saturated_batch_has_vanishing_gradient() {
        let spec = ModelSpec::fnn(2, 2).unwrap();
        let mut p = ModelParams::init(&spec, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        // Output ignores its input and is extremely confident in class 1.
        p.output = DenseLayer::new(Array2::zeros((2, 2)), Array1::from(vec![-60.0, 60.0])).unwrap();
        let x = array![[0.1, 0.2], [1.0, -1.0]];
        for loss in [LossKind::BceWithLogits, LossKind::CrossEntropy] {
            let t = encode_labels(&[1, 1], loss).unwrap();
            let (l, g) = model_backward(&spec, &p, &x, &t).unwrap();
            assert!(l < 1e-20);
            assert!(g.flatten().iter().all(|v| v.abs() < 1e-20));
        }
    }

    #[test]
    fn duplicated_batch_keeps_mean_gradient() {
        let spec = hfqnn(3, 2);
        let p = ModelParams::init(&spec, &mut ChaCha8Rng::seed_from_u64(8)).unwrap();
        let x = array![[0.3, -0.2, 1.0], [-1.0, 0.5, 0.1]];
        let x2 = ndarray::concatenate(Axis(0), &[x.view(), x.view()]).unwrap();
        for loss in [LossKind::BceWithLogits, LossKind::CrossEntropy] {
            let (l1, g1) = model_backward(&spec, &p, &x, &encode_labels(&[0, 1], loss).unwrap()).unwrap();
            let (l2, g2) =
                model_backward(&spec, &p, &x2, &encode_labels(&[0, 1, 0, 1], loss).unwrap()).unwrap();
            assert!((l1 - l2).abs() < 1e-12);
            for (a, b) in g1.flatten().iter().zip(g2.flatten()) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
