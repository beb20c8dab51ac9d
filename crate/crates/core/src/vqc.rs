//! Variational quantum classifier layer.
//!
//! The circuit is: `RX(x_i)` angle embedding on every wire, then `n_layers`
//! strongly entangling layers (a Z-Y-Z rotation on each wire followed by a
//! ring of CNOTs `i -> (i + r_l) mod n`), then `<Z>` on every wire.
//!
//! Gradients with respect to both the rotation weights and the embedding
//! angles come from the two-term parameter-shift rule. Every parameterized
//! gate here is `exp(-i θ P / 2)` for a Pauli `P`, so
//! `d<Z_w>/dθ = (f(θ + π/2) − f(θ − π/2)) / 2` is exact.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use ndarray::{Array2, Array3};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevector::{Gate, Gate1Q, Gate2Q, Statevector, MAX_QUBITS};

/// Optional squashing of layer inputs before they become RX angles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputScaling {
    /// Angle = input.
    #[default]
    Identity,
    /// Angle = π · tanh(input), bounded to (−π, π).
    TanhPi,
}

impl InputScaling {
    fn angle(self, x: f64) -> f64 {
        match self {
            InputScaling::Identity => x,
            InputScaling::TanhPi => PI * x.tanh(),
        }
    }

    fn derivative(self, x: f64) -> f64 {
        match self {
            InputScaling::Identity => 1.0,
            InputScaling::TanhPi => {
                let t = x.tanh();
                PI * (1.0 - t * t)
            }
        }
    }
}

/// Shape of the variational circuit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitSpec {
    pub n_qubits: usize,
    pub n_layers: usize,
    /// CNOT offset per layer.
    pub ranges: Vec<usize>,
    #[serde(default)]
    pub input_scaling: InputScaling,
}

/// Layer `l` entangles wire `i` with `i + (l mod (n − 1)) + 1`.
pub fn default_ranges(n_qubits: usize, n_layers: usize) -> Vec<usize> {
    if n_qubits < 2 {
        return vec![0; n_layers];
    }
    (0..n_layers).map(|l| l % (n_qubits - 1) + 1).collect()
}

impl CircuitSpec {
    pub fn new(n_qubits: usize, n_layers: usize) -> Result<Self> {
        let spec = Self {
            n_qubits,
            n_layers,
            ranges: default_ranges(n_qubits, n_layers),
            input_scaling: InputScaling::Identity,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_ranges(mut self, ranges: Vec<usize>) -> Result<Self> {
        self.ranges = ranges;
        self.validate()?;
        Ok(self)
    }

    pub fn with_input_scaling(mut self, scaling: InputScaling) -> Self {
        self.input_scaling = scaling;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits == 0 || self.n_qubits > MAX_QUBITS {
            return Err(Error::Config(format!(
                "circuit needs 1..={MAX_QUBITS} qubits, got {}",
                self.n_qubits
            )));
        }
        if self.n_layers == 0 {
            return Err(Error::Config("circuit needs at least one layer".into()));
        }
        if self.ranges.len() != self.n_layers {
            return Err(Error::Config(format!(
                "{} entangling ranges for {} layers",
                self.ranges.len(),
                self.n_layers
            )));
        }
        if self.n_qubits >= 2 {
            if let Some(r) = self
                .ranges
                .iter()
                .find(|&&r| r == 0 || r >= self.n_qubits)
            {
                return Err(Error::Config(format!(
                    "entangling range {r} outside 1..={}",
                    self.n_qubits - 1
                )));
            }
        }
        Ok(())
    }

    pub fn n_params(&self) -> usize {
        self.n_layers * self.n_qubits * 3
    }

    pub fn weight_shape(&self) -> (usize, usize, usize) {
        (self.n_layers, self.n_qubits, 3)
    }
}

/// Rotation angles, shape `[n_layers, n_qubits, 3]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqcWeights {
    pub values: Array3<f64>,
}

impl VqcWeights {
    pub fn zeros(spec: &CircuitSpec) -> Self {
        Self {
            values: Array3::zeros(spec.weight_shape()),
        }
    }

    /// Uniform on `[0, 2π)`.
    pub fn random<R: Rng + ?Sized>(spec: &CircuitSpec, rng: &mut R) -> Self {
        Self {
            values: Array3::from_shape_simple_fn(spec.weight_shape(), || {
                rng.random_range(0.0..TAU)
            }),
        }
    }

    pub fn from_array(spec: &CircuitSpec, values: Array3<f64>) -> Result<Self> {
        let w = Self {
            values: values.as_standard_layout().into_owned(),
        };
        w.check(spec)?;
        Ok(w)
    }

    pub fn check(&self, spec: &CircuitSpec) -> Result<()> {
        if self.values.dim() != spec.weight_shape() {
            return Err(Error::Shape(format!(
                "circuit weights have shape {:?}, circuit needs {:?}",
                self.values.dim(),
                spec.weight_shape()
            )));
        }
        Ok(())
    }
}

/// `<Z>` per wire.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqcOutput {
    pub expectations: Vec<f64>,
}

/// One `RX(inputs[i])` on wire `i`.
pub fn embed_inputs(n_qubits: usize, inputs: &[f64]) -> Result<Vec<Gate>> {
    if inputs.len() != n_qubits {
        return Err(Error::Shape(format!(
            "{} embedding inputs for {n_qubits} qubits",
            inputs.len()
        )));
    }
    if let Some(i) = inputs.iter().position(|x| !x.is_finite()) {
        return Err(Error::Data(format!(
            "embedding input {i} is not finite ({})",
            inputs[i]
        )));
    }
    Ok(inputs
        .iter()
        .enumerate()
        .map(|(w, &x)| Gate1Q::rx(w, x).into())
        .collect())
}

pub fn entangling_layers(spec: &CircuitSpec, weights: &VqcWeights) -> Result<Vec<Gate>> {
    spec.validate()?;
    weights.check(spec)?;
    let n = spec.n_qubits;
    let mut gates = Vec::with_capacity(spec.n_layers * n * 2);
    for (l, &range) in spec.ranges.iter().enumerate() {
        for w in 0..n {
            let a = &weights.values;
            gates.push(Gate1Q::rot(w, [a[[l, w, 0]], a[[l, w, 1]], a[[l, w, 2]]]).into());
        }
        if n > 1 {
            for w in 0..n {
                gates.push(Gate2Q::cnot(w, (w + range) % n).into());
            }
        }
    }
    Ok(gates)
}

/// The full gate list for one evaluation, embedding angles already scaled.
pub fn circuit(spec: &CircuitSpec, weights: &VqcWeights, inputs: &[f64]) -> Result<Vec<Gate>> {
    if inputs.len() != spec.n_qubits {
        return Err(Error::Shape(format!(
            "{} inputs for {} qubits",
            inputs.len(),
            spec.n_qubits
        )));
    }
    let angles: Vec<f64> = inputs.iter().map(|&x| spec.input_scaling.angle(x)).collect();
    let mut gates = embed_inputs(spec.n_qubits, &angles)?;
    gates.extend(entangling_layers(spec, weights)?);
    Ok(gates)
}

pub fn forward(spec: &CircuitSpec, weights: &VqcWeights, inputs: &[f64]) -> Result<VqcOutput> {
    let gates = circuit(spec, weights, inputs)?;
    let state = Statevector::zero(spec.n_qubits)?.run(&gates)?;
    Ok(VqcOutput {
        expectations: state.expval_z_all(),
    })
}

/// Forward value plus both Jacobians of one circuit evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct VqcGradient {
    pub output: VqcOutput,
    /// `[n_outputs, n_params]`; columns follow `(layer, wire, angle)` row-major order.
    pub weights: Array2<f64>,
    /// `[n_outputs, n_inputs]`.
    pub inputs: Array2<f64>,
}

impl VqcGradient {
    /// Vector-Jacobian product: pulls an upstream gradient on the outputs back
    /// to the weights and the inputs.
    pub fn pullback(&self, spec: &CircuitSpec, upstream: &[f64]) -> (Array3<f64>, Vec<f64>) {
        let g = ndarray::ArrayView1::from(upstream);
        let gw = g.dot(&self.weights);
        let gi = g.dot(&self.inputs);
        let gw = gw
            .into_shape_with_order(spec.weight_shape())
            .expect("weight Jacobian has n_params columns");
        (gw, gi.to_vec())
    }

    /// Weight gradient of one output wire, shaped like the weights.
    pub fn weight_grad_for(&self, spec: &CircuitSpec, wire: usize) -> Array3<f64> {
        self.weights
            .row(wire)
            .to_owned()
            .into_shape_with_order(spec.weight_shape())
            .expect("weight Jacobian has n_params columns")
    }
}

enum Param {
    Input(usize),
    Weight(usize),
}

/// Exact Jacobians of every `<Z_w>` with respect to every rotation weight and
/// every embedding input.
pub fn parameter_shift_grad(
    spec: &CircuitSpec,
    weights: &VqcWeights,
    inputs: &[f64],
) -> Result<VqcGradient> {
    let gates = circuit(spec, weights, inputs)?;
    let n = spec.n_qubits;

    // States before each gate; prefix[k] is the input to gates[k].
    let mut prefix = Vec::with_capacity(gates.len() + 1);
    let mut state = Statevector::zero(n)?;
    for g in &gates {
        let next = state.apply(g)?;
        prefix.push(state);
        state = next;
    }
    let output = VqcOutput {
        expectations: state.expval_z_all(),
    };

    // (gate index, angle index, parameter) for every shiftable angle.
    let mut params = Vec::with_capacity(n + spec.n_params());
    let mut next_weight = 0;
    for (k, g) in gates.iter().enumerate() {
        if let Gate::One(one) = g {
            for a in 0..one.rotation.n_angles() {
                let p = if k < n {
                    Param::Input(k)
                } else {
                    next_weight += 1;
                    Param::Weight(next_weight - 1)
                };
                params.push((k, a, p));
            }
        }
    }

    let mut jac_w = Array2::zeros((n, spec.n_params()));
    let mut jac_x = Array2::zeros((n, n));
    for (k, a, p) in &params {
        let Gate::One(one) = gates[*k] else {
            unreachable!("parameters live on single-qubit gates")
        };
        let eval = |delta: f64| -> Result<Vec<f64>> {
            let mut s = prefix[*k].clone();
            let shifted = Gate1Q {
                wire: one.wire,
                rotation: one.rotation.shifted(*a, delta),
            };
            s.apply_1q_in_place(&shifted)?;
            for g in &gates[k + 1..] {
                s.apply_in_place(g)?;
            }
            Ok(s.expval_z_all())
        };
        let plus = eval(FRAC_PI_2)?;
        let minus = eval(-FRAC_PI_2)?;
        for w in 0..n {
            let d = 0.5 * (plus[w] - minus[w]);
            match p {
                Param::Input(i) => {
                    jac_x[[w, *i]] = d * spec.input_scaling.derivative(inputs[*i])
                }
                Param::Weight(j) => jac_w[[w, *j]] = d,
            }
        }
    }

    Ok(VqcGradient {
        output,
        weights: jac_w,
        inputs: jac_x,
    })
}
