use ndarray::{Array1, Array2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Batched 2-D activations, weights and gradients.
pub type Tensor2 = Array2<f64>;

/// Affine layer `y = x Wᵀ + b`, weights stored `[out, in]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseLayer {
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

/// Gradients of a dense layer plus the gradient flowing to its input.
pub struct DenseGrad {
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
    pub input: Tensor2,
}

impl DenseLayer {
    pub fn new(weights: Array2<f64>, bias: Array1<f64>) -> Result<Self> {
        if weights.nrows() != bias.len() {
            return Err(Error::Shape(format!(
                "dense layer has {} output rows but {} biases",
                weights.nrows(),
                bias.len()
            )));
        }
        if weights.iter().chain(bias.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Data("dense layer has non-finite parameters".into()));
        }
        Ok(Self {
            weights: weights.as_standard_layout().into_owned(),
            bias,
        })
    }

    /// Uniform on `[-1/sqrt(fan_in), 1/sqrt(fan_in)]` for weights and bias.
    pub fn init<R: Rng + ?Sized>(n_in: usize, n_out: usize, rng: &mut R) -> Self {
        let bound = 1.0 / (n_in as f64).sqrt();
        let weights = Array2::from_shape_simple_fn((n_out, n_in), || rng.random_range(-bound..=bound));
        let bias = Array1::from_shape_simple_fn(n_out, || rng.random_range(-bound..=bound));
        Self { weights, bias }
    }

    pub fn zeros(n_in: usize, n_out: usize) -> Self {
        Self {
            weights: Array2::zeros((n_out, n_in)),
            bias: Array1::zeros(n_out),
        }
    }

    pub fn n_in(&self) -> usize {
        self.weights.ncols()
    }

    pub fn n_out(&self) -> usize {
        self.weights.nrows()
    }

    pub fn forward(&self, x: &Tensor2) -> Result<Tensor2> {
        if x.ncols() != self.n_in() {
            return Err(Error::Shape(format!(
                "dense layer expects {} inputs, batch has {} columns",
                self.n_in(),
                x.ncols()
            )));
        }
        Ok(x.dot(&self.weights.t()) + &self.bias)
    }

    /// Backward pass for `y = forward(x)` given `dL/dy`.
    pub fn backward(&self, x: &Tensor2, grad_out: &Tensor2) -> DenseGrad {
        DenseGrad {
            // `t().dot()` may come back column-major; parameters stay row-major.
            weights: grad_out.t().dot(x).as_standard_layout().into_owned(),
            bias: grad_out.sum_axis(Axis(0)),
            input: grad_out.dot(&self.weights),
        }
    }
}

pub fn dense_forward(layer: &DenseLayer, x: &Tensor2) -> Result<Tensor2> {
    layer.forward(x)
}

/// Elementwise `max(0, x)`; NaN passes through so divergence stays visible.
pub fn relu(x: &Tensor2) -> Tensor2 {
    x.mapv(|v| if v < 0.0 { 0.0 } else { v })
}

/// `dL/dz` for `a = relu(z)`; the derivative at 0 is taken as 0.
pub(crate) fn relu_backward(pre: &Tensor2, grad: &Tensor2) -> Tensor2 {
    let mut out = grad.clone();
    out.zip_mut_with(pre, |g, &z| {
        if z <= 0.0 {
            *g = 0.0
        }
    });
    out
}
