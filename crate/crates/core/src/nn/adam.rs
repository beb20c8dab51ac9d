use serde::{Deserialize, Serialize};

/// Anything whose trainable values can be viewed as a list of flat slices.
///
/// Two values of the same type and shape must yield slices in the same
/// order with the same lengths.
pub trait Parameters {
    fn tensors(&self) -> Vec<&[f64]>;
    fn tensors_mut(&mut self) -> Vec<&mut [f64]>;

    fn n_values(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    fn flatten(&self) -> Vec<f64> {
        self.tensors().concat()
    }
}

impl Parameters for Vec<f64> {
    fn tensors(&self) -> Vec<&[f64]> {
        vec![self.as_slice()]
    }

    fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        vec![self.as_mut_slice()]
    }
}

/// Adam with bias-corrected moments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub step: u64,
    first: Vec<Vec<f64>>,
    second: Vec<Vec<f64>>,
}

impl AdamState {
    pub fn new<P: Parameters>(params: &P) -> Self {
        Self::with_betas(params, 0.9, 0.999, 1e-8)
    }

    pub fn with_betas<P: Parameters>(params: &P, beta1: f64, beta2: f64, eps: f64) -> Self {
        let zeros: Vec<Vec<f64>> = params.tensors().iter().map(|t| vec![0.0; t.len()]).collect();
        Self {
            beta1,
            beta2,
            eps,
            step: 0,
            first: zeros.clone(),
            second: zeros,
        }
    }

    pub fn step<P: Parameters>(&mut self, params: &mut P, grads: &P, lr: f64) {
        self.step += 1;
        let t = self.step as i32;
        let c1 = 1.0 - self.beta1.powi(t);
        let c2 = 1.0 - self.beta2.powi(t);
        let (b1, b2, eps) = (self.beta1, self.beta2, self.eps);
        for (((p, g), m), v) in params
            .tensors_mut()
            .into_iter()
            .zip(grads.tensors())
            .zip(&mut self.first)
            .zip(&mut self.second)
        {
            assert_eq!(p.len(), g.len(), "gradient shape differs from parameter shape");
            for i in 0..p.len() {
                m[i] = b1 * m[i] + (1.0 - b1) * g[i];
                v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
                let m_hat = m[i] / c1;
                let v_hat = v[i] / c2;
                p[i] -= lr * m_hat / (v_hat.sqrt() + eps);
            }
        }
    }
}

pub fn adam_step<P: Parameters>(state: &mut AdamState, params: &mut P, grads: &P, lr: f64) {
    state.step(params, grads, lr);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_leaves_parameters() {
        let mut p = vec![1.0, -2.0, 3.0];
        let mut s = AdamState::new(&p);
        adam_step(&mut s, &mut p, &vec![0.0; 3], 0.1);
        assert_eq!(p, vec![1.0, -2.0, 3.0]);
        assert_eq!(s.step, 1);
    }

    #[test]
    fn first_step_is_sign_scaled() {
        let lr = 0.02;
        for g in [1e-3, 0.5, 40.0, -7.0] {
            let mut p = vec![0.0];
            let mut s = AdamState::new(&p);
            s.step(&mut p, &vec![g], lr);
            // m̂ = g, v̂ = g², so Δ = −lr·g/(|g| + ε).
            let exact = -lr * g / (g.abs() + 1e-8);
            assert!((p[0] - exact).abs() < 1e-15, "g = {g}: {}", p[0]);
            assert!((p[0] + lr * g.signum()).abs() < 1e-4 * lr, "g = {g}: {}", p[0]);
        }
    }

    #[test]
    fn descends_a_quadratic() {
        // f(x) = (x − 3)², f'(x) = 2(x − 3)
        let f = |x: f64| (x - 3.0) * (x - 3.0);
        let mut p = vec![0.0];
        let mut s = AdamState::new(&p);
        let start = f(p[0]);
        for _ in 0..2 {
            let g = vec![2.0 * (p[0] - 3.0)];
            s.step(&mut p, &g, 0.1);
        }
        assert!(f(p[0]) < start);
    }
}
