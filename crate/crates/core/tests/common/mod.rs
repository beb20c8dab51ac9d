#![allow(dead_code)]

use std::f64::consts::TAU;

use adsb_hqnn::data::{encode_labels, Targets};
use adsb_hqnn::nn::{loss, model_backward, model_forward, LossKind, ModelParams, ModelSpec, Parameters};
use adsb_hqnn::statevector::{Gate, Gate1Q, Gate2Q, Statevector};
use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;

pub fn random_gate<R: Rng>(rng: &mut R, n: usize) -> Gate {
    let wire = rng.random_range(0..n);
    let pick = if n > 1 { 5 } else { 4 };
    let kind = rng.random_range(0..pick);
    let a: [f64; 3] = std::array::from_fn(|_| rng.random_range(-TAU..TAU));
    match kind {
        0 => Gate1Q::rx(wire, a[0]).into(),
        1 => Gate1Q::ry(wire, a[0]).into(),
        2 => Gate1Q::rz(wire, a[0]).into(),
        3 => Gate1Q::rot(wire, a).into(),
        _ => {
            let target = (wire + rng.random_range(1..n)) % n;
            Gate2Q::cnot(wire, target).into()
        }
    }
}

pub fn random_circuit<R: Rng>(rng: &mut R, n: usize, max_gates: usize) -> Vec<Gate> {
    let len = rng.random_range(0..=max_gates);
    (0..len).map(|_| random_gate(rng, n)).collect()
}

pub fn random_state<R: Rng>(rng: &mut R, n: usize) -> Statevector {
    let mut amps: Vec<Complex64> = (0..1usize << n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    Statevector::from_amplitudes(n, amps).expect("normalized")
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Largest violation of `|a − b| ≤ max(abs_tol, rel_tol · max(|a|, |b|))`
/// between analytic and central-difference gradients of the batch loss,
/// as a ratio to the allowed error (≤ 1 means every entry passes).
pub fn model_fd_check(
    spec: &ModelSpec,
    params: &ModelParams,
    x: &Array2<f64>,
    targets: &Targets,
    h: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> f64 {
    let (_, grads) = model_backward(spec, params, x, targets).unwrap();
    let analytic = grads.flatten();
    let f = |p: &ModelParams| loss(&model_forward(spec, p, x).unwrap(), targets).unwrap();
    let mut worst: f64 = 0.0;
    for (k, &a) in analytic.iter().enumerate() {
        let mut plus = params.clone();
        let mut minus = params.clone();
        nudge(&mut plus, k, h);
        nudge(&mut minus, k, -h);
        let fd = (f(&plus) - f(&minus)) / (2.0 * h);
        let allowed = abs_tol.max(rel_tol * a.abs().max(fd.abs()));
        worst = worst.max((a - fd).abs() / allowed);
    }
    worst
}

fn nudge(p: &mut ModelParams, mut index: usize, delta: f64) {
    for t in p.tensors_mut() {
        if index < t.len() {
            t[index] += delta;
            return;
        }
        index -= t.len();
    }
    panic!("parameter index out of range");
}

pub fn batch_targets<R: Rng>(rng: &mut R, b: usize, loss: LossKind) -> Targets {
    let mut labels: Vec<u8> = (0..b).map(|_| rng.random_range(0..2)).collect();
    labels[0] = 0;
    labels[b - 1] = 1;
    encode_labels(&labels, loss).unwrap()
}
