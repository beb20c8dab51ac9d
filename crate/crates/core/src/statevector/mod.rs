//! Dense statevector simulation of small qubit registers.
//!
//! Qubit 0 is the most significant bit of a basis-state index, so the
//! amplitude vector of `|q0 q1 ... q(n-1)>` follows the usual Kronecker
//! ordering `|q0> ⊗ |q1> ⊗ ...`. Gates are applied by strided pairwise
//! updates; nothing larger than a 2x2 matrix is materialized here. The
//! [`oracle`] submodule builds full unitaries for cross-checking.

mod gate;
pub mod oracle;

pub use gate::{Gate, Gate1Q, Gate2Q, Matrix2, Rotation};
pub use oracle::dense_unitary_oracle;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest register the simulator accepts.
pub const MAX_QUBITS: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Statevector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

fn check_register(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::Config(format!(
            "register size {n_qubits} outside 1..={MAX_QUBITS}"
        )));
    }
    Ok(())
}

impl Statevector {
    /// The all-zeros basis state `|0...0>`.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    /// Computational basis state with the given index.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_register(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::Index {
                what: "basis index",
                index,
                len: dim,
            });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Wraps raw amplitudes. The vector must have length `2^n` and unit norm
    /// within 1e-10.
    pub fn from_amplitudes(n_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_register(n_qubits)?;
        if amplitudes.len() != 1 << n_qubits {
            return Err(Error::Shape(format!(
                "{} amplitudes for {n_qubits} qubits (need {})",
                amplitudes.len(),
                1usize << n_qubits
            )));
        }
        let state = Self {
            n_qubits,
            amplitudes,
        };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Data(format!("state norm² is {norm}, expected 1")));
        }
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    fn mask(&self, wire: usize) -> Result<usize> {
        if wire >= self.n_qubits {
            return Err(Error::Index {
                what: "wire",
                index: wire,
                len: self.n_qubits,
            });
        }
        Ok(1 << (self.n_qubits - 1 - wire))
    }

    pub fn apply_1q(&self, gate: &Gate1Q) -> Result<Self> {
        let mut out = self.clone();
        out.apply_1q_in_place(gate)?;
        Ok(out)
    }

    pub fn apply_2q(&self, gate: &Gate2Q) -> Result<Self> {
        let mut out = self.clone();
        out.apply_2q_in_place(gate)?;
        Ok(out)
    }

    pub fn apply(&self, gate: &Gate) -> Result<Self> {
        let mut out = self.clone();
        out.apply_in_place(gate)?;
        Ok(out)
    }

    /// Applies every gate in order and returns the resulting state.
    pub fn run(&self, gates: &[Gate]) -> Result<Self> {
        let mut out = self.clone();
        for g in gates {
            out.apply_in_place(g)?;
        }
        Ok(out)
    }

    pub fn apply_in_place(&mut self, gate: &Gate) -> Result<()> {
        match gate {
            Gate::One(g) => self.apply_1q_in_place(g),
            Gate::Two(g) => self.apply_2q_in_place(g),
        }
    }

    pub fn apply_1q_in_place(&mut self, gate: &Gate1Q) -> Result<()> {
        let mask = self.mask(gate.wire)?;
        self.apply_matrix(mask, &gate.matrix());
        Ok(())
    }

    fn apply_matrix(&mut self, mask: usize, m: &Matrix2) {
        let dim = self.amplitudes.len();
        // Blocks of 2*mask indices: the first half has the wire bit clear.
        for block in (0..dim).step_by(mask << 1) {
            for i in block..block + mask {
                let j = i | mask;
                let a = self.amplitudes[i];
                let b = self.amplitudes[j];
                self.amplitudes[i] = m[0][0] * a + m[0][1] * b;
                self.amplitudes[j] = m[1][0] * a + m[1][1] * b;
            }
        }
    }

    pub fn apply_2q_in_place(&mut self, gate: &Gate2Q) -> Result<()> {
        match *gate {
            Gate2Q::Cnot { control, target } => {
                let cmask = self.mask(control)?;
                let tmask = self.mask(target)?;
                if control == target {
                    return Err(Error::Index {
                        what: "CNOT target equal to control",
                        index: target,
                        len: self.n_qubits,
                    });
                }
                for i in 0..self.amplitudes.len() {
                    if i & cmask != 0 && i & tmask == 0 {
                        self.amplitudes.swap(i, i | tmask);
                    }
                }
                Ok(())
            }
        }
    }

    /// `<Z>` on one wire: P(bit = 0) − P(bit = 1).
    pub fn expval_z(&self, wire: usize) -> Result<f64> {
        let mask = self.mask(wire)?;
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let p = a.norm_sqr();
                if i & mask == 0 {
                    p
                } else {
                    -p
                }
            })
            .sum())
    }

    /// `<Z>` on every wire, in wire order.
    pub fn expval_z_all(&self) -> Vec<f64> {
        let n = self.n_qubits;
        let mut out = vec![0.0; n];
        for (i, a) in self.amplitudes.iter().enumerate() {
            let p = a.norm_sqr();
            for (w, acc) in out.iter_mut().enumerate() {
                if i & (1 << (n - 1 - w)) == 0 {
                    *acc += p;
                } else {
                    *acc -= p;
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol)
    }

    #[test]
    fn zero_state_vectors() {
        assert_eq!(Statevector::zero(1).unwrap().amplitudes(), &[c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(
            Statevector::zero(2).unwrap().amplitudes(),
            &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]
        );
        let s = Statevector::zero(3).unwrap();
        assert_eq!(s.amplitudes().len(), 8);
        assert_eq!(s.amplitudes()[0], c(1.0, 0.0));
    }

    #[test]
    fn register_size_is_bounded() {
        assert!(matches!(Statevector::zero(0), Err(Error::Config(_))));
        assert!(matches!(Statevector::zero(13), Err(Error::Config(_))));
        assert!(Statevector::zero(12).is_ok());
    }

    #[test]
    fn single_qubit_examples() {
        let zero = Statevector::zero(1).unwrap();
        assert_eq!(zero.apply_1q(&Gate1Q::rx(0, 0.0)).unwrap(), zero);

        let flipped = zero.apply_1q(&Gate1Q::rx(0, PI)).unwrap();
        assert!(close(flipped.amplitudes(), &[c(0.0, 0.0), c(0.0, -1.0)], 1e-15));

        let half = zero.apply_1q(&Gate1Q::ry(0, FRAC_PI_2)).unwrap();
        assert!(close(
            half.amplitudes(),
            &[c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)],
            1e-15
        ));
    }

    #[test]
    fn wire_out_of_range() {
        let s = Statevector::zero(2).unwrap();
        assert!(matches!(s.apply_1q(&Gate1Q::rx(2, 0.1)), Err(Error::Index { .. })));
        assert!(matches!(s.apply_2q(&Gate2Q::cnot(0, 5)), Err(Error::Index { .. })));
        assert!(matches!(s.apply_2q(&Gate2Q::cnot(1, 1)), Err(Error::Index { .. })));
        assert!(matches!(s.expval_z(2), Err(Error::Index { .. })));
    }

    #[test]
    fn cnot_examples() {
        // |10> is index 2 with qubit 0 as the high bit.
        let s = Statevector::basis(2, 0b10).unwrap();
        let out = s.apply_2q(&Gate2Q::cnot(0, 1)).unwrap();
        assert_eq!(out, Statevector::basis(2, 0b11).unwrap());

        let s = Statevector::zero(2).unwrap();
        assert_eq!(s.apply_2q(&Gate2Q::cnot(0, 1)).unwrap(), s);

        let plus = Statevector::from_amplitudes(
            2,
            vec![c(FRAC_1_SQRT_2, 0.0), c(0.0, 0.0), c(FRAC_1_SQRT_2, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        let bell = plus.apply_2q(&Gate2Q::cnot(0, 1)).unwrap();
        assert!(close(
            bell.amplitudes(),
            &[c(FRAC_1_SQRT_2, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(FRAC_1_SQRT_2, 0.0)],
            1e-15
        ));
    }

    #[test]
    fn expval_examples() {
        let zero = Statevector::zero(1).unwrap();
        assert_eq!(zero.expval_z(0).unwrap(), 1.0);
        let one = Statevector::basis(1, 1).unwrap();
        assert_eq!(one.expval_z(0).unwrap(), -1.0);
        let half = zero.apply_1q(&Gate1Q::ry(0, FRAC_PI_2)).unwrap();
        assert!(half.expval_z(0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn expval_all_matches_per_wire() {
        let s = Statevector::zero(3)
            .unwrap()
            .run(&[
                Gate1Q::ry(0, 0.3).into(),
                Gate1Q::rx(2, 1.7).into(),
                Gate2Q::cnot(0, 1).into(),
            ])
            .unwrap();
        let all = s.expval_z_all();
        for (w, v) in all.iter().enumerate() {
            assert!((v - s.expval_z(w).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn from_amplitudes_validates() {
        assert!(matches!(
            Statevector::from_amplitudes(1, vec![c(1.0, 0.0)]),
            Err(Error::Shape(_))
        ));
        assert!(matches!(
            Statevector::from_amplitudes(1, vec![c(1.0, 0.0), c(1.0, 0.0)]),
            Err(Error::Data(_))
        ));
    }
}
