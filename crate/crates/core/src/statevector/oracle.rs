//! Brute-force circuit unitaries for cross-checking the simulator.
//!
//! Every gate is expanded into a full `2^n x 2^n` matrix by Kronecker
//! products of per-wire 2x2 blocks, and the circuit unitary is the ordinary
//! matrix product. Cost is `O(8^n)` per gate, so registers are capped at 4.

use num_complex::Complex64;

use super::{Gate, Gate2Q, Matrix2, Statevector};
use crate::error::{Error, Result};

pub const ORACLE_MAX_QUBITS: usize = 4;

/// Dense square complex matrix, row-major.
pub type DenseMatrix = Vec<Vec<Complex64>>;

fn zeros(dim: usize) -> DenseMatrix {
    vec![vec![Complex64::new(0.0, 0.0); dim]; dim]
}

fn identity(dim: usize) -> DenseMatrix {
    let mut m = zeros(dim);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Complex64::new(1.0, 0.0);
    }
    m
}

fn kron(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let (ra, rb) = (a.len(), b.len());
    let mut out = zeros(ra * rb);
    for i in 0..ra {
        for j in 0..ra {
            for k in 0..rb {
                for l in 0..rb {
                    out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

fn matmul(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let n = a.len();
    let mut out = zeros(n);
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            for j in 0..n {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

fn add(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect())
        .collect()
}

fn block(m: &Matrix2) -> DenseMatrix {
    vec![vec![m[0][0], m[0][1]], vec![m[1][0], m[1][1]]]
}

/// `factors[w]` on wire w, wire 0 leftmost in the Kronecker product.
fn kron_wires(factors: &[DenseMatrix]) -> DenseMatrix {
    factors
        .iter()
        .skip(1)
        .fold(factors[0].clone(), |acc, f| kron(&acc, f))
}

fn check_wire(wire: usize, n: usize) -> Result<()> {
    if wire >= n {
        return Err(Error::Index {
            what: "wire",
            index: wire,
            len: n,
        });
    }
    Ok(())
}

fn gate_matrix(gate: &Gate, n: usize) -> Result<DenseMatrix> {
    let c = Complex64::new;
    match gate {
        Gate::One(g) => {
            check_wire(g.wire, n)?;
            let mut factors = vec![identity(2); n];
            factors[g.wire] = block(&g.matrix());
            Ok(kron_wires(&factors))
        }
        Gate::Two(Gate2Q::Cnot { control, target }) => {
            check_wire(*control, n)?;
            check_wire(*target, n)?;
            if control == target {
                return Err(Error::Index {
                    what: "CNOT target equal to control",
                    index: *target,
                    len: n,
                });
            }
            let zero = c(0.0, 0.0);
            let one = c(1.0, 0.0);
            let p0 = vec![vec![one, zero], vec![zero, zero]];
            let p1 = vec![vec![zero, zero], vec![zero, one]];
            let x = vec![vec![zero, one], vec![one, zero]];
            let mut idle = vec![identity(2); n];
            idle[*control] = p0;
            let mut flip = vec![identity(2); n];
            flip[*control] = p1;
            flip[*target] = x;
            Ok(add(&kron_wires(&idle), &kron_wires(&flip)))
        }
    }
}

/// Full unitary of `gates` acting on `n_qubits` (at most 4).
pub fn dense_unitary_oracle(gates: &[Gate], n_qubits: usize) -> Result<DenseMatrix> {
    if n_qubits == 0 || n_qubits > ORACLE_MAX_QUBITS {
        return Err(Error::Config(format!(
            "oracle handles 1..={ORACLE_MAX_QUBITS} qubits, got {n_qubits}"
        )));
    }
    let mut u = identity(1 << n_qubits);
    for g in gates {
        u = matmul(&gate_matrix(g, n_qubits)?, &u);
    }
    Ok(u)
}

/// `u · state`, as a plain amplitude vector.
pub fn apply_dense(u: &DenseMatrix, state: &Statevector) -> Vec<Complex64> {
    u.iter()
        .map(|row| {
            row.iter()
                .zip(state.amplitudes())
                .map(|(a, b)| a * b)
                .sum()
        })
        .collect()
}
