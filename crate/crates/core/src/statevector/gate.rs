use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A 2x2 complex matrix, row-major.
pub type Matrix2 = [[Complex64; 2]; 2];

/// Single-qubit rotation with its angle(s) in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Rotation {
    X(f64),
    Y(f64),
    Z(f64),
    /// `U(t1, t2, t3) = RZ(t1) · RY(t2) · RZ(t3)`; `t3` acts first.
    Zyz([f64; 3]),
}

impl Rotation {
    /// Number of scalar angles carried by this rotation.
    pub fn n_angles(&self) -> usize {
        match self {
            Rotation::Zyz(_) => 3,
            _ => 1,
        }
    }

    pub fn angle(&self, k: usize) -> f64 {
        match (self, k) {
            (Rotation::X(t) | Rotation::Y(t) | Rotation::Z(t), 0) => *t,
            (Rotation::Zyz(a), k) if k < 3 => a[k],
            _ => panic!("rotation has no angle {k}"),
        }
    }

    /// Same rotation with angle `k` moved by `delta`.
    pub fn shifted(&self, k: usize, delta: f64) -> Rotation {
        match (*self, k) {
            (Rotation::X(t), 0) => Rotation::X(t + delta),
            (Rotation::Y(t), 0) => Rotation::Y(t + delta),
            (Rotation::Z(t), 0) => Rotation::Z(t + delta),
            (Rotation::Zyz(mut a), k) if k < 3 => {
                a[k] += delta;
                Rotation::Zyz(a)
            }
            _ => panic!("rotation has no angle {k}"),
        }
    }

    pub fn matrix(&self) -> Matrix2 {
        let c = Complex64::new;
        match *self {
            Rotation::X(t) => {
                let (s, co) = (t / 2.0).sin_cos();
                [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
            }
            Rotation::Y(t) => {
                let (s, co) = (t / 2.0).sin_cos();
                [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
            }
            Rotation::Z(t) => [
                [Complex64::from_polar(1.0, -t / 2.0), c(0.0, 0.0)],
                [c(0.0, 0.0), Complex64::from_polar(1.0, t / 2.0)],
            ],
            Rotation::Zyz([t1, t2, t3]) => {
                let (s, co) = (t2 / 2.0).sin_cos();
                let sum = (t1 + t3) / 2.0;
                let diff = (t1 - t3) / 2.0;
                [
                    [
                        Complex64::from_polar(co, -sum),
                        -Complex64::from_polar(s, -diff),
                    ],
                    [
                        Complex64::from_polar(s, diff),
                        Complex64::from_polar(co, sum),
                    ],
                ]
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gate1Q {
    pub wire: usize,
    pub rotation: Rotation,
}

impl Gate1Q {
    pub fn rx(wire: usize, theta: f64) -> Self {
        Self {
            wire,
            rotation: Rotation::X(theta),
        }
    }

    pub fn ry(wire: usize, theta: f64) -> Self {
        Self {
            wire,
            rotation: Rotation::Y(theta),
        }
    }

    pub fn rz(wire: usize, theta: f64) -> Self {
        Self {
            wire,
            rotation: Rotation::Z(theta),
        }
    }

    pub fn rot(wire: usize, angles: [f64; 3]) -> Self {
        Self {
            wire,
            rotation: Rotation::Zyz(angles),
        }
    }

    pub fn matrix(&self) -> Matrix2 {
        self.rotation.matrix()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Gate2Q {
    Cnot { control: usize, target: usize },
}

impl Gate2Q {
    pub fn cnot(control: usize, target: usize) -> Self {
        Gate2Q::Cnot { control, target }
    }
}

/// Any gate of the supported set, in circuit order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    One(Gate1Q),
    Two(Gate2Q),
}

impl From<Gate1Q> for Gate {
    fn from(g: Gate1Q) -> Self {
        Gate::One(g)
    }
}

impl From<Gate2Q> for Gate {
    fn from(g: Gate2Q) -> Self {
        Gate::Two(g)
    }
}

#[cfg(test)]
#[allow(clippy::needless_range_loop)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn dagger_product(m: &Matrix2) -> Matrix2 {
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    out[i][j] += m[i][k] * m[j][k].conj();
                }
            }
        }
        out
    }

    #[test]
    fn rx_pi_matrix() {
        let m = Rotation::X(PI).matrix();
        assert!(m[0][0].norm() < 1e-15);
        assert!((m[1][0] - Complex64::new(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn zyz_matches_product_of_elementary_rotations() {
        let (t1, t2, t3) = (0.3, -1.1, 2.4);
        let mul = |a: Matrix2, b: Matrix2| {
            let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    for k in 0..2 {
                        out[i][j] += a[i][k] * b[k][j];
                    }
                }
            }
            out
        };
        let expected = mul(
            Rotation::Z(t1).matrix(),
            mul(Rotation::Y(t2).matrix(), Rotation::Z(t3).matrix()),
        );
        let got = Rotation::Zyz([t1, t2, t3]).matrix();
        for i in 0..2 {
            for j in 0..2 {
                assert!((expected[i][j] - got[i][j]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn zyz_at_zero_is_identity() {
        let m = Rotation::Zyz([0.0; 3]).matrix();
        assert_eq!(m[0][0], Complex64::new(1.0, 0.0));
        assert_eq!(m[1][1], Complex64::new(1.0, 0.0));
        assert_eq!(m[0][1].norm(), 0.0);
    }

    #[test]
    fn rotations_are_unitary() {
        for t in [-3.0, -0.5, 0.0, 0.7, 5.9] {
            for r in [
                Rotation::X(t),
                Rotation::Y(t),
                Rotation::Z(t),
                Rotation::Zyz([t, 0.4 * t, -t]),
            ] {
                let p = dagger_product(&r.matrix());
                for i in 0..2 {
                    for j in 0..2 {
                        let id = if i == j { 1.0 } else { 0.0 };
                        assert!((p[i][j] - Complex64::new(id, 0.0)).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn shifted_moves_one_angle() {
        let r = Rotation::Zyz([1.0, 2.0, 3.0]).shifted(1, 0.5);
        assert_eq!(r, Rotation::Zyz([1.0, 2.5, 3.0]));
        assert_eq!(Rotation::X(1.0).shifted(0, -1.0), Rotation::X(0.0));
    }
}
