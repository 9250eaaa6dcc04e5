//! Real 2x2 matrices and the symplectic unit `J`.

use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

/// A real 2x2 matrix stored row-major: `m[row][col]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Mat2 {
    pub m: [[f64; 2]; 2],
}

/// Alias used where the matrix is known to be symmetric (potential values).
pub type SymmetricMatrix2 = Mat2;

impl Mat2 {
    pub const ZERO: Mat2 = Mat2 {
        m: [[0.0, 0.0], [0.0, 0.0]],
    };
    pub const IDENTITY: Mat2 = Mat2 {
        m: [[1.0, 0.0], [0.0, 1.0]],
    };
    /// `J = [[0, 1], [-1, 0]]`, so `J^2 = -I`.
    pub const J: Mat2 = Mat2 {
        m: [[0.0, 1.0], [-1.0, 0.0]],
    };
    pub const SIGMA1: Mat2 = Mat2 {
        m: [[0.0, 1.0], [1.0, 0.0]],
    };
    pub const SIGMA3: Mat2 = Mat2 {
        m: [[1.0, 0.0], [0.0, -1.0]],
    };

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2 {
            m: [[a, b], [c, d]],
        }
    }

    pub fn symmetric(d1: f64, off: f64, d2: f64) -> Self {
        Mat2::new(d1, off, off, d2)
    }

    pub fn scalar(s: f64) -> Self {
        Mat2::new(s, 0.0, 0.0, s)
    }

    /// `exp(J phi) = cos(phi) I + sin(phi) J`.
    pub fn rotation(phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        Mat2::new(c, s, -s, c)
    }

    pub fn from_row_major(v: &[f64]) -> Self {
        Mat2::new(v[0], v[1], v[2], v[3])
    }

    pub fn to_row_major(&self) -> [f64; 4] {
        [self.m[0][0], self.m[0][1], self.m[1][0], self.m[1][1]]
    }

    pub fn trace(&self) -> f64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn transpose(&self) -> Self {
        Mat2::new(self.m[0][0], self.m[1][0], self.m[0][1], self.m[1][1])
    }

    pub fn scale(&self, s: f64) -> Self {
        Mat2::new(
            self.m[0][0] * s,
            self.m[0][1] * s,
            self.m[1][0] * s,
            self.m[1][1] * s,
        )
    }

    /// Largest column Euclidean norm, `max_j sqrt(sum_i |c_ij|^2)`.
    pub fn op_norm(&self) -> f64 {
        let c0 = self.m[0][0].hypot(self.m[1][0]);
        let c1 = self.m[0][1].hypot(self.m[1][1]);
        c0.max(c1)
    }

    pub fn max_abs(&self) -> f64 {
        self.m
            .iter()
            .flatten()
            .fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|v| v.is_finite())
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.m[0][0] + o.m[0][0],
            self.m[0][1] + o.m[0][1],
            self.m[1][0] + o.m[1][0],
            self.m[1][1] + o.m[1][1],
        )
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.m[0][0] - o.m[0][0],
            self.m[0][1] - o.m[0][1],
            self.m[1][0] - o.m[1][0],
            self.m[1][1] - o.m[1][1],
        )
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale(-1.0)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let a = &self.m;
        let b = &o.m;
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

impl Mul<f64> for Mat2 {
    type Output = Mat2;
    fn mul(self, s: f64) -> Mat2 {
        self.scale(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j_squares_to_minus_identity() {
        assert_eq!(Mat2::J * Mat2::J, -Mat2::IDENTITY);
    }

    #[test]
    fn rotation_is_exp_of_j() {
        let phi = 0.7;
        let r = Mat2::rotation(phi);
        let expected = Mat2::IDENTITY.scale(phi.cos()) + Mat2::J.scale(phi.sin());
        assert!((r - expected).max_abs() < 1e-15);
        assert!((r.det() - 1.0).abs() < 1e-15);
        assert!((Mat2::rotation(-phi) * r - Mat2::IDENTITY).max_abs() < 1e-15);
    }

    #[test]
    fn op_norm_is_max_column_norm() {
        let m = Mat2::new(3.0, 0.0, 4.0, 1.0);
        assert_eq!(m.op_norm(), 5.0);
    }
}
