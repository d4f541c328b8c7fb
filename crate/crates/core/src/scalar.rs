//! Scalar arithmetic of the reduced biquaternion algebra.
//!
//! A reduced biquaternion is `a0 + a1 i + a2 j + a3 k` with the commutative
//! multiplication table
//!
//! ```text
//! i^2 = k^2 = -1,  j^2 = 1,  ij = ji = k,  jk = kj = i,  ki = ik = -j
//! ```
//!
//! The algebra has zero divisors (`(1 + j)(1 - j) = 0`), so no division is
//! offered.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ReducedBiquaternion {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

impl ReducedBiquaternion {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Self = Self::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Self = Self::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Self = Self::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Self = Self::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(a0: f64, a1: f64, a2: f64, a3: f64) -> Self {
        Self { a0, a1, a2, a3 }
    }

    pub const fn from_real(a0: f64) -> Self {
        Self::new(a0, 0.0, 0.0, 0.0)
    }

    pub fn components(&self) -> [f64; 4] {
        [self.a0, self.a1, self.a2, self.a3]
    }

    pub fn from_components(c: [f64; 4]) -> Self {
        Self::new(c[0], c[1], c[2], c[3])
    }

    /// Euclidean norm of the four components.
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a0 * self.a0 + self.a1 * self.a1 + self.a2 * self.a2 + self.a3 * self.a3
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.a0 * s, self.a1 * s, self.a2 * s, self.a3 * s)
    }

    /// Componentwise comparison with absolute tolerance `tol`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.components()
            .iter()
            .zip(other.components())
            .all(|(a, b)| (a - b).abs() <= tol)
    }

    /// The 4x4 real matrix of multiplication by `self`, row-major.
    ///
    /// Multiplying this matrix with the component vector of `y` yields the
    /// components of `self * y`.
    pub fn real_matrix(&self) -> [[f64; 4]; 4] {
        let [a0, a1, a2, a3] = self.components();
        [
            [a0, -a1, a2, -a3],
            [a1, a0, a3, a2],
            [a2, -a3, a0, -a1],
            [a3, a2, a1, a0],
        ]
    }
}

impl Add for ReducedBiquaternion {
    type Output = Self;
    fn add(self, y: Self) -> Self {
        Self::new(
            self.a0 + y.a0,
            self.a1 + y.a1,
            self.a2 + y.a2,
            self.a3 + y.a3,
        )
    }
}

impl AddAssign for ReducedBiquaternion {
    fn add_assign(&mut self, y: Self) {
        *self = *self + y;
    }
}

impl Sub for ReducedBiquaternion {
    type Output = Self;
    fn sub(self, y: Self) -> Self {
        Self::new(
            self.a0 - y.a0,
            self.a1 - y.a1,
            self.a2 - y.a2,
            self.a3 - y.a3,
        )
    }
}

impl Neg for ReducedBiquaternion {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.a0, -self.a1, -self.a2, -self.a3)
    }
}

impl Mul for ReducedBiquaternion {
    type Output = Self;
    fn mul(self, y: Self) -> Self {
        let Self { a0, a1, a2, a3 } = self;
        let Self {
            a0: b0,
            a1: b1,
            a2: b2,
            a3: b3,
        } = y;
        // paired so that x * y == y * x holds bit-for-bit
        Self::new(
            a0 * b0 - a1 * b1 + a2 * b2 - a3 * b3,
            (a0 * b1 + a1 * b0) + (a2 * b3 + a3 * b2),
            (a0 * b2 + a2 * b0) - (a1 * b3 + a3 * b1),
            (a0 * b3 + a3 * b0) + (a1 * b2 + a2 * b1),
        )
    }
}

impl Mul<f64> for ReducedBiquaternion {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        self.scale(s)
    }
}

impl From<f64> for ReducedBiquaternion {
    fn from(a0: f64) -> Self {
        Self::from_real(a0)
    }
}

impl fmt::Display for ReducedBiquaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.a0)?;
        for (c, unit) in [(self.a1, 'i'), (self.a2, 'j'), (self.a3, 'k')] {
            if c.is_sign_negative() {
                write!(f, " - {}{unit}", -c)?;
            } else {
                write!(f, " + {c}{unit}")?;
            }
        }
        Ok(())
    }
}
