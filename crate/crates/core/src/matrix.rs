//! Dense reduced biquaternion matrices.
//!
//! An `m x n` matrix `A = A0 + A1 i + A2 j + A3 k` is stored as its four real
//! component matrices. The real representation
//!
//! ```text
//!        | A0  -A1   A2  -A3 |
//! A^R =  | A1   A0   A3   A2 |
//!        | A2  -A3   A0  -A1 |
//!        | A3   A2   A1   A0 |
//! ```
//!
//! is an algebra homomorphism, and its first block column (the vertical stack
//! `[A0; A1; A2; A3]`) is what the solvers work on.

use std::ops::Range;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::ReducedBiquaternion;

#[derive(Debug, Clone, PartialEq)]
pub struct RbMatrix {
    parts: [DMatrix<f64>; 4],
}

/// The signed block permutations that generate the remaining block columns of
/// `A^R` from its first block column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructuralOperator {
    Q,
    R,
    S,
}

impl RbMatrix {
    /// Builds a matrix from its four real components, which must share a shape.
    pub fn from_parts(
        a0: DMatrix<f64>,
        a1: DMatrix<f64>,
        a2: DMatrix<f64>,
        a3: DMatrix<f64>,
    ) -> Result<Self> {
        let shape = a0.shape();
        for p in [&a1, &a2, &a3] {
            if p.shape() != shape {
                return Err(Error::dims(
                    "RbMatrix::from_parts",
                    format!("{shape:?}"),
                    format!("{:?}", p.shape()),
                ));
            }
        }
        Ok(Self {
            parts: [a0, a1, a2, a3],
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        let z = DMatrix::zeros(rows, cols);
        Self {
            parts: [z.clone(), z.clone(), z.clone(), z],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_real(&DMatrix::identity(n, n))
    }

    /// Embeds a real matrix (zero `i`, `j`, `k` parts).
    pub fn from_real(x: &DMatrix<f64>) -> Self {
        let z = DMatrix::zeros(x.nrows(), x.ncols());
        Self {
            parts: [x.clone(), z.clone(), z.clone(), z],
        }
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> ReducedBiquaternion,
    ) -> Self {
        let mut out = Self::zeros(rows, cols);
        for j in 0..cols {
            for i in 0..rows {
                out.set(i, j, f(i, j));
            }
        }
        out
    }

    pub fn nrows(&self) -> usize {
        self.parts[0].nrows()
    }

    pub fn ncols(&self) -> usize {
        self.parts[0].ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.parts[0].shape()
    }

    /// Real component matrix `t` (0 = real part, 1 = `i`, 2 = `j`, 3 = `k`).
    pub fn part(&self, t: usize) -> &DMatrix<f64> {
        &self.parts[t]
    }

    pub fn parts(&self) -> &[DMatrix<f64>; 4] {
        &self.parts
    }

    pub fn into_parts(self) -> [DMatrix<f64>; 4] {
        self.parts
    }

    pub fn get(&self, i: usize, j: usize) -> ReducedBiquaternion {
        ReducedBiquaternion::new(
            self.parts[0][(i, j)],
            self.parts[1][(i, j)],
            self.parts[2][(i, j)],
            self.parts[3][(i, j)],
        )
    }

    pub fn set(&mut self, i: usize, j: usize, v: ReducedBiquaternion) {
        for (p, c) in self.parts.iter_mut().zip(v.components()) {
            p[(i, j)] = c;
        }
    }

    /// Copy of the columns in `range`.
    pub fn columns(&self, range: Range<usize>) -> Self {
        let parts = self
            .parts
            .each_ref()
            .map(|p| p.columns(range.start, range.len()).into_owned());
        Self { parts }
    }

    /// Horizontal concatenation `[self, other]`.
    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.nrows() != other.nrows() {
            return Err(Error::dims("RbMatrix::hstack", self.nrows(), other.nrows()));
        }
        let (m, n) = self.shape();
        let k = other.ncols();
        let parts = std::array::from_fn(|t| {
            let mut out = DMatrix::zeros(m, n + k);
            out.columns_mut(0, n).copy_from(&self.parts[t]);
            out.columns_mut(n, k).copy_from(&other.parts[t]);
            out
        });
        Ok(Self { parts })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "RbMatrix::add", |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "RbMatrix::sub", |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &Self,
        op: &'static str,
        f: impl Fn(&DMatrix<f64>, &DMatrix<f64>) -> DMatrix<f64>,
    ) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::dims(
                op,
                format!("{:?}", self.shape()),
                format!("{:?}", other.shape()),
            ));
        }
        Ok(Self {
            parts: std::array::from_fn(|t| f(&self.parts[t], &other.parts[t])),
        })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            parts: self.parts.each_ref().map(|p| p * s),
        }
    }

    /// Product with another RB matrix.
    pub fn matmul(&self, c: &Self) -> Result<Self> {
        if self.ncols() != c.nrows() {
            return Err(Error::dims(
                "RbMatrix::matmul",
                format!("{} rows on the right", self.ncols()),
                c.nrows(),
            ));
        }
        let [a0, a1, a2, a3] = &self.parts;
        let [b0, b1, b2, b3] = &c.parts;
        Ok(Self {
            parts: [
                a0 * b0 - a1 * b1 + a2 * b2 - a3 * b3,
                a0 * b1 + a1 * b0 + a2 * b3 + a3 * b2,
                a0 * b2 + a2 * b0 - a1 * b3 - a3 * b1,
                a0 * b3 + a3 * b0 + a1 * b2 + a2 * b1,
            ],
        })
    }

    /// Product with a real matrix on the right; acts componentwise.
    pub fn mul_real(&self, x: &DMatrix<f64>) -> Result<Self> {
        if self.ncols() != x.nrows() {
            return Err(Error::dims(
                "RbMatrix::mul_real",
                format!("{} rows on the right", self.ncols()),
                x.nrows(),
            ));
        }
        Ok(Self {
            parts: self.parts.each_ref().map(|p| p * x),
        })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.parts
            .iter()
            .map(|p| p.norm_squared())
            .sum::<f64>()
            .sqrt()
    }

    /// The `4m x 4n` real representation.
    pub fn realrep(&self) -> DMatrix<f64> {
        let (m, n) = self.shape();
        let [a0, a1, a2, a3] = &self.parts;
        // (source component, sign) for each block, row-major
        let layout: [[(&DMatrix<f64>, f64); 4]; 4] = [
            [(a0, 1.0), (a1, -1.0), (a2, 1.0), (a3, -1.0)],
            [(a1, 1.0), (a0, 1.0), (a3, 1.0), (a2, 1.0)],
            [(a2, 1.0), (a3, -1.0), (a0, 1.0), (a1, -1.0)],
            [(a3, 1.0), (a2, 1.0), (a1, 1.0), (a0, 1.0)],
        ];
        let mut out = DMatrix::zeros(4 * m, 4 * n);
        for (bi, row) in layout.iter().enumerate() {
            for (bj, (src, sign)) in row.iter().enumerate() {
                out.view_mut((bi * m, bj * n), (m, n))
                    .copy_from(&(*src * *sign));
            }
        }
        out
    }

    /// The first block column of the real representation, `[A0; A1; A2; A3]`.
    pub fn block_column(&self) -> DMatrix<f64> {
        let (m, n) = self.shape();
        let mut out = DMatrix::zeros(4 * m, n);
        for (t, p) in self.parts.iter().enumerate() {
            out.rows_mut(t * m, m).copy_from(p);
        }
        out
    }

    /// Inverse of [`RbMatrix::block_column`].
    pub fn from_block_column(stack: &DMatrix<f64>) -> Result<Self> {
        let rows = stack.nrows();
        if !rows.is_multiple_of(4) {
            return Err(Error::dims(
                "RbMatrix::from_block_column",
                "row count divisible by 4",
                rows,
            ));
        }
        let m = rows / 4;
        Ok(Self {
            parts: std::array::from_fn(|t| stack.rows(t * m, m).into_owned()),
        })
    }

    /// Full column rank test through the numerical rank of the block column.
    ///
    /// An RB matrix has full column rank exactly when `[A0; A1; A2; A3]` does.
    /// Singular values at or below `tol * sigma_max` count as zero; `None`
    /// uses [`linalg::default_rank_tol`].
    pub fn has_full_column_rank(&self, tol: Option<f64>) -> bool {
        let (m, n) = self.shape();
        if n == 0 {
            return true;
        }
        if m == 0 {
            return false;
        }
        let stack = self.block_column();
        let tol = tol.unwrap_or_else(|| linalg::default_rank_tol(4 * m, n));
        match linalg::numerical_rank(&stack, tol) {
            Ok(rank) => rank == n,
            Err(_) => false,
        }
    }
}

/// The `4m x 4m` signed block permutation `Q_m`, `R_m` or `S_m`.
///
/// With `Ac` the block column of `A`, `A^R = [Ac, Q_m Ac, R_m Ac, S_m Ac]`.
pub fn structural_operator(which: StructuralOperator, m: usize) -> DMatrix<f64> {
    // (block row, block col, sign)
    let blocks: [(usize, usize, f64); 4] = match which {
        StructuralOperator::Q => [(0, 1, -1.0), (1, 0, 1.0), (2, 3, -1.0), (3, 2, 1.0)],
        StructuralOperator::R => [(0, 2, 1.0), (1, 3, 1.0), (2, 0, 1.0), (3, 1, 1.0)],
        StructuralOperator::S => [(0, 3, -1.0), (1, 2, 1.0), (2, 1, -1.0), (3, 0, 1.0)],
    };
    let mut out = DMatrix::zeros(4 * m, 4 * m);
    for (bi, bj, sign) in blocks {
        for k in 0..m {
            out[(bi * m + k, bj * m + k)] = sign;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ReducedBiquaternion as Rb;
    use nalgebra::dmatrix;

    fn sample(m: usize, n: usize, seed: u64) -> RbMatrix {
        // small LCG; entries in [-1, 1)
        let mut s = seed
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        let mut next = move || {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        RbMatrix::from_fn(m, n, |_, _| Rb::new(next(), next(), next(), next()))
    }

    #[test]
    fn realrep_of_one_is_identity() {
        let a = RbMatrix::from_fn(1, 1, |_, _| Rb::ONE);
        assert_eq!(a.realrep(), DMatrix::identity(4, 4));
    }

    #[test]
    fn realrep_of_i() {
        let a = RbMatrix::from_fn(1, 1, |_, _| Rb::I);
        let expected = dmatrix![
            0.0, -1.0, 0.0, 0.0;
            1.0, 0.0, 0.0, 0.0;
            0.0, 0.0, 0.0, -1.0;
            0.0, 0.0, 1.0, 0.0
        ];
        assert_eq!(a.realrep(), expected);
    }

    #[test]
    fn realrep_matches_scalar_real_matrix() {
        let x = Rb::new(0.3, -1.2, 2.5, 0.7);
        let rr = RbMatrix::from_fn(1, 1, |_, _| x).realrep();
        let m = x.real_matrix();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(rr[(i, j)], m[i][j]);
            }
        }
    }

    #[test]
    fn realrep_rebuilt_from_block_column() {
        let a = sample(2, 3, 7);
        let ac = a.block_column();
        let rebuilt = {
            let cols = [
                ac.clone(),
                structural_operator(StructuralOperator::Q, 2) * &ac,
                structural_operator(StructuralOperator::R, 2) * &ac,
                structural_operator(StructuralOperator::S, 2) * &ac,
            ];
            let mut out = DMatrix::zeros(8, 12);
            for (b, c) in cols.iter().enumerate() {
                out.columns_mut(3 * b, 3).copy_from(c);
            }
            out
        };
        // a relabeling of signed entries, so exact
        assert_eq!(rebuilt, a.realrep());
    }

    #[test]
    fn block_column_examples() {
        let one = RbMatrix::from_fn(1, 1, |_, _| Rb::ONE);
        assert_eq!(one.block_column(), dmatrix![1.0; 0.0; 0.0; 0.0]);
        let j = RbMatrix::from_fn(1, 1, |_, _| Rb::J);
        assert_eq!(j.block_column(), dmatrix![0.0; 0.0; 1.0; 0.0]);
    }

    #[test]
    fn block_column_preserves_norm() {
        let a = sample(5, 4, 3);
        let lhs = a.block_column().norm();
        assert!((lhs - a.frobenius_norm()).abs() <= 1e-12 * lhs);
    }

    #[test]
    fn from_block_column_round_trip_and_errors() {
        assert_eq!(
            RbMatrix::from_block_column(&dmatrix![1.0; 0.0; 0.0; 0.0])
                .unwrap()
                .get(0, 0),
            Rb::ONE
        );
        let a = sample(3, 2, 11);
        assert_eq!(RbMatrix::from_block_column(&a.block_column()).unwrap(), a);
        assert!(matches!(
            RbMatrix::from_block_column(&DMatrix::zeros(6, 1)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn from_block_column_assembles_components() {
        let e: [DMatrix<f64>; 4] =
            std::array::from_fn(|t| DMatrix::from_element(2, 1, t as f64 + 1.0));
        let mut stack = DMatrix::zeros(8, 1);
        for (t, p) in e.iter().enumerate() {
            stack.rows_mut(2 * t, 2).copy_from(p);
        }
        let m = RbMatrix::from_block_column(&stack).unwrap();
        assert_eq!(m.get(1, 0), Rb::new(1.0, 2.0, 3.0, 4.0));
    }

    #[test]
    fn structural_operator_q1_and_squares() {
        let q1 = structural_operator(StructuralOperator::Q, 1);
        assert_eq!(
            q1,
            dmatrix![
                0.0, -1.0, 0.0, 0.0;
                1.0, 0.0, 0.0, 0.0;
                0.0, 0.0, 0.0, -1.0;
                0.0, 0.0, 1.0, 0.0
            ]
        );
        let q = structural_operator(StructuralOperator::Q, 3);
        assert_eq!(&q * &q, -DMatrix::<f64>::identity(12, 12));
        let r = structural_operator(StructuralOperator::R, 3);
        assert_eq!(&r * &r, DMatrix::<f64>::identity(12, 12));
    }

    #[test]
    fn matmul_examples() {
        let a = sample(3, 4, 5);
        assert_eq!(a.matmul(&RbMatrix::identity(4)).unwrap(), a);
        let k = RbMatrix::from_fn(1, 1, |_, _| Rb::K);
        let i = RbMatrix::from_fn(1, 1, |_, _| Rb::I);
        assert_eq!(k.matmul(&i).unwrap().get(0, 0), -Rb::J);
        assert!(a.matmul(&sample(3, 2, 1)).is_err());
    }

    #[test]
    fn matmul_matches_realrep_product() {
        let a = sample(3, 2, 21);
        let c = sample(2, 4, 22);
        let lhs = a.matmul(&c).unwrap().realrep();
        let rhs = a.realrep() * c.realrep();
        assert!((lhs - &rhs).norm() <= 1e-12 * rhs.norm());
    }

    #[test]
    fn realrep_of_real_matrix_is_block_diagonal() {
        let x = dmatrix![1.0, 2.0; -3.0, 4.5; 0.25, -1.0];
        let rr = RbMatrix::from_real(&x).realrep();
        let mut expected = DMatrix::zeros(12, 8);
        for b in 0..4 {
            expected.view_mut((3 * b, 2 * b), (3, 2)).copy_from(&x);
        }
        assert_eq!(rr, expected);
    }

    #[test]
    fn frobenius_norm_examples() {
        assert_eq!(RbMatrix::zeros(3, 2).frobenius_norm(), 0.0);
        let a = RbMatrix::from_fn(1, 1, |_, _| Rb::new(1.0, 1.0, 1.0, 1.0));
        assert_eq!(a.frobenius_norm(), 2.0);
        let b = sample(4, 3, 9);
        let half = 0.5 * b.realrep().norm();
        assert!((b.frobenius_norm() - half).abs() <= 1e-12 * half);
    }

    #[test]
    fn full_column_rank_examples() {
        assert!(RbMatrix::identity(3).has_full_column_rank(None));

        let a = sample(4, 2, 4);
        let repeated = a.hstack(&a.columns(0..1)).unwrap();
        assert!(!repeated.has_full_column_rank(None));

        // [1 + j; 1 + j]: block column (1, 1, 0, 0, 1, 1, 0, 0)^T has rank 1.
        let p = Rb::ONE + Rb::J;
        let col = RbMatrix::from_fn(2, 1, |_, _| p);
        assert!(col.has_full_column_rank(None));

        // Second column (1 - j) * first: the product vanishes, so the second
        // column is zero and the pair is rank deficient.
        let second = RbMatrix::from_fn(2, 1, |_, _| (Rb::ONE - Rb::J) * p);
        assert!(!col.hstack(&second).unwrap().has_full_column_rank(None));

        // Second column j * first equals the first column since j (1 + j) = 1 + j.
        let third = RbMatrix::from_fn(2, 1, |_, _| Rb::J * p);
        assert!(!col.hstack(&third).unwrap().has_full_column_rank(None));

        assert!(!RbMatrix::zeros(3, 2).has_full_column_rank(None));
    }

    #[test]
    fn from_parts_rejects_mismatched_shapes() {
        let r = RbMatrix::from_parts(
            DMatrix::zeros(2, 2),
            DMatrix::zeros(2, 2),
            DMatrix::zeros(2, 3),
            DMatrix::zeros(2, 2),
        );
        assert!(r.is_err());
    }
}
