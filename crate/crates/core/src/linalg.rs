//! Real dense kernels used by the solvers.
//!
//! Matrices are nalgebra throughout. The SVD is delegated to faer, whose
//! divide-and-conquer implementation stays backward stable on exactly
//! rank-deficient input (nalgebra's does not). Everything the solvers need on
//! top of it (partial Householder reduction, the `n2 | d` partition of the
//! right singular vectors, truncation, pseudoinverse) lives here.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// `max(rows, cols) * eps`, the relative threshold below which a singular
/// value is treated as zero.
pub fn default_rank_tol(rows: usize, cols: usize) -> f64 {
    rows.max(cols).max(1) as f64 * f64::EPSILON
}

/// Thin SVD `M = U diag(sigma) V^T`, `sigma` nonincreasing.
pub(crate) struct Svd {
    pub u: DMatrix<f64>,
    pub singular_values: DVector<f64>,
    pub v_t: DMatrix<f64>,
}

fn to_faer(m: &DMatrix<f64>) -> faer::Mat<f64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn no_convergence(m: &DMatrix<f64>) -> Error {
    Error::SvdNoConvergence {
        rows: m.nrows(),
        cols: m.ncols(),
    }
}

pub(crate) fn svd(m: &DMatrix<f64>) -> Result<Svd> {
    let s = to_faer(m).thin_svd().map_err(|_| no_convergence(m))?;
    let (u, sigma, v) = (s.U(), s.S().column_vector(), s.V());
    let k = sigma.nrows();
    let out = Svd {
        u: DMatrix::from_fn(u.nrows(), k, |i, j| u[(i, j)]),
        singular_values: DVector::from_fn(k, |i, _| sigma[i].max(0.0)),
        v_t: DMatrix::from_fn(k, v.nrows(), |i, j| v[(j, i)]),
    };
    debug_assert!(out
        .singular_values
        .as_slice()
        .windows(2)
        .all(|w| w[0] >= w[1]));
    Ok(out)
}

pub(crate) fn singular_values(m: &DMatrix<f64>) -> Result<DVector<f64>> {
    if m.is_empty() {
        return Ok(DVector::zeros(0));
    }
    let s = to_faer(m)
        .singular_values()
        .map_err(|_| no_convergence(m))?;
    Ok(DVector::from_iterator(
        s.len(),
        s.into_iter().map(|v| v.max(0.0)),
    ))
}

/// Number of singular values above `tol * sigma_max`.
pub fn numerical_rank(m: &DMatrix<f64>, tol: f64) -> Result<usize> {
    let s = singular_values(m)?;
    let smax = s.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return Ok(0);
    }
    Ok(s.iter().filter(|&&v| v > tol * smax).count())
}

/// One Householder reflector `I - beta v v^T` acting on rows `offset..`.
#[derive(Debug, Clone)]
struct Reflector {
    offset: usize,
    v: DVector<f64>,
    beta: f64,
}

impl Reflector {
    /// Reflector mapping `x` onto `|x| e1`; the resulting pivot is nonnegative.
    fn annihilating(offset: usize, x: &DVector<f64>) -> (Self, f64) {
        let x0 = x[0];
        let sigma: f64 = x.rows(1, x.len() - 1).norm_squared();
        let mut v = x.clone();
        v[0] = 1.0;
        if sigma == 0.0 {
            let beta = if x0 >= 0.0 { 0.0 } else { 2.0 };
            return (Self { offset, v, beta }, x0.abs());
        }
        let mu = (x0 * x0 + sigma).sqrt();
        let v0 = if x0 <= 0.0 {
            x0 - mu
        } else {
            -sigma / (x0 + mu)
        };
        let beta = 2.0 * v0 * v0 / (sigma + v0 * v0);
        for k in 1..v.len() {
            v[k] /= v0;
        }
        (Self { offset, v, beta }, mu)
    }

    fn apply(&self, m: &mut DMatrix<f64>) {
        if self.beta == 0.0 {
            return;
        }
        let len = self.v.len();
        let mut rows = m.rows_mut(self.offset, len);
        let w = rows.tr_mul(&self.v) * self.beta;
        rows.ger(-1.0, &self.v, &w, 1.0);
    }
}

/// `Q^T [Ca, Cb, D]` after `n1` Householder reflections on the leading columns.
///
/// ```text
///            n1    n2    d
/// Q^T M = [ R11   R12   R1d ]   n1
///         [  0    R22   R2d ]   p - n1
/// ```
#[derive(Debug, Clone)]
pub struct HouseholderReduction {
    reflectors: Vec<Reflector>,
    rows: usize,
    pub r11: DMatrix<f64>,
    pub r12: DMatrix<f64>,
    pub r1d: DMatrix<f64>,
    pub r22: DMatrix<f64>,
    pub r2d: DMatrix<f64>,
}

impl HouseholderReduction {
    pub fn n1(&self) -> usize {
        self.r11.nrows()
    }

    /// `[R22, R2d]`.
    pub fn tail(&self) -> DMatrix<f64> {
        hcat(&self.r22, &self.r2d)
    }

    /// `Q x` for `x` with as many rows as the reduced matrix.
    pub fn apply_q(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = x.clone();
        for r in self.reflectors.iter().rev() {
            r.apply(&mut out);
        }
        out
    }

    /// `Q^T x`.
    pub fn apply_qt(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = x.clone();
        for r in &self.reflectors {
            r.apply(&mut out);
        }
        out
    }

    /// Dense orthogonal factor.
    pub fn q(&self) -> DMatrix<f64> {
        self.apply_q(&DMatrix::identity(self.rows, self.rows))
    }
}

/// Applies `n1` Householder reflections to the leading columns of `m`.
///
/// Columns `n1..n1 + n2` become the `R12 / R22` blocks and the rest the
/// `R1d / R2d` blocks. Fails with [`Error::RankDeficient`] if a pivot drops
/// to `tol` (relative to the norm of the leading block) or below; `None` uses
/// [`default_rank_tol`].
pub fn householder_partial(
    m: &DMatrix<f64>,
    n1: usize,
    n2: usize,
    tol: Option<f64>,
) -> Result<HouseholderReduction> {
    let (p, cols) = m.shape();
    if n1 + n2 > cols {
        return Err(Error::dims(
            "householder_partial",
            format!("at least {} columns", n1 + n2),
            cols,
        ));
    }
    if n1 > p {
        return Err(Error::dims(
            "householder_partial",
            format!("at least {n1} rows"),
            p,
        ));
    }
    let tol = tol.unwrap_or_else(|| default_rank_tol(p, n1));
    let scale = m.columns(0, n1).norm();

    let mut work = m.clone();
    let mut reflectors = Vec::with_capacity(n1);
    for k in 0..n1 {
        let x: DVector<f64> = work.view((k, k), (p - k, 1)).column(0).into_owned();
        let (refl, pivot) = Reflector::annihilating(k, &x);
        if pivot <= tol * scale || scale == 0.0 {
            return Err(Error::RankDeficient { column: k, pivot });
        }
        refl.apply(&mut work);
        // exact zeros below the pivot
        work[(k, k)] = pivot;
        for i in k + 1..p {
            work[(i, k)] = 0.0;
        }
        reflectors.push(refl);
    }

    let d = cols - n1 - n2;
    let block =
        |r0: usize, nr: usize, c0: usize, nc: usize| work.view((r0, c0), (nr, nc)).into_owned();
    Ok(HouseholderReduction {
        r11: block(0, n1, 0, n1),
        r12: block(0, n1, n1, n2),
        r1d: block(0, n1, n1 + n2, d),
        r22: block(n1, p - n1, n1, n2),
        r2d: block(n1, p - n1, n1 + n2, d),
        reflectors,
        rows: p,
    })
}

/// Thin SVD `M = U diag(sigma) V^T` of a `p x (n2 + d)` matrix, split at `n2`.
///
/// `u1` holds the first `n2` left singular vectors and `u2` the remaining `d`
/// (the thin factor; the orthogonal complement beyond `n2 + d` columns is not
/// formed). `V` is square and split into `V11 (n2 x n2)`, `V12 (n2 x d)`,
/// `V21 (d x n2)` and `V22 (d x d)`.
#[derive(Debug, Clone)]
pub struct SvdPartition {
    pub u1: DMatrix<f64>,
    pub u2: DMatrix<f64>,
    pub singular_values: Vec<f64>,
    pub v11: DMatrix<f64>,
    pub v12: DMatrix<f64>,
    pub v21: DMatrix<f64>,
    pub v22: DMatrix<f64>,
}

impl SvdPartition {
    pub fn n2(&self) -> usize {
        self.v11.nrows()
    }

    pub fn d(&self) -> usize {
        self.v22.nrows()
    }

    pub fn u(&self) -> DMatrix<f64> {
        hcat(&self.u1, &self.u2)
    }

    pub fn v(&self) -> DMatrix<f64> {
        let top = hcat(&self.v11, &self.v12);
        let bottom = hcat(&self.v21, &self.v22);
        vcat(&top, &bottom)
    }

    pub fn sigma(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_column_slice(&self.singular_values))
    }

    /// `U diag(sigma) V^T`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        self.u() * self.sigma() * self.v().transpose()
    }

    /// Best rank-`n2` approximation `U1 Sigma1 [V11^T, V21^T]`.
    pub fn leading_part(&self) -> DMatrix<f64> {
        let n2 = self.n2();
        let mut us = self.u1.clone();
        for (j, s) in self.singular_values.iter().take(n2).enumerate() {
            us.column_mut(j).scale_mut(*s);
        }
        let v1 = vcat(&self.v11, &self.v21);
        us * v1.transpose()
    }
}

pub fn svd_partitioned(m: &DMatrix<f64>, n2: usize) -> Result<SvdPartition> {
    let (p, cols) = m.shape();
    if n2 > cols {
        return Err(Error::dims(
            "svd_partitioned",
            format!("at least {n2} columns"),
            cols,
        ));
    }
    if p < cols {
        return Err(Error::dims(
            "svd_partitioned",
            format!("at least {cols} rows"),
            p,
        ));
    }
    let d = cols - n2;
    if cols == 0 {
        let e = DMatrix::zeros(0, 0);
        return Ok(SvdPartition {
            u1: DMatrix::zeros(p, 0),
            u2: DMatrix::zeros(p, 0),
            singular_values: Vec::new(),
            v11: e.clone(),
            v12: e.clone(),
            v21: e.clone(),
            v22: e,
        });
    }
    let s = svd(m)?;
    let u = s.u;
    let v = s.v_t.transpose();
    let sv = s.singular_values.iter().cloned().collect();
    Ok(SvdPartition {
        u1: u.columns(0, n2).into_owned(),
        u2: u.columns(n2, d).into_owned(),
        singular_values: sv,
        v11: v.view((0, 0), (n2, n2)).into_owned(),
        v12: v.view((0, n2), (n2, d)).into_owned(),
        v21: v.view((n2, 0), (d, n2)).into_owned(),
        v22: v.view((n2, n2), (d, d)).into_owned(),
    })
}

/// Truncated SVD of a matrix and the Frobenius error it incurs.
#[derive(Debug, Clone)]
pub struct LowRankApprox {
    pub matrix: DMatrix<f64>,
    /// `sqrt(sum_{i > k} sigma_i^2)`.
    pub error: f64,
    /// Set when `k` is at least the numerical rank; `matrix` is then the input.
    pub degenerate: bool,
}

/// Best Frobenius-norm approximation of rank `k`.
pub fn best_rank_k(m: &DMatrix<f64>, k: usize) -> Result<LowRankApprox> {
    let (rows, cols) = m.shape();
    if m.is_empty() {
        return Ok(LowRankApprox {
            matrix: m.clone(),
            error: 0.0,
            degenerate: true,
        });
    }
    let s = svd(m)?;
    let rank = {
        let smax = s.singular_values.max();
        let tol = default_rank_tol(rows, cols) * smax;
        s.singular_values.iter().filter(|&&v| v > tol).count()
    };
    if k >= rank {
        return Ok(LowRankApprox {
            matrix: m.clone(),
            error: 0.0,
            degenerate: true,
        });
    }
    let (u, vt) = (&s.u, &s.v_t);
    let mut us = u.columns(0, k).into_owned();
    for j in 0..k {
        us.column_mut(j).scale_mut(s.singular_values[j]);
    }
    let matrix = us * vt.rows(0, k);
    let error = s
        .singular_values
        .iter()
        .skip(k)
        .map(|v| v * v)
        .sum::<f64>()
        .sqrt();
    Ok(LowRankApprox {
        matrix,
        error,
        degenerate: false,
    })
}

/// Pseudoinverse together with the singular values it was built from.
pub(crate) fn pinv_with_spectrum(
    m: &DMatrix<f64>,
    tol: Option<f64>,
) -> Result<(DMatrix<f64>, Vec<f64>)> {
    let (rows, cols) = m.shape();
    if m.is_empty() {
        return Ok((DMatrix::zeros(cols, rows), Vec::new()));
    }
    let s = svd(m)?;
    let tol = tol.unwrap_or_else(|| default_rank_tol(rows, cols));
    let cutoff = tol * s.singular_values.max();
    let (u, vt) = (&s.u, &s.v_t);
    let mut v_scaled = vt.transpose();
    for (j, &sv) in s.singular_values.iter().enumerate() {
        let inv = if sv > cutoff { 1.0 / sv } else { 0.0 };
        v_scaled.column_mut(j).scale_mut(inv);
    }
    Ok((
        v_scaled * u.transpose(),
        s.singular_values.iter().cloned().collect(),
    ))
}

/// Moore-Penrose pseudoinverse; singular values at or below `tol * sigma_max`
/// are dropped. `None` uses [`default_rank_tol`].
pub fn pinv(m: &DMatrix<f64>, tol: Option<f64>) -> Result<DMatrix<f64>> {
    pinv_with_spectrum(m, tol).map(|(p, _)| p)
}

/// Minimum-norm least squares solution `C^+ D` of `min ||C X - D||_F`.
///
/// Every minimizer has the form `C^+ D + (I - C^+ C) Y`; only the least-norm
/// member is returned.
pub fn ls_real(c: &DMatrix<f64>, d: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if c.nrows() != d.nrows() {
        return Err(Error::dims("ls_real", c.nrows(), d.nrows()));
    }
    Ok(pinv(c, None)? * d)
}

pub(crate) fn hcat(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    debug_assert_eq!(a.nrows(), b.nrows());
    let mut out = DMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    out.columns_mut(0, a.ncols()).copy_from(a);
    out.columns_mut(a.ncols(), b.ncols()).copy_from(b);
    out
}

pub(crate) fn vcat(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    debug_assert_eq!(a.ncols(), b.ncols());
    let mut out = DMatrix::zeros(a.nrows() + b.nrows(), a.ncols());
    out.rows_mut(0, a.nrows()).copy_from(a);
    out.rows_mut(a.nrows(), b.nrows()).copy_from(b);
    out
}
