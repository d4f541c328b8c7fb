//! Least squares, total least squares and mixed LS-TLS solvers.
//!
//! An RB system `A X ~ B` with a real unknown `X` is solved through its block
//! column stacks `C = [Ca, Cb]` and `D`: a real `X` solves the RB problem
//! exactly when it solves the real problem on the stacks, and the optimal
//! corrections of the two problems have the same Frobenius norm.
//!
//! The mixed solver keeps the first `n1` columns of `A` exact:
//!
//! 1. reduce `[Ca, Cb, D]` with `n1` Householder reflections,
//! 2. take the SVD of the trailing block `[R22, R2d] = U S V^T`,
//! 3. `Xb = -V12 V22^-1`, `Xa = R11^-1 (R1d - R12 Xb)`.
//!
//! `n1 = 0` is plain TLS (no reflections) and `n1 = n` degenerates to a QR
//! least squares solve.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, NonUniqueCause, Result};
use crate::linalg::{self, hcat, vcat};
use crate::matrix::RbMatrix;

/// Numerical thresholds for the solvability tests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// The gap test passes when `sigma_{n2} > sigma_{n2+1} * (1 + gap_tol)`.
    pub gap_tol: f64,
    /// `V22` counts as nonsingular when its smallest singular value exceeds
    /// `v22_tol * ||V22||_2`.
    pub v22_tol: f64,
    /// Relative rank threshold for the exact columns and the pseudoinverse;
    /// `None` uses [`linalg::default_rank_tol`].
    pub rank_tol: Option<f64>,
    /// Form the correction matrices `Eb_hat` and `G_hat`.
    pub recover_corrections: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            gap_tol: 1e-10,
            v22_tol: 1e-10,
            rank_tol: None,
            recover_corrections: true,
        }
    }
}

/// Singular value diagnostics behind the existence and uniqueness conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolvabilityReport {
    /// `sigma_{n2}` of `[R22, R2d]`; infinite when `n2 = 0`. For the least
    /// squares path this is the smallest singular value of `C`.
    pub sigma_n2: f64,
    pub sigma_n2_plus_1: f64,
    /// Smallest singular value `sigma_{n2+d}`. Zero for compatible systems.
    pub sigma_min: f64,
    pub gap_ok: bool,
    pub v22_min_singular: f64,
    pub v22_ok: bool,
    pub unique: bool,
}

impl SolvabilityReport {
    /// Whether the trailing singular value is numerically zero, i.e. the
    /// system was already (nearly) compatible.
    pub fn trailing_zero(&self) -> bool {
        self.sigma_min <= f64::EPSILON * self.sigma_n2.min(f64::MAX)
    }
}

/// `A X ~ B` with the first `n1` columns of `A` known exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct MtlsProblem {
    a: RbMatrix,
    b: RbMatrix,
    n1: usize,
}

impl MtlsProblem {
    pub fn new(a: RbMatrix, b: RbMatrix, n1: usize) -> Result<Self> {
        let (m, n) = a.shape();
        let d = b.ncols();
        if b.nrows() != m {
            return Err(Error::dims(
                "MtlsProblem::new",
                format!("{m} rows in B"),
                b.nrows(),
            ));
        }
        if n == 0 || d == 0 {
            return Err(Error::InvalidProblem(format!(
                "A and B need columns, got n = {n}, d = {d}"
            )));
        }
        if m < n + d {
            return Err(Error::InvalidProblem(format!(
                "need m >= n + d, got m = {m}, n = {n}, d = {d}"
            )));
        }
        if n1 > n {
            return Err(Error::InvalidProblem(format!("n1 = {n1} exceeds n = {n}")));
        }
        Ok(Self { a, b, n1 })
    }

    /// Same data with a different number of exact columns.
    pub fn with_split(&self, n1: usize) -> Result<Self> {
        Self::new(self.a.clone(), self.b.clone(), n1)
    }

    pub fn a(&self) -> &RbMatrix {
        &self.a
    }

    pub fn b(&self) -> &RbMatrix {
        &self.b
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.a.ncols() - self.n1
    }

    pub fn m(&self) -> usize {
        self.a.nrows()
    }

    pub fn n(&self) -> usize {
        self.a.ncols()
    }

    pub fn d(&self) -> usize {
        self.b.ncols()
    }

    /// The exactly known columns `A_a`.
    pub fn a_exact(&self) -> RbMatrix {
        self.a.columns(0..self.n1)
    }

    /// The noisy columns `A_b`.
    pub fn a_noisy(&self) -> RbMatrix {
        self.a.columns(self.n1..self.n())
    }
}

/// A real solution `X = [Xa; Xb]` and the corrections making the system
/// compatible: `A_a Xa + (A_b + Eb_hat) Xb = B + G_hat`.
#[derive(Debug, Clone, PartialEq)]
pub struct MtlsSolution<M = RbMatrix> {
    pub x: DMatrix<f64>,
    /// Correction of the noisy columns (`m x n2`); `None` unless requested.
    pub eb_hat: Option<M>,
    /// Correction of the right-hand side (`m x d`); `None` unless requested.
    pub g_hat: Option<M>,
    /// `||[Eb_hat, G_hat]||_F`, available even when the corrections are not formed.
    pub correction_norm: f64,
    pub diagnostics: SolvabilityReport,
}

impl<M> MtlsSolution<M> {
    fn map<N>(self, mut f: impl FnMut(M) -> Result<N>) -> Result<MtlsSolution<N>> {
        Ok(MtlsSolution {
            x: self.x,
            eb_hat: self.eb_hat.map(&mut f).transpose()?,
            g_hat: self.g_hat.map(&mut f).transpose()?,
            correction_norm: self.correction_norm,
            diagnostics: self.diagnostics,
        })
    }
}

/// Which of the three problems to solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Mtls,
    Tls,
    Ls,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Mtls => "mtls",
            Method::Tls => "tls",
            Method::Ls => "ls",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "mtls" => Ok(Method::Mtls),
            "tls" => Ok(Method::Tls),
            "ls" => Ok(Method::Ls),
            other => Err(format!(
                "unknown method `{other}` (expected mtls, tls or ls)"
            )),
        }
    }
}

/// Mixed LS-TLS on real stacks `c = [Ca, Cb]` (`p x n`) and `d` (`p x d`).
pub fn mtls_real(
    c: &DMatrix<f64>,
    d: &DMatrix<f64>,
    n1: usize,
    opts: &SolveOptions,
) -> Result<MtlsSolution<DMatrix<f64>>> {
    let (p, n) = c.shape();
    let dcols = d.ncols();
    if d.nrows() != p {
        return Err(Error::dims(
            "mtls_real",
            format!("{p} rows in D"),
            d.nrows(),
        ));
    }
    if n1 > n {
        return Err(Error::InvalidProblem(format!("n1 = {n1} exceeds n = {n}")));
    }
    if p < n + dcols {
        return Err(Error::InvalidProblem(format!(
            "stack has {p} rows, needs at least {}",
            n + dcols
        )));
    }
    let n2 = n - n1;

    if n1 > 0 {
        let ca = c.columns(0, n1).into_owned();
        let tol = opts
            .rank_tol
            .unwrap_or_else(|| linalg::default_rank_tol(p, n1));
        let rank = linalg::numerical_rank(&ca, tol)?;
        if rank < n1 {
            return Err(Error::RankDeficient {
                column: rank,
                pivot: 0.0,
            });
        }
    }

    let hh = linalg::householder_partial(&hcat(c, d), n1, n2, opts.rank_tol)?;
    let tail = hh.tail();
    let svd = linalg::svd_partitioned(&tail, n2)?;
    let sv = &svd.singular_values;

    let sigma_n2 = if n2 == 0 { f64::INFINITY } else { sv[n2 - 1] };
    let sigma_next = sv[n2];
    let gap_ok = sigma_n2 > sigma_next * (1.0 + opts.gap_tol);
    let v22_sv = linalg::singular_values(&svd.v22)?;
    let v22_max = v22_sv.max();
    let v22_min = v22_sv.min();
    let v22_ok = v22_min > opts.v22_tol * v22_max;
    let report = SolvabilityReport {
        sigma_n2,
        sigma_n2_plus_1: sigma_next,
        sigma_min: sv[n2 + dcols - 1],
        gap_ok,
        v22_min_singular: v22_min,
        v22_ok,
        unique: gap_ok && v22_ok,
    };
    if !gap_ok {
        return Err(Error::NonUnique {
            cause: NonUniqueCause::SingularValueGap,
            report,
        });
    }
    if !v22_ok {
        return Err(Error::NonUnique {
            cause: NonUniqueCause::SingularV22,
            report,
        });
    }

    // Xb V22 = -V12, solved through a factorization of V22^T
    let xb = match n2 {
        0 => DMatrix::zeros(0, dcols),
        _ => svd
            .v22
            .transpose()
            .full_piv_lu()
            .solve(&(-svd.v12.transpose()))
            .ok_or(Error::NonUnique {
                cause: NonUniqueCause::SingularV22,
                report,
            })?
            .transpose(),
    };
    let xa = match n1 {
        0 => DMatrix::zeros(0, dcols),
        _ => {
            let rhs = &hh.r1d - &hh.r12 * &xb;
            hh.r11
                .solve_upper_triangular(&rhs)
                .ok_or(Error::RankDeficient {
                    column: n1,
                    pivot: 0.0,
                })?
        }
    };
    let x = vcat(&xa, &xb);

    let correction_norm = sv[n2..].iter().map(|s| s * s).sum::<f64>().sqrt();

    let (eb, g) = if opts.recover_corrections {
        // [Eb~, G~] = Q2 ([R22~, R2d~] - [R22, R2d])
        let delta = svd.leading_part() - &tail;
        let full = hh.apply_q(&vcat(&DMatrix::zeros(n1, n2 + dcols), &delta));
        (
            Some(full.columns(0, n2).into_owned()),
            Some(full.columns(n2, dcols).into_owned()),
        )
    } else {
        (None, None)
    };

    Ok(MtlsSolution {
        x,
        eb_hat: eb,
        g_hat: g,
        correction_norm,
        diagnostics: report,
    })
}

/// Least squares on real stacks; returns the minimum-norm solution `C^+ D`.
pub fn ls_real_solution(
    c: &DMatrix<f64>,
    d: &DMatrix<f64>,
    opts: &SolveOptions,
) -> Result<MtlsSolution<DMatrix<f64>>> {
    let p = c.nrows();
    if d.nrows() != p {
        return Err(Error::dims(
            "ls_real_solution",
            format!("{p} rows in D"),
            d.nrows(),
        ));
    }
    let (pinv, spectrum) = linalg::pinv_with_spectrum(c, opts.rank_tol)?;
    let x = pinv * d;
    let g = c * &x - d;
    let smallest = spectrum.iter().cloned().fold(f64::INFINITY, f64::min);
    let report = SolvabilityReport {
        sigma_n2: smallest,
        sigma_n2_plus_1: 0.0,
        sigma_min: 0.0,
        gap_ok: true,
        v22_min_singular: 1.0,
        v22_ok: true,
        unique: true,
    };
    Ok(MtlsSolution {
        x,
        eb_hat: opts.recover_corrections.then(|| DMatrix::zeros(p, 0)),
        correction_norm: g.norm(),
        g_hat: opts.recover_corrections.then_some(g),
        diagnostics: report,
    })
}

/// Mixed LS-TLS solution with `p.n1()` exact columns.
///
/// Fails with [`Error::RankDeficient`] when the exact columns are not of full
/// column rank and with [`Error::NonUnique`] when the singular value gap or
/// the `V22` condition fails; no representative is picked in that case.
pub fn solve_mtls(p: &MtlsProblem, opts: &SolveOptions) -> Result<MtlsSolution> {
    let c = p.a.block_column();
    let d = p.b.block_column();
    mtls_real(&c, &d, p.n1, opts)?.map(|m| RbMatrix::from_block_column(&m))
}

/// Total least squares, `X = -V12 V22^-1` from the SVD of `[C, D]`.
///
/// Requires `p.n1() == 0`; it is [`solve_mtls`] without reflections.
pub fn solve_tls(p: &MtlsProblem, opts: &SolveOptions) -> Result<MtlsSolution> {
    if p.n1 != 0 {
        return Err(Error::InvalidProblem(format!(
            "TLS treats every column as noisy, got n1 = {}",
            p.n1
        )));
    }
    solve_mtls(p, opts)
}

/// Least squares, minimum-norm `X = C^+ D`. Requires `p.n1() == n`.
pub fn solve_ls(p: &MtlsProblem, opts: &SolveOptions) -> Result<MtlsSolution> {
    if p.n1 != p.n() {
        return Err(Error::InvalidProblem(format!(
            "LS treats every column as exact, got n1 = {} of {}",
            p.n1,
            p.n()
        )));
    }
    let c = p.a.block_column();
    let d = p.b.block_column();
    ls_real_solution(&c, &d, opts)?.map(|m| RbMatrix::from_block_column(&m))
}

/// Dispatches on `method`, ignoring `p.n1()` for TLS and LS.
pub fn solve(p: &MtlsProblem, method: Method, opts: &SolveOptions) -> Result<MtlsSolution> {
    match method {
        Method::Mtls => solve_mtls(p, opts),
        Method::Tls => solve_tls(&p.with_split(0)?, opts),
        Method::Ls => solve_ls(&p.with_split(p.n())?, opts),
    }
}

/// Complex `A X ~ B` with a real unknown, solved on the stacks `[Re A; Im A]`.
///
/// `n1 = 0` is TLS, `n1 = n` least squares (minimum norm) and anything in
/// between the mixed problem.
pub fn solve_complex(
    a: &DMatrix<Complex<f64>>,
    b: &DMatrix<Complex<f64>>,
    n1: usize,
    opts: &SolveOptions,
) -> Result<MtlsSolution<DMatrix<Complex<f64>>>> {
    let (m, n) = a.shape();
    let d = b.ncols();
    if b.nrows() != m {
        return Err(Error::dims(
            "solve_complex",
            format!("{m} rows in B"),
            b.nrows(),
        ));
    }
    if n == 0 || d == 0 || m < n + d || n1 > n {
        return Err(Error::InvalidProblem(format!(
            "complex problem with m = {m}, n = {n}, d = {d}, n1 = {n1}"
        )));
    }
    let stack = |z: &DMatrix<Complex<f64>>| vcat(&z.map(|c| c.re), &z.map(|c| c.im));
    let unstack = |s: DMatrix<f64>| -> Result<DMatrix<Complex<f64>>> {
        let rows = s.nrows();
        if !rows.is_multiple_of(2) {
            return Err(Error::dims("solve_complex", "even row count", rows));
        }
        let h = rows / 2;
        Ok(DMatrix::from_fn(h, s.ncols(), |i, j| {
            Complex::new(s[(i, j)], s[(i + h, j)])
        }))
    };
    let (c, dm) = (stack(a), stack(b));
    let sol = if n1 == n {
        ls_real_solution(&c, &dm, opts)?
    } else {
        mtls_real(&c, &dm, n1, opts)?
    };
    sol.map(unstack)
}

/// Residual of the corrected system `A_a Xa + (A_b + Eb_hat) Xb - (B + G_hat)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport {
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Checks that `s` makes the corrected system of `p` hold to `tol`.
///
/// Missing corrections count as zero.
pub fn residual_check(p: &MtlsProblem, s: &MtlsSolution, tol: f64) -> Result<ResidualReport> {
    let (m, n) = p.a.shape();
    if s.x.shape() != (n, p.d()) {
        return Err(Error::dims(
            "residual_check",
            format!("X of shape ({n}, {})", p.d()),
            format!("{:?}", s.x.shape()),
        ));
    }
    let xb = s.x.rows(p.n1, p.n2()).into_owned();
    let mut lhs = p.a.mul_real(&s.x)?;
    if let Some(eb) = s.eb_hat.as_ref().filter(|e| e.ncols() > 0) {
        if eb.shape() != (m, p.n2()) {
            return Err(Error::dims(
                "residual_check",
                format!("Eb_hat of shape ({m}, {})", p.n2()),
                format!("{:?}", eb.shape()),
            ));
        }
        lhs = lhs.add(&eb.mul_real(&xb)?)?;
    }
    let mut rhs = p.b.clone();
    if let Some(g) = &s.g_hat {
        rhs = rhs.add(g)?;
    }
    let residual = lhs.sub(&rhs)?.frobenius_norm();
    Ok(ResidualReport {
        residual,
        tolerance: tol,
        pass: residual <= tol,
    })
}
