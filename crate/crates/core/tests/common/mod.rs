//! Oracles shared by the integration tests. Nothing here calls into the
//! library's decompositions: the SVD is a one-sided Jacobi iteration and
//! linear systems go through Gaussian elimination.
#![allow(dead_code)]

use nalgebra::{Complex, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rbmtls::{RbMatrix, ReducedBiquaternion};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.random::<f64>() * 2.0 - 1.0)
}

pub fn random_rb(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> RbMatrix {
    RbMatrix::from_fn(rows, cols, |_, _| {
        ReducedBiquaternion::new(
            rng.random::<f64>() * 2.0 - 1.0,
            rng.random::<f64>() * 2.0 - 1.0,
            rng.random::<f64>() * 2.0 - 1.0,
            rng.random::<f64>() * 2.0 - 1.0,
        )
    })
}

pub fn random_complex(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex<f64>> {
    DMatrix::from_fn(rows, cols, |_, _| {
        Complex::new(
            rng.random::<f64>() * 2.0 - 1.0,
            rng.random::<f64>() * 2.0 - 1.0,
        )
    })
}

/// Thin SVD by one-sided Jacobi rotations: `(U, sigma, V)` with `sigma`
/// sorted in decreasing order. Requires `rows >= cols`.
pub fn jacobi_svd(a: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    let (p, q) = a.shape();
    assert!(p >= q);
    let mut u = a.clone();
    let mut v = DMatrix::<f64>::identity(q, q);
    for _sweep in 0..100 {
        let mut rotated = false;
        for i in 0..q {
            for j in i + 1..q {
                let alpha: f64 = u.column(i).norm_squared();
                let beta: f64 = u.column(j).norm_squared();
                let gamma: f64 = u.column(i).dot(&u.column(j));
                if gamma.abs() <= 1e-15 * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..p {
                    let (x, y) = (u[(k, i)], u[(k, j)]);
                    u[(k, i)] = c * x - s * y;
                    u[(k, j)] = s * x + c * y;
                }
                for k in 0..q {
                    let (x, y) = (v[(k, i)], v[(k, j)]);
                    v[(k, i)] = c * x - s * y;
                    v[(k, j)] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<usize> = (0..q).collect();
    let norms: Vec<f64> = (0..q).map(|k| u.column(k).norm()).collect();
    order.sort_by(|&x, &y| norms[y].partial_cmp(&norms[x]).unwrap());
    let mut us = DMatrix::zeros(p, q);
    let mut vs = DMatrix::zeros(q, q);
    let mut sigma = Vec::with_capacity(q);
    for (dst, &src) in order.iter().enumerate() {
        let s = norms[src];
        sigma.push(s);
        if s > 0.0 {
            us.set_column(dst, &(u.column(src) / s));
        }
        vs.set_column(dst, &v.column(src));
    }
    (us, sigma, vs)
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn gauss_solve(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    assert_eq!(a.ncols(), n);
    let mut m = a.clone();
    let mut x = b.clone();
    for k in 0..n {
        let piv = (k..n)
            .max_by(|&i, &j| m[(i, k)].abs().partial_cmp(&m[(j, k)].abs()).unwrap())
            .unwrap();
        m.swap_rows(k, piv);
        x.swap_rows(k, piv);
        assert!(m[(k, k)] != 0.0, "singular system");
        for i in k + 1..n {
            let f = m[(i, k)] / m[(k, k)];
            for j in k..n {
                m[(i, j)] -= f * m[(k, j)];
            }
            for j in 0..x.ncols() {
                x[(i, j)] -= f * x[(k, j)];
            }
        }
    }
    for k in (0..n).rev() {
        for j in 0..x.ncols() {
            let mut s = x[(k, j)];
            for c in k + 1..n {
                s -= m[(k, c)] * x[(c, j)];
            }
            x[(k, j)] = s / m[(k, k)];
        }
    }
    x
}

/// Least squares through the normal equations `(C^T C) X = C^T D`.
pub fn normal_equations(c: &DMatrix<f64>, d: &DMatrix<f64>) -> DMatrix<f64> {
    gauss_solve(&(c.transpose() * c), &(c.transpose() * d))
}

/// TLS solution `-V12 V22^-1` and the singular values of `[C, D]`.
pub fn tls_oracle(c: &DMatrix<f64>, d: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>) {
    let n = c.ncols();
    let k = d.ncols();
    let mut cd = DMatrix::zeros(c.nrows(), n + k);
    cd.columns_mut(0, n).copy_from(c);
    cd.columns_mut(n, k).copy_from(d);
    let (_, sigma, v) = jacobi_svd(&cd);
    let v12 = v.view((0, n), (n, k)).into_owned();
    let v22 = v.view((n, n), (k, k)).into_owned();
    // X V22 = -V12  <=>  V22^T X^T = -V12^T
    let xt = gauss_solve(&v22.transpose(), &(-v12.transpose()));
    (xt.transpose(), sigma)
}

/// Scalar product computed from the 4x4 real matrix layout written out by hand.
pub fn rb_mul_oracle(x: ReducedBiquaternion, y: ReducedBiquaternion) -> ReducedBiquaternion {
    let [a0, a1, a2, a3] = x.components();
    let m = [
        [a0, -a1, a2, -a3],
        [a1, a0, a3, a2],
        [a2, -a3, a0, -a1],
        [a3, a2, a1, a0],
    ];
    let yc = y.components();
    let mut out = [0.0; 4];
    for i in 0..4 {
        out[i] = (0..4).map(|j| m[i][j] * yc[j]).sum();
    }
    ReducedBiquaternion::from_components(out)
}

pub fn rel_err(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}
