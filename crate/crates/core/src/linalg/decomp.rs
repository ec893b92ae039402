//! Factorizations: one-sided Jacobi SVD, cyclic Jacobi for symmetric
//! eigenvalues, Cholesky and partially pivoted Gauss-Jordan inversion.

use super::Matrix;
use crate::error::{Error, Result};
use crate::real::Real;

const MAX_SWEEPS: usize = 80;

/// Thin singular value decomposition `a = u * diag(s) * v^T` with `s`
/// sorted in decreasing order.
#[derive(Debug, Clone)]
pub struct Svd<T: Real> {
    pub u: Matrix<T>,
    pub s: Vec<T>,
    pub v: Matrix<T>,
}

/// One-sided (Hestenes) Jacobi SVD. Wide inputs are handled through the
/// transpose so the column rotations always act on the short side.
pub fn svd<T: Real>(a: &Matrix<T>) -> Svd<T> {
    if a.rows() < a.cols() {
        let t = svd(&a.transpose());
        return Svd {
            u: t.v,
            s: t.s,
            v: t.u,
        };
    }
    let (m, n) = (a.rows(), a.cols());
    // Work on columns stored contiguously.
    let mut w: Vec<Vec<T>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<T>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { T::one() } else { T::zero() }).collect())
        .collect();
    let eps = T::epsilon();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (T::zero(), T::zero(), T::zero());
                for i in 0..m {
                    alpha += w[p][i] * w[p][i];
                    beta += w[q][i] * w[q][i];
                    gamma += w[p][i] * w[q][i];
                }
                if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (gamma + gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let (wp, wq) = (w[p][i], w[q][i]);
                    w[p][i] = c * wp - s * wq;
                    w[q][i] = s * wp + c * wq;
                }
                for i in 0..n {
                    let (vp, vq) = (v[p][i], v[q][i]);
                    v[p][i] = c * vp - s * vq;
                    v[q][i] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<T> = w.iter().map(|col| crate::real::norm2(col)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap_or(std::cmp::Ordering::Equal));

    let s: Vec<T> = order.iter().map(|&k| norms[k]).collect();
    let u = Matrix::from_fn(m, n, |i, c| {
        let k = order[c];
        if norms[k] > T::zero() {
            w[k][i] / norms[k]
        } else {
            T::zero()
        }
    });
    let v = Matrix::from_fn(n, n, |i, c| v[order[c]][i]);
    Svd { u, s, v }
}

/// Eigenvalues of a symmetric matrix in increasing order (cyclic Jacobi).
pub fn symmetric_eigenvalues<T: Real>(a: &Matrix<T>) -> Result<Vec<T>> {
    if !a.is_square() {
        return Err(Error::InvalidArgument("eigenvalues need a square matrix".into()));
    }
    let n = a.rows();
    let mut m = a.clone();
    for _ in 0..MAX_SWEEPS {
        let mut off = T::zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += m[(i, j)] * m[(i, j)];
                }
            }
        }
        if off <= T::epsilon() * T::epsilon() * m.max_abs().powi(2) || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (apq + apq);
                let t = theta.signum() / (theta.abs() + (T::one() + theta * theta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[(k, p)], m[(k, q)]);
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[(p, k)], m[(q, k)]);
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut eig: Vec<T> = (0..n).map(|i| m[(i, i)]).collect();
    eig.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Ok(eig)
}

/// Lower-triangular `l` with `a = l * l^T`; `None` unless `a` is positive definite.
pub fn cholesky<T: Real>(a: &Matrix<T>) -> Option<Matrix<T>> {
    if !a.is_square() {
        return None;
    }
    let n = a.rows();
    let mut l = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[(i, j)];
            for k in 0..j {
                sum -= l[(i, k)] * l[(j, k)];
            }
            if i == j {
                if !(sum > T::zero()) {
                    return None;
                }
                l[(i, i)] = sum.sqrt();
            } else {
                l[(i, j)] = sum / l[(j, j)];
            }
        }
    }
    Some(l)
}

/// Dense inverse by Gauss-Jordan elimination with partial pivoting.
pub fn invert<T: Real>(a: &Matrix<T>) -> Result<Matrix<T>> {
    if !a.is_square() {
        return Err(Error::InvalidArgument("inverse needs a square matrix".into()));
    }
    let n = a.rows();
    let mut m = a.clone();
    let mut inv = Matrix::identity(n);
    let scale = a.max_abs();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| {
                m[(i, col)]
                    .abs()
                    .partial_cmp(&m[(j, col)].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("non-empty range");
        let pivot = m[(pivot_row, col)];
        if pivot.abs() <= T::epsilon() * scale * T::lit(n as f64) || pivot == T::zero() {
            return Err(Error::InvalidArgument("matrix is numerically singular".into()));
        }
        if pivot_row != col {
            for k in 0..n {
                let tmp = m[(col, k)];
                m[(col, k)] = m[(pivot_row, k)];
                m[(pivot_row, k)] = tmp;
                let tmp = inv[(col, k)];
                inv[(col, k)] = inv[(pivot_row, k)];
                inv[(pivot_row, k)] = tmp;
            }
        }
        for k in 0..n {
            m[(col, k)] /= pivot;
            inv[(col, k)] /= pivot;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = m[(r, col)];
            if factor == T::zero() {
                continue;
            }
            for k in 0..n {
                let mk = m[(col, k)];
                let ik = inv[(col, k)];
                m[(r, k)] -= factor * mk;
                inv[(r, k)] -= factor * ik;
            }
        }
    }
    Ok(inv)
}
