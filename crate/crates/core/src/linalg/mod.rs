//! Small dense real linear algebra: numerical rank, minimum-norm least
//! squares, and the closed-form inverse of `V - eps*I` for a matrix `V`
//! whose rows all equal one vector.

mod decomp;
mod matrix;

pub use decomp::{cholesky, invert, svd, symmetric_eigenvalues, Svd};
pub use matrix::Matrix;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::{norm2, Real};

/// Thresholds shared by the rank, residual and contact decisions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TolerancePolicy<T> {
    /// Singular values below `rank_rel_tol * sigma_max` count as zero.
    pub rank_rel_tol: T,
    /// Relative CEQ residual separating solvable from insolvable.
    pub residual_tol: T,
    /// Relative band for contact classification and shift singularity.
    pub contact_tol: T,
}

impl<T: Real> Default for TolerancePolicy<T> {
    fn default() -> Self {
        Self {
            rank_rel_tol: T::lit(1e-10),
            residual_tol: T::lit(1e-6),
            contact_tol: T::lit(1e-9),
        }
    }
}

impl<T: Real> TolerancePolicy<T> {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rank_rel_tol", self.rank_rel_tol),
            ("residual_tol", self.residual_tol),
            ("contact_tol", self.contact_tol),
        ] {
            if !(v > T::zero() && v.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Number of singular values above `rank_rel_tol` times the largest one.
pub fn rank<T: Real>(m: &Matrix<T>, tol: &TolerancePolicy<T>) -> usize {
    if m.rows() == 0 || m.cols() == 0 {
        return 0;
    }
    let s = svd(m).s;
    let smax = s.first().copied().unwrap_or_else(T::zero);
    if smax == T::zero() {
        return 0;
    }
    s.iter().filter(|&&x| x > tol.rank_rel_tol * smax).count()
}

/// Minimum-norm least-squares solution of `a x = b` and its residual `||a x - b||_2`.
pub fn solve_least_squares<T: Real>(
    a: &Matrix<T>,
    b: &[T],
    tol: &TolerancePolicy<T>,
) -> Result<(Vec<T>, T)> {
    if a.rows() != b.len() {
        return Err(Error::Dimension {
            what: "least-squares right-hand side",
            expected: a.rows(),
            found: b.len(),
        });
    }
    let n = a.cols();
    let mut x = vec![T::zero(); n];
    let d = svd(a);
    let smax = d.s.first().copied().unwrap_or_else(T::zero);
    if smax > T::zero() {
        for (k, &sk) in d.s.iter().enumerate() {
            if sk <= tol.rank_rel_tol * smax {
                break;
            }
            let coeff = (0..a.rows()).fold(T::zero(), |acc, i| acc + d.u[(i, k)] * b[i]) / sk;
            for (j, xj) in x.iter_mut().enumerate() {
                *xj += coeff * d.v[(j, k)];
            }
        }
    }
    let r: Vec<T> = a.mul_vec(&x)?.iter().zip(b).map(|(&ax, &bi)| ax - bi).collect();
    Ok((x, norm2(&r)))
}

fn component_sum<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |acc, &x| acc + x)
}

/// `true` iff `V - eps*I` is safely invertible, i.e. `eps` stays outside a
/// `contact_tol * (1 + |sum v|)` band around both eigenvalues `0` and `sum v`.
pub fn is_shift_regular<T: Real>(v: &[T], eps: T, tol: &TolerancePolicy<T>) -> bool {
    let sum = component_sum(v);
    let band = tol.contact_tol * (T::one() + sum.abs());
    eps.is_finite() && eps.abs() > band && (eps - sum).abs() > band
}

/// Inverse of `V - eps*I` via `(V - (s - eps) I) / ((s - eps) eps)`, `s = sum v`.
pub fn shift_inverse<T: Real>(v: &[T], eps: T, tol: &TolerancePolicy<T>) -> Result<Matrix<T>> {
    let sum = component_sum(v);
    if !is_shift_regular(v, eps, tol) {
        return Err(Error::ShiftSingular {
            eps: eps.as_f64(),
            sum: sum.as_f64(),
        });
    }
    let gap = sum - eps;
    let scale = T::one() / (gap * eps);
    let n = v.len();
    Ok(Matrix::from_fn(n, n, |i, j| {
        let diag = if i == j { gap } else { T::zero() };
        (v[j] - diag) * scale
    }))
}

/// `V - eps*I` assembled explicitly (every row equal to `v`).
pub fn shifted_row_matrix<T: Real>(v: &[T], eps: T) -> Matrix<T> {
    let n = v.len();
    Matrix::from_fn(n, n, |i, j| if i == j { v[j] - eps } else { v[j] })
}
