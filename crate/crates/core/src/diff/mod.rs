//! Derivative engine. Forward-mode jets evaluated through the metric code
//! give `F`, the vertical gradient `G = dF/dy`, the horizontal gradient
//! `H = dF/dx` and, on request, the energy Hessian `g = d^2(F^2/2)/dy^2`.
//! Central finite differences are kept as an independent cross-check.

mod jet;
mod scalar;

pub use jet::Jet;
pub use scalar::{linear_form, sum, Scalar};

use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::linalg::Matrix;
use crate::metrics::FinslerMetric;
use crate::real::{norm2, norm_inf, Real};

/// First-order data of a Finsler metric at one tangent vector.
#[derive(Debug, Clone, Serialize)]
pub struct PointJet<T: Real> {
    pub x: Vec<T>,
    pub y: Vec<T>,
    pub f_value: T,
    /// Vertical gradient `[dF/dy^1, ..., dF/dy^n]`.
    pub g_vec: Vec<T>,
    /// Horizontal gradient `[dF/dx^1, ..., dF/dx^n]`.
    pub h_vec: Vec<T>,
    /// Energy Hessian, when requested.
    pub hess: Option<Matrix<T>>,
}

impl<T: Real> PointJet<T> {
    pub fn dim(&self) -> usize {
        self.y.len()
    }

    /// `sum y^i G_i - F`; vanishes for 1-homogeneous metrics.
    pub fn euler_defect(&self) -> T {
        crate::real::dot(&self.y, &self.g_vec) - self.f_value
    }
}

fn check_point<T: Real>(metric: &dyn FinslerMetric<T>, x: &[T], y: &[T]) -> Result<()> {
    let n = metric.dim();
    check_dim("position", n, x.len())?;
    check_dim("direction", n, y.len())?;
    if y.iter().all(|&c| c == T::zero()) {
        return Err(Error::EvalDomain("zero tangent vector".into()));
    }
    if x.iter().chain(y).any(|c| !c.is_finite()) {
        return Err(Error::EvalDomain("non-finite coordinates".into()));
    }
    Ok(())
}

/// Evaluates `F`, `G`, `H` (and optionally `g`) at `(x, y)`.
pub fn jet_at<T: Real>(
    metric: &dyn FinslerMetric<T>,
    x: &[T],
    y: &[T],
    want_hessian: bool,
) -> Result<PointJet<T>> {
    check_point(metric, x, y)?;
    let n = x.len();
    let xs: Vec<Jet<T>> = (0..n).map(|k| Jet::variable(x[k], k, 2 * n)).collect();
    let ys: Vec<Jet<T>> = (0..n).map(|k| Jet::variable(y[k], n + k, 2 * n)).collect();
    let f = metric.eval_jet(&xs, &ys)?;
    let f_value = *f.value();
    if !f_value.is_finite() {
        return Err(Error::EvalDomain(format!("non-finite metric value at y = {y:?}")));
    }
    let h_vec: Vec<T> = (0..n).map(|k| f.partial(k)).collect();
    let g_vec: Vec<T> = (0..n).map(|k| f.partial(n + k)).collect();
    let hess = if want_hessian {
        Some(energy_hessian(metric, x, y)?)
    } else {
        None
    };
    Ok(PointJet {
        x: x.to_vec(),
        y: y.to_vec(),
        f_value,
        g_vec,
        h_vec,
        hess,
    })
}

/// Hessian of `F^2/2` in `y` from second-order (nested) jets.
pub fn energy_hessian<T: Real>(metric: &dyn FinslerMetric<T>, x: &[T], y: &[T]) -> Result<Matrix<T>> {
    check_point(metric, x, y)?;
    let n = y.len();
    let xs: Vec<Jet<Jet<T>>> = x.iter().map(|&c| Jet::from_real(c)).collect();
    let ys: Vec<Jet<Jet<T>>> = (0..n)
        .map(|k| {
            let mut outer = vec![Jet::zero_value(); n];
            outer[k] = Jet::from_real(T::one());
            Jet::new(Jet::variable(y[k], k, n), outer)
        })
        .collect();
    let f = metric.eval_jet2(&xs, &ys)?;
    let energy = f.square().scale(T::lit(0.5));
    let mut hess = Matrix::from_fn(n, n, |i, j| energy.partial(i).partial(j));
    // Mixed partials agree to rounding; store the symmetric part.
    for i in 0..n {
        for j in 0..i {
            let avg = (hess[(i, j)] + hess[(j, i)]) * T::lit(0.5);
            hess[(i, j)] = avg;
            hess[(j, i)] = avg;
        }
    }
    if !hess.is_finite() {
        return Err(Error::EvalDomain(format!("non-finite Hessian at y = {y:?}")));
    }
    Ok(hess)
}

/// Default central-difference step for a direction `y`.
pub fn default_fd_step<T: Real>(y: &[T]) -> T {
    T::lit(1e-5) * (T::one() + norm2(y))
}

/// Largest deviation between jet gradients and central finite differences
/// of `F` in `x` and `y`, relative to `max(|F|, ||(H, G)||_inf)`.
pub fn fd_crosscheck<T: Real>(metric: &dyn FinslerMetric<T>, x: &[T], y: &[T], step: T) -> Result<T> {
    if !(step > T::zero()) {
        return Err(Error::InvalidArgument("finite-difference step must be positive".into()));
    }
    let jet = jet_at(metric, x, y, false)?;
    let n = x.len();
    let h = step;
    let two_h = h + h;
    let mut worst = T::zero();
    let scale = norm_inf(&jet.g_vec)
        .max(norm_inf(&jet.h_vec))
        .max(jet.f_value.abs());
    let scale = if scale > T::zero() { scale } else { T::one() };
    for k in 0..n {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[k] += h;
        xm[k] -= h;
        let dx = (metric.eval(&xp, y)? - metric.eval(&xm, y)?) / two_h;
        worst = worst.max((dx - jet.h_vec[k]).abs() / scale);

        let mut yp = y.to_vec();
        let mut ym = y.to_vec();
        yp[k] += h;
        ym[k] -= h;
        let dy = (metric.eval(x, &yp)? - metric.eval(x, &ym)?) / two_h;
        worst = worst.max((dy - jet.g_vec[k]).abs() / scale);
    }
    Ok(worst)
}
