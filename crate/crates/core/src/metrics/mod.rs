//! The Finsler metric contract and the shipped metrics.
//!
//! Metrics are written once against [`GenericMetric`], generic over the
//! [`Scalar`] they are evaluated on; a small macro implements [`FinslerMetric`]
//! for them, giving plain, first-order and second-order evaluations behind
//! an object-safe interface.

mod random;
mod spec;
mod zoo;

pub use random::{random_germ, random_randers, random_spd, RandomGerm};
pub use spec::{build, dual_norm, MetricSpec, PolyTerm};
pub use zoo::{make_germ, Germ, Metric, Norm, RiemannianField};

use crate::diff::{energy_hessian, linear_form, Jet, Scalar};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{cholesky, invert, symmetric_eigenvalues, Matrix};
use crate::real::Real;
use crate::sampling::random_unit_vectors;

/// A Finsler metric on one chart, evaluated at position `x` and direction `y`.
///
/// Implementations must be positively 1-homogeneous in `y`, deterministic
/// and reentrant.
pub trait FinslerMetric<T: Real>: Send + Sync {
    fn dim(&self) -> usize;
    fn description(&self) -> String;
    fn eval(&self, x: &[T], y: &[T]) -> Result<T>;
    fn eval_jet(&self, x: &[Jet<T>], y: &[Jet<T>]) -> Result<Jet<T>>;
    fn eval_jet2(&self, x: &[Jet<Jet<T>>], y: &[Jet<Jet<T>>]) -> Result<Jet<Jet<T>>>;
}

/// Metric code written once for every scalar type.
pub trait GenericMetric<T: Real>: Send + Sync {
    fn dim(&self) -> usize;
    fn description(&self) -> String;
    fn eval_generic<S: Scalar<Real = T>>(&self, x: &[S], y: &[S]) -> Result<S>;
}

macro_rules! finsler_via_generic {
    ($($ty:ident),*) => {$(
        impl<T: Real> FinslerMetric<T> for $ty<T> {
            fn dim(&self) -> usize {
                GenericMetric::dim(self)
            }
            fn description(&self) -> String {
                GenericMetric::description(self)
            }
            fn eval(&self, x: &[T], y: &[T]) -> Result<T> {
                self.eval_generic(x, y)
            }
            fn eval_jet(&self, x: &[Jet<T>], y: &[Jet<T>]) -> Result<Jet<T>> {
                self.eval_generic(x, y)
            }
            fn eval_jet2(&self, x: &[Jet<Jet<T>>], y: &[Jet<Jet<T>>]) -> Result<Jet<Jet<T>>> {
                self.eval_generic(x, y)
            }
        }
    )*};
}

finsler_via_generic!(Norm, RiemannianField, Germ, Metric);

/// A metric seen through the linear coordinate change `u = M û`:
/// `F̂(x̂, ŷ) = F(M x̂, M ŷ)`.
pub struct Reframed<'a, T: Real> {
    inner: &'a dyn FinslerMetric<T>,
    map: Matrix<T>,
}

impl<'a, T: Real> Reframed<'a, T> {
    pub fn new(inner: &'a dyn FinslerMetric<T>, map: Matrix<T>) -> Result<Self> {
        check_dim("frame rows", inner.dim(), map.rows())?;
        check_dim("frame columns", inner.dim(), map.cols())?;
        Ok(Self { inner, map })
    }

    pub fn map(&self) -> &Matrix<T> {
        &self.map
    }

    /// Coordinates of an old-chart point in the new chart.
    pub fn pull_point(&self, x: &[T]) -> Result<Vec<T>> {
        invert(&self.map)?.mul_vec(x)
    }

    fn push<S: Scalar<Real = T>>(&self, v: &[S]) -> Vec<S> {
        (0..self.map.rows())
            .map(|i| linear_form(self.map.row(i), v))
            .collect()
    }
}

impl<T: Real> FinslerMetric<T> for Reframed<'_, T> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn description(&self) -> String {
        format!("{} (linear frame change)", self.inner.description())
    }
    fn eval(&self, x: &[T], y: &[T]) -> Result<T> {
        self.inner.eval(&self.push(x), &self.push(y))
    }
    fn eval_jet(&self, x: &[Jet<T>], y: &[Jet<T>]) -> Result<Jet<T>> {
        self.inner.eval_jet(&self.push(x), &self.push(y))
    }
    fn eval_jet2(&self, x: &[Jet<Jet<T>>], y: &[Jet<Jet<T>>]) -> Result<Jet<Jet<T>>> {
        self.inner.eval_jet2(&self.push(x), &self.push(y))
    }
}

/// Frame in which the energy Hessian `g` at `(x, y)` becomes the identity:
/// `M = L^{-T}` for `g = L L^T`.
pub fn orthonormalizing_frame<T: Real>(metric: &dyn FinslerMetric<T>, x: &[T], y: &[T]) -> Result<Matrix<T>> {
    let g = energy_hessian(metric, x, y)?;
    let l = cholesky(&g).ok_or_else(|| Error::NotConvex {
        min_eigenvalue: symmetric_eigenvalues(&g)
            .ok()
            .and_then(|e| e.first().copied())
            .map_or(f64::NAN, Real::as_f64),
    })?;
    Ok(invert(&l)?.transpose())
}

/// Smallest energy-Hessian eigenvalue over `n_samples` seeded random unit
/// directions at `x`.
pub fn min_hessian_eigenvalue<T: Real>(
    metric: &dyn FinslerMetric<T>,
    x: &[T],
    n_samples: usize,
    seed: u64,
) -> Result<T> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument("n_samples must be at least 1".into()));
    }
    let n = metric.dim();
    check_dim("position", n, x.len())?;
    let mut worst = T::infinity();
    for y in random_unit_vectors::<T>(n, n_samples, seed) {
        let g = energy_hessian(metric, x, &y)?;
        let e = symmetric_eigenvalues(&g)?;
        worst = worst.min(e[0]);
    }
    Ok(worst)
}

/// `true` iff the energy Hessian is positive definite at every probed direction.
pub fn strong_convexity_probe<T: Real>(
    metric: &dyn FinslerMetric<T>,
    x: &[T],
    n_samples: usize,
    seed: u64,
) -> Result<bool> {
    Ok(min_hessian_eigenvalue(metric, x, n_samples, seed)? > T::zero())
}
