//! Averaged Riemannian metric at a point: the mean of the fundamental
//! tensor `g` over the indicatrix `{F(p, .) = 1}` with its Euclidean
//! surface measure, and its deviation from the identity.
//!
//! Parametrizing the indicatrix radially, `y = theta / F(p, theta)` for unit
//! `theta`, the surface element is `|G(theta)| / F(p, theta)^n` times the
//! sphere element; `g` is 0-homogeneous and is evaluated at `theta`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diff::{energy_hessian, jet_at};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{cholesky, symmetric_eigenvalues, Matrix};
use crate::metrics::FinslerMetric;
use crate::real::{norm2, pairwise_sum, Real};
use crate::sampling::random_unit_vectors;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureScheme {
    /// Midpoint rule in the polar angle; `n = 2` only.
    Angular,
    /// Gauss-Legendre in `cos(theta)` times midpoint in the azimuth, each
    /// with `floor(sqrt(n_nodes))` points; `n = 3` only.
    ProductSphere,
    /// Seeded uniform directions, any `n >= 2`.
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    pub scheme: QuadratureScheme,
    pub n_nodes: usize,
    #[serde(default)]
    pub seed: u64,
}

impl QuadratureSpec {
    pub fn new(scheme: QuadratureScheme, n_nodes: usize, seed: u64) -> Self {
        Self { scheme, n_nodes, seed }
    }

    /// The scheme's natural default for dimension `n`.
    pub fn default_for(n: usize) -> Self {
        match n {
            2 => Self::new(QuadratureScheme::Angular, 256, 0),
            3 => Self::new(QuadratureScheme::ProductSphere, 64 * 64, 0),
            _ => Self::new(QuadratureScheme::MonteCarlo, 20_000, 0),
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.n_nodes < 8 {
            return Err(Error::InvalidArgument(format!(
                "n_nodes must be at least 8, got {}",
                self.n_nodes
            )));
        }
        let ok = match self.scheme {
            QuadratureScheme::Angular => n == 2,
            QuadratureScheme::ProductSphere => n == 3,
            QuadratureScheme::MonteCarlo => n >= 2,
        };
        if !ok {
            return Err(Error::InvalidArgument(format!(
                "quadrature scheme {:?} does not support dimension {n}",
                self.scheme
            )));
        }
        Ok(())
    }

    fn halved(&self) -> Self {
        Self {
            n_nodes: self.n_nodes / 2,
            ..*self
        }
    }

    /// Unit directions and sphere weights.
    pub fn nodes<T: Real>(&self, n: usize) -> Result<Vec<(Vec<T>, T)>> {
        self.validate(n)?;
        Ok(match self.scheme {
            QuadratureScheme::Angular => {
                let m = self.n_nodes;
                let h = 2.0 * PI / m as f64;
                (0..m)
                    .map(|k| {
                        let t = (k as f64 + 0.5) * h;
                        (vec![T::lit(t.cos()), T::lit(t.sin())], T::lit(h))
                    })
                    .collect()
            }
            QuadratureScheme::ProductSphere => {
                let m = (self.n_nodes as f64).sqrt().floor() as usize;
                let h = 2.0 * PI / m as f64;
                let mut out = Vec::with_capacity(m * m);
                for (z, wz) in gauss_legendre(m) {
                    let s = (1.0 - z * z).sqrt();
                    for k in 0..m {
                        let phi = (k as f64 + 0.5) * h;
                        out.push((
                            vec![T::lit(s * phi.cos()), T::lit(s * phi.sin()), T::lit(z)],
                            T::lit(wz * h),
                        ));
                    }
                }
                out
            }
            QuadratureScheme::MonteCarlo => {
                let w = T::one() / T::lit(self.n_nodes as f64);
                random_unit_vectors::<T>(n, self.n_nodes, self.seed)
                    .into_iter()
                    .map(|v| (v, w))
                    .collect()
            }
        })
    }
}

/// Nodes and weights of the `m`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=m {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = m as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        out.push((z, 2.0 / ((1.0 - z * z) * dp * dp)));
    }
    out.reverse();
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct AveragedMetric<T: Real> {
    pub gamma: Matrix<T>,
    /// `|gamma_N - gamma_{N/2}|_max`.
    pub error_estimate: T,
    pub nodes_used: usize,
}

fn average<T: Real>(metric: &dyn FinslerMetric<T>, p: &[T], nodes: &[(Vec<T>, T)]) -> Result<Matrix<T>> {
    let n = p.len();
    let weighted: Vec<(Matrix<T>, T)> = nodes
        .par_iter()
        .map(|(theta, w)| {
            let jet = jet_at(metric, p, theta, false)?;
            let g = energy_hessian(metric, p, theta)?;
            if cholesky(&g).is_none() {
                let min = symmetric_eigenvalues(&g)?.first().copied().unwrap_or_else(T::zero);
                return Err(Error::NotConvex {
                    min_eigenvalue: min.as_f64(),
                });
            }
            let f = jet.f_value;
            let mu = *w * norm2(&jet.g_vec) / f.powi(n as i32);
            Ok((g.scaled(mu), mu))
        })
        .collect::<Result<_>>()?;
    let total = pairwise_sum(&weighted.iter().map(|(_, mu)| *mu).collect::<Vec<_>>());
    let mut gamma = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let parts: Vec<T> = weighted.iter().map(|(g, _)| g[(i, j)]).collect();
            let s = pairwise_sum(&parts) / total;
            gamma[(i, j)] = s;
            gamma[(j, i)] = s;
        }
    }
    Ok(gamma)
}

/// `gamma_ij = int g_ij dmu / int dmu` over the indicatrix at `p`.
pub fn averaged_metric_at<T: Real>(
    metric: &dyn FinslerMetric<T>,
    p: &[T],
    quad: &QuadratureSpec,
) -> Result<AveragedMetric<T>> {
    let n = metric.dim();
    check_dim("point", n, p.len())?;
    let nodes = quad.nodes::<T>(n)?;
    let gamma = average(metric, p, &nodes)?;
    let coarse = quad.halved();
    let error_estimate = if coarse.validate(n).is_ok() {
        let g2 = average(metric, p, &coarse.nodes::<T>(n)?)?;
        gamma.sub(&g2).max_abs()
    } else {
        T::nan()
    };
    Ok(AveragedMetric {
        gamma,
        error_estimate,
        nodes_used: nodes.len(),
    })
}

/// `|gamma - I|_max`.
pub fn normal_deviation<T: Real>(avg: &AveragedMetric<T>) -> T {
    avg.gamma.sub(&Matrix::identity(avg.gamma.rows())).max_abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{build, MetricSpec};

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for m in [1, 2, 5, 16, 64] {
            let rule = gauss_legendre(m);
            assert_eq!(rule.len(), m);
            let total: f64 = rule.iter().map(|&(_, w)| w).sum();
            assert!((total - 2.0).abs() < 1e-13, "m = {m}");
            // exact up to degree 2m - 1
            let deg = 2 * m - 2;
            let approx: f64 = rule.iter().map(|&(z, w)| w * z.powi(deg as i32)).sum();
            assert!((approx - 2.0 / (deg as f64 + 1.0)).abs() < 1e-12, "m = {m}");
        }
        let three = gauss_legendre(3);
        assert!((three[2].0 - (0.6f64).sqrt()).abs() < 1e-15);
        assert!((three[1].1 - 8.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn euclidean_average_is_identity() {
        let e2 = build::<f64>(&MetricSpec::euclidean(2)).unwrap();
        let avg = averaged_metric_at(&e2, &[0.0, 0.0], &QuadratureSpec::default_for(2)).unwrap();
        assert!(normal_deviation(&avg) <= 1e-12);
        let e3 = build::<f64>(&MetricSpec::euclidean(3)).unwrap();
        let avg = averaged_metric_at(&e3, &[0.0; 3], &QuadratureSpec::default_for(3)).unwrap();
        assert_eq!(avg.nodes_used, 4096);
        assert!(normal_deviation(&avg) <= 1e-12);
    }

    #[test]
    fn randers_average_is_reflection_symmetric() {
        let m = build::<f64>(&MetricSpec::randers(
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![0.5, 0.0],
        ))
        .unwrap();
        let avg = averaged_metric_at(&m, &[0.0, 0.0], &QuadratureSpec::default_for(2)).unwrap();
        assert!(avg.gamma[(0, 1)].abs() < 1e-12);
        assert_eq!(avg.gamma.asymmetry(), 0.0);
        assert!(cholesky(&avg.gamma).is_some());
        assert!(avg.error_estimate < 1e-10);
    }

    #[test]
    fn scheme_dimension_checks() {
        assert!(QuadratureSpec::new(QuadratureScheme::Angular, 64, 0).validate(3).is_err());
        assert!(QuadratureSpec::new(QuadratureScheme::ProductSphere, 64, 0).validate(2).is_err());
        assert!(QuadratureSpec::new(QuadratureScheme::MonteCarlo, 4, 0).validate(2).is_err());
        assert!(QuadratureSpec::new(QuadratureScheme::MonteCarlo, 8, 0).validate(5).is_ok());
    }

    #[test]
    fn non_convex_metric_is_rejected() {
        let lobed = build::<f64>(&MetricSpec::Lobed {
            amplitude: 0.5,
            lobes: 3,
        })
        .unwrap();
        let r = averaged_metric_at(&lobed, &[0.0, 0.0], &QuadratureSpec::default_for(2));
        assert!(matches!(r, Err(Error::NotConvex { .. }) | Err(Error::EvalDomain(_))));
    }
}
