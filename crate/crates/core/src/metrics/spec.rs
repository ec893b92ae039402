use serde::{Deserialize, Serialize};

use super::zoo::{Germ, Metric, Norm, RiemannianField};
use crate::error::{Error, Result};
use crate::linalg::{cholesky, Matrix};
use crate::real::Real;

/// Monomial added symmetrically to entries `(row, col)` and `(col, row)`
/// of a Riemannian coefficient matrix: `coeff * prod_k x_k^powers[k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyTerm {
    pub row: usize,
    pub col: usize,
    pub coeff: f64,
    pub powers: Vec<u32>,
}

/// Serializable description of a metric on a coordinate chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MetricSpec {
    /// `sqrt(a_ij(x) y^i y^j)` with `a` constant plus polynomial terms.
    Riemannian {
        a: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        perturbation: Vec<PolyTerm>,
    },
    /// `sqrt(a_ij y^i y^j) + b_i y^i` with constant `a`, `b` and `||b||_a < 1`.
    Randers { a: Vec<Vec<f64>>, b: Vec<f64> },
    /// Planar `|y| (1 + amplitude sin(lobes * atan2(y2, y1)))`; convex only
    /// for small amplitudes, shipped as a convexity counterexample.
    Lobed { amplitude: f64, lobes: u32 },
    /// First-order germ around `base_point` whose compatibility system has
    /// the exact solution `rho_star`; `defect` adds an incompatible term.
    SyntheticGerm {
        base_norm: Box<MetricSpec>,
        rho_star: Vec<f64>,
        base_point: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        defect: Option<Vec<f64>>,
    },
}

impl MetricSpec {
    pub fn euclidean(n: usize) -> Self {
        MetricSpec::Riemannian {
            a: identity_rows(n),
            perturbation: Vec::new(),
        }
    }

    pub fn randers(a: Vec<Vec<f64>>, b: Vec<f64>) -> Self {
        MetricSpec::Randers { a, b }
    }

    pub fn germ(base: MetricSpec, rho_star: Vec<f64>, base_point: Vec<f64>) -> Self {
        MetricSpec::SyntheticGerm {
            base_norm: Box::new(base),
            rho_star,
            base_point,
            defect: None,
        }
    }

    pub fn with_defect(self, defect: Vec<f64>) -> Self {
        match self {
            MetricSpec::SyntheticGerm {
                base_norm,
                rho_star,
                base_point,
                ..
            } => MetricSpec::SyntheticGerm {
                base_norm,
                rho_star,
                base_point,
                defect: Some(defect),
            },
            other => other,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            MetricSpec::Riemannian { .. } => "riemannian",
            MetricSpec::Randers { .. } => "randers",
            MetricSpec::Lobed { .. } => "lobed",
            MetricSpec::SyntheticGerm { .. } => "synthetic_germ",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            MetricSpec::Riemannian { a, .. } | MetricSpec::Randers { a, .. } => a.len(),
            MetricSpec::Lobed { .. } => 2,
            MetricSpec::SyntheticGerm { base_norm, .. } => base_norm.dim(),
        }
    }

    /// `true` for specs whose value does not depend on the position.
    pub fn is_position_independent(&self) -> bool {
        match self {
            MetricSpec::Riemannian { perturbation, .. } => perturbation.is_empty(),
            MetricSpec::Randers { .. } | MetricSpec::Lobed { .. } => true,
            MetricSpec::SyntheticGerm { .. } => false,
        }
    }
}

fn identity_rows(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::SpecInvalid(msg.into())
}

fn finite_vec<T: Real>(name: &str, v: &[f64], n: usize) -> Result<Vec<T>> {
    if v.len() != n {
        return Err(invalid(format!("{name} has length {}, expected {n}", v.len())));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(invalid(format!("{name} has non-finite entries")));
    }
    Ok(v.iter().map(|&x| T::lit(x)).collect())
}

/// Checks that `a` is a finite symmetric positive definite matrix.
fn spd_matrix<T: Real>(a: &[Vec<f64>]) -> Result<Matrix<T>> {
    let n = a.len();
    if n < 2 {
        return Err(invalid(format!("dimension must be at least 2, got {n}")));
    }
    if a.iter().any(|r| r.len() != n) {
        return Err(invalid("a must be square"));
    }
    let m = Matrix::from_rows(
        &a.iter()
            .map(|r| r.iter().map(|&x| T::lit(x)).collect())
            .collect::<Vec<Vec<T>>>(),
    )?;
    if !m.is_finite() {
        return Err(invalid("a has non-finite entries"));
    }
    if m.asymmetry() > T::lit(1e-12) * (T::one() + m.max_abs()) {
        return Err(invalid("a must be symmetric"));
    }
    if cholesky(&m).is_none() {
        return Err(invalid("a must be positive definite"));
    }
    Ok(m)
}

/// `sqrt(b^T a^{-1} b)`, the dual norm of `b` with respect to `a`.
pub fn dual_norm<T: Real>(a: &Matrix<T>, b: &[T]) -> Option<T> {
    let l = cholesky(a)?;
    let n = b.len();
    let mut z = vec![T::zero(); n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[(i, k)] * z[k];
        }
        z[i] = s / l[(i, i)];
    }
    Some(crate::real::norm2(&z))
}

impl<T: Real> Norm<T> {
    /// Builds a position-independent norm; germ and perturbed specs are rejected.
    pub fn from_spec(spec: &MetricSpec) -> Result<Self> {
        match spec {
            MetricSpec::Riemannian { a, perturbation } => {
                if !perturbation.is_empty() {
                    return Err(invalid("a base norm must be position-independent (no perturbation)"));
                }
                Ok(Norm::Quadratic { a: spd_matrix(a)? })
            }
            MetricSpec::Randers { a, b } => {
                let a = spd_matrix(a)?;
                let b = finite_vec("b", b, a.rows())?;
                let bn = dual_norm(&a, &b).ok_or_else(|| invalid("a must be positive definite"))?;
                if !(bn < T::one()) {
                    return Err(invalid(format!("randers requires ||b||_a < 1, got {bn}")));
                }
                Ok(Norm::Randers { a, b })
            }
            MetricSpec::Lobed { amplitude, lobes } => {
                if !amplitude.is_finite() || amplitude.abs() >= 1.0 {
                    return Err(invalid("lobed amplitude must satisfy |amplitude| < 1"));
                }
                if *lobes == 0 {
                    return Err(invalid("lobed needs at least one lobe"));
                }
                Ok(Norm::Lobed {
                    amplitude: T::lit(*amplitude),
                    lobes: T::lit(f64::from(*lobes)),
                })
            }
            MetricSpec::SyntheticGerm { .. } => {
                Err(invalid("a base norm must be position-independent (got synthetic_germ)"))
            }
        }
    }
}

/// Turns a specification into an evaluatable metric.
pub fn build<T: Real>(spec: &MetricSpec) -> Result<Metric<T>> {
    match spec {
        MetricSpec::Riemannian { a, perturbation } if !perturbation.is_empty() => {
            let a = spd_matrix(a)?;
            let n = a.rows();
            for (k, t) in perturbation.iter().enumerate() {
                if t.row >= n || t.col >= n {
                    return Err(invalid(format!("perturbation[{k}] index out of range")));
                }
                if t.powers.len() != n {
                    return Err(invalid(format!("perturbation[{k}].powers must have length {n}")));
                }
                if !t.coeff.is_finite() {
                    return Err(invalid(format!("perturbation[{k}].coeff is not finite")));
                }
            }
            Ok(Metric::Riemannian(RiemannianField::new(
                a,
                perturbation
                    .iter()
                    .map(|t| (t.row, t.col, T::lit(t.coeff), t.powers.clone()))
                    .collect(),
            )))
        }
        MetricSpec::SyntheticGerm {
            base_norm,
            rho_star,
            base_point,
            defect,
        } => {
            let base = Norm::from_spec(base_norm)?;
            let n = base.dim();
            let rho = finite_vec("rho_star", rho_star, n)?;
            let p = finite_vec("base_point", base_point, n)?;
            let mut germ = Germ::new(base, rho, p)?;
            if let Some(d) = defect {
                germ = germ.with_defect(finite_vec("defect", d, n)?)?;
            }
            Ok(Metric::Germ(germ))
        }
        other => Ok(Metric::Norm(Norm::from_spec(other)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::FinslerMetric;

    #[test]
    fn euclidean_evaluates_to_norm() {
        let m = build::<f64>(&MetricSpec::euclidean(2)).unwrap();
        assert!((m.eval(&[7.0, -1.0], &[3.0, 4.0]).unwrap() - 5.0).abs() < 1e-15);
    }

    #[test]
    fn randers_direct_evaluation() {
        let m = build::<f64>(&MetricSpec::randers(identity_rows(2), vec![0.5, 0.0])).unwrap();
        assert!((m.eval(&[0.0, 0.0], &[0.0, 1.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((m.eval(&[0.0, 0.0], &[1.0, 0.0]).unwrap() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn randers_validity_boundary() {
        let err = build::<f64>(&MetricSpec::randers(identity_rows(2), vec![1.2, 0.0])).unwrap_err();
        assert!(matches!(err, Error::SpecInvalid(ref m) if m.contains("||b||_a")));
        // ||b||_a uses the inverse of a: b = (1.5, 0) is fine when a = diag(4, 1).
        let ok = build::<f64>(&MetricSpec::randers(vec![vec![4.0, 0.0], vec![0.0, 1.0]], vec![1.5, 0.0]));
        assert!(ok.is_ok());
    }

    #[test]
    fn rejects_bad_matrices() {
        let not_spd = MetricSpec::Riemannian {
            a: vec![vec![1.0, 2.0], vec![2.0, 1.0]],
            perturbation: vec![],
        };
        assert!(matches!(build::<f64>(&not_spd), Err(Error::SpecInvalid(_))));
        let asym = MetricSpec::Riemannian {
            a: vec![vec![1.0, 0.1], vec![0.0, 1.0]],
            perturbation: vec![],
        };
        assert!(matches!(build::<f64>(&asym), Err(Error::SpecInvalid(_))));
        let one_d = MetricSpec::Riemannian {
            a: vec![vec![1.0]],
            perturbation: vec![],
        };
        assert!(build::<f64>(&one_d).is_err());
    }

    #[test]
    fn germ_base_must_be_position_independent() {
        let inner = MetricSpec::germ(MetricSpec::euclidean(2), vec![0.0, 0.0], vec![0.0, 0.0]);
        let nested = MetricSpec::germ(inner, vec![0.0, 0.0], vec![0.0, 0.0]);
        assert!(matches!(build::<f64>(&nested), Err(Error::SpecInvalid(_))));
    }

    #[test]
    fn spec_roundtrips_through_json() {
        let spec = MetricSpec::germ(
            MetricSpec::randers(identity_rows(2), vec![0.5, 0.0]),
            vec![0.3, -0.1],
            vec![0.0, 0.0],
        )
        .with_defect(vec![0.01, 0.0]);
        let text = serde_json::to_string(&spec).unwrap();
        assert!(text.contains("\"kind\":\"synthetic_germ\""));
        let back: MetricSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
    }
}
