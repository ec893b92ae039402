//! Concrete metrics: constant Minkowski norms, polynomially varying
//! Riemannian metrics and the synthetic germ.

use num_traits::{Float, Zero};

use super::GenericMetric;
use crate::diff::{linear_form, sum, Jet, Scalar};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::real::Real;

/// Position-independent Minkowski norm.
#[derive(Debug, Clone, PartialEq)]
pub enum Norm<T: Real> {
    Quadratic { a: Matrix<T> },
    Randers { a: Matrix<T>, b: Vec<T> },
    Lobed { amplitude: T, lobes: T },
}

fn quadratic_form<S: Scalar>(a: &Matrix<S::Real>, y: &[S]) -> S {
    sum((0..y.len()).map(|i| y[i].clone() * linear_form(a.row(i), y)))
}

fn checked_sqrt<S: Scalar>(alpha2: S) -> Result<S> {
    let v = alpha2.real();
    if !(v > S::Real::zero()) || !v.is_finite() {
        return Err(Error::EvalDomain(format!(
            "quadratic part is not positive ({v})"
        )));
    }
    Ok(alpha2.sqrt())
}

impl<T: Real> Norm<T> {
    pub fn dim(&self) -> usize {
        match self {
            Norm::Quadratic { a } | Norm::Randers { a, .. } => a.rows(),
            Norm::Lobed { .. } => 2,
        }
    }

    pub fn eval_norm<S: Scalar<Real = T>>(&self, y: &[S]) -> Result<S> {
        match self {
            Norm::Quadratic { a } => checked_sqrt(quadratic_form(a, y)),
            Norm::Randers { a, b } => Ok(checked_sqrt(quadratic_form(a, y))? + linear_form(b, y)),
            Norm::Lobed { amplitude, lobes } => {
                let r = checked_sqrt(y[0].square() + y[1].square())?;
                let theta = y[1].atan2(&y[0]);
                let modulation = S::from_real(T::one()) + theta.scale(*lobes).sin().scale(*amplitude);
                Ok(r * modulation)
            }
        }
    }
}

impl<T: Real> GenericMetric<T> for Norm<T> {
    fn dim(&self) -> usize {
        Norm::dim(self)
    }

    fn description(&self) -> String {
        match self {
            Norm::Quadratic { a } => format!("riemannian (constant), n = {}", a.rows()),
            Norm::Randers { a, b } => format!("randers, n = {}, b = {b:?}", a.rows()),
            Norm::Lobed { amplitude, lobes } => format!("lobed, amplitude = {amplitude}, lobes = {lobes}"),
        }
    }

    fn eval_generic<S: Scalar<Real = T>>(&self, _x: &[S], y: &[S]) -> Result<S> {
        self.eval_norm(y)
    }
}

/// `sqrt(a_ij(x) y^i y^j)` where `a(x)` is a constant SPD matrix plus
/// symmetric polynomial terms.
#[derive(Debug, Clone, PartialEq)]
pub struct RiemannianField<T: Real> {
    a: Matrix<T>,
    terms: Vec<(usize, usize, T, Vec<u32>)>,
}

impl<T: Real> RiemannianField<T> {
    pub fn new(a: Matrix<T>, terms: Vec<(usize, usize, T, Vec<u32>)>) -> Self {
        Self { a, terms }
    }

    fn coefficients<S: Scalar<Real = T>>(&self, x: &[S]) -> Vec<Vec<S>> {
        let n = self.a.rows();
        let mut c: Vec<Vec<S>> = (0..n)
            .map(|i| (0..n).map(|j| S::from_real(self.a[(i, j)])).collect())
            .collect();
        for (row, col, coeff, powers) in &self.terms {
            let mono = powers
                .iter()
                .zip(x)
                .filter(|(&p, _)| p > 0)
                .fold(S::from_real(*coeff), |acc, (&p, xk)| acc * xk.powu(p));
            c[*row][*col] = c[*row][*col].clone() + mono.clone();
            if row != col {
                c[*col][*row] = c[*col][*row].clone() + mono;
            }
        }
        c
    }
}

impl<T: Real> GenericMetric<T> for RiemannianField<T> {
    fn dim(&self) -> usize {
        self.a.rows()
    }

    fn description(&self) -> String {
        format!(
            "riemannian (polynomial, {} terms), n = {}",
            self.terms.len(),
            self.a.rows()
        )
    }

    fn eval_generic<S: Scalar<Real = T>>(&self, x: &[S], y: &[S]) -> Result<S> {
        let c = self.coefficients(x);
        let n = y.len();
        let alpha2 = sum((0..n).flat_map(|i| {
            let c = &c;
            (0..n).map(move |j| c[i][j].clone() * y[i].clone() * y[j].clone())
        }));
        checked_sqrt(alpha2)
    }
}

/// Metric germ around `point` built from a norm `phi` so that the pointwise
/// compatibility system at `point` is solved exactly by `rho_star`:
///
/// `F(x, y) = phi(y) - sum_i (x^i - p^i) <f_i(y), rho_star>
///            - sum_i (x^i - p^i) d_i |y|`,
///
/// where `f_i = y^i G - G_i y` are the coefficient vectors of `phi` and the
/// optional defect `d` breaks compatibility.
#[derive(Debug, Clone, PartialEq)]
pub struct Germ<T: Real> {
    base: Norm<T>,
    rho_star: Vec<T>,
    point: Vec<T>,
    defect: Option<Vec<T>>,
}

impl<T: Real> Germ<T> {
    pub fn new(base: Norm<T>, rho_star: Vec<T>, point: Vec<T>) -> Result<Self> {
        let n = base.dim();
        crate::error::check_dim("rho_star", n, rho_star.len())?;
        crate::error::check_dim("base point", n, point.len())?;
        if rho_star.iter().chain(&point).any(|v| !v.is_finite()) {
            return Err(Error::SpecInvalid("germ parameters must be finite".into()));
        }
        Ok(Self {
            base,
            rho_star,
            point,
            defect: None,
        })
    }

    pub fn with_defect(mut self, defect: Vec<T>) -> Result<Self> {
        crate::error::check_dim("defect", self.base.dim(), defect.len())?;
        self.defect = Some(defect);
        Ok(self)
    }

    pub fn base(&self) -> &Norm<T> {
        &self.base
    }

    pub fn rho_star(&self) -> &[T] {
        &self.rho_star
    }

    pub fn point(&self) -> &[T] {
        &self.point
    }
}

/// Builds the germ of `base` at `p` with prescribed solution `rho_star`.
pub fn make_germ<T: Real>(base: Norm<T>, rho_star: Vec<T>, p: Vec<T>) -> Result<Germ<T>> {
    Germ::new(base, rho_star, p)
}

impl<T: Real> GenericMetric<T> for Germ<T> {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn description(&self) -> String {
        format!(
            "synthetic germ of [{}] at {:?}, rho* = {:?}{}",
            GenericMetric::description(&self.base),
            self.point,
            self.rho_star,
            if self.defect.is_some() { " (with defect)" } else { "" }
        )
    }

    fn eval_generic<S: Scalar<Real = T>>(&self, x: &[S], y: &[S]) -> Result<S> {
        let n = y.len();
        let seeded: Vec<Jet<S>> = (0..n).map(|k| Jet::variable(y[k].clone(), k, n)).collect();
        let phi = self.base.eval_norm(&seeded)?;
        let grad: Vec<S> = (0..n).map(|k| phi.partial(k)).collect();
        let (phi, _) = phi.into_parts();

        let g_dot_rho = linear_form(&self.rho_star, &grad);
        let y_dot_rho = linear_form(&self.rho_star, y);
        let offset: Vec<S> = x
            .iter()
            .zip(&self.point)
            .map(|(xi, &pi)| xi.clone() - S::from_real(pi))
            .collect();
        // <f_i, rho> = y^i <G, rho> - G_i <y, rho>
        let correction = sum((0..n).map(|i| {
            offset[i].clone()
                * (y[i].clone() * g_dot_rho.clone() - grad[i].clone() * y_dot_rho.clone())
        }));
        let mut value = phi - correction;
        if let Some(d) = &self.defect {
            let euclid = sum(y.iter().map(Scalar::square)).sqrt();
            value = value - linear_form(d, &offset) * euclid;
        }
        Ok(value)
    }
}

/// Any metric that [`super::build`] can produce.
#[derive(Debug, Clone, PartialEq)]
pub enum Metric<T: Real> {
    Norm(Norm<T>),
    Riemannian(RiemannianField<T>),
    Germ(Germ<T>),
}

impl<T: Real> GenericMetric<T> for Metric<T> {
    fn dim(&self) -> usize {
        match self {
            Metric::Norm(m) => GenericMetric::dim(m),
            Metric::Riemannian(m) => m.dim(),
            Metric::Germ(m) => m.dim(),
        }
    }

    fn description(&self) -> String {
        match self {
            Metric::Norm(m) => m.description(),
            Metric::Riemannian(m) => m.description(),
            Metric::Germ(m) => m.description(),
        }
    }

    fn eval_generic<S: Scalar<Real = T>>(&self, x: &[S], y: &[S]) -> Result<S> {
        match self {
            Metric::Norm(m) => m.eval_generic(x, y),
            Metric::Riemannian(m) => m.eval_generic(x, y),
            Metric::Germ(m) => m.eval_generic(x, y),
        }
    }
}
