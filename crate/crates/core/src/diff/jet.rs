use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::One;

use super::scalar::Scalar;

/// First-order forward-mode jet: a value with its partial derivatives.
///
/// `partials` may be shorter than the number of seeded variables; missing
/// entries are zero, so constants carry an empty vector. Nesting
/// (`Jet<Jet<f64>>`) gives exact second derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet<S> {
    value: S,
    partials: Vec<S>,
}

impl<S: Scalar> Jet<S> {
    pub fn new(value: S, partials: Vec<S>) -> Self {
        Self { value, partials }
    }

    pub fn constant(value: S) -> Self {
        Self {
            value,
            partials: Vec::new(),
        }
    }

    /// Independent variable number `index` out of `count`.
    pub fn variable(value: S, index: usize, count: usize) -> Self {
        let mut partials = vec![S::zero_value(); count];
        partials[index] = S::from_real(S::Real::one());
        Self { value, partials }
    }

    pub fn value(&self) -> &S {
        &self.value
    }

    pub fn partials(&self) -> &[S] {
        &self.partials
    }

    /// Partial `k`, zero when not stored.
    pub fn partial(&self, k: usize) -> S {
        self.partials.get(k).cloned().unwrap_or_else(S::zero_value)
    }

    pub fn into_parts(self) -> (S, Vec<S>) {
        (self.value, self.partials)
    }

    fn chain(&self, value: S, derivative: S) -> Self {
        Self {
            value,
            partials: self
                .partials
                .iter()
                .map(|d| d.clone() * derivative.clone())
                .collect(),
        }
    }

    fn combine(
        a: &[S],
        b: &[S],
        both: impl Fn(&S, &S) -> S,
        left: impl Fn(&S) -> S,
        right: impl Fn(&S) -> S,
    ) -> Vec<S> {
        let n = a.len().max(b.len());
        (0..n)
            .map(|k| match (a.get(k), b.get(k)) {
                (Some(x), Some(y)) => both(x, y),
                (Some(x), None) => left(x),
                (None, Some(y)) => right(y),
                (None, None) => unreachable!(),
            })
            .collect()
    }
}

impl<S: Scalar> Add for Jet<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let partials = Self::combine(
            &self.partials,
            &rhs.partials,
            |x, y| x.clone() + y.clone(),
            S::clone,
            S::clone,
        );
        Self {
            value: self.value + rhs.value,
            partials,
        }
    }
}

impl<S: Scalar> Sub for Jet<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let partials = Self::combine(
            &self.partials,
            &rhs.partials,
            |x, y| x.clone() - y.clone(),
            S::clone,
            |y| -y.clone(),
        );
        Self {
            value: self.value - rhs.value,
            partials,
        }
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl<S: Scalar> Mul for Jet<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let (a, b) = (&self.value, &rhs.value);
        let partials = Self::combine(
            &self.partials,
            &rhs.partials,
            |x, y| x.clone() * b.clone() + a.clone() * y.clone(),
            |x| x.clone() * b.clone(),
            |y| a.clone() * y.clone(),
        );
        Self {
            value: self.value * rhs.value,
            partials,
        }
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl<S: Scalar> Div for Jet<S> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        // d(a/b) = (da - (a/b) db) / b
        let q = self.value.clone() / rhs.value.clone();
        let b = &rhs.value;
        let partials = Self::combine(
            &self.partials,
            &rhs.partials,
            |x, y| (x.clone() - q.clone() * y.clone()) / b.clone(),
            |x| x.clone() / b.clone(),
            |y| -(q.clone() * y.clone()) / b.clone(),
        );
        Self { value: q, partials }
    }
}

impl<S: Scalar> Neg for Jet<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            value: -self.value,
            partials: self.partials.into_iter().map(|d| -d).collect(),
        }
    }
}

impl<S: Scalar> Scalar for Jet<S> {
    type Real = S::Real;

    fn from_real(c: S::Real) -> Self {
        Self::constant(S::from_real(c))
    }

    fn real(&self) -> S::Real {
        self.value.real()
    }

    fn scale(&self, c: S::Real) -> Self {
        Self {
            value: self.value.scale(c),
            partials: self.partials.iter().map(|d| d.scale(c)).collect(),
        }
    }

    fn sqrt(&self) -> Self {
        let root = self.value.sqrt();
        let half = S::Real::one() / (S::Real::one() + S::Real::one());
        let derivative = S::from_real(half) / root.clone();
        self.chain(root, derivative)
    }

    fn sin(&self) -> Self {
        self.chain(self.value.sin(), self.value.cos())
    }

    fn cos(&self) -> Self {
        self.chain(self.value.cos(), -self.value.sin())
    }

    fn atan2(&self, x: &Self) -> Self {
        // d atan2(y, x) = (x dy - y dx) / (x^2 + y^2)
        let (yv, xv) = (&self.value, &x.value);
        let r2 = xv.square() + yv.square();
        let partials = Self::combine(
            &self.partials,
            &x.partials,
            |dy, dx| (xv.clone() * dy.clone() - yv.clone() * dx.clone()) / r2.clone(),
            |dy| xv.clone() * dy.clone() / r2.clone(),
            |dx| -(yv.clone() * dx.clone()) / r2.clone(),
        );
        Self {
            value: yv.atan2(xv),
            partials,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type J = Jet<f64>;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-13 * (1.0 + b.abs())
    }

    #[test]
    fn product_and_quotient_rules() {
        let x = J::variable(3.0, 0, 2);
        let y = J::variable(4.0, 1, 2);
        let p = x.clone() * y.clone();
        assert_eq!(p.partials(), &[4.0, 3.0]);
        let q = x / y;
        assert!(close(q.partial(0), 0.25));
        assert!(close(q.partial(1), -3.0 / 16.0));
    }

    #[test]
    fn norm_gradient() {
        let x = J::variable(3.0, 0, 2);
        let y = J::variable(4.0, 1, 2);
        let r = (x.square() + y.square()).sqrt();
        assert!(close(*r.value(), 5.0));
        assert!(close(r.partial(0), 0.6) && close(r.partial(1), 0.8));
    }

    #[test]
    fn atan2_and_trig() {
        let x = J::variable(1.0, 0, 2);
        let y = J::variable(1.0, 1, 2);
        let t = y.atan2(&x);
        assert!(close(*t.value(), std::f64::consts::FRAC_PI_4));
        assert!(close(t.partial(0), -0.5) && close(t.partial(1), 0.5));
        let s = x.sin();
        assert!(close(s.partial(0), 1f64.cos()));
        let c = x.cos();
        assert!(close(c.partial(0), -1f64.sin()));
    }

    #[test]
    fn nested_jets_give_second_derivatives() {
        // f(x, y) = x^2 y  -> f_xx = 2y, f_xy = 2x
        type J2 = Jet<Jet<f64>>;
        let seed = |v: f64, k: usize| J2::new(J::variable(v, k, 2), {
            let mut d = vec![J::zero_value(); 2];
            d[k] = J::from_real(1.0);
            d
        });
        let (x, y) = (seed(2.0, 0), seed(5.0, 1));
        let f = x.square() * y;
        let fx = f.partial(0);
        assert!(close(*fx.value(), 20.0));
        assert!(close(fx.partial(0), 10.0) && close(fx.partial(1), 4.0));
        assert!(close(f.partial(1).partial(0), 4.0));
    }

    #[test]
    fn constants_mix_with_variables() {
        let x = J::variable(2.0, 1, 3);
        let c = J::from_real(5.0);
        let z = c.clone() - x.clone();
        assert_eq!(z.partials(), &[0.0, -1.0, 0.0]);
        assert_eq!((c / x).partial(1), -5.0 / 4.0);
        assert_eq!(J::from_real(2.0).powu(10).value(), &1024.0);
    }
}
