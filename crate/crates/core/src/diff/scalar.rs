use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::real::Real;

/// Number type a metric can be evaluated over: plain reals or jets of them.
///
/// Metric code written once against this trait yields values, gradients
/// and (through nested jets) Hessians.
pub trait Scalar:
    Clone
    + Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    type Real: Real;

    fn from_real(c: Self::Real) -> Self;

    /// The underlying real value, stripped of every derivative layer.
    fn real(&self) -> Self::Real;

    fn scale(&self, c: Self::Real) -> Self;
    fn sqrt(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn atan2(&self, x: &Self) -> Self;

    fn zero_value() -> Self {
        Self::from_real(Self::Real::zero())
    }

    fn square(&self) -> Self {
        self.clone() * self.clone()
    }

    /// Non-negative integer power by repeated squaring.
    fn powu(&self, k: u32) -> Self {
        let mut result = Self::from_real(Self::Real::one());
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result * base.clone();
            }
            k >>= 1;
            if k > 0 {
                base = base.square();
            }
        }
        result
    }
}

macro_rules! impl_scalar_for_float {
    ($t:ty) => {
        impl Scalar for $t {
            type Real = $t;

            fn from_real(c: $t) -> Self {
                c
            }
            fn real(&self) -> $t {
                *self
            }
            fn scale(&self, c: $t) -> Self {
                self * c
            }
            fn sqrt(&self) -> Self {
                <$t>::sqrt(*self)
            }
            fn sin(&self) -> Self {
                <$t>::sin(*self)
            }
            fn cos(&self) -> Self {
                <$t>::cos(*self)
            }
            fn atan2(&self, x: &Self) -> Self {
                <$t>::atan2(*self, *x)
            }
        }
    };
}

impl_scalar_for_float!(f32);
impl_scalar_for_float!(f64);

/// Sum of scalars, starting from zero.
pub fn sum<S: Scalar>(items: impl IntoIterator<Item = S>) -> S {
    items.into_iter().fold(S::zero_value(), |acc, x| acc + x)
}

/// `sum_i c_i * y_i` for real coefficients.
pub fn linear_form<S: Scalar>(c: &[S::Real], y: &[S]) -> S {
    sum(c.iter().zip(y).filter(|(c, _)| **c != S::Real::zero()).map(|(&c, yi)| yi.scale(c)))
}
