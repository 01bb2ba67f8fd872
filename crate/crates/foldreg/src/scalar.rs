//! Scalar abstractions.
//!
//! `Coef` is anything the closed-form formulas can run on (floats and exact
//! rationals). `Real` adds what the numerical code needs.

use num_traits::{Float, FloatConst, FromPrimitive, Num, ToPrimitive};
use std::fmt::{Debug, Display};
use std::ops::Neg;

pub trait Coef: Clone + Num + Neg<Output = Self> + PartialOrd + FromPrimitive + Debug {}

impl<T> Coef for T where T: Clone + Num + Neg<Output = T> + PartialOrd + FromPrimitive + Debug {}

pub trait Real:
    Coef + Float + FloatConst + ToPrimitive + Default + Display + Send + Sync + 'static
{
    /// Literal conversion; every `Real` can represent an f64 approximately.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).unwrap()
    }

    /// Tolerance clipped from below so f32 users do not chase unreachable targets.
    #[inline]
    fn tol(x: f64) -> Self {
        Self::lit(x).max(Self::epsilon() * Self::lit(64.0))
    }

    #[inline]
    fn f64(self) -> f64 {
        self.to_f64().unwrap()
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Build a coefficient from a ratio of integers.
pub fn q<T: Coef>(num: i64, den: i64) -> T {
    T::from_i64(num).unwrap() / T::from_i64(den).unwrap()
}

pub(crate) fn sign<T: Coef>(x: &T) -> i8 {
    let z = T::zero();
    if *x > z {
        1
    } else if *x < z {
        -1
    } else {
        0
    }
}
