//! Forward-mode tangent scalar: a value together with its derivative along
//! one seeded direction. Arithmetic and elementary functions come from
//! `num_dual`; this wrapper only supplies the `num_traits::Float` surface the
//! geometry code is written against, so any `Real` routine can be run on
//! tangents to obtain exact (round-off limited) first derivatives.
//!
//! Comparisons look at the value only, so branches follow the real-valued
//! code path.

use super::{Differentiable, Real};
use num_dual::{Dual, DualNum};
use num_traits::{Float, FloatConst, FromPrimitive, Num, NumCast, One, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::num::FpCategory;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

/// Value and directional derivative.
#[derive(Clone, Copy, Debug)]
pub struct Tangent<T: Differentiable>(Dual<T, T>);

impl<T: Differentiable> Tangent<T> {
    pub fn new(value: T, derivative: T) -> Self {
        Self(Dual::new(value, derivative))
    }

    /// A constant (zero derivative).
    pub fn constant(value: T) -> Self {
        Self::new(value, T::zero())
    }

    pub fn value(self) -> T {
        self.0.re
    }

    pub fn derivative(self) -> T {
        self.0.eps
    }
}

impl<T: Differentiable> Default for Tangent<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Differentiable> fmt::Display for Tangent<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}ε", self.0.re, self.0.eps)
    }
}

impl<T: Differentiable> PartialEq for Tangent<T> {
    fn eq(&self, other: &Self) -> bool {
        self.0.re == other.0.re
    }
}

impl<T: Differentiable> PartialOrd for Tangent<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.re.partial_cmp(&other.0.re)
    }
}

macro_rules! binop {
    ($($tr:ident $method:ident),*) => {$(
        impl<T: Differentiable> $tr for Tangent<T> {
            type Output = Self;
            #[inline]
            fn $method(self, rhs: Self) -> Self {
                Self(self.0.$method(rhs.0))
            }
        }
    )*};
}
binop!(Add add, Sub sub, Mul mul, Div div, Rem rem);

impl<T: Differentiable> Neg for Tangent<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self(-self.0)
    }
}

impl<T: Differentiable> Zero for Tangent<T> {
    fn zero() -> Self {
        Self::constant(T::zero())
    }
    fn is_zero(&self) -> bool {
        self.0.re.is_zero()
    }
}

impl<T: Differentiable> One for Tangent<T> {
    fn one() -> Self {
        Self::constant(T::one())
    }
}

impl<T: Differentiable> Num for Tangent<T> {
    type FromStrRadixErr = T::FromStrRadixErr;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        T::from_str_radix(s, radix).map(Self::constant)
    }
}

impl<T: Differentiable> Sum for Tangent<T> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |a, b| a + b)
    }
}

impl<T: Differentiable> ToPrimitive for Tangent<T> {
    fn to_i64(&self) -> Option<i64> {
        self.0.re.to_i64()
    }
    fn to_u64(&self) -> Option<u64> {
        self.0.re.to_u64()
    }
    fn to_f64(&self) -> Option<f64> {
        self.0.re.to_f64()
    }
}

impl<T: Differentiable> NumCast for Tangent<T> {
    fn from<N: ToPrimitive>(n: N) -> Option<Self> {
        <T as NumCast>::from(n).map(Self::constant)
    }
}

impl<T: Differentiable> FromPrimitive for Tangent<T> {
    fn from_i64(n: i64) -> Option<Self> {
        T::from_i64(n).map(Self::constant)
    }
    fn from_u64(n: u64) -> Option<Self> {
        T::from_u64(n).map(Self::constant)
    }
    fn from_f64(n: f64) -> Option<Self> {
        T::from_f64(n).map(Self::constant)
    }
}

macro_rules! constants {
    ($($name:ident),*) => {
        impl<T: Differentiable> FloatConst for Tangent<T> {
            $(fn $name() -> Self { Self::constant(T::$name()) })*
        }
    };
}
#[allow(non_snake_case)]
mod consts {
    use super::*;
    constants!(
        E,
        FRAC_1_PI,
        FRAC_1_SQRT_2,
        FRAC_2_PI,
        FRAC_2_SQRT_PI,
        FRAC_PI_2,
        FRAC_PI_3,
        FRAC_PI_4,
        FRAC_PI_6,
        FRAC_PI_8,
        LN_10,
        LN_2,
        LOG10_E,
        LOG2_E,
        PI,
        SQRT_2,
        TAU,
        LOG10_2,
        LOG2_10
    );
}

/// Functions with a zero derivative almost everywhere.
macro_rules! flat {
    ($($name:ident),*) => {$(
        fn $name(self) -> Self { Self::constant(self.0.re.$name()) }
    )*};
}

/// Smooth functions: chain rule from `num_dual`.
macro_rules! smooth {
    ($($name:ident),*) => {$(
        fn $name(self) -> Self { Self(DualNum::$name(&self.0)) }
    )*};
}

/// Predicates and constants on the value.
macro_rules! on_value {
    ($($name:ident -> $out:ty),*) => {$(
        fn $name(self) -> $out { self.0.re.$name() }
    )*};
}

impl<T: Differentiable> Float for Tangent<T> {
    fn nan() -> Self {
        Self::constant(T::nan())
    }
    fn infinity() -> Self {
        Self::constant(T::infinity())
    }
    fn neg_infinity() -> Self {
        Self::constant(T::neg_infinity())
    }
    fn neg_zero() -> Self {
        Self::constant(T::neg_zero())
    }
    fn min_value() -> Self {
        Self::constant(T::min_value())
    }
    fn min_positive_value() -> Self {
        Self::constant(T::min_positive_value())
    }
    fn max_value() -> Self {
        Self::constant(T::max_value())
    }
    fn epsilon() -> Self {
        Self::constant(T::epsilon())
    }

    on_value!(
        is_nan -> bool,
        is_infinite -> bool,
        is_finite -> bool,
        is_normal -> bool,
        classify -> FpCategory,
        is_sign_positive -> bool,
        is_sign_negative -> bool,
        integer_decode -> (u64, i16, i8)
    );
    flat!(floor, ceil, round, trunc, signum);
    smooth!(recip, sqrt, exp, exp2, ln, log2, log10, cbrt, sin, cos, tan, asin, acos, atan, exp_m1, ln_1p);
    smooth!(sinh, cosh, tanh, asinh, acosh, atanh);

    fn fract(self) -> Self {
        Self::new(self.0.re.fract(), self.0.eps)
    }
    fn abs(self) -> Self {
        if self.0.re.is_sign_negative() {
            -self
        } else {
            self
        }
    }
    fn mul_add(self, a: Self, b: Self) -> Self {
        self * a + b
    }
    fn powi(self, n: i32) -> Self {
        Self(DualNum::powi(&self.0, n))
    }
    fn powf(self, n: Self) -> Self {
        if n.0.eps.is_zero() {
            Self(DualNum::powf(&self.0, n.0.re))
        } else {
            (self.ln() * n).exp()
        }
    }
    fn log(self, base: Self) -> Self {
        self.ln() / base.ln()
    }
    fn max(self, other: Self) -> Self {
        if other > self || self.is_nan() {
            other
        } else {
            self
        }
    }
    fn min(self, other: Self) -> Self {
        if other < self || self.is_nan() {
            other
        } else {
            self
        }
    }
    fn abs_sub(self, other: Self) -> Self {
        (self - other).max(Self::zero())
    }
    fn hypot(self, other: Self) -> Self {
        (self * self + other * other).sqrt()
    }
    fn atan2(self, other: Self) -> Self {
        Self(DualNum::atan2(&self.0, other.0))
    }
    fn sin_cos(self) -> (Self, Self) {
        let (s, c) = DualNum::sin_cos(&self.0);
        (Self(s), Self(c))
    }
}

impl<T: Differentiable> Real for Tangent<T> {
    fn geometric_tolerance() -> Self {
        Self::constant(T::geometric_tolerance())
    }
    fn default_fd_step() -> Self {
        Self::constant(T::default_fd_step())
    }
    fn max_condition() -> Self {
        Self::constant(T::max_condition())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn seeded(x: f64) -> Tangent<f64> {
        Tangent::new(x, 1.0)
    }

    #[test]
    fn elementary_derivatives() {
        let x = seeded(0.3);
        assert_relative_eq!(x.sqrt().derivative(), 0.5 / 0.3f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(x.acos().derivative(), -1.0 / (1.0 - 0.09f64).sqrt(), max_relative = 1e-15);
        assert_relative_eq!(
            (x * x / (x + Tangent::constant(1.0))).derivative(),
            (0.09 + 0.6) / 1.69,
            max_relative = 1e-15
        );
        // d/dx atan2(x, 2) = 2 / (x² + 4)
        assert_relative_eq!(x.atan2(Tangent::constant(2.0)).derivative(), 2.0 / 4.09, max_relative = 1e-15);
    }

    #[test]
    fn comparisons_and_branches_use_the_value() {
        let a = Tangent::new(-2.0f64, 3.0);
        assert_eq!(a.abs().derivative(), -3.0);
        assert!(a < Tangent::constant(0.0));
        assert_eq!(a.max(Tangent::new(1.0, 5.0)).derivative(), 5.0);
        assert_eq!(Tangent::<f64>::lit(0.25).derivative(), 0.0);
    }

    #[test]
    fn single_precision() {
        let x = Tangent::new(4.0f32, 1.0);
        assert_relative_eq!(x.sqrt().derivative(), 0.25, max_relative = 1e-6);
    }
}
