//! Scalar types the ladder algebra can run over.
//!
//! The ladder recurrences only need field operations, so the same code runs
//! exactly over [`BigRational`] and approximately over `f32`/`f64`. [`Dual`]
//! carries a first derivative alongside each value, which turns a ladder
//! computation into its exact parameter derivative.

use std::cmp::Ordering;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::table::format_number;

/// Field element usable as a ladder coefficient.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// `num / den`, exact where the type allows it.
    fn from_ratio(num: i64, den: i64) -> Self;

    fn to_f64(&self) -> f64;

    /// Whether arithmetic in this type is exact.
    fn is_exact() -> bool;

    /// CSV fields for this value: `numerator,denominator` when exact,
    /// a single formatted float otherwise.
    fn csv_fields(&self) -> String;

    fn from_usize(n: usize) -> Self {
        Self::from_ratio(n as i64, 1)
    }

    fn abs_value(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

impl Scalar for f64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_exact() -> bool {
        false
    }
    fn csv_fields(&self) -> String {
        format_number(*self)
    }
}

impl Scalar for f32 {
    fn from_ratio(num: i64, den: i64) -> Self {
        (num as f64 / den as f64) as f32
    }
    fn to_f64(&self) -> f64 {
        *self as f64
    }
    fn is_exact() -> bool {
        false
    }
    fn csv_fields(&self) -> String {
        format_number(*self as f64)
    }
}

impl Scalar for BigRational {
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_exact() -> bool {
        true
    }
    fn csv_fields(&self) -> String {
        format!("{},{}", self.numer(), self.denom())
    }
}

/// Forward-mode dual number `re + eps·ε` with `ε² = 0`.
///
/// Ordering looks at the real part only.
#[derive(Clone, Debug, PartialEq)]
pub struct Dual<T> {
    pub re: T,
    pub eps: T,
}

impl<T: Scalar> Dual<T> {
    pub fn constant(re: T) -> Self {
        Dual { re, eps: T::zero() }
    }

    /// The independent variable at `re`.
    pub fn variable(re: T) -> Self {
        Dual { re, eps: T::one() }
    }
}

impl<T: Scalar> PartialOrd for Dual<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.re.partial_cmp(&other.re)
    }
}

impl<T: Scalar> Add for Dual<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Dual { re: self.re + rhs.re, eps: self.eps + rhs.eps }
    }
}

impl<T: Scalar> Sub for Dual<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Dual { re: self.re - rhs.re, eps: self.eps - rhs.eps }
    }
}

impl<T: Scalar> Mul for Dual<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let eps = self.re.clone() * rhs.eps + self.eps * rhs.re.clone();
        Dual { re: self.re * rhs.re, eps }
    }
}

impl<T: Scalar> Div for Dual<T> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let denom = rhs.re.clone() * rhs.re.clone();
        let eps = (self.eps * rhs.re.clone() - self.re.clone() * rhs.eps) / denom;
        Dual { re: self.re / rhs.re, eps }
    }
}

impl<T: Scalar> Neg for Dual<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual { re: -self.re, eps: -self.eps }
    }
}

impl<T: Scalar> Zero for Dual<T> {
    fn zero() -> Self {
        Dual::constant(T::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.eps.is_zero()
    }
}

impl<T: Scalar> One for Dual<T> {
    fn one() -> Self {
        Dual::constant(T::one())
    }
}

impl<T: Scalar> Scalar for Dual<T> {
    fn from_ratio(num: i64, den: i64) -> Self {
        Dual::constant(T::from_ratio(num, den))
    }
    fn to_f64(&self) -> f64 {
        self.re.to_f64()
    }
    fn is_exact() -> bool {
        T::is_exact()
    }
    fn csv_fields(&self) -> String {
        self.re.csv_fields()
    }
}

/// Shorthand for an exact rational `num / den`.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::from_ratio(num, den)
}
