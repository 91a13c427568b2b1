//! Numeric abstraction shared by the sequence-space algebra.
//!
//! The action/frequency maps are finite sums, so they can be evaluated in
//! `f64`, in exact rationals, or exactly in a real quadratic field. Every
//! routine in [`crate::actions`] is generic over [`Scalar`].

use std::cmp::Ordering;
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_bigint(v: &BigInt) -> Self;
    /// Division by a nonzero integer.
    fn div_i64(&self, d: i64) -> Self;
    /// Sign relative to zero.
    fn sign(&self) -> Ordering;
    fn to_f64(&self) -> f64;
    /// `true` when the type carries exact values (no rounding in ring operations).
    fn is_exact() -> bool;

    fn lt_zero(&self) -> bool {
        self.sign() == Ordering::Less
    }

    fn gt_zero(&self) -> bool {
        self.sign() == Ordering::Greater
    }

    fn abs_val(&self) -> Self {
        if self.lt_zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn from_u64(v: u64) -> Self {
        Self::from_i64(i64::try_from(v).expect("index exceeds i64 range"))
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_bigint(v: &BigInt) -> Self {
        ToPrimitive::to_f64(v).unwrap_or(f64::NAN)
    }
    fn div_i64(&self, d: i64) -> Self {
        self / d as f64
    }
    fn sign(&self) -> Ordering {
        self.partial_cmp(&0.0).unwrap_or(Ordering::Equal)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_exact() -> bool {
        false
    }
}

impl Scalar for BigRational {
    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_bigint(v: &BigInt) -> Self {
        BigRational::from_integer(v.clone())
    }
    fn div_i64(&self, d: i64) -> Self {
        self / BigRational::from_integer(BigInt::from(d))
    }
    fn sign(&self) -> Ordering {
        if self.is_zero() {
            Ordering::Equal
        } else if Signed::is_positive(self) {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_exact() -> bool {
        true
    }
}

/// Convenience constructor for exact rationals.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
