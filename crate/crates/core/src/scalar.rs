//! Coefficient fields shared by every polynomial and matrix type.
//!
//! Three fields are supported: `f64` (the default floating backend),
//! `Complex64`, and `BigRational` (the exact backend). Anything that must be
//! checked exactly is written once against [`Scalar`] and instantiated with
//! `BigRational` in tests.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::Value;

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// True when arithmetic is exact and zero tests may be literal.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    /// Exact for the rational field (every finite binary64 is a dyadic rational).
    fn from_f64(v: f64) -> Self;
    fn conj(&self) -> Self;
    fn magnitude(&self) -> f64;
    fn re(&self) -> f64;
    fn to_complex(&self) -> Complex64;
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Option<Self>;

    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    fn conj(&self) -> Self {
        *self
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn re(&self) -> f64 {
        *self
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(*self, 0.0)
    }
    fn to_json(&self) -> Value {
        Value::from(*self)
    }
    fn from_json(v: &Value) -> Option<Self> {
        v.as_f64()
    }
}

impl Scalar for Complex64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn from_f64(v: f64) -> Self {
        Complex64::new(v, 0.0)
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn re(&self) -> f64 {
        self.re
    }
    fn to_complex(&self) -> Complex64 {
        *self
    }
    fn to_json(&self) -> Value {
        Value::from(vec![self.re, self.im])
    }
    fn from_json(v: &Value) -> Option<Self> {
        match v {
            Value::Array(parts) if parts.len() == 2 => {
                Some(Complex64::new(parts[0].as_f64()?, parts[1].as_f64()?))
            }
            other => other.as_f64().map(|re| Complex64::new(re, 0.0)),
        }
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_f64(v: f64) -> Self {
        BigRational::from_float(v).expect("finite parameter")
    }
    fn conj(&self) -> Self {
        self.clone()
    }
    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }
    fn re(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(self.re(), 0.0)
    }
    fn to_json(&self) -> Value {
        Value::from(self.to_string())
    }
    fn from_json(v: &Value) -> Option<Self> {
        match v {
            Value::String(s) => parse_rational(s),
            other => other.as_f64().and_then(BigRational::from_float),
        }
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

/// Parses `"p"` or `"p/q"`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if Zero::is_zero(&q) {
                return None;
            }
            Some(BigRational::new(p, q))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

/// CSV rendering used by coefficient dumps: `re+imi`.
pub fn csv_complex<T: Scalar>(v: &T) -> String {
    let c = v.to_complex();
    if c.im < 0.0 || (c.im == 0.0 && c.im.is_sign_negative()) {
        format!("{:e}-{:e}i", c.re, -c.im)
    } else {
        format!("{:e}+{:e}i", c.re, c.im)
    }
}

/// Shorthand for an exact rational `p/q`.
pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}
