//! Numeric backends.
//!
//! Everything generic in this crate runs over [`Scalar`], implemented for exact
//! big rationals and for `f64`. Identity checks use the rational backend;
//! evaluation and radius work use floats.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::bigint::Sign;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// True for the rational backend (no rounding anywhere).
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;
    fn from_bigint(v: &BigInt) -> Self;
    fn ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }
    /// Exact for rationals (binary expansion of the double), identity for f64.
    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn abs(&self) -> Self;
    /// Natural log of the magnitude without going through `to_f64`, so huge
    /// rationals (e.g. 200!) still produce finite values. `None` for zero.
    fn ln_abs(&self) -> Option<f64>;
    fn to_json(&self) -> serde_json::Value;
    /// CSV rendering: rationals as `p/q`, floats at 17 significant digits.
    fn render(&self) -> String;
    /// The exact value, when this backend has one.
    fn to_rational(&self) -> Option<Rational>;
    fn from_rational(r: &Rational) -> Self;

    fn powi(&self, e: i64) -> Self {
        let mut base = if e < 0 { Self::one() / self.clone() } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }
}

fn ln_abs_bigint(v: &BigInt) -> f64 {
    let bits = v.bits();
    if bits <= 1000 {
        return v.abs().to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (v.abs() >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
    fn from_bigint(v: &BigInt) -> Self {
        Rational::from_integer(v.clone())
    }
    fn ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }
    fn from_f64(v: f64) -> Self {
        Rational::from_float(v).expect("finite float")
    }
    fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        match (self.numer().to_f64(), self.denom().to_f64()) {
            (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
            _ => {
                let mag = self.ln_abs().expect("nonzero").exp();
                if self.is_negative() {
                    -mag
                } else {
                    mag
                }
            }
        }
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn ln_abs(&self) -> Option<f64> {
        if self.numer().sign() == Sign::NoSign {
            None
        } else {
            Some(ln_abs_bigint(self.numer()) - ln_abs_bigint(self.denom()))
        }
    }
    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(self.render())
    }
    fn render(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }
    fn to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_bigint(v: &BigInt) -> Self {
        v.to_f64().unwrap_or(f64::NAN)
    }
    fn ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn ln_abs(&self) -> Option<f64> {
        if *self == 0.0 {
            None
        } else {
            Some(f64::abs(*self).ln())
        }
    }
    fn to_json(&self) -> serde_json::Value {
        serde_json::Number::from_f64(*self)
            .map(serde_json::Value::Number)
            .unwrap_or_else(|| serde_json::Value::String(self.render()))
    }
    fn render(&self) -> String {
        format_f64(*self)
    }
    fn to_rational(&self) -> Option<Rational> {
        None
    }
    fn from_rational(r: &Rational) -> Self {
        Scalar::to_f64(r)
    }
}

/// 17 significant digits in scientific notation; stable across runs.
pub fn format_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{:.16e}", v)
    }
}

/// Binomial coefficient as a big integer.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Integer power of a scalar given as `i64` exponent (negative allowed).
pub fn int<S: Scalar>(v: i64) -> S {
    S::from_i64(v)
}
