//! Exact rational scalars.
//!
//! [`Rational`] is an arbitrary-precision fraction kept in lowest terms with a
//! positive denominator. Its text form is `"p/q"`, or `"p"` when `q = 1`.
//! Conversion to floating point only happens through the explicit helpers
//! here.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Parses `"p/q"`, an integer, or a plain decimal such as `"-0.125"` (exactly).
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let invalid = || Error::InvalidArgument(format!("not a rational: {text:?}"));
    if let Some((whole, frac)) = text.split_once('.') {
        let digits_only = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
        let (negative, whole) = match whole.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, whole.strip_prefix('+').unwrap_or(whole)),
        };
        if (whole.is_empty() && frac.is_empty()) || !digits_only(whole) || !digits_only(frac) {
            return Err(invalid());
        }
        let numer = BigInt::from_str(&format!("{whole}{frac}0")).map_err(|_| invalid())?;
        let denom = BigInt::from(10u32).pow(frac.len() as u32 + 1);
        let value = Rational::new(numer, denom);
        return Ok(if negative { -value } else { value });
    }
    Rational::from_str(text).map_err(|_| invalid())
}

/// Exact value of a finite `f64` as a rational.
pub fn from_f64(value: f64) -> Result<Rational> {
    Rational::from_float(value)
        .ok_or_else(|| Error::InvalidArgument(format!("non-finite value {value}")))
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// Fixed-point decimal rendering with `digits` places, rounded half away from zero.
pub fn to_fixed(value: &Rational, digits: usize) -> String {
    let scale = Rational::from_integer(BigInt::from(10u32).pow(digits as u32));
    let scaled = (value * scale).round().to_integer();
    let negative = scaled.is_negative();
    let mut body = scaled.abs().to_string();
    if digits > 0 {
        if body.len() <= digits {
            body = format!("{}{}", "0".repeat(digits + 1 - body.len()), body);
        }
        body.insert(body.len() - digits, '.');
    }
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

/// `n!` for every `n` in `0..=max`.
pub fn factorials(max: usize) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(max + 1);
    let mut acc = BigInt::one();
    out.push(acc.clone());
    for n in 1..=max {
        acc *= n;
        out.push(acc.clone());
    }
    out
}

/// Returns the integer value of `value`, or `None` if it is not an integer.
pub fn as_integer(value: &Rational) -> Option<BigInt> {
    value.is_integer().then(|| value.to_integer())
}

pub fn is_zero(value: &Rational) -> bool {
    value.is_zero()
}

/// Serde adapter storing a [`Rational`] as its `"p/q"` string.
pub mod serde_string {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::Rational;

    pub fn serialize<S: Serializer>(value: &Rational, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(value)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(deserializer)?;
        super::parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `Vec<Rational>` as an array of `"p/q"` strings.
pub mod serde_string_vec {
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    use super::Rational;

    pub fn serialize<S: Serializer>(values: &[Rational], serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(values.len()))?;
        for value in values {
            seq.serialize_element(&value.to_string())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        deserializer: D,
    ) -> Result<Vec<Rational>, D::Error> {
        Vec::<String>::deserialize(deserializer)?
            .iter()
            .map(|text| super::parse_rational(text).map_err(serde::de::Error::custom))
            .collect()
    }
}
