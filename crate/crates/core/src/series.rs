//! Truncated formal power series over [`Rational`].
//!
//! A series of order `N` stores the coefficients of `w^0 ..= w^N`. Anything
//! beyond `N` is unknown rather than zero, so every operation reports the
//! highest order it can actually vouch for.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PowerSeries {
    coeffs: Vec<Rational>,
}

impl PowerSeries {
    /// Builds a series whose order is `coeffs.len() - 1`.
    ///
    /// # Panics
    /// If `coeffs` is empty.
    pub fn new(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "a power series needs at least one coefficient");
        Self { coeffs }
    }

    /// Polynomial coefficients read as an exact series at `order`, padding with
    /// zeros or dropping the tail as needed.
    pub fn from_poly(poly: &[Rational], order: usize) -> Self {
        let coeffs = (0..=order)
            .map(|k| poly.get(k).cloned().unwrap_or_else(Rational::zero))
            .collect();
        Self { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self::from_poly(&[], order)
    }

    pub fn one(order: usize) -> Self {
        Self::from_poly(&[Rational::one()], order)
    }

    /// The indeterminate `w` itself.
    pub fn var(order: usize) -> Self {
        Self::from_poly(&[Rational::zero(), Rational::one()], order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> Option<&Rational> {
        self.coeffs.get(k)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    pub fn constant(&self) -> &Rational {
        &self.coeffs[0]
    }

    /// Drops coefficients above `order`. A higher `order` than the current
    /// one is clamped: unknown coefficients are never invented.
    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order());
        Self {
            coeffs: self.coeffs[..=order].to_vec(),
        }
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// Cauchy product truncated at `order` (which must not exceed either input's order).
    fn mul_to(&self, other: &Self, order: usize) -> Self {
        debug_assert!(order <= self.order() && order <= other.order());
        let mut out = vec![Rational::zero(); order + 1];
        for (i, a) in self.coeffs[..=order].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..=order - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Self { coeffs: out }
    }

    /// `outer(inner(w))`, valid to order `min(outer.order(), inner.order())`.
    pub fn compose(outer: &Self, inner: &Self) -> Result<Self> {
        if !inner.constant().is_zero() {
            return Err(Error::NonZeroConstant {
                operation: "composition",
                constant: inner.constant().to_string(),
            });
        }
        let order = outer.order().min(inner.order());
        // Horner: (((c_N) inner + c_{N-1}) inner + ...) + c_0
        let mut acc = Self::from_poly(&[outer.coeffs[order].clone()], order);
        for c in outer.coeffs[..order].iter().rev() {
            acc = acc.mul_to(inner, order);
            acc.coeffs[0] += c;
        }
        Ok(acc)
    }

    /// `log(1 + self)` from the Mercator series, same order as `self`.
    pub fn log1p(&self) -> Result<Self> {
        if !self.constant().is_zero() {
            return Err(Error::NonZeroConstant {
                operation: "log1p",
                constant: self.constant().to_string(),
            });
        }
        let order = self.order();
        let mut mercator = vec![Rational::zero()];
        for k in 1..=order {
            let sign = if k % 2 == 1 { 1 } else { -1 };
            mercator.push(Rational::new(sign.into(), (k as i64).into()));
        }
        Self::compose(&Self::new(mercator), self)
    }

    /// Partial sum `Σ_{k ≤ N} c_k w^k` at a rational point.
    pub fn eval(&self, w: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * w + c)
    }

    /// Partial sums at `w = 1`: entry `k` is `Σ_{j ≤ k} c_j`.
    pub fn partial_sums_at_one(&self) -> Vec<Rational> {
        let mut acc = Rational::zero();
        self.coeffs
            .iter()
            .map(|c| {
                acc += c;
                acc.clone()
            })
            .collect()
    }
}

impl Add for &PowerSeries {
    type Output = PowerSeries;

    fn add(self, rhs: &PowerSeries) -> PowerSeries {
        let order = self.order().min(rhs.order());
        PowerSeries {
            coeffs: (0..=order).map(|k| &self.coeffs[k] + &rhs.coeffs[k]).collect(),
        }
    }
}

impl Sub for &PowerSeries {
    type Output = PowerSeries;

    fn sub(self, rhs: &PowerSeries) -> PowerSeries {
        let order = self.order().min(rhs.order());
        PowerSeries {
            coeffs: (0..=order).map(|k| &self.coeffs[k] - &rhs.coeffs[k]).collect(),
        }
    }
}

impl Neg for &PowerSeries {
    type Output = PowerSeries;

    fn neg(self) -> PowerSeries {
        PowerSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &PowerSeries {
    type Output = PowerSeries;

    fn mul(self, rhs: &PowerSeries) -> PowerSeries {
        self.mul_to(rhs, self.order().min(rhs.order()))
    }
}

impl fmt::Display for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})w")?,
                _ => write!(f, "({c})w^{k}")?,
            }
        }
        write!(f, " + O(w^{})", self.order() + 1)
    }
}

impl Serialize for PowerSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        crate::rational::serde_string_vec::serialize(&self.coeffs, serializer)
    }
}

impl<'de> Deserialize<'de> for PowerSeries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let coeffs = crate::rational::serde_string_vec::deserialize(deserializer)?;
        if coeffs.is_empty() {
            return Err(serde::de::Error::custom("empty coefficient array"));
        }
        Ok(Self { coeffs })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn ps(coeffs: &[Rational]) -> PowerSeries {
        PowerSeries::new(coeffs.to_vec())
    }

    #[test]
    fn add_cancels_and_fractions() {
        let a = ps(&[int(1), int(1)]);
        let b = ps(&[int(1), int(-1)]);
        assert_eq!(&a + &b, ps(&[int(2), int(0)]));

        let s = ps(&[rat(3, 7), rat(-2, 5), int(4)]);
        assert_eq!(&PowerSeries::zero(2) + &s, s);

        let a = ps(&[rat(1, 2), rat(1, 6)]);
        let b = ps(&[rat(1, 3), rat(1, 3)]);
        assert_eq!(&a + &b, ps(&[rat(5, 6), rat(1, 2)]));
    }

    #[test]
    fn add_takes_min_order() {
        let a = ps(&[int(1), int(2), int(3)]);
        let b = ps(&[int(1)]);
        assert_eq!((&a + &b).order(), 0);
    }

    #[test]
    fn mul_basic() {
        let a = PowerSeries::from_poly(&[int(1), int(1)], 2);
        let b = PowerSeries::from_poly(&[int(1), int(-1)], 2);
        assert_eq!(&a * &b, ps(&[int(1), int(0), int(-1)]));

        let s = ps(&[rat(1, 3), rat(-2, 9), int(5)]);
        assert_eq!(&s * &PowerSeries::one(2), s);
    }

    #[test]
    fn mul_square_of_separatrix_head() {
        // (1 - z/2 + z^2/6)^2 = 1 - z + (1/4 + 1/3) z^2, and 7/12 = 3 * 4 * B_3.
        let s = ps(&[int(1), rat(-1, 2), rat(1, 6)]);
        assert_eq!(&s * &s, ps(&[int(1), int(-1), rat(7, 12)]));
    }

    #[test]
    fn mul_order_is_min() {
        let a = PowerSeries::one(5);
        let b = PowerSeries::one(3);
        assert_eq!((&a * &b).order(), 3);
    }

    #[test]
    fn compose_examples() {
        let outer = PowerSeries::from_poly(&[int(1), int(1)], 4);
        let theta = PowerSeries::var(4);
        assert_eq!(
            PowerSeries::compose(&outer, &theta).unwrap(),
            PowerSeries::from_poly(&[int(1), int(1)], 4)
        );

        let square = PowerSeries::from_poly(&[int(0), int(0), int(1)], 4);
        let inner = PowerSeries::from_poly(&[int(0), int(1), int(-1)], 4);
        assert_eq!(
            PowerSeries::compose(&square, &inner).unwrap(),
            ps(&[int(0), int(0), int(1), int(-2), int(1)])
        );

        let outer = ps(&[rat(3, 4), int(2), int(-7)]);
        assert_eq!(
            PowerSeries::compose(&outer, &PowerSeries::zero(2)).unwrap(),
            ps(&[rat(3, 4), int(0), int(0)])
        );
    }

    #[test]
    fn compose_rejects_constant_inner() {
        let err = PowerSeries::compose(&PowerSeries::one(2), &PowerSeries::one(2)).unwrap_err();
        assert!(matches!(err, Error::NonZeroConstant { .. }));
    }

    #[test]
    fn log1p_examples() {
        let theta = PowerSeries::var(3);
        assert_eq!(
            theta.log1p().unwrap(),
            ps(&[int(0), int(1), rat(-1, 2), rat(1, 3)])
        );
        assert_eq!(PowerSeries::zero(4).log1p().unwrap(), PowerSeries::zero(4));
        assert!(PowerSeries::one(2).log1p().is_err());
    }

    #[test]
    fn eval_and_partial_sums() {
        let s = ps(&[int(1), rat(-1, 2), rat(1, 6)]);
        assert_eq!(s.eval(&rat(1, 2)), rat(19, 24));
        assert_eq!(s.partial_sums_at_one(), vec![int(1), rat(1, 2), rat(2, 3)]);
    }

    #[test]
    fn json_form() {
        let s = ps(&[int(1), rat(-1, 12), int(0)]);
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"["1","-1/12","0"]"#);
        let back: PowerSeries = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<PowerSeries>("[]").is_err());
    }
}
