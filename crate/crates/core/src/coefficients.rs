//! Separatrix coefficients `B_n` and their integer relatives.
//!
//! `B_n` obey the convolution recurrence
//!
//! ```text
//! B_0 = 1,   B_{n+1} = (Σ_{k=0}^{n} B_k B_{n-k}) / ((n+1)(n+2))
//! ```
//!
//! which is the Catalan recurrence with an extra `1/((n+1)(n+2))` damping.

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoefficientTable {
    #[serde(with = "rational::serde_string_vec")]
    coeffs: Vec<Rational>,
}

impl CoefficientTable {
    /// `B_0 ..= B_max_order`.
    pub fn generate(max_order: usize) -> Self {
        let mut coeffs: Vec<Rational> = Vec::with_capacity(max_order + 1);
        coeffs.push(Rational::one());
        for n in 0..max_order {
            let conv = (0..=n).fold(Rational::zero(), |acc, k| acc + &coeffs[k] * &coeffs[n - k]);
            let denom = BigInt::from((n + 1) * (n + 2));
            coeffs.push(conv / Rational::from_integer(denom));
        }
        Self { coeffs }
    }

    pub fn max_order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn get(&self, n: usize) -> Option<&Rational> {
        self.coeffs.get(n)
    }

    /// `b_n = n! (n+1)! B_n`, which the recurrence forces to be a positive integer.
    pub fn integer_b(&self) -> Result<Vec<BigInt>> {
        let fact = rational::factorials(self.max_order() + 1);
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, b)| {
                let scaled = b * Rational::from_integer(&fact[n] * &fact[n + 1]);
                rational::as_integer(&scaled).ok_or_else(|| {
                    Error::Internal(format!("n!(n+1)! B_{n} = {scaled} is not an integer"))
                })
            })
            .collect()
    }
}

/// `d_0 ..= d_max_order` with `d_{n+1} = Σ_k C(n+1,k) C(n+1,k+1) d_k d_{n-k}`.
///
/// Generated by `Σ d_n t^{n+1} / ((n+1)!)^2 = -ln J_0(2√t)` (OEIS A002190).
pub fn sequence_d(max_order: usize) -> Vec<BigInt> {
    let mut d = vec![BigInt::one()];
    for n in 0..max_order {
        let m = BigInt::from(n + 1);
        let next = (0..=n).fold(BigInt::zero(), |acc, k| {
            let kk = BigInt::from(k);
            acc + binomial(m.clone(), kk.clone()) * binomial(m.clone(), kk + 1u32) * &d[k] * &d[n - k]
        });
        d.push(next);
    }
    d
}

/// Catalan numbers `C_0 ..= C_max_order`, computed by the convolution
/// recurrence and checked against `(2n)! / ((n+1)! n!)`.
pub fn catalan(max_order: usize) -> Result<Vec<BigInt>> {
    let mut c = vec![BigInt::one()];
    for n in 0..max_order {
        let next = (0..=n).fold(BigInt::zero(), |acc, k| acc + &c[k] * &c[n - k]);
        c.push(next);
    }
    let fact = rational::factorials(2 * max_order);
    for (n, value) in c.iter().enumerate() {
        let closed = &fact[2 * n] / (&fact[n] * &fact[n] * BigInt::from(n + 1));
        if &closed != value {
            return Err(Error::Internal(format!(
                "Catalan recurrence gives C_{n} = {value}, closed form gives {closed}"
            )));
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn ints(values: &[i64]) -> Vec<BigInt> {
        values.iter().map(|&v| BigInt::from(v)).collect()
    }

    #[test]
    fn first_coefficients() {
        let table = CoefficientTable::generate(6);
        let expected = vec![
            rat(1, 1),
            rat(1, 2),
            rat(1, 6),
            rat(7, 144),
            rat(19, 1440),
            rat(37, 10800),
            rat(29, 33600),
        ];
        assert_eq!(table.coeffs(), expected.as_slice());
    }

    #[test]
    fn seed_only() {
        let table = CoefficientTable::generate(0);
        assert_eq!(table.coeffs(), &[rat(1, 1)]);
        assert_eq!(table.integer_b().unwrap(), ints(&[1]));
    }

    #[test]
    fn b3_by_hand() {
        // (1/12)(B0 B2 + B1^2 + B2 B0) = (1/12)(1/6 + 1/4 + 1/6)
        let by_hand = rat(1, 12) * (rat(1, 6) + rat(1, 4) + rat(1, 6));
        assert_eq!(CoefficientTable::generate(3).get(3), Some(&by_hand));
    }

    #[test]
    fn integer_b_values() {
        let b = CoefficientTable::generate(6).integer_b().unwrap();
        assert_eq!(b, ints(&[1, 1, 2, 7, 38, 296, 3132]));
        // 24 * 120 * 19/1440
        assert_eq!(b[4], BigInt::from(24 * 120 * 19 / 1440));
    }

    #[test]
    fn integer_b_rejects_corrupt_table() {
        let table = CoefficientTable {
            coeffs: vec![rat(1, 1), rat(1, 3)],
        };
        assert!(matches!(table.integer_b(), Err(Error::Internal(_))));
    }

    #[test]
    fn d_values() {
        assert_eq!(sequence_d(6), ints(&[1, 1, 4, 33, 456, 9460, 274800]));
        assert_eq!(sequence_d(0), ints(&[1]));
    }

    #[test]
    fn d2_by_hand() {
        // C(2,0)C(2,1) d0 d1 + C(2,1)C(2,2) d1 d0 = 2 + 2
        assert_eq!(sequence_d(2)[2], BigInt::from(4));
    }

    #[test]
    fn catalan_values() {
        assert_eq!(catalan(4).unwrap(), ints(&[1, 1, 2, 5, 14]));
        assert_eq!(catalan(0).unwrap(), ints(&[1]));
        assert_eq!(catalan(20).unwrap()[20], BigInt::from(6_564_120_420_i64));
    }
}
