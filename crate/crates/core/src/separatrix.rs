//! The critical trajectory as a series in `z = e^{-t}`:
//!
//! ```text
//! x(t) = z Σ_{n=0}^{N} B_n (-ε z)^n
//! u(t) = ẋ = -z Σ_{n=0}^{N} (n+1) B_n (-ε z)^n
//! ```
//!
//! Series returned here are in powers of `z`. `d/dt` acts on `z^k` as `-k`.

use num_traits::{One, Zero};

use crate::coefficients::CoefficientTable;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::series::PowerSeries;

#[derive(Clone, Debug)]
pub struct SeparatrixExpansion {
    table: CoefficientTable,
    epsilon: Rational,
    order: usize,
}

impl SeparatrixExpansion {
    /// Degree-`order` truncation with `ε = 1`.
    pub fn new(order: usize) -> Self {
        Self {
            table: CoefficientTable::generate(order),
            epsilon: Rational::one(),
            order,
        }
    }

    pub fn with_table(table: CoefficientTable, epsilon: Rational, order: usize) -> Result<Self> {
        if order > table.max_order() {
            return Err(Error::InvalidArgument(format!(
                "truncation order {order} exceeds table order {}",
                table.max_order()
            )));
        }
        Ok(Self {
            table,
            epsilon,
            order,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn epsilon(&self) -> &Rational {
        &self.epsilon
    }

    pub fn table(&self) -> &CoefficientTable {
        &self.table
    }

    /// `B_n (-ε)^n` for `n = 0..=order`, the coefficient of `z^{n+1}` in `x`.
    fn signed_coeffs(&self) -> Vec<Rational> {
        let neg_eps = -&self.epsilon;
        let mut power = Rational::one();
        self.table.coeffs()[..=self.order]
            .iter()
            .map(|b| {
                let c = b * &power;
                power *= &neg_eps;
                c
            })
            .collect()
    }

    /// `x` as a series in `z`, exact through `z^{order+1}`.
    pub fn x_series(&self) -> PowerSeries {
        let mut coeffs = vec![Rational::zero()];
        coeffs.extend(self.signed_coeffs());
        PowerSeries::new(coeffs)
    }

    /// `u = ẋ` as a series in `z`, exact through `z^{order+1}`.
    pub fn u_series(&self) -> PowerSeries {
        let mut coeffs = vec![Rational::zero()];
        coeffs.extend(
            self.signed_coeffs()
                .into_iter()
                .enumerate()
                .map(|(n, c)| -(c * Rational::from_integer((n + 1).into()))),
        );
        PowerSeries::new(coeffs)
    }

    pub fn eval_x(&self, z: &Rational) -> Rational {
        self.x_series().eval(z)
    }

    pub fn eval_u(&self, z: &Rational) -> Rational {
        self.u_series().eval(z)
    }

    /// Exact evaluation at the rational value of `z`, rounded to `f64` at the end.
    pub fn eval_f64(&self, z: f64) -> Result<(f64, f64)> {
        let z = rational::from_f64(z)?;
        Ok((
            rational::to_f64(&self.eval_x(&z)),
            rational::to_f64(&self.eval_u(&z)),
        ))
    }

    /// Same as [`eval_f64`](Self::eval_f64) with `z = e^{-t}`.
    pub fn eval_at_time(&self, t: f64) -> Result<(f64, f64)> {
        self.eval_f64((-t).exp())
    }

    /// `(x_k(z), u_k(z))` for every truncation `k = 0..=order`, in one pass.
    pub fn partial_evals(&self, z: &Rational) -> Vec<(Rational, Rational)> {
        let mut x = Rational::zero();
        let mut u = Rational::zero();
        let mut zpow = z.clone();
        self.signed_coeffs()
            .into_iter()
            .enumerate()
            .map(|(n, c)| {
                let term = c * &zpow;
                x += &term;
                u -= term * Rational::from_integer((n + 1).into());
                zpow *= z;
                (x.clone(), u.clone())
            })
            .collect()
    }

    /// `x²` from the recurrence identity `x² = z² Σ (n+1)(n+2) B_{n+1} (-εz)^n`,
    /// exact through `z^{order+1}`.
    pub fn square_via_recurrence(&self) -> Result<PowerSeries> {
        if self.order < 1 {
            return Err(Error::InvalidArgument(
                "square via recurrence needs truncation order >= 1".into(),
            ));
        }
        let neg_eps = -&self.epsilon;
        let b = self.table.coeffs();
        let mut coeffs = vec![Rational::zero(); self.order + 2];
        let mut power = Rational::one();
        for n in 0..self.order {
            let weight = Rational::from_integer(((n + 1) * (n + 2)).into());
            coeffs[n + 2] = weight * &b[n + 1] * &power;
            power *= &neg_eps;
        }
        Ok(PowerSeries::new(coeffs))
    }

    /// `ẍ + ẋ + εx²` for the truncated polynomial, as an exact series of
    /// order `2·order + 2`. Coefficients of `z^1 ..= z^{order+1}` must vanish.
    pub fn ode_residual(&self) -> Result<PowerSeries> {
        let full = 2 * self.order + 2;
        let x = PowerSeries::from_poly(self.x_series().coeffs(), full);
        // ẍ + ẋ acts on z^k as k² - k.
        let linear: Vec<Rational> = x
            .coeffs()
            .iter()
            .enumerate()
            .map(|(k, c)| c * Rational::from_integer((k * k - k).into()))
            .collect();
        let square = (&x * &x).scale(&self.epsilon);
        let residual = &PowerSeries::new(linear) + &square;
        if let Some(k) = (1..=self.order + 1).find(|&k| !residual.coeffs()[k].is_zero()) {
            return Err(Error::Internal(format!(
                "residual coefficient of z^{k} is {}, expected 0",
                residual.coeffs()[k]
            )));
        }
        Ok(residual)
    }
}
