//! Series for the point where the separatrix meets the nullcline `u = -x²`.
//!
//! Writing `w = εz_c`, the intersection condition with a bookkeeping factor
//! `θ` on the velocity side is
//!
//! ```text
//! θ L(w) + R(w) = 0,   L(w) = Σ_{n≥0} (n+1) B_n (-w)^n,   R(w) = Σ_{n≥1} n(n+1) B_n (-w)^n
//! ```
//!
//! Substituting `w = Σ_{n≥1} a_n θ^n` and matching powers of `θ` gives one
//! linear equation per order in the newest coefficient. `εx_c(θ)` follows by
//! substituting `w(θ)` into the separatrix series. Both are summed at `θ = 1`.

use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::coefficients::CoefficientTable;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::series::PowerSeries;

/// Rows printed in the published partial-sum table.
pub const TABLE_ROWS: [usize; 10] = [1, 2, 3, 4, 5, 10, 15, 20, 25, 30];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriticalSeries {
    order: usize,
    /// `εz_c(θ)`; constant term zero, `θ^n` coefficient is `a_n`.
    zc: PowerSeries,
    /// `εx_c(θ)`.
    xc: PowerSeries,
}

fn from_usize(n: usize) -> Rational {
    Rational::from_integer(n.into())
}

fn alternating(table: &CoefficientTable, order: usize, weight: impl Fn(usize) -> usize) -> PowerSeries {
    let coeffs = table.coeffs()[..=order]
        .iter()
        .enumerate()
        .map(|(n, b)| {
            let c = b * from_usize(weight(n));
            if n % 2 == 1 {
                -c
            } else {
                c
            }
        })
        .collect();
    PowerSeries::new(coeffs)
}

fn check_table(table: &CoefficientTable, order: usize) -> Result<()> {
    if order == 0 {
        return Err(Error::InvalidArgument("critical series order must be >= 1".into()));
    }
    if table.max_order() < order {
        return Err(Error::InvalidArgument(format!(
            "coefficient table holds B_0..B_{}, order {order} needs B_{order}",
            table.max_order()
        )));
    }
    Ok(())
}

/// Powers of `w(θ)`, filled one order of `θ` at a time.
///
/// `w^k` has valuation `k`, so `[θ^m] w^k` for `k ≥ 2` only involves
/// `a_1..a_{m-1}`; each new order costs `O(m²)` products instead of a full
/// recomposition.
struct PowerTable {
    /// `rows[k][m] = [θ^m] w^k`.
    rows: Vec<Vec<Rational>>,
}

impl PowerTable {
    fn new(order: usize) -> Self {
        let mut rows = vec![vec![Rational::zero(); order + 1]; order + 1];
        rows[0][0] = Rational::from_integer(1.into());
        Self { rows }
    }

    /// Fills `[θ^m] w^k` for `k = 2..=m` from lower powers and lower orders.
    fn fill_column(&mut self, m: usize) {
        for k in 2..=m {
            let mut acc = Rational::zero();
            for j in 1..=m - k + 1 {
                let a = &self.rows[1][j];
                let p = &self.rows[k - 1][m - j];
                if !a.is_zero() && !p.is_zero() {
                    acc += a * p;
                }
            }
            self.rows[k][m] = acc;
        }
    }

    /// `[θ^m] Σ_k c_k w^k`.
    fn coefficient(&self, series: &PowerSeries, m: usize) -> Rational {
        let mut acc = Rational::zero();
        for (k, c) in series.coeffs().iter().enumerate().take(m + 1) {
            let p = &self.rows[k][m];
            if !c.is_zero() && !p.is_zero() {
                acc += c * p;
            }
        }
        acc
    }
}

/// Order-by-order solve; returns `(εz_c, εx_c)`.
fn solve(order: usize, table: &CoefficientTable) -> Result<(PowerSeries, PowerSeries)> {
    check_table(table, order)?;
    let lhs = alternating(table, order, |n| n + 1);
    let rhs = alternating(table, order, |n| n * (n + 1));
    // d/da_m of [θ^m](θ L(w) + R(w)) is the linear coefficient of R.
    let pivot = rhs.coeffs()[1].clone();
    if pivot.is_zero() {
        return Err(Error::SolverDegenerate { order: 1 });
    }

    let mut powers = PowerTable::new(order);
    for m in 1..=order {
        powers.fill_column(m);
        // rows[1][m] is still zero here, so R contributes only its nonlinear part.
        let defect = powers.coefficient(&lhs, m - 1) + powers.coefficient(&rhs, m);
        powers.rows[1][m] = -defect / &pivot;
    }

    let mut outer = vec![Rational::zero()];
    outer.extend(alternating(table, order - 1, |_| 1).into_coeffs());
    let outer = PowerSeries::new(outer);
    let xc = (0..=order).map(|m| powers.coefficient(&outer, m)).collect();
    let zc = std::mem::take(&mut powers.rows[1]);
    Ok((PowerSeries::new(zc), PowerSeries::new(xc)))
}

/// `εz_c(θ)` through `θ^order`.
pub fn solve_zc(order: usize, table: &CoefficientTable) -> Result<PowerSeries> {
    Ok(solve(order, table)?.0)
}

/// `εx_c(θ) = w Σ B_n (-w)^n` with `w = εz_c(θ)`, same order as `zc`.
pub fn xc_from_zc(zc: &PowerSeries, table: &CoefficientTable) -> Result<PowerSeries> {
    let order = zc.order();
    check_table(table, order)?;
    let mut coeffs = vec![Rational::zero()];
    coeffs.extend(alternating(table, order - 1, |_| 1).into_coeffs());
    PowerSeries::compose(&PowerSeries::new(coeffs), zc)
}

/// `θ L(w) + R(w)` at `θ = 1`, in floating point, using every coefficient in `table`.
pub fn intersection_residual(table: &CoefficientTable, w: f64) -> f64 {
    let mut total = 0.0;
    let mut power = 1.0;
    for (n, b) in table.coeffs().iter().enumerate() {
        let b = rational::to_f64(b);
        total += ((n + 1) as f64 + (n * (n + 1)) as f64) * b * power;
        power *= -w;
    }
    total
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartialSumRow {
    pub n: usize,
    #[serde(with = "rational::serde_string")]
    pub zc_sum: Rational,
    #[serde(with = "rational::serde_string")]
    pub zc_term: Rational,
    #[serde(with = "rational::serde_string")]
    pub xc_sum: Rational,
    #[serde(with = "rational::serde_string")]
    pub xc_term: Rational,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TermRatio {
    pub n: usize,
    /// `|a_n / a_{n-1}|` for `εz_c`; `None` when `a_{n-1} = 0`.
    pub zc: Option<f64>,
    pub xc: Option<f64>,
}

impl CriticalSeries {
    pub fn compute(order: usize, table: &CoefficientTable) -> Result<Self> {
        let (zc, xc) = solve(order, table)?;
        Ok(Self { order, zc, xc })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn zc(&self) -> &PowerSeries {
        &self.zc
    }

    pub fn xc(&self) -> &PowerSeries {
        &self.xc
    }

    /// `Σ_{k=1}^{n} a_k` for `εz_c`.
    pub fn zc_sum(&self, n: usize) -> Result<Rational> {
        self.check_row(n)?;
        Ok(self.zc.truncate(n).partial_sums_at_one()[n].clone())
    }

    pub fn xc_sum(&self, n: usize) -> Result<Rational> {
        self.check_row(n)?;
        Ok(self.xc.truncate(n).partial_sums_at_one()[n].clone())
    }

    fn check_row(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.order {
            return Err(Error::RowOutOfRange {
                row: n,
                max: self.order,
            });
        }
        Ok(())
    }

    pub fn partial_sum_table(&self, rows: &[usize]) -> Result<Vec<PartialSumRow>> {
        for &n in rows {
            self.check_row(n)?;
        }
        let zc_sums = self.zc.partial_sums_at_one();
        let xc_sums = self.xc.partial_sums_at_one();
        Ok(rows
            .iter()
            .map(|&n| PartialSumRow {
                n,
                zc_sum: zc_sums[n].clone(),
                zc_term: self.zc.coeffs()[n].clone(),
                xc_sum: xc_sums[n].clone(),
                xc_term: self.xc.coeffs()[n].clone(),
            })
            .collect())
    }

    /// Ratio-test data for `n = 2..=order`.
    pub fn term_ratios(&self) -> Vec<TermRatio> {
        let ratio = |s: &PowerSeries, n: usize| {
            let prev = &s.coeffs()[n - 1];
            (!prev.is_zero()).then(|| (&s.coeffs()[n] / prev).abs().to_f64().unwrap_or(f64::NAN))
        };
        (2..=self.order)
            .map(|n| TermRatio {
                n,
                zc: ratio(&self.zc, n),
                xc: ratio(&self.xc, n),
            })
            .collect()
    }
}
