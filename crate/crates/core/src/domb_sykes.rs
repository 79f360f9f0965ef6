//! Domb-Sykes analysis of coefficient growth.
//!
//! For coefficients behaving as `B_n ~ (n - Δ) a^{-n}`:
//!
//! * `s_n = (1 - B_{n-1} B_{n+1} / B_n²)^{-1/2}` is asymptotically `n - Δ`,
//!   so a straight-line fit of `s_n` against `n` yields `Δ = -intercept/slope`;
//! * `B_{n-1}/B_n = a (1 - 1/(n - Δ))`, so fitting the ratio against
//!   `1/(n - Δ)` yields `a` as the intercept.
//!
//! Ratios and radicands are formed exactly and only converted to `f64` for
//! the (unweighted least-squares) fits.

use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::Rational;

const MIN_WINDOW: usize = 5;
const DEFAULT_MIN_WIDTH: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual.
    pub rms_residual: f64,
    pub points: usize,
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
pub fn fit_line(points: &[(f64, f64)]) -> Result<LineFit> {
    let n = points.len();
    if n < 2 {
        return Err(Error::DegenerateFit(format!("{n} usable points")));
    }
    let nf = n as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if sxx == 0.0 || !sxx.is_finite() || !sxy.is_finite() {
        return Err(Error::DegenerateFit("abscissae do not spread".into()));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss: f64 = points
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).powi(2))
        .sum();
    Ok(LineFit {
        slope,
        intercept,
        rms_residual: (ss / nf).sqrt(),
        points: n,
    })
}

fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `(n, B_{n-1}/B_n)` for `n = 1..len`.
pub fn ds_ratios(coeffs: &[Rational]) -> Result<Vec<(usize, f64)>> {
    if coeffs.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "need at least B_0..B_2, got {} coefficients",
            coeffs.len()
        )));
    }
    coeffs
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            if w[1].is_zero() {
                return Err(Error::InvalidArgument(format!("B_{} is zero", i + 1)));
            }
            Ok((i + 1, to_f64(&(&w[0] / &w[1]))))
        })
        .collect()
}

/// `s_n` for `n = 1..len-1`; indices with a non-positive radicand are returned
/// separately.
pub fn s_values(coeffs: &[Rational]) -> (Vec<(usize, f64)>, Vec<usize>) {
    let mut values = Vec::new();
    let mut excluded = Vec::new();
    for n in 1..coeffs.len().saturating_sub(1) {
        if coeffs[n].is_zero() {
            excluded.push(n);
            continue;
        }
        let radicand = Rational::from_integer(1.into())
            - &coeffs[n - 1] * &coeffs[n + 1] / (&coeffs[n] * &coeffs[n]);
        if radicand.is_positive() {
            values.push((n, to_f64(&radicand).powf(-0.5)));
        } else {
            excluded.push(n);
        }
    }
    (values, excluded)
}

fn check_window(window: (usize, usize), valid: (usize, usize)) -> Result<()> {
    let (lo, hi) = window;
    if lo > hi || hi + 1 - lo < MIN_WINDOW {
        return Err(Error::InvalidArgument(format!(
            "window {lo}:{hi} must span at least {MIN_WINDOW} indices"
        )));
    }
    if lo < valid.0 || hi > valid.1 {
        return Err(Error::InvalidArgument(format!(
            "window {lo}:{hi} outside available range {}:{}",
            valid.0, valid.1
        )));
    }
    Ok(())
}

/// Last half of `valid`, at least `DEFAULT_MIN_WIDTH` wide when the range allows.
pub fn default_window(valid: (usize, usize)) -> (usize, usize) {
    let (first, last) = valid;
    let span = last + 1 - first;
    let width = span.div_ceil(2).max(DEFAULT_MIN_WIDTH).min(span);
    (last + 1 - width, last)
}

/// Range of `n` for which `s_n` is defined.
pub fn offset_range(coeffs: &[Rational]) -> (usize, usize) {
    (1, coeffs.len().saturating_sub(2))
}

/// Range of `n` for which `B_{n-1}/B_n` is defined.
pub fn growth_range(coeffs: &[Rational]) -> (usize, usize) {
    (1, coeffs.len().saturating_sub(1))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OffsetEstimate {
    pub delta: f64,
    pub fit: LineFit,
    /// Indices in the window dropped for a non-positive radicand.
    pub excluded: Vec<usize>,
}

pub fn estimate_offset(coeffs: &[Rational], window: (usize, usize)) -> Result<OffsetEstimate> {
    if coeffs.len() < 3 {
        return Err(Error::InsufficientData("need at least B_0..B_2".into()));
    }
    check_window(window, offset_range(coeffs))?;
    let (lo, hi) = window;
    let slice = &coeffs[lo - 1..=hi + 1];
    let (values, excluded) = s_values(slice);
    let points: Vec<(f64, f64)> = values
        .into_iter()
        .map(|(i, s)| ((i + lo - 1) as f64, s))
        .filter(|p| p.1.is_finite())
        .collect();
    let excluded: Vec<usize> = excluded.into_iter().map(|i| i + lo - 1).collect();
    if points.is_empty() {
        return Err(Error::DegenerateFit(format!(
            "every s_n in {lo}:{hi} has a non-positive radicand"
        )));
    }
    let fit = fit_line(&points)?;
    if fit.slope == 0.0 {
        return Err(Error::DegenerateFit("s_n has zero slope".into()));
    }
    Ok(OffsetEstimate {
        delta: -fit.intercept / fit.slope,
        fit,
        excluded,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthEstimate {
    pub growth: f64,
    pub fit: LineFit,
}

pub fn estimate_growth(coeffs: &[Rational], delta: f64, window: (usize, usize)) -> Result<GrowthEstimate> {
    if !delta.is_finite() {
        return Err(Error::InvalidArgument(format!("delta must be finite, got {delta}")));
    }
    let ratios = ds_ratios(coeffs)?;
    check_window(window, growth_range(coeffs))?;
    let points: Vec<(f64, f64)> = ratios
        .into_iter()
        .filter(|(n, _)| (window.0..=window.1).contains(n))
        .map(|(n, r)| (1.0 / (n as f64 - delta), r))
        .collect();
    let fit = fit_line(&points)?;
    Ok(GrowthEstimate {
        growth: fit.intercept,
        fit,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DombSykesReport {
    pub ratios: Vec<(usize, f64)>,
    pub s_values: Vec<(usize, f64)>,
    pub excluded: Vec<usize>,
    /// Fitted offset.
    pub delta: f64,
    /// Offset used for the growth fit (the fitted one unless overridden).
    pub delta_used: f64,
    pub growth: f64,
    pub offset_window: (usize, usize),
    pub growth_window: (usize, usize),
    pub offset_fit: LineFit,
    pub growth_fit: LineFit,
}

/// Full analysis. `window` applies to both fits; `delta` overrides the fitted
/// offset in the growth fit.
pub fn analyse(coeffs: &[Rational], window: Option<(usize, usize)>, delta: Option<f64>) -> Result<DombSykesReport> {
    let ratios = ds_ratios(coeffs)?;
    let offset_window = window.unwrap_or_else(|| default_window(offset_range(coeffs)));
    let growth_window = window.unwrap_or_else(|| default_window(growth_range(coeffs)));
    let offset = estimate_offset(coeffs, offset_window)?;
    let delta_used = delta.unwrap_or(offset.delta);
    let growth = estimate_growth(coeffs, delta_used, growth_window)?;
    let (s_values, excluded) = s_values(coeffs);
    Ok(DombSykesReport {
        ratios,
        s_values,
        excluded,
        delta: offset.delta,
        delta_used,
        growth: growth.growth,
        offset_window,
        growth_window,
        offset_fit: offset.fit,
        growth_fit: growth.fit,
    })
}
