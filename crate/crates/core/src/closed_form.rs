//! Leading-order closed-form trajectories.
//!
//! Composite (matched asymptotics) solution
//!
//! ```text
//! x(t) = ε/(εt - C) + εB e^{-t}
//! ```
//!
//! and the RG solution with amplitudes `Ã = 1/(εt - C)`, `B̃ = D(εt - C)²`:
//!
//! ```text
//! x(t) = εÃ + εB̃ e^{-t} - ε² (B̃²/2) e^{-2t}
//! ```
//!
//! Everything is written in terms of `1/C`, which is zero on the separatrix.
//! With `D = B/C²` the RG amplitude is `B̃ = B(1 - εt/C)²`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialConditions {
    pub x0: f64,
    pub u0: f64,
}

impl InitialConditions {
    pub fn new(x0: f64, u0: f64) -> Self {
        Self { x0, u0 }
    }

    /// Release with zero initial acceleration, on the nullcline `u = -x²`.
    pub fn at_rest(x0: f64) -> Self {
        Self { x0, u0: -x0 * x0 }
    }
}

/// Root of the quadratic for `ε/C`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    #[default]
    Plus,
    Minus,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionConstants {
    pub inv_c: f64,
    pub b: f64,
    /// `D = B/C²`.
    pub d: f64,
    pub epsilon: f64,
}

impl SolutionConstants {
    pub fn new(inv_c: f64, b: f64, epsilon: f64) -> Self {
        Self {
            inv_c,
            b,
            d: b * inv_c * inv_c,
            epsilon,
        }
    }

    /// `C/ε`, infinite on the separatrix.
    pub fn c_over_epsilon(&self) -> f64 {
        1.0 / (self.inv_c * self.epsilon)
    }

    /// `1 - εt/C`; the pole is where this vanishes.
    fn pole_factor(&self, t: f64) -> Result<f64> {
        let factor = 1.0 - self.epsilon * t * self.inv_c;
        if factor == 0.0 {
            return Err(Error::Pole { t });
        }
        Ok(factor)
    }
}

/// Constants of the composite solution matching `x(0) = x0`, `ẋ(0) = u0`.
///
/// With `s = x0 + u0` the pair reduces to `(ε/C)² + ε/C + s = 0`, so
/// `ε/C = -2s / (1 ± √(1 - 4s))`. The `Plus` branch is regular at `s = 0`,
/// which is the separatrix `1/C = 0`.
pub fn constants_from_ic(ic: InitialConditions, epsilon: f64, branch: Branch) -> Result<SolutionConstants> {
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    if !ic.x0.is_finite() || !ic.u0.is_finite() {
        return Err(Error::InvalidArgument("initial conditions must be finite".into()));
    }
    let s = ic.x0 + ic.u0;
    let discriminant = 1.0 - 4.0 * s;
    // Decide on the stated condition itself; rounding in `s` must not move the edge.
    let limit = (1.0 - 4.0 * ic.x0) / 4.0;
    if ic.u0 > limit {
        return Err(Error::Breakdown {
            x0: ic.x0,
            u0: ic.u0,
            discriminant,
            limit,
        });
    }
    let root = discriminant.max(0.0).sqrt();
    let eps_over_c = match branch {
        Branch::Plus => -2.0 * s / (1.0 + root),
        Branch::Minus => -(1.0 + root) / 2.0,
    };
    let inv_c = eps_over_c / epsilon;
    // x0/ε = -1/C + B
    let b = ic.x0 / epsilon + inv_c;
    Ok(SolutionConstants::new(inv_c, b, epsilon))
}

/// Composite solution `x(t)`.
pub fn matched_eval(c: &SolutionConstants, t: f64) -> Result<f64> {
    let (x, _) = matched_state(c, t)?;
    Ok(x)
}

/// Composite solution `(x, ẋ)`.
pub fn matched_state(c: &SolutionConstants, t: f64) -> Result<(f64, f64)> {
    let (a, _) = rg_amplitudes(c, t)?;
    let eps = c.epsilon;
    let decay = (-t).exp();
    let x = eps * a + eps * c.b * decay;
    let u = -eps * eps * a * a - eps * c.b * decay;
    Ok((x, u))
}

/// RG solution `x(t)` including the `e^{-2t}` term.
pub fn rg_eval(c: &SolutionConstants, t: f64) -> Result<f64> {
    let (x, _) = rg_state(c, t)?;
    Ok(x)
}

/// RG solution `(x, ẋ)`.
pub fn rg_state(c: &SolutionConstants, t: f64) -> Result<(f64, f64)> {
    let (a, b) = rg_amplitudes(c, t)?;
    let eps = c.epsilon;
    let e1 = (-t).exp();
    let e2 = e1 * e1;
    let x = eps * a + eps * b * e1 - eps * eps * 0.5 * b * b * e2;

    let da = -eps * a * a;
    let db = 2.0 * eps * a * b;
    let u = eps * da + eps * (db - b) * e1 - eps * eps * (b * db - b * b) * e2;
    Ok((x, u))
}

/// `(Ã, B̃) = (1/(εt - C), D(εt - C)²)`.
pub fn rg_amplitudes(c: &SolutionConstants, t: f64) -> Result<(f64, f64)> {
    let factor = c.pole_factor(t)?;
    // 1/(εt - C) = (1/C) / (εt/C - 1)
    let a = -c.inv_c / factor;
    let b = c.b * factor * factor;
    Ok((a, b))
}
