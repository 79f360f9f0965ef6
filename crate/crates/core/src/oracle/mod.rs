//! Numerical ground truth for `ẍ + ẋ + x² = 0` (ε = 1 units).
//!
//! Nothing here uses the series machinery: trajectories come from an adaptive
//! Dormand-Prince integrator, so results can be compared against the exact
//! coefficients independently.

mod dopri;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_form::InitialConditions;
use crate::error::{Error, Result};
use dopri::{Segment, State, Stepper, Tolerances};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    pub t: f64,
    pub x: f64,
    pub u: f64,
}

impl PhaseState {
    pub fn new(t: f64, x: f64, u: f64) -> Self {
        Self { t, x, u }
    }

    fn from_state(t: f64, y: &State) -> Self {
        Self { t, x: y[0], u: y[1] }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Integration horizon, measured as elapsed `|t - t0|`.
    pub t_max: f64,
    pub x_blowup: f64,
    pub attractor_tol: f64,
    pub max_step: f64,
    /// Keep the sampled trajectory in [`FateResult`].
    pub record_trajectory: bool,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            t_max: 200.0,
            x_blowup: 1e6,
            attractor_tol: 1e-9,
            max_step: 0.5,
            record_trajectory: false,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("t_max", self.t_max),
            ("x_blowup", self.x_blowup),
            ("attractor_tol", self.attractor_tol),
            ("max_step", self.max_step),
        ];
        for (name, value) in fields {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {value}")));
            }
        }
        Ok(())
    }

    /// Same configuration with both tolerances multiplied by `factor`.
    pub fn scale_tolerances(&self, factor: f64) -> Self {
        Self {
            rel_tol: self.rel_tol * factor,
            abs_tol: self.abs_tol * factor,
            ..*self
        }
    }

    fn tolerances(&self) -> Tolerances {
        Tolerances {
            rel: self.rel_tol,
            abs: self.abs_tol,
            max_step: self.max_step,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Termination {
    Horizon,
    Blowup,
    Event,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub samples: Vec<PhaseState>,
    pub termination: Termination,
}

enum Control {
    Continue,
    Stop(Termination),
}

/// Steps from `start` until the horizon, the blow-up guard, or `on_step` says stop.
fn drive(
    start: PhaseState,
    cfg: &IntegratorConfig,
    direction: Direction,
    mut on_step: impl FnMut(&Segment) -> Control,
) -> Result<Termination> {
    cfg.validate()?;
    let t_end = start.t + direction.sign() * cfg.t_max;
    let mut stepper = Stepper::new(start.t, [start.x, start.u], direction.sign(), cfg.tolerances());
    while stepper.time() != t_end {
        let segment = stepper.step(t_end)?;
        if let Control::Stop(reason) = on_step(&segment) {
            return Ok(reason);
        }
        if segment.y1[0].abs() > cfg.x_blowup || segment.y1[1].abs() > cfg.x_blowup {
            return Ok(Termination::Blowup);
        }
    }
    Ok(Termination::Horizon)
}

/// Samples at every accepted step, starting with `start`.
pub fn integrate(start: PhaseState, cfg: &IntegratorConfig, direction: Direction) -> Result<Trajectory> {
    let mut samples = vec![start];
    let termination = drive(start, cfg, direction, |seg| {
        samples.push(PhaseState::from_state(seg.t1, &seg.y1));
        Control::Continue
    })?;
    Ok(Trajectory { samples, termination })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Fate {
    /// `x` reaches 0 in finite time.
    Capture,
    /// `x` stays positive and decays to the origin.
    Escape,
    Undecided,
}

impl Fate {
    pub fn as_str(self) -> &'static str {
        match self {
            Fate::Capture => "capture",
            Fate::Escape => "escape",
            Fate::Undecided => "undecided",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FateResult {
    pub fate: Fate,
    /// Zero-crossing time for a capture; time the escape was certified, or the
    /// horizon, otherwise.
    pub t_event: f64,
    pub trajectory: Option<Vec<PhaseState>>,
}

/// Forward-invariant set of escaping states: `0 < x < 1/2`, `-x + x² < u ≤ 0`.
///
/// On the curved edge `g = u + x - x²` has `ġ = x²(1 - 2x) > 0`, the flow
/// points inward on `u = 0` and `x = 1/2`, and `ẋ > -x` keeps `x` positive.
pub fn in_escape_region(x: f64, u: f64) -> bool {
    x > 0.0 && x < 0.5 && u <= 0.0 && u > -x + x * x
}

fn escaped(x: f64, u: f64, cfg: &IntegratorConfig) -> bool {
    (x >= 0.0 && x.hypot(u) < cfg.attractor_tol) || in_escape_region(x, u)
}

pub fn classify_fate(ic: InitialConditions, cfg: &IntegratorConfig) -> Result<FateResult> {
    cfg.validate()?;
    let start = PhaseState::new(0.0, ic.x0, ic.u0);
    let mut trajectory = cfg.record_trajectory.then(|| vec![start]);
    if ic.x0 < 0.0 {
        return Ok(FateResult {
            fate: Fate::Capture,
            t_event: 0.0,
            trajectory,
        });
    }
    if escaped(ic.x0, ic.u0, cfg) {
        return Ok(FateResult {
            fate: Fate::Escape,
            t_event: 0.0,
            trajectory,
        });
    }

    let mut outcome = (Fate::Undecided, cfg.t_max);
    let termination = drive(start, cfg, Direction::Forward, |seg| {
        if seg.y1[0] < 0.0 {
            let (t, y) = seg.locate(|y| y[0]);
            if let Some(path) = trajectory.as_mut() {
                path.push(PhaseState::from_state(t, &y));
            }
            outcome = (Fate::Capture, t);
            return Control::Stop(Termination::Event);
        }
        if let Some(path) = trajectory.as_mut() {
            path.push(PhaseState::from_state(seg.t1, &seg.y1));
        }
        if escaped(seg.y1[0], seg.y1[1], cfg) {
            outcome = (Fate::Escape, seg.t1);
            return Control::Stop(Termination::Event);
        }
        Control::Continue
    })?;
    if termination == Termination::Blowup {
        // Runaway before any sign change of x.
        outcome.0 = Fate::Undecided;
    }
    Ok(FateResult {
        fate: outcome.0,
        t_event: outcome.1,
        trajectory,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeparatrixTrace {
    pub delta: f64,
    /// `x` where the backward trace meets the nullcline `u = -x²`.
    pub xc: f64,
    pub uc: f64,
    /// Crossing time relative to the seed (negative).
    pub t_cross: f64,
    /// `z` at the crossing, `δ e^{-t_cross}`, since the seed sits at `z = δ`.
    pub zc: f64,
    /// `|xc - xc'|` where `xc'` comes from a run at the requested tolerances
    /// and the reported trace from a run 10x tighter.
    pub error_estimate: f64,
    pub polyline: Vec<PhaseState>,
}

fn trace_once(delta: f64, cfg: &IntegratorConfig) -> Result<SeparatrixTrace> {
    // Two leading separatrix terms at z = δ: x = z - z²/2, u = -z + z².
    let seed = PhaseState::new(0.0, delta - 0.5 * delta * delta, -delta + delta * delta);
    let nullcline = |y: &State| y[1] + y[0] * y[0];
    let mut polyline = vec![seed];
    let mut crossing = None;
    let termination = drive(seed, cfg, Direction::Backward, |seg| {
        if nullcline(&seg.y1) >= 0.0 {
            let (t, y) = seg.locate(nullcline);
            polyline.push(PhaseState::from_state(t, &y));
            crossing = Some((t, y));
            return Control::Stop(Termination::Event);
        }
        polyline.push(PhaseState::from_state(seg.t1, &seg.y1));
        Control::Continue
    })?;
    let Some((t_cross, y)) = crossing else {
        let t = polyline.last().map_or(0.0, |s| s.t);
        debug_assert_ne!(termination, Termination::Event);
        return Err(Error::TraceIncomplete { t });
    };
    Ok(SeparatrixTrace {
        delta,
        xc: y[0],
        uc: y[1],
        t_cross,
        zc: delta * (-t_cross).exp(),
        error_estimate: 0.0,
        polyline,
    })
}

/// Traces the separatrix backward from a seed a distance `delta` from the origin.
pub fn trace_separatrix(delta: f64, cfg: &IntegratorConfig) -> Result<SeparatrixTrace> {
    if !(delta > 0.0 && delta <= 1e-3) {
        return Err(Error::InvalidArgument(format!("delta must be in (0, 1e-3], got {delta}")));
    }
    let nominal = trace_once(delta, cfg)?;
    let mut trace = trace_once(delta, &cfg.scale_tolerances(0.1))?;
    trace.error_estimate = (trace.xc - nominal.xc).abs();
    Ok(trace)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct XcEstimate {
    /// Midpoint of the final bracket.
    pub xc: f64,
    pub lo: f64,
    pub hi: f64,
    pub probes: usize,
}

/// Bisection for the critical release point on `u0 = -x0²` within `[lo, hi]`.
pub fn find_xc_in(lo: f64, hi: f64, cfg: &IntegratorConfig, tol: f64) -> Result<XcEstimate> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(Error::InvalidArgument(format!("empty bracket [{lo}, {hi}]")));
    }
    let probe = |x0: f64| -> Result<Fate> {
        let fate = classify_fate(InitialConditions::at_rest(x0), cfg)?.fate;
        if fate == Fate::Undecided {
            return Err(Error::Undecided {
                x0,
                u0: -x0 * x0,
                t_max: cfg.t_max,
            });
        }
        Ok(fate)
    };
    let (fate_lo, fate_hi) = (probe(lo)?, probe(hi)?);
    if fate_lo == fate_hi || fate_lo != Fate::Escape {
        return Err(Error::Bracket {
            lo,
            hi,
            fate: format!("{}/{}", fate_lo.as_str(), fate_hi.as_str()),
        });
    }
    let (mut lo, mut hi) = (lo, hi);
    let mut probes = 2;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        probes += 1;
        match probe(mid)? {
            Fate::Escape => lo = mid,
            _ => hi = mid,
        }
    }
    Ok(XcEstimate {
        xc: 0.5 * (lo + hi),
        lo,
        hi,
        probes,
    })
}

/// [`find_xc_in`] over `x0 ∈ [0, 1]`.
pub fn find_xc_bisection(cfg: &IntegratorConfig, tol: f64) -> Result<XcEstimate> {
    find_xc_in(0.0, 1.0, cfg, tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PortraitGrid {
    pub x_range: (f64, f64),
    pub u_range: (f64, f64),
    pub nx: usize,
    pub nu: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PortraitCell {
    pub x0: f64,
    pub u0: f64,
    pub fate: Fate,
    pub t_event: f64,
}

fn linspace(range: (f64, f64), n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![range.0];
    }
    (0..n)
        .map(|i| range.0 + (range.1 - range.0) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Fate of every grid node (end points included), rows ordered by `u0` then `x0`.
pub fn phase_portrait(grid: &PortraitGrid, cfg: &IntegratorConfig) -> Result<Vec<PortraitCell>> {
    if grid.nx == 0 || grid.nu == 0 {
        return Err(Error::InvalidArgument("portrait resolution must be positive".into()));
    }
    let finite = [grid.x_range.0, grid.x_range.1, grid.u_range.0, grid.u_range.1];
    if finite.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("portrait ranges must be finite".into()));
    }
    let cfg = IntegratorConfig {
        record_trajectory: false,
        ..*cfg
    };
    let xs = linspace(grid.x_range, grid.nx);
    let us = linspace(grid.u_range, grid.nu);
    let nodes: Vec<(f64, f64)> = us
        .iter()
        .flat_map(|&u| xs.iter().map(move |&x| (x, u)))
        .collect();
    nodes
        .par_iter()
        .map(|&(x0, u0)| {
            let result = match classify_fate(InitialConditions::new(x0, u0), &cfg) {
                Ok(r) => r,
                Err(Error::Stiffness { t, .. }) => FateResult {
                    fate: Fate::Undecided,
                    t_event: t,
                    trajectory: None,
                },
                Err(e) => return Err(e),
            };
            Ok(PortraitCell {
                x0,
                u0,
                fate: result.fate,
                t_event: result.t_event,
            })
        })
        .collect()
}
