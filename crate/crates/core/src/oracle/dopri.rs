//! Dormand-Prince 5(4) with FSAL, PI step control and cubic Hermite dense output.

use crate::error::{Error, Result};

pub(crate) type State = [f64; 2];

/// `ẋ = u`, `u̇ = -u - x²`.
pub(crate) fn rhs(y: &State) -> State {
    [y[1], -y[1] - y[0] * y[0]]
}

// The system is autonomous, so the node offsets c_i never enter.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// 5th minus embedded 4th order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;
const EXPO: f64 = 0.2 - BETA * 0.75;

fn axpy(y: &State, terms: &[(f64, &State)], h: f64) -> State {
    let mut out = *y;
    for (w, k) in terms {
        out[0] += h * w * k[0];
        out[1] += h * w * k[1];
    }
    out
}

/// One accepted step, with enough data to interpolate anywhere inside it.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Segment {
    pub t0: f64,
    pub y0: State,
    pub f0: State,
    pub t1: f64,
    pub y1: State,
    pub f1: State,
}

impl Segment {
    pub fn interpolate(&self, t: f64) -> State {
        let h = self.t1 - self.t0;
        let s = (t - self.t0) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        std::array::from_fn(|i| h00 * self.y0[i] + h10 * h * self.f0[i] + h01 * self.y1[i] + h11 * h * self.f1[i])
    }

    /// Root of `g` on the interpolant, given `g(y0)` and `g(y1)` of opposite sign.
    pub fn locate(&self, g: impl Fn(&State) -> f64) -> (f64, State) {
        let (mut a, mut b) = (self.t0, self.t1);
        let mut ga = g(&self.y0);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid == a || mid == b {
                break;
            }
            let gm = g(&self.interpolate(mid));
            if (gm < 0.0) == (ga < 0.0) {
                a = mid;
                ga = gm;
            } else {
                b = mid;
            }
        }
        let t = 0.5 * (a + b);
        (t, self.interpolate(t))
    }
}

pub(crate) struct Tolerances {
    pub rel: f64,
    pub abs: f64,
    pub max_step: f64,
}

pub(crate) struct Stepper {
    t: f64,
    y: State,
    f: State,
    h: f64,
    err_prev: f64,
    direction: f64,
    tol: Tolerances,
}

impl Stepper {
    pub fn new(t0: f64, y0: State, direction: f64, tol: Tolerances) -> Self {
        let f0 = rhs(&y0);
        let h = initial_step(&y0, &f0, &tol);
        Self {
            t: t0,
            y: y0,
            f: f0,
            h,
            err_prev: 1e-4,
            direction,
            tol,
        }
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    /// Advances by one accepted step, never passing `t_end`.
    pub fn step(&mut self, t_end: f64) -> Result<Segment> {
        let mut rejected = false;
        loop {
            let remaining = (t_end - self.t).abs();
            let mut h = self.h.min(self.tol.max_step);
            if h <= 1e-14 * self.t.abs().max(1.0) {
                return Err(Error::Stiffness {
                    t: self.t,
                    x: self.y[0],
                    u: self.y[1],
                });
            }
            if h >= remaining {
                h = remaining;
            }
            let hs = h * self.direction;
            let (y1, f1, err) = self.attempt(hs);
            if err <= 1.0 {
                let mut fac = if err == 0.0 {
                    FAC_MAX
                } else {
                    SAFETY * err.powf(-EXPO) * self.err_prev.powf(BETA)
                };
                fac = fac.clamp(FAC_MIN, FAC_MAX);
                if rejected {
                    fac = fac.min(1.0);
                }
                self.err_prev = err.max(1e-4);
                let segment = Segment {
                    t0: self.t,
                    y0: self.y,
                    f0: self.f,
                    t1: if h == remaining { t_end } else { self.t + hs },
                    y1,
                    f1,
                };
                self.t = segment.t1;
                self.y = y1;
                self.f = f1;
                self.h = h * fac;
                return Ok(segment);
            }
            rejected = true;
            self.h = h * (SAFETY * err.powf(-0.2)).clamp(FAC_MIN, 1.0);
        }
    }

    fn attempt(&self, h: f64) -> (State, State, f64) {
        let y = &self.y;
        let k1 = self.f;
        let k2 = rhs(&axpy(y, &[(A21, &k1)], h));
        let k3 = rhs(&axpy(y, &[(A31, &k1), (A32, &k2)], h));
        let k4 = rhs(&axpy(y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h));
        let k5 = rhs(&axpy(y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h));
        let k6 = rhs(&axpy(
            y,
            &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            h,
        ));
        let y1 = axpy(
            y,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
            h,
        );
        let k7 = rhs(&y1);
        let mut sum = 0.0;
        for i in 0..2 {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let scale = self.tol.abs + self.tol.rel * y[i].abs().max(y1[i].abs());
            sum += (e / scale).powi(2);
        }
        let err = (sum / 2.0).sqrt();
        (y1, k7, if err.is_finite() { err } else { f64::INFINITY })
    }
}

fn initial_step(y: &State, f: &State, tol: &Tolerances) -> f64 {
    let norm = |v: &State| {
        let mut s = 0.0;
        for i in 0..2 {
            let scale = tol.abs + tol.rel * y[i].abs();
            s += (v[i] / scale).powi(2);
        }
        (s / 2.0).sqrt()
    };
    let d0 = norm(y);
    let d1 = norm(f);
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h.min(tol.max_step).max(1e-10)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances {
            rel: 1e-10,
            abs: 1e-12,
            max_step: 0.5,
        }
    }

    #[test]
    fn interpolation_hits_endpoints() {
        let mut stepper = Stepper::new(0.0, [0.5, -0.25], 1.0, tol());
        let seg = stepper.step(10.0).unwrap();
        let a = seg.interpolate(seg.t0);
        let b = seg.interpolate(seg.t1);
        assert!((a[0] - seg.y0[0]).abs() < 1e-15 && (b[1] - seg.y1[1]).abs() < 1e-15);
    }

    #[test]
    fn stops_exactly_at_end() {
        let mut stepper = Stepper::new(0.0, [0.1, 0.0], -1.0, tol());
        let mut last = 0.0;
        while stepper.time() > -2.0 {
            last = stepper.step(-2.0).unwrap().t1;
        }
        assert_eq!(last, -2.0);
    }

    #[test]
    fn linear_regime_matches_exponential() {
        // For tiny x the x² term is negligible: x = x0 + u0 (1 - e^{-t}).
        let (x0, u0) = (1e-9, -1e-9);
        let mut stepper = Stepper::new(0.0, [x0, u0], 1.0, tol());
        let mut y = [x0, u0];
        while stepper.time() < 3.0 {
            y = stepper.step(3.0).unwrap().y1;
        }
        let expected = x0 + u0 * (1.0 - (-3.0f64).exp());
        assert!((y[0] - expected).abs() < 1e-14);
    }
}
