//! Dormand–Prince 5(4) integrator with per-step observation and sub-step
//! re-evaluation for locating events inside an accepted step.

use crate::error::Error;

/// Why an integration run stopped early.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OdeFailure {
    /// The state or the error estimate became non-finite and shrinking the
    /// step did not help.
    NonFinite { t: f64 },
    StepUnderflow { t: f64, h: f64 },
    Budget { t: f64 },
}

impl From<OdeFailure> for Error {
    fn from(f: OdeFailure) -> Self {
        Error::numerical(match f {
            OdeFailure::NonFinite { t } => format!("non-finite state near t={t}"),
            OdeFailure::StepUnderflow { t, h } => format!("step size underflow (h={h:e}) at t={t}"),
            OdeFailure::Budget { t } => format!("step budget exhausted at t={t}"),
        })
    }
}

/// Right-hand side of an autonomous-or-not system `y' = f(t, y)` of fixed size.
pub trait System<const N: usize> {
    fn eval(&self, t: f64, y: &[f64; N]) -> [f64; N];
}

impl<const N: usize, F: Fn(f64, &[f64; N]) -> [f64; N]> System<N> for F {
    fn eval(&self, t: f64, y: &[f64; N]) -> [f64; N] {
        self(t, y)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_max: f64,
    /// Steps smaller than this abort with a numerical failure.
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            rtol: 1e-11,
            atol: 1e-13,
            h_init: 1e-4,
            h_max: 0.05,
            h_min: 1e-14,
            max_steps: 200_000,
        }
    }
}

/// What the observer wants after seeing an accepted step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flow {
    Continue,
    Stop,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
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
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// 5th minus 4th order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// One Dormand–Prince step of size `h`; returns the 5th-order solution and
/// the embedded error vector.
pub fn dopri_step<const N: usize, S: System<N>>(
    sys: &S,
    t: f64,
    y: &[f64; N],
    h: f64,
) -> ([f64; N], [f64; N]) {
    let k1 = sys.eval(t, y);
    let k2 = sys.eval(t + C2 * h, &axpy(y, h, &[(A21, &k1)]));
    let k3 = sys.eval(t + C3 * h, &axpy(y, h, &[(A31, &k1), (A32, &k2)]));
    let k4 = sys.eval(t + C4 * h, &axpy(y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
    let k5 = sys.eval(
        t + C5 * h,
        &axpy(y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
    );
    let k6 = sys.eval(
        t + h,
        &axpy(y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
    );
    let y5 = axpy(y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
    let k7 = sys.eval(t + h, &y5);
    let mut err = [0.0; N];
    for i in 0..N {
        err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
    }
    (y5, err)
}

/// An accepted step `(t0, y0) -> (t1, y1)`. [`AcceptedStep::at`] re-integrates
/// from `t0` with a single step of the same scheme, so values inside the step
/// carry the method's local accuracy.
pub struct AcceptedStep<'a, const N: usize, S: System<N>> {
    sys: &'a S,
    pub t0: f64,
    pub y0: [f64; N],
    pub t1: f64,
    pub y1: [f64; N],
}

impl<'a, const N: usize, S: System<N>> AcceptedStep<'a, N, S> {
    pub fn at(&self, t: f64) -> [f64; N] {
        if t == self.t0 {
            return self.y0;
        }
        if t == self.t1 {
            return self.y1;
        }
        dopri_step(self.sys, self.t0, &self.y0, t - self.t0).0
    }

    /// Locate `t` in `[t0, t1]` where `g(y(t))` changes sign, by bisection on
    /// re-evaluated sub-steps. Requires a sign change between the ends.
    pub fn locate<G: Fn(&[f64; N]) -> f64>(&self, g: G) -> (f64, [f64; N]) {
        let (mut a, mut b) = (self.t0, self.t1);
        let mut ga = g(&self.y0);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            let gm = g(&self.at(m));
            if gm == 0.0 {
                return (m, self.at(m));
            }
            if (gm > 0.0) == (ga > 0.0) {
                a = m;
                ga = gm;
            } else {
                b = m;
            }
        }
        (b, self.at(b))
    }
}

/// Summary of an integration run.
#[derive(Debug, Clone, Copy)]
pub struct RunStats {
    pub accepted: usize,
    pub rejected: usize,
    pub t_end: f64,
}

/// Integrate from `(t0, y0)` until `t_end` or until `observe` returns [`Flow::Stop`].
///
/// `observe` sees every accepted step. Non-finite states and steps below
/// `h_min` are reported as numerical failures.
pub fn integrate<const N: usize, S, O>(
    sys: &S,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    ctl: &StepControl,
    mut observe: O,
) -> Result<RunStats, OdeFailure>
where
    S: System<N>,
    O: FnMut(&AcceptedStep<'_, N, S>) -> Flow,
{
    let mut t = t0;
    let mut y = y0;
    let mut h = ctl.h_init.min(ctl.h_max);
    let mut stats = RunStats { accepted: 0, rejected: 0, t_end: t0 };
    while t < t_end {
        if stats.accepted + stats.rejected >= ctl.max_steps {
            return Err(OdeFailure::Budget { t });
        }
        h = h.min(t_end - t);
        let (y1, err) = dopri_step(sys, t, &y, h);
        let mut norm = 0.0;
        for i in 0..N {
            let sc = ctl.atol + ctl.rtol * y[i].abs().max(y1[i].abs());
            norm += (err[i] / sc).powi(2);
        }
        let norm = (norm / N as f64).sqrt();
        if !norm.is_finite() || y1.iter().any(|v| !v.is_finite()) {
            stats.rejected += 1;
            h *= 0.25;
            if h < ctl.h_min {
                return Err(OdeFailure::NonFinite { t });
            }
            continue;
        }
        if norm <= 1.0 {
            let step = AcceptedStep { sys, t0: t, y0: y, t1: t + h, y1 };
            stats.accepted += 1;
            t += h;
            y = y1;
            stats.t_end = t;
            if observe(&step) == Flow::Stop {
                return Ok(stats);
            }
            let fac = if norm == 0.0 { 5.0 } else { (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0) };
            h = (h * fac).min(ctl.h_max);
        } else {
            stats.rejected += 1;
            h *= (0.9 * norm.powf(-0.2)).clamp(0.1, 0.9);
            if h < ctl.h_min {
                return Err(OdeFailure::StepUnderflow { t, h });
            }
        }
    }
    Ok(stats)
}
