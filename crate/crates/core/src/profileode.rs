//! The profile ODE of constant mean curvature and its shooting solver.
//!
//! The profile `f` of a symmetric isoperimetric set solves
//! `(r^(h-1) z)' = r^(alpha+h-1) (k-1) sqrt(1-z^2) / f - C r^(h-1)` with
//! `z = f' / sqrt(r^(2 alpha) + f'^2)`, `f'(0) = 0`, and ends at `r0` with
//! `f(r0) = 0` and a vertical tangent. Writing `z = sin(beta)` and moving along
//! the graph with `dr = cos(beta) dtau`, `df = r^alpha sin(beta) dtau` gives
//! the regular system
//!
//! ```text
//! r'    = cos(beta)
//! f'    = r^alpha sin(beta)
//! beta' = -(h-1) sin(beta) / r + (k-1) r^alpha cos(beta) / f - C
//! ```
//!
//! which passes through the vertical tangent `beta = -pi/2` without any
//! singularity, so the endpoint is located as an ordinary event.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::{iso_ratio, perimeter_profile, volume_profile};
use crate::ode::{dopri_step, integrate, Flow, OdeFailure, StepControl};
use crate::profile::Profile;
use crate::quad::{gauss_legendre_8, integrate as quad_adaptive};
use crate::spaces::Params;

/// Terminal behaviour of one trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    /// Vertical tangent reached with `f` below the zero tolerance.
    HitZeroVerticalTangent,
    /// `f` reached zero while the tangent was still slanted.
    CrossedZeroEarly,
    /// The slope turned back to horizontal before any vertical tangent.
    Flattened,
    /// Vertical tangent reached while `f` is still clearly positive.
    VerticalAboveAxis,
    /// The state became non-finite.
    BlewUp,
}

impl Classification {
    /// `C` below the admissible value.
    pub fn is_undershoot(self) -> bool {
        matches!(self, Classification::CrossedZeroEarly | Classification::Flattened)
    }

    /// `C` at or above the admissible value.
    pub fn is_overshoot(self) -> bool {
        matches!(
            self,
            Classification::VerticalAboveAxis | Classification::HitZeroVerticalTangent
        )
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ShootingConfig {
    /// Initial height `f(0)`.
    pub f0: f64,
    /// Bracket for `C`; `None` means `[h/4, 4h]`.
    pub bracket: Option<(f64, f64)>,
    /// Bisection stops when the bracket is narrower than `tol_c * C`.
    pub tol_c: f64,
    pub max_iter: usize,
    pub step: StepControl,
    /// Series start radius, relative to `f0^(1/(1+alpha))`.
    pub eps_start: f64,
    /// `f / f0` below this at the vertical tangent counts as reaching the axis.
    pub zero_tol: f64,
    /// Node count of the returned profile.
    pub nodes: usize,
    /// Give up when the curve parameter exceeds this without a terminal event.
    pub tau_max: f64,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        ShootingConfig {
            f0: 1.0,
            bracket: None,
            tol_c: 1e-15,
            max_iter: 200,
            step: StepControl { rtol: 1e-12, atol: 1e-14, ..StepControl::default() },
            eps_start: 1e-6,
            zero_tol: 1e-4,
            nodes: 201,
            tau_max: 1e3,
        }
    }
}

impl ShootingConfig {
    fn validate(&self, params: &Params) -> Result<(f64, f64)> {
        let (lo, hi) = self.bracket.unwrap_or((params.h as f64 / 4.0, 4.0 * params.h as f64));
        let ok = self.f0 > 0.0
            && lo > 0.0
            && hi > lo
            && hi.is_finite()
            && self.tol_c > 0.0
            && self.eps_start > 0.0
            && self.zero_tol > 0.0
            && self.nodes >= 3
            && self.step.rtol > 0.0
            && self.step.atol > 0.0;
        if ok {
            Ok((lo, hi))
        } else {
            Err(Error::params(format!("invalid shooting configuration {self:?}")))
        }
    }
}

/// Result of integrating the ODE for one value of `C`.
#[derive(Debug, Clone)]
pub struct ShootOutcome {
    pub classification: Classification,
    pub c: f64,
    /// Where the trajectory stopped.
    pub r_end: f64,
    pub f_end: f64,
    pub accepted_steps: usize,
    /// The profile up to the vertical tangent, when it reached the axis.
    pub profile: Option<Profile>,
}

/// Converged shooting solution, rescaled so that `r0 = 1`.
#[derive(Debug, Clone)]
pub struct ShootResult {
    pub params: Params,
    /// Mean-curvature constant of the rescaled profile.
    pub c_star: f64,
    /// Constant and endpoint of the trajectory started at `f(0) = f0`.
    pub c_raw: f64,
    pub r0_raw: f64,
    /// Height left at the vertical tangent, relative to `f0`.
    pub f_end: f64,
    pub iterations: usize,
    pub profile: Profile,
}

/// `f''` from the normal form of the Euler–Lagrange equation.
pub fn ode_rhs(params: &Params, c: f64, r: f64, f: f64, fp: f64) -> Result<f64> {
    if !(r > 0.0) || !(f > 0.0) {
        return Err(Error::params(format!(
            "the profile equation needs r > 0 and f > 0 (r={r}, f={f})"
        )));
    }
    let (h, k, a) = (params.h as f64, params.k as f64, params.alpha);
    let r2a = r.powf(2.0 * a);
    let w = fp * fp + r2a;
    Ok(a * fp / r + w * ((k - 1.0) / f - (h - 1.0) * fp / (r2a * r)) - c * w.powf(1.5) / r2a)
}

/// `z = f' / sqrt(r^(2 alpha) + f'^2)`, the sine of the weighted slope angle.
pub fn z_substitution(params: &Params, r: f64, fp: f64) -> f64 {
    if fp.is_infinite() {
        return fp.signum();
    }
    let ra = r.powf(params.alpha);
    if fp == 0.0 {
        return 0.0;
    }
    fp / ra.hypot(fp)
}

/// `((d-1)/d) P / V`.
pub fn mean_curvature_constant(params: &Params, perimeter: f64, volume: f64) -> Result<f64> {
    if !(perimeter > 0.0) || !(volume > 0.0) {
        return Err(Error::params(format!(
            "perimeter and volume must be positive (P={perimeter}, V={volume})"
        )));
    }
    let d = params.d();
    Ok((d - 1.0) / d * perimeter / volume)
}

/// Chebyshev-type nodes `r0 (1 - cos(pi i/(n-1))) / 2`, dense near both ends.
pub fn clustered_nodes(r0: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if i + 1 == n {
                r0
            } else {
                0.5 * r0 * (1.0 - (PI * i as f64 / (n - 1) as f64).cos())
            }
        })
        .collect()
}

/// The `k = 1` solution with `C = h`, `r0 = 1`:
/// `f(r) = int_{arcsin r}^{pi/2} sin^(alpha+1)`, `f'(r) = -r^(alpha+1)/sqrt(1-r^2)`.
pub fn closed_form_k1(params: &Params, n: usize) -> Result<Profile> {
    params.validate()?;
    if params.k != 1 {
        return Err(Error::params(format!("closed form needs k = 1, got k = {}", params.k)));
    }
    if n < 2 {
        return Err(Error::params("closed form needs at least two nodes"));
    }
    let a = params.alpha;
    let nodes = clustered_nodes(1.0, n);
    let mut values = Vec::with_capacity(n);
    let mut slopes = Vec::with_capacity(n);
    for &r in &nodes {
        let lo = r.min(1.0).asin();
        values.push(quad_adaptive(|s| s.sin().powf(a + 1.0), lo, FRAC_PI_2, 1e-15, 1e-14)?);
        slopes.push(if r >= 1.0 {
            f64::NEG_INFINITY
        } else {
            -r.powf(a + 1.0) / (1.0 - r * r).sqrt()
        });
    }
    *values.last_mut().expect("n >= 2") = 0.0;
    Profile::new(nodes, values, Some(slopes))
}

type State = [f64; 3];

struct Trajectory {
    classification: Classification,
    end: State,
    accepted: usize,
    // accepted steps (t0, y0, t1, y1); the last one is cut at the event
    steps: Vec<(f64, State, f64, State)>,
}

fn system(params: &Params, c: f64) -> impl Fn(f64, &State) -> State {
    let (h1, k1, a) = (params.h as f64 - 1.0, params.k as f64 - 1.0, params.alpha);
    move |_t, y| {
        let (r, f, b) = (y[0], y[1], y[2]);
        if k1 > 0.0 && !(f > 0.0) {
            return [f64::NAN; 3];
        }
        let (sb, cb) = b.sin_cos();
        let ra = r.powf(a);
        let mut db = -h1 * sb / r - c;
        if k1 > 0.0 {
            db += k1 * ra * cb / f;
        }
        [cb, ra * sb, db]
    }
}

/// `Ok(None)` when the step size underflowed with the trajectory already
/// within the zero tolerance of the axis: the integrator cannot tell that
/// value of `C` from the critical one.
fn run(params: &Params, c: f64, cfg: &ShootingConfig, keep: bool) -> Result<Option<Trajectory>> {
    let (h, a) = (params.h as f64, params.alpha);
    let eps = cfg.eps_start * cfg.f0.powf(1.0 / (1.0 + a));
    // series start: f'/r^(alpha+1) -> -C/h
    let f_eps = cfg.f0 - c / (h * (a + 2.0)) * eps.powf(a + 2.0);
    let fp_eps = -(c / h) * eps.powf(a + 1.0);
    let y0 = [eps, f_eps, (fp_eps / eps.powf(a)).atan()];
    let sys = system(params, c);
    let mut steps = Vec::new();
    let mut event: Option<(Classification, State)> = None;
    let zero = cfg.zero_tol * cfg.f0;
    let mut last = y0;
    let res = integrate(&sys, 0.0, y0, cfg.tau_max, &cfg.step, |st| {
        last = st.y1;
        // earliest of the three events inside this step
        let mut best: Option<(f64, State, Classification)> = None;
        let mut consider = |hit: bool, g: &dyn Fn(&State) -> f64, cl: Classification| {
            if hit {
                let (t, y) = st.locate(g);
                if best.is_none_or(|b| t < b.0) {
                    best = Some((t, y, cl));
                }
            }
        };
        consider(
            st.y1[2] <= -FRAC_PI_2,
            &|y| y[2] + FRAC_PI_2,
            Classification::VerticalAboveAxis,
        );
        consider(st.y1[1] <= 0.0, &|y| y[1], Classification::CrossedZeroEarly);
        consider(st.y1[2] >= 0.0, &|y| y[2], Classification::Flattened);
        match best {
            Some((t, mut y, mut cl)) => {
                if cl == Classification::VerticalAboveAxis && y[1] <= zero {
                    cl = Classification::HitZeroVerticalTangent;
                }
                if cl == Classification::CrossedZeroEarly {
                    y[1] = 0.0;
                }
                if keep {
                    steps.push((st.t0, st.y0, t, y));
                }
                event = Some((cl, y));
                Flow::Stop
            }
            None => {
                if keep {
                    steps.push((st.t0, st.y0, st.t1, st.y1));
                }
                Flow::Continue
            }
        }
    });
    match res {
        Ok(stats) => match event {
            Some((classification, end)) => {
                Ok(Some(Trajectory { classification, end, accepted: stats.accepted, steps }))
            }
            None => Err(Error::numerical(format!(
                "no terminal event before tau = {} at C = {c}",
                cfg.tau_max
            ))),
        },
        Err(OdeFailure::NonFinite { .. }) => Ok(Some(Trajectory {
            classification: Classification::BlewUp,
            end: [f64::NAN; 3],
            accepted: 0,
            steps,
        })),
        Err(OdeFailure::StepUnderflow { .. }) if last[1] < zero => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn unresolved(c: f64) -> Error {
    Error::numerical(format!("step size underflow next to the axis at C = {c}"))
}

/// Sample the trajectory at cosine-clustered radii up to the vertical tangent.
/// Returns `(nodes, values, slopes)` in the raw scaling.
fn sample(
    params: &Params,
    c: f64,
    cfg: &ShootingConfig,
    tr: &Trajectory,
) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let a = params.alpha;
    let sys = system(params, c);
    let r0 = tr.end[0];
    let nodes = clustered_nodes(r0, cfg.nodes);
    let n = nodes.len();
    let mut values = vec![0.0; n];
    let mut slopes = vec![0.0; n];
    values[0] = cfg.f0;
    slopes[n - 1] = f64::NEG_INFINITY;
    let mut idx = 0;
    for i in 1..n - 1 {
        let target = nodes[i];
        while idx + 1 < tr.steps.len() && tr.steps[idx].3[0] < target {
            idx += 1;
        }
        let (t0, y0, t1, y1) = tr.steps[idx];
        let y = if target <= y0[0] {
            y0
        } else if target >= y1[0] {
            y1
        } else {
            let (mut lo, mut hi) = (t0, t1);
            let mut y = y1;
            for _ in 0..200 {
                let m = 0.5 * (lo + hi);
                if m <= lo || m >= hi {
                    break;
                }
                let ym = dopri_step(&sys, t0, &y0, m - t0).0;
                y = ym;
                if ym[0] < target {
                    lo = m;
                } else {
                    hi = m;
                }
            }
            y
        };
        values[i] = y[1];
        slopes[i] = target.powf(a) * y[2].tan();
    }
    (nodes, values, slopes)
}

/// `z > -1 + VERTICAL_Z_TOL` at `f = 0` is a slanted crossing.
pub const VERTICAL_Z_TOL: f64 = 1e-6;

/// Integrate from the series start at `r = eps` for a given `C` and classify
/// how the trajectory ends. Step-size underflow is an error, not a class.
pub fn integrate_profile(params: &Params, c: f64, cfg: &ShootingConfig) -> Result<ShootOutcome> {
    params.validate()?;
    cfg.validate(params)?;
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::params(format!("C must be positive, got {c}")));
    }
    let mut tr = run(params, c, cfg, true)?.ok_or_else(|| unresolved(c))?;
    // reaching the axis almost vertically is accepted as the endpoint; the
    // bisection keeps the raw classes so that it does not drift into this band
    if tr.classification == Classification::CrossedZeroEarly && tr.end[2].sin() < -1.0 + VERTICAL_Z_TOL {
        tr.classification = Classification::HitZeroVerticalTangent;
    }
    let profile = if tr.classification == Classification::HitZeroVerticalTangent {
        let (nodes, values, slopes) = sample(params, c, cfg, &tr);
        Some(Profile::new(nodes, values, Some(slopes))?)
    } else {
        None
    };
    Ok(ShootOutcome {
        classification: tr.classification,
        c,
        r_end: tr.end[0],
        f_end: tr.end[1],
        accepted_steps: tr.accepted,
        profile,
    })
}

/// Classifications at `n` log-spaced values of `C` in `[lo, hi]`.
pub fn sweep(
    params: &Params,
    cfg: &ShootingConfig,
    lo: f64,
    hi: f64,
    n: usize,
) -> Result<Vec<(f64, Classification)>> {
    let n = n.max(2);
    (0..n)
        .map(|i| {
            let c = lo * (hi / lo).powf(i as f64 / (n - 1) as f64);
            Ok((c, run(params, c, cfg, false)?.ok_or_else(|| unresolved(c))?.classification))
        })
        .collect()
}

/// Bisect on `C` between an undershooting and an overshooting trajectory,
/// then rescale the solution by `delta_(1/r0)` so that it ends at `r0 = 1`.
pub fn shoot(params: &Params, cfg: &ShootingConfig) -> Result<ShootResult> {
    params.validate()?;
    let (mut lo, mut hi) = cfg.validate(params)?;
    let cl_lo = run(params, lo, cfg, false)?.ok_or_else(|| unresolved(lo))?.classification;
    let cl_hi = run(params, hi, cfg, false)?.ok_or_else(|| unresolved(hi))?.classification;
    if !(cl_lo.is_undershoot() && cl_hi.is_overshoot()) {
        let trace = sweep(params, cfg, lo, hi, 9)?;
        let lines: Vec<String> = trace.iter().map(|(c, cl)| format!("C={c:.6}: {cl:?}")).collect();
        return Err(Error::Bracket(format!(
            "C={lo} gives {cl_lo:?}, C={hi} gives {cl_hi:?}; sweep: {}",
            lines.join(", ")
        )));
    }
    let mut iterations = 0;
    while hi - lo > cfg.tol_c * hi && iterations < cfg.max_iter {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        // an unresolvable trajectory means the bracket is as narrow as the
        // integrator can distinguish
        let Some(tr) = run(params, mid, cfg, false)? else { break };
        let cl = tr.classification;
        if cl.is_undershoot() {
            lo = mid;
        } else if cl.is_overshoot() {
            hi = mid;
        } else {
            return Err(Error::numerical(format!("trajectory blew up at C = {mid}")));
        }
    }
    let tr = run(params, hi, cfg, true)?.ok_or_else(|| unresolved(hi))?;
    if tr.classification != Classification::HitZeroVerticalTangent {
        return Err(Error::numerical(format!(
            "bisection stalled at C = {hi} with {:?} (f = {:e} at r = {})",
            tr.classification, tr.end[1], tr.end[0]
        )));
    }
    let (nodes, values, slopes) = sample(params, hi, cfg, &tr);
    let r0 = tr.end[0];
    let a = params.alpha;
    let lam = 1.0 / r0;
    let (lv, ls) = (lam.powf(1.0 + a), lam.powf(a));
    let n = nodes.len();
    let nodes: Vec<f64> = nodes.iter().map(|r| r / r0).collect();
    let mut nodes = nodes;
    nodes[n - 1] = 1.0;
    let values = values.iter().map(|f| f * lv).collect();
    let slopes = slopes.iter().map(|d| d * ls).collect();
    Ok(ShootResult {
        params: *params,
        c_star: hi * r0,
        c_raw: hi,
        r0_raw: r0,
        f_end: tr.end[1] / cfg.f0,
        iterations,
        profile: Profile::new(nodes, values, Some(slopes))?,
    })
}

/// Residual of the once-integrated equation with zero intercept,
/// `z(r) - [r^(1-h) int_0^r s^(alpha+h-1) (k-1) sqrt(1-z^2) / f ds - (C/h) r]`.
pub struct ZorroResidual<'a> {
    params: Params,
    c: f64,
    profile: &'a Profile,
    // integral of the source term from 0 to each node
    cum: Vec<f64>,
}

impl<'a> ZorroResidual<'a> {
    pub fn new(params: &Params, c: f64, profile: &'a Profile) -> Result<Self> {
        params.validate()?;
        let mut cum = vec![0.0];
        let n = profile.len();
        let mut acc = 0.0;
        for i in 0..n - 1 {
            acc += Self::source_integral(params, profile, i, profile.nodes()[i + 1]);
            cum.push(acc);
        }
        Ok(ZorroResidual { params: *params, c, profile, cum })
    }

    // int over panel i from its left node to r of s^(alpha+h-1)(k-1) cos(beta)/f
    fn source_integral(params: &Params, profile: &Profile, i: usize, r: f64) -> f64 {
        if params.k == 1 {
            return 0.0;
        }
        let (h1, k1, a) = (params.h as i32 - 1, params.k as f64 - 1.0, params.alpha);
        let lo = profile.nodes()[i];
        gauss_legendre_8(
            |s| {
                let (f, fp) = profile.eval_panel(i, s);
                let sa = s.powf(a);
                // cos(beta) = s^alpha / sqrt(s^(2 alpha) + f'^2)
                let cb = if fp.is_finite() { sa / sa.hypot(fp) } else { 0.0 };
                sa * s.powi(h1) * k1 * cb / f
            },
            lo,
            r,
        )
    }

    pub fn eval(&self, r: f64) -> f64 {
        let p = self.profile;
        let n = p.len();
        let r = r.clamp(0.0, p.r0());
        let (_, fp) = p.eval(r);
        let z = z_substitution(&self.params, r, fp);
        if r == 0.0 {
            return z;
        }
        let i = match p.nodes().binary_search_by(|v| v.total_cmp(&r)) {
            Ok(i) => i.min(n - 1),
            Err(i) => i - 1,
        };
        let integral = if i == n - 1 {
            self.cum[n - 1]
        } else {
            self.cum[i] + Self::source_integral(&self.params, p, i, r)
        };
        let h = self.params.h as f64;
        z - (r.powf(1.0 - h) * integral - self.c / h * r)
    }

    /// Nodes and panel midpoints of the profile inside `[a, b]`.
    pub fn sample_points(&self, a: f64, b: f64) -> Vec<f64> {
        let nodes = self.profile.nodes();
        let mut pts = Vec::new();
        for (i, &r) in nodes.iter().enumerate() {
            if r >= a && r <= b {
                pts.push(r);
            }
            if i + 1 < nodes.len() {
                let m = 0.5 * (r + nodes[i + 1]);
                if m >= a && m <= b {
                    pts.push(m);
                }
            }
        }
        pts
    }

    /// Largest `|residual|` over [`sample_points`](Self::sample_points) in `[a, b]`.
    pub fn max_abs(&self, a: f64, b: f64) -> f64 {
        self.sample_points(a, b).into_iter().map(|r| self.eval(r).abs()).fold(0.0, f64::max)
    }

    /// Least-squares intercept `D` in `residual(r) ~ D r^(1-h)` over `[a, b]`.
    pub fn fit_intercept(&self, a: f64, b: f64) -> f64 {
        let h = self.params.h as f64;
        let (mut num, mut den) = (0.0, 0.0);
        for r in self.sample_points(a, b) {
            let w = r.powf(1.0 - h);
            num += w * self.eval(r);
            den += w * w;
        }
        if den > 0.0 {
            num / den
        } else {
            0.0
        }
    }
}

/// Convenience wrapper around [`ZorroResidual::new`].
pub fn residual_zorro<'a>(params: &Params, c: f64, profile: &'a Profile) -> Result<ZorroResidual<'a>> {
    ZorroResidual::new(params, c, profile)
}

/// Per-panel defect of the divergence form integrated over each panel,
/// `[r^(h-1) z] - int (r^(alpha+h-1)(k-1) sqrt(1-z^2)/f - C r^(h-1))`,
/// for every panel except the last one, which ends at the vertical tangent.
pub fn pop_panel_defects(params: &Params, c: f64, profile: &Profile) -> Vec<f64> {
    let (h1, k1, a) = (params.h as i32 - 1, params.k as f64 - 1.0, params.alpha);
    let nodes = profile.nodes();
    let d = profile.effective_slopes();
    let flux = |i: usize| {
        let r = nodes[i];
        r.powi(h1) * z_substitution(params, r, d[i])
    };
    (0..profile.len().saturating_sub(2))
        .map(|i| {
            let src = gauss_legendre_8(
                |r| {
                    let (f, fp) = profile.eval_panel(i, r);
                    let ra = r.powf(a);
                    let cb = ra / ra.hypot(fp);
                    ra * r.powi(h1) * k1 * cb / f - c * r.powi(h1)
                },
                nodes[i],
                nodes[i + 1],
            );
            flux(i + 1) - flux(i) - src
        })
        .collect()
}

/// Summary written by the `solve` command.
#[derive(Debug, Clone, Serialize)]
pub struct ShootingReport {
    pub h: u32,
    pub k: u32,
    pub alpha: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub r0: f64,
    #[serde(rename = "P")]
    pub p: f64,
    #[serde(rename = "V")]
    pub v: f64,
    #[serde(rename = "I")]
    pub i: f64,
    pub residual_max: f64,
    pub iterations: usize,
    pub intercept: f64,
    pub c_raw: f64,
    pub r0_raw: f64,
    pub f_end: f64,
}

/// Window `[0.05 r0, 0.95 r0]` on which residuals are reported.
pub const RESIDUAL_WINDOW: (f64, f64) = (0.05, 0.95);

impl ShootingReport {
    pub fn from_result(res: &ShootResult) -> Result<Self> {
        let p = &res.params;
        let prof = &res.profile;
        let per = perimeter_profile(p, prof)?;
        let vol = volume_profile(p, prof)?;
        let z = residual_zorro(p, res.c_star, prof)?;
        let (a, b) = (RESIDUAL_WINDOW.0 * prof.r0(), RESIDUAL_WINDOW.1 * prof.r0());
        Ok(ShootingReport {
            h: p.h,
            k: p.k,
            alpha: p.alpha,
            c: res.c_star,
            r0: prof.r0(),
            p: per,
            v: vol,
            i: iso_ratio(p, per, vol)?,
            residual_max: z.max_abs(a, b),
            iterations: res.iterations,
            intercept: z.fit_intercept(a, b),
            c_raw: res.c_raw,
            r0_raw: res.r0_raw,
            f_end: res.f_end,
        })
    }
}
