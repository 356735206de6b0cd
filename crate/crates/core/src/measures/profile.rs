use crate::error::{Error, Result};
use crate::interp::hermite;
use crate::profile::{Interp, Profile};
use crate::quad::gauss_legendre_8;
use crate::spaces::Params;

/// Fraction of `[0, r0]` near the endpoint that is integrated in the height
/// variable `s = f(r)` instead of `r`.
pub const TAIL_FRACTION: f64 = 0.05;

/// `c_hk * int_0^r0 sqrt(f'^2 + r^(2 alpha)) r^(h-1) f^(k-1) dr`, plus the wall
/// term when the profile ends with a vertical segment.
pub fn perimeter_profile(params: &Params, profile: &Profile) -> Result<f64> {
    perimeter_with_vertical_weight(params, profile, 1.0)
}

/// `(c_hk / k) * int_0^r0 r^(h-1) f^k dr`.
pub fn volume_profile(params: &Params, profile: &Profile) -> Result<f64> {
    params.validate()?;
    let (h1, k) = (params.h as i32 - 1, params.k as i32);
    let tail = tail_start(profile);
    let mut acc = 0.0;
    for i in 0..tail {
        let (a, b) = (profile.nodes()[i], profile.nodes()[i + 1]);
        acc += gauss_legendre_8(
            |r| {
                let (f, _) = profile.eval_panel(i, r);
                r.powi(h1) * f.powi(k)
            },
            a,
            b,
        );
    }
    for i in tail..profile.len() - 1 {
        acc += tail_panel(profile, i, |r, s, drds| -drds * r.powi(h1) * s.powi(k));
    }
    finish(params.c_hk() / params.k as f64 * acc, "volume")
}

/// Perimeter with the vertical part of the normal weighted by `weight2 r^(2 alpha)`
/// instead of `r^(2 alpha)`; `weight2 = 1` is the alpha-perimeter.
pub(crate) fn perimeter_with_vertical_weight(
    params: &Params,
    profile: &Profile,
    weight2: f64,
) -> Result<f64> {
    params.validate()?;
    let (h1, k1, a2) = (params.h as i32 - 1, params.k as i32 - 1, 2.0 * params.alpha);
    let tail = tail_start(profile);
    let mut acc = 0.0;
    for i in 0..tail {
        if on_axis(profile, i) {
            continue;
        }
        let (a, b) = (profile.nodes()[i], profile.nodes()[i + 1]);
        acc += gauss_legendre_8(
            |r| {
                let (f, fp) = profile.eval_panel(i, r);
                (fp * fp + weight2 * r.powf(a2)).sqrt() * r.powi(h1) * f.powi(k1)
            },
            a,
            b,
        );
    }
    for i in tail..profile.len() - 1 {
        acc += tail_panel(profile, i, |r, s, drds| {
            (1.0 + weight2 * r.powf(a2) * drds * drds).sqrt() * r.powi(h1) * s.powi(k1)
        });
    }
    let wall = profile.wall_height();
    if wall > 0.0 {
        acc += profile.r0().powi(h1) * wall.powi(k1 + 1) / (k1 + 1) as f64;
    }
    finish(params.c_hk() * acc, "perimeter")
}

// a panel with zero height at both ends lies on the axis and bounds nothing
fn on_axis(profile: &Profile, i: usize) -> bool {
    profile.values()[i] == 0.0 && profile.values()[i + 1] == 0.0
}

fn finish(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::numerical(format!("{what} integrand produced {v}")))
    }
}

/// First panel integrated in the height variable; `len - 1` when there is none.
///
/// The tail needs `f` strictly decreasing there so that `r(s)` is a function.
fn tail_start(profile: &Profile) -> usize {
    let n = profile.len();
    if profile.wall_height() > 0.0 || profile.kind() == Interp::Linear {
        return n - 1;
    }
    let cut = (1.0 - TAIL_FRACTION) * profile.r0();
    let mut start = profile.nodes().partition_point(|&r| r < cut).min(n - 1);
    if start == 0 {
        start = 1.min(n - 1);
    }
    let d = profile.effective_slopes();
    let v = profile.values();
    let ok = (start..n).all(|i| d[i] < 0.0) && (start..n - 1).all(|i| v[i + 1] < v[i]);
    if ok {
        start
    } else {
        n - 1
    }
}

/// Integrate `g(r, s, dr/ds)` over `s` on panel `i`, with `r(s)` the cubic
/// Hermite interpolant through the panel ends with slopes `1 / f'`.
fn tail_panel<G: Fn(f64, f64, f64) -> f64>(profile: &Profile, i: usize, g: G) -> f64 {
    let (r0, r1) = (profile.nodes()[i], profile.nodes()[i + 1]);
    let (s0, s1) = (profile.values()[i], profile.values()[i + 1]);
    let d = profile.effective_slopes();
    let (q0, q1) = (1.0 / d[i], 1.0 / d[i + 1]);
    // s1 < s0; integrate over [s1, s0]
    gauss_legendre_8(
        |s| {
            let (r, drds) = hermite(s1, s0, r1, r0, q1, q0, s);
            g(r, s, drds)
        },
        s1,
        s0,
    )
}
