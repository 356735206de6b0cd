//! Seeded invariant suites over all modules, as run by `isoperim verify`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::htype::{perimeter_h, HTypeStructure, DEFAULT_HTYPE_TOL};
use crate::measures::{
    iso_ratio, perimeter_curve, perimeter_grid, perimeter_grid_below_y, perimeter_profile,
    slice_weight_y, truncate_y, volume_grid, volume_profile, GeneratingCurve, QuadrantGrid,
};
use crate::profileode::{
    closed_form_k1, mean_curvature_constant, pop_panel_defects, residual_zorro, shoot,
    ShootingConfig, RESIDUAL_WINDOW,
};
use crate::rearrange::{
    mu_volume, rearrange_full, steiner_xi, symmetric_difference_volume, HalfPlaneGrid,
};
use crate::spaces::{dilate_profile, homogeneous_dimension, unit_ball_volume, Params};

/// Suites accepted by [`run_suite`].
pub const SUITES: [&str; 6] = ["spaces", "measures", "htype", "rearrange", "profileode", "all"];

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    /// Observed deviation (or ratio) compared against `tolerance`.
    pub value: f64,
    pub tolerance: f64,
    pub detail: String,
}

fn check(suite: &'static str, name: &str, value: f64, tolerance: f64, detail: String) -> Check {
    Check { suite, name: name.into(), passed: value <= tolerance, value, tolerance, detail }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// A union of 1 to 4 random rectangles on an `n x n` uniform grid of side `extent`.
pub fn random_rectangle_union(params: Params, rng: &mut impl Rng, n: usize, extent: f64) -> QuadrantGrid {
    let d = extent / n as f64;
    let mut g = QuadrantGrid::uniform(params, n, n, d, d).expect("positive spacing");
    let count = rng.gen_range(1..=4);
    for _ in 0..count {
        let (i0, j0) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let (i1, j1) = (rng.gen_range(i0 + 1..=n), rng.gen_range(j0 + 1..=n));
        for i in i0..i1 {
            for j in j0..j1 {
                g.set(i, j, true);
            }
        }
    }
    g
}

/// Same as [`random_rectangle_union`] on the signed half plane (`x` frame).
pub fn random_half_plane(params: Params, rng: &mut impl Rng, n: usize, extent: f64) -> HalfPlaneGrid {
    let d = extent / n as f64;
    let u: Vec<f64> = (0..=2 * n).map(|i| (i as f64 - n as f64) * d).collect();
    let s: Vec<f64> = (0..=n).map(|j| j as f64 * d).collect();
    let mut cells = Vec::new();
    for _ in 0..rng.gen_range(1..=4) {
        let (i0, j0) = (rng.gen_range(0..2 * n), rng.gen_range(0..n));
        let (i1, j1) = (rng.gen_range(i0 + 1..=2 * n), rng.gen_range(j0 + 1..=n));
        for i in i0..i1 {
            for j in j0..j1 {
                cells.push((i, j));
            }
        }
    }
    HalfPlaneGrid::new(params, crate::rearrange::Frame::X, u, s, &cells).expect("valid grid")
}

fn pansu() -> Result<crate::Profile> {
    closed_form_k1(&Params::new(1, 1, 1.0)?, 801)
}

fn spaces_suite(_seed: u64) -> Result<Vec<Check>> {
    const S: &str = "spaces";
    let mut out = Vec::new();
    let w = [2.0, PI, 4.0 * PI / 3.0];
    let dev = (1..=3).map(|m| rel(unit_ball_volume(m as u32).unwrap(), w[m - 1])).fold(0.0, f64::max);
    out.push(check(S, "unit_ball_volume_low_dimensions", dev, 1e-14, "omega_1..3".into()));
    let base = homogeneous_dimension(&Params::new(2, 3, 0.5)?);
    let mono = [Params::new(3, 3, 0.5)?, Params::new(2, 4, 0.5)?, Params::new(2, 3, 0.6)?]
        .iter()
        .all(|p| homogeneous_dimension(p) > base);
    out.push(check(S, "homogeneous_dimension_monotone", if mono { 0.0 } else { 1.0 }, 0.0, format!("d(2,3,0.5) = {base}")));
    let p = Params::new(2, 1, 1.0)?;
    let prof = closed_form_k1(&p, 401)?;
    let (p0, v0) = (perimeter_profile(&p, &prof)?, volume_profile(&p, &prof)?);
    let mut worst: f64 = 0.0;
    for lam in [0.5, 2.0, 10.0] {
        let q = dilate_profile(&p, &prof, lam)?;
        worst = worst.max(rel(perimeter_profile(&p, &q)?, lam.powf(p.d() - 1.0) * p0));
        worst = worst.max(rel(volume_profile(&p, &q)?, lam.powf(p.d()) * v0));
    }
    out.push(check(S, "dilation_scaling", worst, 1e-10, "P ~ lambda^(d-1), V ~ lambda^d".into()));
    let twice = dilate_profile(&p, &dilate_profile(&p, &prof, 2.0)?, 3.0)?;
    let once = dilate_profile(&p, &prof, 6.0)?;
    let dev = twice
        .values()
        .iter()
        .zip(once.values())
        .map(|(a, b)| rel(*a, *b))
        .fold(0.0, f64::max);
    out.push(check(S, "dilation_group_action", dev, 1e-13, "delta_2 delta_3 = delta_6".into()));
    Ok(out)
}

fn measures_suite(seed: u64) -> Result<Vec<Check>> {
    const S: &str = "measures";
    let mut out = Vec::new();
    let p11 = Params::new(1, 1, 1.0)?;
    let pr = pansu()?;
    let (per, vol) = (perimeter_profile(&p11, &pr)?, volume_profile(&p11, &pr)?);
    out.push(check(S, "pansu_perimeter", (per - 4.0).abs(), 1e-7, format!("P = {per}")));
    out.push(check(S, "pansu_volume", (vol - 8.0 / 3.0).abs(), 1e-7, format!("V = {vol}")));
    let sq = GeneratingCurve::rectangle(1.0, 1.0)?;
    let psq = perimeter_curve(&p11, &sq)?;
    out.push(check(S, "unit_square_perimeter", (psq - 6.0).abs(), 1e-12, format!("P = {psq}")));
    let rect = perimeter_curve(&p11, &GeneratingCurve::rectangle(2.0, 1.0)?)?;
    out.push(check(S, "rectangle_perimeter", (rect - 12.0).abs(), 1e-12, format!("P = {rect}")));
    let ratio = iso_ratio(&p11, psq, 4.0)?;
    out.push(check(S, "square_ratio_above_pansu", 9.0 - ratio + 1e-300, 0.0, format!("I = {ratio}")));
    // curve through the profile nodes vs the profile quadrature on the same polyline
    let p = Params::new(2, 2, 0.5)?;
    let nodes: Vec<f64> = (0..81).map(|i| i as f64 / 80.0).collect();
    let values: Vec<f64> = nodes.iter().map(|r| 1.0 - r * r).collect();
    let poly = crate::Profile::piecewise_linear(nodes, values)?;
    let a = perimeter_curve(&p, &GeneratingCurve::from_profile_graph(&poly)?)?;
    let b = perimeter_profile(&p, &poly)?;
    out.push(check(S, "curve_matches_profile", rel(a, b), 1e-8, format!("{a} vs {b}")));
    // truncation identities on random grids
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut density, mut calib) = (0.0f64, f64::NEG_INFINITY);
    for _ in 0..20 {
        let g = random_rectangle_union(p11, &mut rng, 12, 2.0);
        let full = perimeter_grid(&g)?;
        for &t in &g.s_edges()[1..] {
            let trunc = perimeter_grid(&truncate_y(&g, t))?;
            let split = perimeter_grid_below_y(&g, t)? + slice_weight_y(&g, t);
            density = density.max((trunc - split).abs() / full.max(1.0));
            calib = calib.max(trunc - full);
        }
    }
    out.push(check(S, "truncation_decomposition", density, 1e-12, "P(E, s<t) + v(t)".into()));
    out.push(check(S, "truncation_calibration", calib.max(0.0), 1e-12, format!("max P(trunc) - P(E) = {calib:e}")));
    Ok(out)
}

fn htype_suite(seed: u64) -> Result<Vec<Check>> {
    const S: &str = "htype";
    let mut out = Vec::new();
    let heis = HTypeStructure::heisenberg(0.5)?;
    let quat = HTypeStructure::quaternionic(0.5)?;
    let bad2 = HTypeStructure::new(2, 2, &[(1, 1, 2, 0.5), (2, 1, 2, 0.5)])?;
    let scaled = HTypeStructure::heisenberg(1.0)?;
    let ok = heis.validate(DEFAULT_HTYPE_TOL).valid
        && quat.validate(DEFAULT_HTYPE_TOL).valid
        && !bad2.validate(DEFAULT_HTYPE_TOL).valid
        && !scaled.validate(DEFAULT_HTYPE_TOL).valid;
    out.push(check(S, "validation_examples", if ok { 0.0 } else { 1.0 }, 0.0, "heisenberg, quaternionic true; h=2,k=2 and Q=1 false".into()));
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    // random skew tensor: skewness and linearity of J
    let (h, k) = (4, 3);
    let mut entries = Vec::new();
    for l in 1..=k {
        for i in 1..=h {
            for j in i + 1..=h {
                entries.push((l, i, j, rng.gen_range(-1.0..1.0)));
            }
        }
    }
    let rs = HTypeStructure::new(h, k, &entries)?;
    let (mut skew, mut lin) = (0.0f64, 0.0f64);
    for _ in 0..50 {
        let y: Vec<f64> = (0..k).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let y2: Vec<f64> = (0..k).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let c = rng.gen_range(-3.0..3.0);
        let j = rs.kaplan_matrix(&y)?;
        let j2 = rs.kaplan_matrix(&y2)?;
        let comb: Vec<f64> = y.iter().zip(&y2).map(|(a, b)| a + c * b).collect();
        let jc = rs.kaplan_matrix(&comb)?;
        for a in 0..h {
            for b in 0..h {
                skew = skew.max((j[a][b] + j[b][a]).abs());
                lin = lin.max((jc[a][b] - j[a][b] - c * j2[a][b]).abs());
            }
        }
    }
    out.push(check(S, "kaplan_skew", skew, 1e-14, "J_Y + J_Y^T".into()));
    out.push(check(S, "kaplan_linear", lin, 1e-12, "J_(Y + cY')".into()));
    // symmetric configurations: N_x parallel to x
    let (mut pix, mut quarter) = (0.0f64, 0.0f64);
    for s in [&heis, &quat] {
        for _ in 0..500 {
            let x: Vec<f64> = (0..s.h()).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let xn = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            let ny: Vec<f64> = (0..s.k()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let nyn2: f64 = ny.iter().map(|v| v * v).sum();
            let t: f64 = rng.gen_range(-1.0..1.0);
            // normalize (t x/|x|, ny) to a unit vector
            let norm = (t * t + nyn2).sqrt();
            let nx: Vec<f64> = x.iter().map(|v| t * v / xn / norm).collect();
            let ny: Vec<f64> = ny.iter().map(|v| v / norm).collect();
            pix = pix.max(s.skew_contraction(&x, &nx).iter().fold(0.0f64, |m, v| m.max(v.abs())));
            let nh = s.horizontal_normal_sq(&x, &nx, &ny)?;
            let nx2: f64 = nx.iter().map(|v| v * v).sum();
            let ny2: f64 = ny.iter().map(|v| v * v).sum();
            quarter = quarter.max((nh - nx2 - 0.25 * xn * xn * ny2).abs());
        }
    }
    out.push(check(S, "skew_contraction_vanishes", pix, 1e-14, "sum Q x_j N_xi for N_x || x".into()));
    out.push(check(S, "horizontal_normal_quarter_identity", quarter, 1e-12, "|N_H|^2 = |N_x|^2 + |x|^2 |N_y|^2 / 4".into()));
    let pr = pansu()?;
    let p21 = Params::new(2, 1, 1.0)?;
    let ph = perimeter_h(&heis, &pr)?;
    let pa = perimeter_profile(&p21, &pr)?;
    out.push(check(S, "perimeter_h_finite_and_below_alpha", if ph > 0.0 && ph <= pa { 0.0 } else { 1.0 }, 0.0, format!("P_H = {ph}, P_alpha = {pa}")));
    Ok(out)
}

fn rearrange_suite(seed: u64) -> Result<Vec<Check>> {
    const S: &str = "rearrange";
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(2));
    let p1 = Params::new(1, 1, 1.0)?;
    let (mut mu_dev, mut per_dev, mut steiner) = (0.0f64, 0.0f64, f64::NEG_INFINITY);
    for _ in 0..20 {
        let hp = random_half_plane(p1, &mut rng, 10, 2.0);
        let xi = hp.psi()?;
        mu_dev = mu_dev.max(rel(mu_volume(&xi), hp.flat_volume()));
        per_dev = per_dev.max(rel(xi.euclidean_perimeter(), hp.alpha_perimeter()?));
        let st = steiner_xi(&xi)?;
        steiner = steiner.max(st.euclidean_perimeter() / xi.euclidean_perimeter() - 1.0);
    }
    out.push(check(S, "mu_equals_volume", mu_dev, 1e-10, "mu(Psi(E)) = |E|".into()));
    out.push(check(S, "psi_perimeter_identity", per_dev, 1e-8, "P_alpha(E) = P(Psi(E))".into()));
    out.push(check(S, "steiner_perimeter_monotone", steiner.max(0.0), 1e-12, format!("max ratio - 1 = {steiner:e}")));
    let cases: Vec<(Params, QuadrantGrid)> = [p1, Params::new(2, 1, 1.0)?]
        .iter()
        .flat_map(|p| (0..50).map(|_| (*p, random_rectangle_union(*p, &mut rng, 16, 2.0))).collect::<Vec<_>>())
        .collect();
    let results: Vec<Result<(f64, f64, f64, f64)>> = cases
        .par_iter()
        .map(|(p, g)| {
            let r = rearrange_full(p, g)?;
            let again = rearrange_full(p, &r.grid)?;
            let ratio = perimeter_grid(&r.grid)? / perimeter_grid(g)?;
            let vdev = rel(volume_grid(&r.grid), volume_grid(g));
            let idem = symmetric_difference_volume(&r.grid, &again.grid) / volume_grid(g);
            Ok((ratio - 1.0, r.eps_grid, vdev, idem))
        })
        .collect();
    let (mut over, mut vdev, mut idem) = (f64::NEG_INFINITY, 0.0f64, 0.0f64);
    let mut slack_ok = true;
    for r in results {
        let (excess, eps, v, i) = r?;
        over = over.max(excess);
        slack_ok &= excess <= eps;
        vdev = vdev.max(v);
        idem = idem.max(i);
    }
    out.push(check(S, "rearrange_within_eps_grid", if slack_ok { 0.0 } else { 1.0 }, 0.0, format!("max P_out/P_in - 1 = {over:e}")));
    out.push(check(S, "rearrange_perimeter_monotone", over.max(0.0), 1e-10, "exact staircase rearrangement".into()));
    out.push(check(S, "rearrange_volume", vdev, 1e-9, "volume restored by dilation".into()));
    out.push(check(S, "rearrange_idempotent", idem, 1e-9, "|R(R(E)) - R(E)| / |E|".into()));
    // a profile staircase is already symmetric
    let p21 = Params::new(2, 1, 1.0)?;
    let g = QuadrantGrid::from_profile(p21, &closed_form_k1(&p21, 201)?, 40, 40, 1.0, 1.0)?;
    let r = rearrange_full(&p21, &g)?;
    let fixed = symmetric_difference_volume(&g, &r.grid) / volume_grid(&g);
    out.push(check(S, "profile_grid_fixed_point", fixed, 1e-9, format!("lambda = {}", r.lambda)));
    // isoperimetric inequality with the solved constant
    let prof = closed_form_k1(&p21, 801)?;
    let i_min = iso_ratio(&p21, perimeter_profile(&p21, &prof)?, volume_profile(&p21, &prof)?)?;
    let mut worst = f64::INFINITY;
    for (p, g) in cases.iter().filter(|(p, _)| *p == p21) {
        worst = worst.min(iso_ratio(p, perimeter_grid(g)?, volume_grid(g))? / i_min);
    }
    out.push(check(S, "isoperimetric_inequality", (1.0 - worst).max(0.0), 0.0, format!("min I / I_min = {worst}")));
    Ok(out)
}

fn profileode_suite(_seed: u64) -> Result<Vec<Check>> {
    const S: &str = "profileode";
    let mut out = Vec::new();
    let cfg = ShootingConfig::default();
    let cases = [(1, 1, 1.0), (2, 1, 1.0), (2, 1, 2.0), (3, 1, 0.5)];
    let runs: Vec<Result<(f64, f64)>> = cases
        .par_iter()
        .map(|&(h, k, a)| {
            let p = Params::new(h, k, a)?;
            let res = shoot(&p, &cfg)?;
            let cf = closed_form_k1(&p, res.profile.len())?;
            let sup = cf
                .values()
                .iter()
                .zip(res.profile.values())
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            Ok(((res.c_star - h as f64).abs(), sup))
        })
        .collect();
    for (&(h, k, a), r) in cases.iter().zip(runs) {
        let (dc, sup) = r?;
        out.push(check(S, &format!("shoot_k1_constant_{h}_{k}_{a}"), dc, 1e-6, "C* = h".into()));
        out.push(check(S, &format!("shoot_k1_profile_{h}_{k}_{a}"), sup, 1e-6, "sup |f - closed form|".into()));
    }
    let p21 = Params::new(2, 1, 1.0)?;
    let prof = closed_form_k1(&p21, 801)?;
    let c = mean_curvature_constant(&p21, perimeter_profile(&p21, &prof)?, volume_profile(&p21, &prof)?)?;
    out.push(check(S, "mean_curvature_expo", (c - 2.0).abs(), 1e-6, format!("C = {c}")));
    for (h, k, a) in [(1, 2, 1.0), (2, 2, 1.0), (2, 2, 2.0)] {
        let p = Params::new(h, k, a)?;
        let res = shoot(&p, &cfg)?;
        let z = residual_zorro(&p, res.c_star, &res.profile)?;
        let r0 = res.profile.r0();
        let (lo, hi) = (RESIDUAL_WINDOW.0 * r0, RESIDUAL_WINDOW.1 * r0);
        let tag = format!("{h}_{k}_{a}");
        out.push(check(S, &format!("zorro_residual_{tag}"), z.max_abs(lo, hi), 1e-5, format!("C* = {}", res.c_star)));
        out.push(check(S, &format!("zorro_intercept_{tag}"), z.fit_intercept(lo, hi).abs(), 1e-4, "fitted D".into()));
        let pop = pop_panel_defects(&p, res.c_star, &res.profile).iter().fold(0.0f64, |m, v| m.max(v.abs()));
        out.push(check(S, &format!("pop_panels_{tag}"), pop, 1e-6, "per-panel divergence form".into()));
    }
    Ok(out)
}

/// Run one suite (or `"all"`) with the given seed.
pub fn run_suite(suite: &str, seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let all = suite == "all";
    if all || suite == "spaces" {
        out.extend(spaces_suite(seed)?);
    }
    if all || suite == "measures" {
        out.extend(measures_suite(seed)?);
    }
    if all || suite == "htype" {
        out.extend(htype_suite(seed)?);
    }
    if all || suite == "rearrange" {
        out.extend(rearrange_suite(seed)?);
    }
    if all || suite == "profileode" {
        out.extend(profileode_suite(seed)?);
    }
    if out.is_empty() {
        return Err(crate::Error::params(format!(
            "unknown suite `{suite}`, expected one of {}",
            SUITES.join(", ")
        )));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_rejected() {
        assert!(run_suite("nope", 1).is_err());
    }

    #[test]
    fn spaces_and_htype_pass() {
        for c in run_suite("spaces", 3).unwrap().into_iter().chain(run_suite("htype", 3).unwrap()) {
            assert!(c.passed, "{c:?}");
        }
    }
}
