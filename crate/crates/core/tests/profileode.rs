use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

use approx::assert_relative_eq;
use isoperim::measures::{perimeter_profile, volume_profile};
use isoperim::profileode::{
    closed_form_k1, integrate_profile, mean_curvature_constant, ode_rhs, pop_panel_defects,
    residual_zorro, shoot, sweep, z_substitution, Classification, ShootingConfig, ShootingReport,
    RESIDUAL_WINDOW,
};
use isoperim::{Params, Profile};

fn p(h: u32, k: u32, a: f64) -> Params {
    Params::new(h, k, a).unwrap()
}

fn pansu(r: f64) -> f64 {
    let r = r.min(1.0);
    0.5 * (r.acos() + r * (1.0 - r * r).sqrt())
}

/// `f + 0.01`, cut one node short of the vertical tangent.
fn bumped(prof: &Profile) -> Profile {
    let n = prof.len() - 1;
    let values = prof.values()[..n].iter().map(|f| f + 0.01).collect();
    let slopes = prof.slopes().unwrap()[..n].to_vec();
    Profile::new(prof.nodes()[..n].to_vec(), values, Some(slopes)).unwrap()
}

fn window(prof: &Profile) -> (f64, f64) {
    (RESIDUAL_WINDOW.0 * prof.r0(), RESIDUAL_WINDOW.1 * prof.r0())
}

#[test]
fn rhs_examples() {
    let params = p(1, 1, 1.0);
    // f'' from differentiating -r^2/sqrt(1-r^2)
    let r: f64 = 0.5;
    let q = 1.0 - r * r;
    let fpp = -(2.0 * r * q + r.powi(3)) / q.powf(1.5);
    let v = ode_rhs(&params, 1.0, r, pansu(r), -r * r / q.sqrt()).unwrap();
    assert!((v - fpp).abs() < 1e-9);
    // Pansu point
    let r = FRAC_1_SQRT_2;
    assert_relative_eq!(-r * r / (1.0 - r * r).sqrt(), -FRAC_1_SQRT_2, max_relative = 1e-15);
    assert!(ode_rhs(&params, 1.0, 0.0, 1.0, 0.0).is_err());
    assert!(ode_rhs(&params, 1.0, 0.3, 0.0, -0.1).is_err());
}

#[test]
fn rhs_is_compatible_with_dilations() {
    // f_l(r) = l^(1+a) f(r/l) solves the equation with C/l, and f_l'' = l^(a-1) f''
    let lam: f64 = 2.0;
    for (params, c, r, f, fp) in [
        (p(1, 1, 1.0), 1.0, 0.4, 0.7, -0.2),
        (p(2, 2, 0.5), 1.7, 0.9, 0.3, -2.5),
        (p(3, 1, 2.0), 3.1, 0.2, 1.1, -0.01),
    ] {
        let a = params.alpha;
        let base = ode_rhs(&params, c, r, f, fp).unwrap();
        let scaled =
            ode_rhs(&params, c / lam, lam * r, lam.powf(1.0 + a) * f, lam.powf(a) * fp).unwrap();
        assert_relative_eq!(scaled, lam.powf(a - 1.0) * base, max_relative = 1e-12);
    }
}

#[test]
fn z_examples() {
    let params = p(1, 1, 1.0);
    assert_eq!(z_substitution(&params, 0.5, 0.0), 0.0);
    let z = z_substitution(&params, FRAC_1_SQRT_2, -FRAC_1_SQRT_2);
    assert_relative_eq!(z, -FRAC_1_SQRT_2, max_relative = 1e-15);
    assert!(z_substitution(&params, 0.5, -1e6) < -1.0 + 1e-12);
    assert_eq!(z_substitution(&params, 0.5, f64::NEG_INFINITY), -1.0);
    for fp in [-1e3, -1.0, -1e-3, 1e-3, 5.0] {
        assert!(z_substitution(&p(2, 1, 0.5), 0.7, fp).abs() < 1.0);
    }
}

#[test]
fn integrate_closed_form_cases() {
    // start at the closed-form height f(0) = int sin^2 = pi/4 so that r0 = 1
    let cfg = ShootingConfig { f0: FRAC_PI_4, ..ShootingConfig::default() };
    let out = integrate_profile(&p(1, 1, 1.0), 1.0, &cfg).unwrap();
    assert_eq!(out.classification, Classification::HitZeroVerticalTangent);
    assert!((out.r_end - 1.0).abs() < 1e-5);
    let prof = out.profile.unwrap();
    for (r, f) in prof.nodes().iter().zip(prof.values()) {
        assert!((f - pansu(*r)).abs() < 1e-6, "r={r}");
    }
    let out = integrate_profile(&p(2, 1, 1.0), 2.0, &cfg).unwrap();
    assert_eq!(out.classification, Classification::HitZeroVerticalTangent);
    assert!((out.r_end - 1.0).abs() < 1e-5);
    let expo = closed_form_k1(&p(2, 1, 1.0), 401).unwrap();
    let prof = out.profile.unwrap();
    for (r, f) in prof.nodes().iter().zip(prof.values()) {
        assert!((f - expo.eval(*r).0).abs() < 1e-6, "r={r}");
    }
}

#[test]
fn integrate_far_off_constants() {
    let cfg = ShootingConfig::default();
    for params in [p(1, 1, 1.0), p(2, 2, 1.0), p(1, 2, 0.5)] {
        let h = params.h as f64;
        let big = integrate_profile(&params, 20.0 * h, &cfg).unwrap();
        assert!(big.classification.is_overshoot(), "{params:?} {:?}", big.classification);
        assert!(big.profile.is_none() || big.classification == Classification::HitZeroVerticalTangent);
        let small = integrate_profile(&params, 0.05 * h, &cfg).unwrap();
        assert!(small.classification.is_undershoot(), "{params:?} {:?}", small.classification);
        assert!(small.profile.is_none());
    }
    assert_eq!(
        integrate_profile(&p(2, 2, 1.0), 0.1, &cfg).unwrap().classification,
        Classification::Flattened
    );
    assert_eq!(
        integrate_profile(&p(1, 1, 1.0), 40.0, &cfg).unwrap().classification,
        Classification::VerticalAboveAxis
    );
    assert!(integrate_profile(&p(1, 1, 1.0), 0.0, &cfg).is_err());
}

#[test]
fn shoot_examples() {
    let cfg = ShootingConfig::default();
    let res = shoot(&p(1, 1, 1.0), &cfg).unwrap();
    assert!((res.c_star - 1.0).abs() < 1e-6);
    assert_eq!(res.profile.r0(), 1.0);
    // f0 = 1 is the Pansu profile dilated by (4/pi)^(1/2)
    assert!((res.r0_raw - (4.0 / PI).sqrt()).abs() < 1e-5);
    let pr = &res.profile;
    for (r, f) in pr.nodes().iter().zip(pr.values()) {
        assert!((f / pr.values()[0] * FRAC_PI_4 - pansu(*r)).abs() < 1e-6);
    }
    let res = shoot(&p(3, 1, 0.5), &cfg).unwrap();
    assert!((res.c_star - 3.0).abs() < 1e-6, "{}", res.c_star);
    let res = shoot(&p(2, 2, 1.0), &cfg).unwrap();
    let z = residual_zorro(&res.params, res.c_star, &res.profile).unwrap();
    let (a, b) = window(&res.profile);
    assert!(z.max_abs(a, b) <= 1e-5);
}

#[test]
fn shoot_reports_bracket_failures_with_a_sweep() {
    let cfg = ShootingConfig { bracket: Some((3.0, 5.0)), ..ShootingConfig::default() };
    let err = shoot(&p(1, 1, 1.0), &cfg).unwrap_err();
    assert!(matches!(err, isoperim::Error::Bracket(_)));
    assert!(err.to_string().contains("sweep"));
    let bad = ShootingConfig { bracket: Some((2.0, 1.0)), ..ShootingConfig::default() };
    assert!(shoot(&p(1, 1, 1.0), &bad).is_err());
}

#[test]
fn sweep_changes_class_once_around_the_solution() {
    let trace = sweep(&p(1, 1, 1.0), &ShootingConfig::default(), 0.25, 4.0, 9).unwrap();
    assert_eq!(trace.len(), 9);
    assert!(trace[0].1.is_undershoot());
    assert!(trace[8].1.is_overshoot());
    let first_over = trace.iter().position(|(_, c)| c.is_overshoot()).unwrap();
    assert!(trace[first_over..].iter().all(|(_, c)| c.is_overshoot()));
    assert!(trace[first_over].0 >= 1.0 && trace[first_over - 1].0 < 1.0);
}

#[test]
fn zorro_residual_on_closed_forms_and_perturbations() {
    for params in [p(1, 1, 1.0), p(2, 1, 1.0), p(3, 1, 0.5), p(1, 1, 2.0)] {
        let prof = &closed_form_k1(&params, 201).unwrap();
        let z = residual_zorro(&params, params.h as f64, prof).unwrap();
        let (a, b) = window(prof);
        assert!(z.max_abs(a, b) <= 1e-8, "{params:?} {}", z.max_abs(a, b));
        let bumped = bumped(prof);
        // k = 1 has no f-dependence, so perturb a k = 2 profile instead
        let params2 = p(params.h, 2, params.alpha);
        let z0 = residual_zorro(&params2, params.h as f64, prof).unwrap().max_abs(a, b);
        let z1 = residual_zorro(&params2, params.h as f64, &bumped).unwrap().max_abs(a, b);
        assert!((z1 - z0).abs() > 1e-3, "{params:?} {z0} {z1}");
    }
    let res = shoot(&p(1, 2, 1.0), &ShootingConfig::default()).unwrap();
    let prof = &res.profile;
    let bumped = bumped(prof);
    let (a, b) = window(prof);
    let z = residual_zorro(&res.params, res.c_star, &bumped).unwrap();
    assert!(z.max_abs(a, b) > 1e-3);
}

#[test]
fn mean_curvature_constant_examples() {
    let params = p(1, 1, 1.0);
    assert_relative_eq!(mean_curvature_constant(&params, 4.0, 8.0 / 3.0).unwrap(), 1.0, max_relative = 1e-15);
    // P scales like l^(d-1), V like l^d
    let (l, d) = (3.0f64, params.d());
    let c = mean_curvature_constant(&params, 4.0 * l.powf(d - 1.0), 8.0 / 3.0 * l.powf(d)).unwrap();
    assert_relative_eq!(c, 1.0 / l, max_relative = 1e-14);
    let params = p(2, 1, 1.0);
    let expo = closed_form_k1(&params, 401).unwrap();
    let per = perimeter_profile(&params, &expo).unwrap();
    let vol = volume_profile(&params, &expo).unwrap();
    assert!((mean_curvature_constant(&params, per, vol).unwrap() - 2.0).abs() < 1e-6);
    assert!(mean_curvature_constant(&params, 0.0, 1.0).is_err());
    assert!(mean_curvature_constant(&params, 1.0, -1.0).is_err());
}

#[test]
fn closed_form_examples() {
    let prof = closed_form_k1(&p(1, 1, 1.0), 100).unwrap();
    for (r, f) in prof.nodes().iter().zip(prof.values()) {
        assert!((f - pansu(*r)).abs() <= 1e-10);
    }
    let prof = closed_form_k1(&p(1, 1, 2.0), 50).unwrap();
    assert!((prof.values()[0] - 2.0 / 3.0).abs() < 1e-13);
    assert_eq!(*prof.values().last().unwrap(), 0.0);
    assert_eq!(prof.r0(), 1.0);
    // f(r) = int_{asin r}^{pi/2} sin^(a+1) by a fixed composite rule
    let oracle = |r: f64, a: f64| {
        let (lo, n) = (r.asin(), 4000);
        let step = (FRAC_PI_2 - lo) / n as f64;
        let g = |t: f64| t.sin().powf(a + 1.0);
        let inner: f64 = (1..n).map(|i| if i % 2 == 1 { 4.0 } else { 2.0 } * g(lo + i as f64 * step)).sum();
        (g(lo) + g(FRAC_PI_2) + inner) * step / 3.0
    };
    let prof = closed_form_k1(&p(2, 1, 0.5), 40).unwrap();
    for (r, f) in prof.nodes().iter().zip(prof.values()) {
        assert!((f - oracle(*r, 0.5)).abs() < 1e-10, "r={r}");
    }
    assert!(closed_form_k1(&p(1, 2, 1.0), 10).is_err());
}

#[test]
fn shooting_profiles_match_the_endpoint_behaviour() {
    for params in [p(1, 2, 1.0), p(2, 2, 1.0), p(2, 1, 0.5)] {
        let res = shoot(&params, &ShootingConfig::default()).unwrap();
        let prof = &res.profile;
        let (r, f, d) = (prof.nodes(), prof.values(), prof.slopes().unwrap());
        assert!(f.windows(2).all(|w| w[1] < w[0]));
        assert!(d.iter().all(|s| *s <= 0.0));
        let (h, k, a) = (params.h as f64, params.k as f64, params.alpha);
        for i in 1..=10 {
            let ratio = d[i] / r[i].powf(a + 1.0);
            // limit -C/h plus the first-order source term of the integrated equation
            let expected = -res.c_star / h + (k - 1.0) * r[i].powf(a) / ((a + h) * f[0]);
            assert!((ratio - expected).abs() < 1e-4, "{params:?} i={i} {ratio} {expected}");
        }
    }
    let cfg = ShootingConfig { nodes: 4001, ..ShootingConfig::default() };
    let res = shoot(&p(2, 2, 1.0), &cfg).unwrap();
    let d = res.profile.slopes().unwrap();
    assert!(d[d.len() - 2].abs() > 1e3, "{}", d[d.len() - 2]);
}

#[test]
fn residual_shrinks_when_the_step_tolerance_is_tightened() {
    let params = p(2, 2, 1.0);
    let residual = |rtol: f64| {
        let mut cfg = ShootingConfig::default();
        cfg.step.rtol = rtol;
        cfg.step.atol = rtol * 1e-2;
        let res = shoot(&params, &cfg).unwrap();
        let (a, b) = window(&res.profile);
        residual_zorro(&params, res.c_star, &res.profile).unwrap().max_abs(a, b)
    };
    let (loose, tight) = (residual(1e-6), residual(1e-7));
    assert!(tight < loose, "{loose} {tight}");
}

#[test]
fn pop_defects_and_intercept() {
    for params in [p(1, 2, 1.0), p(2, 2, 1.0), p(2, 2, 2.0), p(3, 2, 0.5)] {
        let res = shoot(&params, &ShootingConfig::default()).unwrap();
        let defects = pop_panel_defects(&params, res.c_star, &res.profile);
        let worst = defects.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(worst <= 1e-6, "{params:?} {worst}");
        let report = ShootingReport::from_result(&res).unwrap();
        assert!(report.intercept.abs() <= 1e-4, "{params:?} {}", report.intercept);
        assert!(report.residual_max <= 1e-5);
        assert_relative_eq!(
            report.c,
            mean_curvature_constant(&params, report.p, report.v).unwrap(),
            max_relative = 1e-5
        );
    }
}
