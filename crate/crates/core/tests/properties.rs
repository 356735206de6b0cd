use isoperim::htype::HTypeStructure;
use isoperim::measures::{
    iso_ratio, perimeter_grid, perimeter_grid_below_y, perimeter_profile, slice_weight_y, truncate_y, volume_grid,
    volume_profile,
};
use isoperim::profileode::closed_form_k1;
use isoperim::rearrange::{
    dilate_grid, phi_point, psi_point, rearrange_full, steiner_xi, symmetric_difference_volume, Frame, HalfPlaneGrid,
};
use isoperim::spaces::dilate_profile;
use isoperim::{Params, Profile, QuadrantGrid};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = Params> {
    (1u32..4, 1u32..4, prop::sample::select(vec![0.5, 1.0, 1.5, 2.0]))
        .prop_map(|(h, k, a)| Params::new(h, k, a).unwrap())
}

/// Non-uniform edges starting at 0 and a non-empty occupancy pattern.
fn grid() -> impl Strategy<Value = QuadrantGrid> {
    (params(), 1usize..7, 1usize..7).prop_flat_map(|(p, nr, ns)| {
        (
            prop::collection::vec(0.1f64..1.0, nr),
            prop::collection::vec(0.1f64..1.0, ns),
            prop::collection::vec(any::<bool>(), nr * ns),
            0..nr * ns,
        )
            .prop_map(move |(dr, ds, occ, forced)| {
                let edges = |d: &[f64]| {
                    let mut e = vec![0.0];
                    for w in d {
                        e.push(e.last().unwrap() + w);
                    }
                    e
                };
                let cells: Vec<(usize, usize)> = (0..nr * ns)
                    .filter(|&c| occ[c] || c == forced)
                    .map(|c| (c % nr, c / nr))
                    .collect();
                QuadrantGrid::new(p, edges(&dr), edges(&ds), &cells).unwrap()
            })
    })
}

fn decreasing_profile() -> impl Strategy<Value = Profile> {
    prop::collection::vec(0.05f64..1.0, 2..12).prop_map(|drops| {
        let n = drops.len() + 1;
        let nodes: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let mut values = vec![0.0; n];
        for i in (0..n - 1).rev() {
            values[i] = values[i + 1] + drops[i];
        }
        Profile::new(nodes, values, None).unwrap()
    })
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dilation_scales_perimeter_and_volume(p in params(), lam in 0.2f64..5.0) {
        let prof = closed_form_k1(&Params::new(p.h, 1, p.alpha).unwrap(), 41).unwrap();
        let d = p.d();
        let (per, vol) = (perimeter_profile(&p, &prof).unwrap(), volume_profile(&p, &prof).unwrap());
        let scaled = dilate_profile(&p, &prof, lam).unwrap();
        let (ps, vs) = (perimeter_profile(&p, &scaled).unwrap(), volume_profile(&p, &scaled).unwrap());
        prop_assert!(close(ps, lam.powf(d - 1.0) * per, 1e-9));
        prop_assert!(close(vs, lam.powf(d) * vol, 1e-9));
        prop_assert!(close(iso_ratio(&p, ps, vs).unwrap(), iso_ratio(&p, per, vol).unwrap(), 1e-9));
    }

    #[test]
    fn grid_dilation_keeps_the_ratio(g in grid(), lam in 0.2f64..5.0) {
        let p = *g.params();
        let s = dilate_grid(&g, lam).unwrap();
        let (per, vol) = (perimeter_grid(&g).unwrap(), volume_grid(&g));
        let (ps, vs) = (perimeter_grid(&s).unwrap(), volume_grid(&s));
        prop_assert!(close(vs, lam.powf(p.d()) * vol, 1e-9));
        prop_assert!(close(iso_ratio(&p, ps, vs).unwrap(), iso_ratio(&p, per, vol).unwrap(), 1e-9));
    }

    #[test]
    fn truncation_is_calibrated(g in grid(), pick in 0usize..8) {
        let j = 1 + pick % g.ns();
        let t = g.s_edges()[j];
        let cut = truncate_y(&g, t);
        let whole = perimeter_grid(&g).unwrap();
        let part = perimeter_grid(&cut).unwrap();
        prop_assert!(part <= whole * (1.0 + 1e-12));
        // boundary below the slice plus the slice itself
        let split = perimeter_grid_below_y(&g, t).unwrap() + slice_weight_y(&g, t);
        prop_assert!(close(part, split, 1e-12), "{} {}", part, split);
    }

    #[test]
    fn phi_inverts_psi(a in 0.1f64..4.0, x in -10.0f64..10.0, y in 0.0f64..10.0) {
        let (u, v) = phi_point(a, psi_point(a, (x, y)));
        prop_assert!((u - x).abs() <= 1e-12 * x.abs().max(1.0));
        prop_assert_eq!(v, y);
    }

    #[test]
    fn kaplan_is_skew_and_linear(y1 in -3.0f64..3.0, y2 in -3.0f64..3.0, y3 in -3.0f64..3.0, c in -2.0f64..2.0) {
        let q = HTypeStructure::quaternionic(0.5).unwrap();
        let (a, b) = ([y1, y2, y3], [y3, y1, y2]);
        let ja = q.kaplan_matrix(&a).unwrap();
        let jb = q.kaplan_matrix(&b).unwrap();
        let sum: Vec<f64> = a.iter().zip(&b).map(|(u, v)| c * u + v).collect();
        let js = q.kaplan_matrix(&sum).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                prop_assert!((ja[i][j] + ja[j][i]).abs() < 1e-14);
                prop_assert!((js[i][j] - (c * ja[i][j] + jb[i][j])).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn steiner_does_not_increase_the_perimeter(
        alpha in prop::sample::select(vec![0.5, 1.0, 2.0]),
        rows in prop::collection::vec(prop::collection::vec(any::<bool>(), 6), 1..5),
    ) {
        let p = Params::new(1, 1, alpha).unwrap();
        let u: Vec<f64> = (0..=6).map(|i| -1.5 + 0.5 * i as f64).collect();
        let s: Vec<f64> = (0..=rows.len()).map(|j| 0.4 * j as f64).collect();
        let cells: Vec<(usize, usize)> = rows.iter().enumerate()
            .flat_map(|(j, r)| r.iter().enumerate().filter(|c| *c.1).map(move |(i, _)| (i, j)))
            .collect();
        prop_assume!(!cells.is_empty());
        let e = HalfPlaneGrid::new(p, Frame::Xi, u, s, &cells).unwrap();
        let st = steiner_xi(&e).unwrap();
        prop_assert!(st.euclidean_perimeter() <= e.euclidean_perimeter() * (1.0 + 1e-12));
    }

    #[test]
    fn rearrangement_is_monotone_and_idempotent(g in grid()) {
        let p = *g.params();
        let r = rearrange_full(&p, &g).unwrap();
        let (pin, pout) = (perimeter_grid(&g).unwrap(), perimeter_grid(&r.grid).unwrap());
        prop_assert!(pout <= pin * (1.0 + 1e-12), "{} > {}", pout, pin);
        prop_assert!(close(volume_grid(&r.grid), volume_grid(&g), 1e-9));
        let again = rearrange_full(&p, &r.grid).unwrap();
        prop_assert!(symmetric_difference_volume(&again.grid, &r.grid) <= 1e-9 * volume_grid(&g));
    }

    #[test]
    fn profile_csv_round_trip(prof in decreasing_profile()) {
        let back = Profile::read_csv(prof.to_csv_string().as_bytes()).unwrap();
        prop_assert_eq!(back.nodes(), prof.nodes());
        prop_assert_eq!(back.values(), prof.values());
    }

    #[test]
    fn grid_json_round_trip(g in grid()) {
        let back = QuadrantGrid::from_json(&g.to_json().unwrap()).unwrap();
        prop_assert_eq!(back.occupied_cells(), g.occupied_cells());
        prop_assert_eq!(back.r_edges(), g.r_edges());
        prop_assert_eq!(back.s_edges(), g.s_edges());
    }
}
