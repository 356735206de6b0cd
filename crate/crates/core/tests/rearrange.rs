use approx::assert_relative_eq;
use isoperim::measures::{perimeter_grid, volume_grid};
use isoperim::profileode::closed_form_k1;
use isoperim::rearrange::{
    mu_volume, mu_xi_integral, phi_point, psi_point, radial_rearrange_r, rearrange_full,
    schwartz_s, schwartz_sigma, steiner_xi, symmetric_difference_volume, Frame, HalfPlaneGrid,
};
use isoperim::verify::{random_half_plane, random_rectangle_union};
use isoperim::{Params, QuadrantGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn p(h: u32, k: u32, a: f64) -> Params {
    Params::new(h, k, a).unwrap()
}

#[test]
fn psi_and_phi_points() {
    assert_eq!(psi_point(1.0, (2.0, 3.0)), (2.0, 3.0));
    assert_eq!(psi_point(1.0, (1.0, 5.0)), (0.5, 5.0));
    assert_eq!(psi_point(1.0, (-1.0, 5.0)), (-0.5, 5.0));
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let a = rng.gen_range(0.1..3.0);
        let pt = (rng.gen_range(-5.0..5.0), rng.gen_range(0.0..5.0));
        let back = phi_point(a, psi_point(a, pt));
        assert!((back.0 - pt.0).abs() <= 1e-12 * pt.0.abs().max(1.0));
        assert_eq!(back.1, pt.1);
    }
}

#[test]
fn mu_of_the_unit_square_image() {
    // xi-integral over Psi((0,1)) = (0,1/2)
    assert_relative_eq!(mu_xi_integral(1.0, 0.0, 0.5), 1.0, max_relative = 1e-15);
    // the y-shell |y| < 1 in R has length 2
    let sq = HalfPlaneGrid::new(p(1, 1, 1.0), Frame::X, vec![0.0, 1.0], vec![0.0, 1.0], &[(0, 0)]).unwrap();
    let xi = sq.psi().unwrap();
    assert_eq!(xi.u_edges(), &[0.0, 0.5]);
    assert_relative_eq!(mu_volume(&xi), 2.0, max_relative = 1e-15);
    let empty = HalfPlaneGrid::new(p(1, 1, 1.0), Frame::Xi, vec![0.0, 1.0], vec![0.0, 1.0], &[]).unwrap();
    assert_eq!(mu_volume(&empty), 0.0);
}

#[test]
fn mu_equals_volume_on_random_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for i in 0..20 {
        let params = p(1, 1 + i % 3, [1.0, 0.5, 2.0][i as usize % 3]);
        let e = random_half_plane(params, &mut rng, 8, 2.0);
        let xi = e.psi().unwrap();
        assert_relative_eq!(mu_volume(&xi), e.flat_volume(), max_relative = 1e-10);
        assert_relative_eq!(xi.euclidean_perimeter(), e.alpha_perimeter().unwrap(), max_relative = 1e-8);
        let back = xi.phi().unwrap();
        for (a, b) in back.u_edges().iter().zip(e.u_edges()) {
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
    }
}

#[test]
fn steiner_row_example() {
    // row (0, 2) in xi at alpha = 1: int |2 xi|^(-1/2) goes from 2 to 2 sqrt 2
    assert_relative_eq!(mu_xi_integral(1.0, 0.0, 2.0), 2.0, max_relative = 1e-15);
    assert_relative_eq!(mu_xi_integral(1.0, -1.0, 1.0), 2.0 * 2f64.sqrt(), max_relative = 1e-15);
    let g = HalfPlaneGrid::new(p(1, 1, 1.0), Frame::Xi, vec![-2.0, 0.0, 2.0], vec![0.0, 1.0], &[(1, 0)]).unwrap();
    let st = steiner_xi(&g).unwrap();
    let cells = st.occupied_cells();
    assert_eq!(cells.len(), 1);
    let (i, _) = cells[0];
    assert_eq!((st.u_edges()[i], st.u_edges()[i + 1]), (-1.0, 1.0));
    assert_relative_eq!(mu_volume(&st) / mu_volume(&g), 2f64.sqrt(), max_relative = 1e-14);
    // centred rows are fixed
    assert_eq!(steiner_xi(&st).unwrap().occupied_cells().len(), 1);
    assert_relative_eq!(mu_volume(&steiner_xi(&st).unwrap()), mu_volume(&st), max_relative = 1e-15);
}

#[test]
fn steiner_never_increases_euclidean_perimeter() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let e = random_half_plane(p(1, 1, 1.0), &mut rng, 10, 2.0).psi().unwrap();
        let st = steiner_xi(&e).unwrap();
        assert!(st.euclidean_perimeter() <= e.euclidean_perimeter() * (1.0 + 1e-12));
        assert!(mu_volume(&st) >= mu_volume(&e) * (1.0 - 1e-12));
        let sw = schwartz_sigma(&st).unwrap();
        assert!(sw.euclidean_perimeter() <= st.euclidean_perimeter() * (1.0 + 1e-12));
    }
}

#[test]
fn radial_row_example() {
    // h = 2, alpha = 1: the row (1, 2) becomes (0, g) with g^3 = 2^3 - 1^3
    let params = p(2, 1, 1.0);
    let g = QuadrantGrid::new(params, vec![0.0, 1.0, 2.0], vec![0.0, 1.0], &[(1, 0)]).unwrap();
    let out = radial_rearrange_r(&g).unwrap();
    let cells = out.occupied_cells();
    assert_eq!(cells.len(), 1);
    assert_eq!(cells[0].0, 0);
    let r = out.r_edges()[1];
    assert_relative_eq!(r, 7f64.cbrt(), max_relative = 1e-15);
    // the r^(h-1) weighted row measure grows: 3/2 -> 7^(2/3)/2
    assert!(r * r / 2.0 >= 1.5);
    assert_relative_eq!((3.0 * 7.0 / 3.0f64).cbrt(), 1.913, epsilon = 1e-3);
    // rows that already start at the axis are fixed
    let again = radial_rearrange_r(&out).unwrap();
    assert_eq!(symmetric_difference_volume(&again, &out), 0.0);
}

#[test]
fn schwartz_s_makes_columns_intervals() {
    let params = p(2, 2, 1.0);
    let g = QuadrantGrid::new(params, vec![0.0, 1.0], vec![0.0, 1.0, 2.0], &[(0, 1)]).unwrap();
    let out = schwartz_s(&g).unwrap();
    assert_relative_eq!(volume_grid(&out), volume_grid(&g), max_relative = 1e-14);
    let cells = out.occupied_cells();
    assert_eq!(cells, vec![(0, 0)]);
    // s^2 = 2^2 - 1^2
    assert_relative_eq!(out.s_edges()[1], 3f64.sqrt(), max_relative = 1e-15);
}

#[test]
fn profile_grid_is_a_fixed_point() {
    for params in [p(1, 1, 1.0), p(2, 1, 1.0), p(3, 1, 0.5)] {
        let prof = closed_form_k1(&params, 201).unwrap();
        let g = QuadrantGrid::from_profile(params, &prof, 30, 30, 1.0, 1.0).unwrap();
        let r = rearrange_full(&params, &g).unwrap();
        assert!(symmetric_difference_volume(&g, &r.grid) <= 1e-12 * volume_grid(&g));
        assert_relative_eq!(r.lambda, 1.0, max_relative = 1e-12);
        for s in &r.trace {
            assert_relative_eq!(s.perimeter, r.trace[0].perimeter, max_relative = 1e-12);
        }
    }
}

#[test]
fn trace_lists_every_stage() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let params = p(1, 1, 1.0);
    let g = random_rectangle_union(params, &mut rng, 8, 2.0);
    let names: Vec<String> = rearrange_full(&params, &g).unwrap().trace.into_iter().map(|s| s.stage).collect();
    assert_eq!(names, ["input", "psi", "steiner_xi", "schwartz_sigma", "phi", "dilation"]);
    let params = p(2, 1, 1.0);
    let g = random_rectangle_union(params, &mut rng, 8, 2.0);
    let names: Vec<String> = rearrange_full(&params, &g).unwrap().trace.into_iter().map(|s| s.stage).collect();
    assert_eq!(names, ["input", "radial_r", "schwartz_s", "dilation"]);
}

#[test]
fn monotone_volume_preserving_and_idempotent() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for params in [p(1, 1, 1.0), p(2, 1, 1.0), p(1, 2, 0.5), p(3, 2, 2.0)] {
        for _ in 0..50 {
            let g = random_rectangle_union(params, &mut rng, 12, 2.0);
            let r = rearrange_full(&params, &g).unwrap();
            let (pin, pout) = (perimeter_grid(&g).unwrap(), perimeter_grid(&r.grid).unwrap());
            assert!(pout <= pin * (1.0 + r.eps_grid), "{pout} > {pin} (1 + {})", r.eps_grid);
            assert!(pout <= pin * (1.0 + 1e-12));
            assert_relative_eq!(volume_grid(&r.grid), volume_grid(&g), max_relative = 1e-9);
            let twice = rearrange_full(&params, &r.grid).unwrap();
            assert!(symmetric_difference_volume(&twice.grid, &r.grid) <= 1e-9 * volume_grid(&g));
            // x-convex, y-Schwartz: every row and column of the output is an interval at the axis
            let out = &r.grid;
            for j in 0..out.ns() {
                let row: Vec<bool> = (0..out.nr()).map(|i| out.is_occupied(i, j)).collect();
                assert!(row.windows(2).all(|w| w[0] || !w[1]));
            }
            for i in 0..out.nr() {
                let col: Vec<bool> = (0..out.ns()).map(|j| out.is_occupied(i, j)).collect();
                assert!(col.windows(2).all(|w| w[0] || !w[1]));
            }
        }
    }
}

#[test]
fn rejects_mismatched_or_empty_input() {
    let params = p(1, 1, 1.0);
    let empty = QuadrantGrid::uniform(params, 4, 4, 0.5, 0.5).unwrap();
    assert!(rearrange_full(&params, &empty).is_err());
    let mut g = empty.clone();
    g.set(0, 0, true);
    assert!(rearrange_full(&p(2, 1, 1.0), &g).is_err());
    assert!(HalfPlaneGrid::new(p(2, 1, 1.0), Frame::X, vec![0.0, 1.0], vec![0.0, 1.0], &[]).is_err());
}
