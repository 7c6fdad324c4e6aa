use halfpipe::circle::{
    boundary_action, cross_ratio_distortion, cross_ratio_norm_estimate, killing_boundary, BoundaryField, Interp,
    Quadruple,
};
use halfpipe::douady_earle::{l0_eval, DouadyEarle, QuadratureSpec};
use halfpipe::envelope::ConvexEnvelope;
use halfpipe::geometry::{
    det3, killing_klein, killing_poincare, klein_to_poincare, klein_to_poincare_tangent, mink_cross, mink_inner,
    poincare_to_klein, poincare_to_klein_tangent, HPIsometry, KleinPoint, Mat3, MinkVec, PoincarePoint,
};
use halfpipe::grid::PolarGrid;
use halfpipe::hl::{dbar_fd, dbar_norm_fd, hl_eval, shape_operator, HlPoincare, FD_STEP};
use halfpipe::mean_surface::solve_mean_surface;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn mink() -> impl Strategy<Value = MinkVec> {
    (-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b, c)| MinkVec::new(a, b, c))
}

fn disk_point(r_max: f64) -> impl Strategy<Value = Complex64> {
    (0.0..1.0f64, 0.0..std::f64::consts::TAU).prop_map(move |(s, t)| Complex64::from_polar(r_max * s.sqrt(), t))
}

/// Band-limited data with modes up to `k`, coefficients in `[-1, 1]`.
fn band_limited(k: usize, n: usize) -> impl Strategy<Value = BoundaryField> {
    (
        prop::collection::vec(-1.0..1.0f64, k + 1),
        prop::collection::vec(-1.0..1.0f64, k),
    )
        .prop_map(move |(a, b)| BoundaryField::from_fourier(&a, &b, n).unwrap())
}

fn cheap() -> ProptestConfig {
    ProptestConfig::with_cases(24)
}

proptest! {
    #[test]
    fn cross_product_is_the_determinant(x in mink(), y in mink(), v in mink()) {
        let c = mink_cross(x, y);
        prop_assert!((mink_inner(c, v) - det3(x, y, v)).abs() < 1e-10);
        prop_assert!((c + mink_cross(y, x)).max_abs() < 1e-12);
        prop_assert!(mink_inner(c, x).abs() < 1e-10);
    }

    #[test]
    fn isometry_inverse(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let iso = HPIsometry::random(&mut rng, 2.0, 1.0);
        prop_assert!(iso.a.lorentz_defect() < 1e-9);
        let id = iso.compose(&iso.inverse());
        prop_assert!(id.a.add(&Mat3::IDENTITY.scale(-1.0)).max_abs() < 1e-9);
        prop_assert!(id.v.max_abs() < 1e-9);
    }

    #[test]
    fn charts_round_trip(z in disk_point(0.99), w in disk_point(1.0)) {
        let eta = poincare_to_klein(PoincarePoint::new(z)).unwrap();
        prop_assert!((klein_to_poincare(eta).unwrap().z - z).norm() < 1e-12);
        let v = poincare_to_klein_tangent(z, w);
        prop_assert!((klein_to_poincare_tangent(eta, v) - w).norm() < 1e-9);
    }

    #[test]
    fn killing_fields_agree_across_charts(s in mink(), z in disk_point(0.95)) {
        let eta = poincare_to_klein(PoincarePoint::new(z)).unwrap();
        let pushed = klein_to_poincare_tangent(eta, killing_klein(s, eta));
        prop_assert!((pushed - killing_poincare(s, z)).norm() < 1e-10);
    }

    #[test]
    fn mobius_derivative_matches_difference_quotient(seed in any::<u64>(), z in disk_point(0.6)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let iso = HPIsometry::random(&mut rng, 1.0, 0.0);
        let h = 1e-5;
        let fd = (iso.act_poincare(z + h).unwrap() - iso.act_poincare(z - h).unwrap()) / (2.0 * h);
        prop_assert!((fd - iso.act_poincare_derivative(z).unwrap()).norm() < 1e-7);
    }

    #[test]
    fn samples_round_trip_bit_exactly(phi in prop::collection::vec(-1e3..1e3f64, 64)) {
        let x = BoundaryField::new(phi, Interp::PiecewiseLinear).unwrap();
        let y = BoundaryField::from_json(&x.to_json()).unwrap();
        prop_assert_eq!(x.phi(), y.phi());
        prop_assert_eq!(x.interp(), y.interp());
    }

    #[test]
    fn killing_fields_have_no_cross_ratio_distortion(s in mink(), w in disk_point(0.9), a in 0.0..std::f64::consts::TAU) {
        let x = killing_boundary(s, 256).unwrap();
        let q = Quadruple::mobius_image(w, a);
        prop_assert!(cross_ratio_distortion(&x, &q).unwrap().norm() < 1e-7);
    }
}

proptest! {
    #![proptest_config(cheap())]

    #[test]
    fn solver_is_linear(x in band_limited(8, 64), y in band_limited(8, 64), a in -2.0..2.0f64, b in -2.0..2.0f64) {
        let z = x.linear_combination(a, &y, b).unwrap();
        let (ux, _) = solve_mean_surface(&x, 32, 64).unwrap();
        let (uy, _) = solve_mean_surface(&y, 32, 64).unwrap();
        let (uz, _) = solve_mean_surface(&z, 32, 64).unwrap();
        for k in 0..uz.values().len() {
            prop_assert!((uz.values()[k] - a * ux.values()[k] - b * uy.values()[k]).abs() < 1e-9);
        }
    }

    #[test]
    fn killing_data_is_reproduced(s in mink(), p in disk_point(0.95)) {
        let (u, _) = solve_mean_surface(&killing_boundary(s, 64).unwrap(), 32, 64).unwrap();
        let eta = KleinPoint::from_complex(p);
        prop_assert!((hl_eval(&u, eta).unwrap() - killing_klein(s, eta)).norm() < 1e-9);
        prop_assert!(shape_operator(&u, KleinPoint::from_complex(p * 0.99)).unwrap().lambda < 1e-9);
    }

    #[test]
    fn field_is_linear(x in band_limited(6, 64), y in band_limited(6, 64), a in -2.0..2.0f64, p in disk_point(0.99)) {
        let z = x.linear_combination(a, &y, 1.0).unwrap();
        let eta = KleinPoint::from_complex(p);
        let v = |f: &BoundaryField| hl_eval(&solve_mean_surface(f, 64, 64).unwrap().0, eta).unwrap();
        prop_assert!((v(&z) - a * v(&x) - v(&y)).norm() < 1e-9);
    }

    #[test]
    fn field_is_rotation_equivariant(x in band_limited(8, 64), alpha in 0.0..std::f64::consts::TAU, p in disk_point(0.99)) {
        let rot = Complex64::from_polar(1.0, alpha);
        let (u, _) = solve_mean_surface(&x, 64, 64).unwrap();
        let (ur, _) = solve_mean_surface(&x.rotated(alpha).unwrap(), 64, 64).unwrap();
        let lhs = hl_eval(&ur, KleinPoint::from_complex(rot * p)).unwrap();
        let rhs = rot * hl_eval(&u, KleinPoint::from_complex(p)).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-8, "{}", (lhs - rhs).norm());
    }

    #[test]
    fn envelopes_sandwich_the_data(x in band_limited(8, 128), p in disk_point(0.999)) {
        let env = ConvexEnvelope::new(&x).unwrap();
        let eta = KleinPoint::from_complex(p);
        prop_assert!(env.phi_minus(eta) <= env.phi_plus(eta) + 1e-9);
        for j in (0..x.n()).step_by(7) {
            let edge = KleinPoint::from_polar(1.0, x.theta(j));
            prop_assert!((env.phi_minus(edge) - x.phi()[j]).abs() < 1e-9);
            prop_assert!((env.phi_plus(edge) - x.phi()[j]).abs() < 1e-9);
        }
    }

    #[test]
    fn adding_a_killing_field_shifts_envelopes_by_a_plane(x in band_limited(8, 128), s in mink(), p in disk_point(0.95)) {
        let k = killing_boundary(s, 128).unwrap();
        let y = x.linear_combination(1.0, &k, 1.0).unwrap();
        let (ex, ey) = (ConvexEnvelope::new(&x).unwrap(), ConvexEnvelope::new(&y).unwrap());
        let eta = KleinPoint::from_complex(p);
        let plane = mink_inner(eta.lift(), s);
        prop_assert!((ey.phi_minus(eta) - ex.phi_minus(eta) - plane).abs() < 1e-8);
        prop_assert!((ey.width_at(eta) - ex.width_at(eta)).abs() < 1e-7);
    }

    #[test]
    fn width_is_isometry_invariant(x in band_limited(4, 512), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let iso = HPIsometry::random(&mut rng, 0.5, 0.5);
        let grid = PolarGrid::new(128, 256).unwrap();
        let w0 = ConvexEnvelope::new(&x).unwrap().sample(&grid).width().width;
        let w1 = ConvexEnvelope::new(&boundary_action(&x, &iso).unwrap()).unwrap().sample(&grid).width().width;
        let slack = 10.0 * (1.0 / 128.0 + 1.0 / 256.0) * x.sup_norm();
        prop_assert!((w0 - w1).abs() <= slack, "{w0} vs {w1}");
    }

    #[test]
    fn quadrature_is_linear(x in band_limited(8, 128), y in band_limited(8, 128), a in -2.0..2.0f64, b in -2.0..2.0f64, z in disk_point(0.9)) {
        let q = QuadratureSpec::new(1024).unwrap();
        let c = x.linear_combination(a, &y, b).unwrap();
        let lhs = l0_eval(&c, z, q).unwrap();
        let rhs = a * l0_eval(&x, z, q).unwrap() + b * l0_eval(&y, z, q).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn quadrature_dbar_matches_differences(x in band_limited(8, 128), z in disk_point(0.8)) {
        let de = DouadyEarle::new(&x, QuadratureSpec::new(2048).unwrap());
        let h = 1e-3;
        let fd = dbar_fd(&de, z, h).unwrap();
        prop_assert!((fd - de.dbar(z).unwrap()).norm() <= f64::max(1e-8, 100.0 * h * h));
    }

    #[test]
    fn width_and_cross_ratio_scale_together(x in band_limited(6, 256), alpha in 0.1..5.0f64) {
        let grid = PolarGrid::new(64, 128).unwrap();
        let y = x.linear_combination(alpha, &x, 0.0).unwrap();
        let w = |f: &BoundaryField| ConvexEnvelope::new(f).unwrap().sample(&grid).width().width;
        let (wx, wy) = (w(&x), w(&y));
        prop_assert!((wy - alpha * wx).abs() <= 0.01 * alpha * wx);
        let (cx, cy) = (cross_ratio_norm_estimate(&x, 256, 7).unwrap(), cross_ratio_norm_estimate(&y, 256, 7).unwrap());
        prop_assert!(cx.is_finite() && (cy - alpha * cx).abs() <= 0.01 * alpha * cx);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn dbar_equals_principal_curvature(x in band_limited(8, 256), z in disk_point(0.7)) {
        let (u, _) = solve_mean_surface(&x, 256, 256).unwrap();
        let eta = poincare_to_klein(PoincarePoint::new(z)).unwrap();
        let lambda = shape_operator(&u, eta).unwrap().lambda;
        let fd = dbar_norm_fd(&HlPoincare(&u), z, FD_STEP).unwrap();
        let tol = f64::max(1e-4, 10.0 * FD_STEP * FD_STEP);
        prop_assert!((fd - lambda).abs() <= tol, "{fd} vs {lambda}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    /// The trace is `L` times the PDE residual, so the bound needs a fine radial grid.
    #[test]
    fn shape_operator_is_traceless(x in band_limited(3, 32), p in disk_point(0.95)) {
        let (u, _) = solve_mean_surface(&x, 8192, 32).unwrap();
        let s = shape_operator(&u, KleinPoint::from_complex(p)).unwrap();
        prop_assert!(s.trace.abs() <= 1e-6, "{}", s.trace);
    }
}

#[test]
fn killing_fields_have_zero_width_and_cross_ratio() {
    let x = killing_boundary(MinkVec::new(0.5, -0.3, 0.8), 256).unwrap();
    let grid = PolarGrid::new(64, 128).unwrap();
    assert!(ConvexEnvelope::new(&x).unwrap().sample(&grid).width().width < 1e-9);
    assert!(cross_ratio_norm_estimate(&x, 512, 1).unwrap() < 1e-7);
}
