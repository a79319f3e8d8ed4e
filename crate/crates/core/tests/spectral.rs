use kpilab::initial::band_limited;
use kpilab::spectral::{deriv, inv_dx, spectral_inner, weighted_integral};
use kpilab::{Field, Grid};
use proptest::prelude::*;

fn rel(a: &Field, b: &Field) -> f64 {
    let d = a.sub(b).unwrap().l2_sq();
    (d / b.l2_sq()).sqrt()
}

fn grid(nx: usize, ny: usize) -> Grid {
    Grid::new(nx, ny, 7.0, 5.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn deriv_after_inv_dx_is_identity_minus_mean(seed in any::<u64>(), j in 1i64..20, m in 0i64..7) {
        let g = grid(64, 16);
        let u = band_limited(&g, j, m, seed, false);
        let target = u.remove_x_mean();
        let back = deriv(&inv_dx(&target).unwrap(), (1, 0));
        prop_assert!(rel(&back, &target) <= 1e-12);
    }

    #[test]
    fn inv_dx_after_deriv_is_identity_minus_mean(seed in any::<u64>(), j in 1i64..20, m in 0i64..7) {
        let g = grid(64, 16);
        let u = band_limited(&g, j, m, seed, false);
        let back = inv_dx(&deriv(&u, (1, 0))).unwrap();
        prop_assert!(rel(&back, &u.remove_x_mean()) <= 1e-12);
    }

    #[test]
    fn parseval(seed in any::<u64>(), j in 0i64..20, m in 0i64..7) {
        let g = grid(64, 16);
        let u = band_limited(&g, j, m, seed, false);
        let v = band_limited(&g, j, m, seed ^ 0x5a5a, false);
        let quad = weighted_integral(&u, &v, None, 1.0).unwrap();
        let spec = spectral_inner(&u, &v).unwrap();
        let scale = (u.l2_sq() * v.l2_sq()).sqrt();
        prop_assert!((quad - spec).abs() <= 1e-12 * scale);
    }

    #[test]
    fn derivatives_are_linear(seed in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0, ax in 0u32..4, ay in 0u32..3) {
        let g = grid(32, 16);
        let u = band_limited(&g, 10, 5, seed, true);
        let v = band_limited(&g, 10, 5, seed.wrapping_add(1), true);
        let lhs = deriv(&Field::lincomb(a, &u, b, &v).unwrap(), (ax, ay));
        let rhs = Field::lincomb(a, &deriv(&u, (ax, ay)), b, &deriv(&v, (ax, ay))).unwrap();
        let scale = lhs.l2_sq().max(rhs.l2_sq()).max(1e-300);
        prop_assert!(lhs.sub(&rhs).unwrap().l2_sq() <= 1e-26 * scale);
    }

    #[test]
    fn mixed_derivatives_commute(seed in any::<u64>()) {
        let g = grid(32, 16);
        let u = band_limited(&g, 10, 5, seed, false);
        let a = deriv(&deriv(&u, (2, 0)), (0, 1));
        let b = deriv(&u, (2, 1));
        prop_assert!(a.sub(&b).unwrap().l2_sq() <= 1e-26 * b.l2_sq().max(1e-300));
    }
}

#[test]
fn inv_dx_rejects_mean_content() {
    let g = grid(32, 16);
    let u = band_limited(&g, 5, 4, 3, false);
    assert!(inv_dx(&u).is_err());
    assert!(inv_dx(&u.remove_x_mean()).is_ok());
}

#[test]
fn derivative_of_sine_is_exact() {
    let g = Grid::new(64, 16, std::f64::consts::PI, 1.0).unwrap();
    let u = Field::from_fn(&g, 0.0, |x, _| (3.0 * x).sin());
    let du = deriv(&u, (1, 0));
    let p = du.physical();
    for ix in 0..g.nx() {
        let x = g.x(ix);
        assert!((p[ix] - 3.0 * (3.0 * x).cos()).abs() < 1e-12);
    }
}

#[test]
fn physical_spectral_round_trip() {
    let g = grid(48, 16);
    let u = band_limited(&g, 15, 4, 9, false);
    let back = Field::from_physical(&g, u.physical().into_owned(), 0.0).unwrap();
    assert!(rel(&back, &u) < 1e-14);
}
