use kpilab::dynamics::{
    domain_defect, linear_solve, picard_iterate, rhs, solve, solve_recording, step, Coefficient, SolverConfig,
};
use kpilab::initial::{band_limited, line_soliton, InitialData};
use kpilab::{Field, Grid};
use proptest::prelude::*;

fn rel_dist(a: &Field, b: &Field) -> f64 {
    (a.sub(b).unwrap().l2_sq() / b.l2_sq()).sqrt()
}

fn gaussian(grid: &Grid, amplitude: f64) -> Field {
    InitialData::Gaussian { amplitude, x_width: 1.0, y_width: 1.0, x0: 0.0 }.realize(grid).unwrap()
}

fn cfg(dt: f64, t_final: f64) -> SolverConfig {
    SolverConfig { dt, t_final, record_every: 1, decay_tol: 1.0, ..Default::default() }
}

#[test]
fn soliton_matches_translate() {
    let g = Grid::new(512, 16, 40.0, 4.0).unwrap();
    let phi = InitialData::LineSoliton { c: 1.0, x0: -1.0 }.realize(&g).unwrap();
    let c = SolverConfig { dt: 4e-3, t_final: 1.0, record_every: 25, decay_tol: 1e-3, ..Default::default() };
    let tr = solve(&phi, &c).unwrap();
    let l0 = tr.l2_sq[0];
    for u in &tr.snapshots {
        let exact = Field::from_fn(&g, u.time(), |x, _| line_soliton(1.0, -1.0, u.time(), x));
        assert!(rel_dist(u, &exact) <= 1e-6, "t = {}: {}", u.time(), rel_dist(u, &exact));
    }
    for l in &tr.l2_sq {
        assert!((l - l0).abs() / l0 <= 1e-8);
    }
}

#[test]
fn snapshots_stay_in_domain() {
    let g = Grid::new(64, 64, 8.0, 8.0).unwrap();
    let tr = solve(&gaussian(&g, 1.0), &cfg(1e-2, 0.5)).unwrap();
    for u in &tr.snapshots {
        assert!(u.is_zero_x_mean());
        assert!(domain_defect(u) <= 1e-20);
    }
}

#[test]
fn l2_is_conserved_on_gaussian_data() {
    let g = Grid::new(64, 64, 8.0, 8.0).unwrap();
    let tr = solve(&gaussian(&g, 1.0), &cfg(2.5e-3, 1.0)).unwrap();
    let l0 = tr.l2_sq[0];
    let drift = tr.l2_sq.iter().map(|l| (l - l0).abs() / l0).fold(0.0, f64::max);
    assert!(drift <= 1e-8, "drift {drift:e}");
}

#[test]
fn temporal_order() {
    let g = Grid::new(64, 64, 8.0, 8.0).unwrap();
    let phi = gaussian(&g, 1.0);
    let h = 0.04;
    let run = |dt: f64| solve(&phi, &SolverConfig { record_every: 1000, ..cfg(dt, 0.8) }).unwrap().last().clone();
    let reference = run(h / 8.0);
    let e: Vec<f64> = [h, h / 2.0, h / 4.0].iter().map(|&dt| rel_dist(&run(dt), &reference)).collect();
    let order = (e[0] / e[2]).log2() / 2.0;
    assert!(order >= 3.5, "errors {e:?}, order {order}");
}

#[test]
fn linear_flow_is_exact_in_time() {
    let g = Grid::new(64, 32, 8.0, 8.0).unwrap();
    let phi = gaussian(&g, 1.0);
    let a = linear_solve(&phi, Coefficient::Zero, &cfg(0.1, 1.0)).unwrap();
    let b = linear_solve(&phi, Coefficient::Zero, &cfg(0.01, 1.0)).unwrap();
    assert!(rel_dist(a.last(), b.last()) <= 1e-12);
}

#[test]
fn true_coefficient_reproduces_nonlinear_flow() {
    let g = Grid::new(64, 64, 8.0, 8.0).unwrap();
    let phi = gaussian(&g, 0.5);
    let c = cfg(1e-2, 0.5);
    let (tr, record) = solve_recording(&phi, &c).unwrap();
    let lin = linear_solve(&phi, Coefficient::Stages(&record), &c).unwrap();
    for (u, v) in lin.snapshots.iter().zip(&tr.snapshots) {
        assert!(rel_dist(u, v) <= 1e-13, "t = {}", u.time());
    }
}

#[test]
fn picard_converges_to_solution() {
    let g = Grid::new(64, 64, 8.0, 8.0).unwrap();
    let phi = gaussian(&g, 1e-2);
    let c = cfg(1e-2, 0.5);
    let exact = solve(&phi, &c).unwrap();
    let iters = picard_iterate(&phi, 4, &c).unwrap();
    let err: Vec<f64> = iters.iter().map(|it| rel_dist(it.last(), exact.last())).collect();
    for w in err.windows(2) {
        assert!(w[1] <= 0.5 * w[0] || w[1] <= 1e-13, "{err:?}");
    }
}

#[test]
fn rejects_data_outside_domain() {
    let g = Grid::new(32, 32, 4.0, 4.0).unwrap();
    let u = band_limited(&g, 5, 5, 1, false);
    assert!(solve(&u, &cfg(1e-2, 0.1)).is_err());
}

#[test]
fn margin_violation_is_reported() {
    let g = Grid::new(64, 16, 8.0, 4.0).unwrap();
    let phi = InitialData::LineSoliton { c: 1.0, x0: 6.0 }.realize(&g).unwrap();
    let c = SolverConfig { decay_tol: 1e-6, ..cfg(1e-2, 0.2) };
    assert!(solve(&phi, &c).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn one_step_conserves_l2(seed in any::<u64>(), amp in 0.01f64..0.5) {
        let g = Grid::new(32, 32, 8.0, 8.0).unwrap();
        let u = band_limited(&g, 5, 5, seed, true);
        let u = u.scale(amp / u.max_abs());
        let v = step(&u, 1e-2, &SolverConfig::default()).unwrap();
        prop_assert!((v.l2_sq() - u.l2_sq()).abs() <= 1e-10 * u.l2_sq());
    }

    #[test]
    fn rhs_is_orthogonal_to_state(seed in any::<u64>()) {
        // d/dt ∫u² = 2∫u u_t = 0 for the dealiased band
        let g = Grid::new(32, 32, 8.0, 8.0).unwrap();
        let u = band_limited(&g, 5, 5, seed, true);
        let ut = rhs(&u).unwrap();
        let inner = kpilab::spectral::spectral_inner(&u, &ut).unwrap();
        prop_assert!(inner.abs() <= 1e-10 * (u.l2_sq() * ut.l2_sq()).sqrt());
    }
}
