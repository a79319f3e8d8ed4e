use kpilab::weights::{
    antiderivative_weight, build_weight, derivative_domination, persistence_weight_family, validate_weight, WeightFn,
    WeightSpec,
};
use kpilab::Grid;
use proptest::prelude::*;

const WINDOW: f64 = 0.5;

fn grid() -> Grid {
    Grid::new(512, 16, 20.0, 4.0).unwrap()
}

fn matrix() -> Vec<WeightSpec> {
    let mut out = Vec::new();
    for sigma in [0.0, 0.5, 1.0] {
        for i in 0..=4 {
            for k in 0..=3 {
                out.push(WeightSpec::new(sigma, i, k));
            }
        }
    }
    out
}

/// Sum over sample points of the error of the fourth-order centred first
/// difference of `∂x^{r-1} f` against the analytic `∂x^r f`.
fn fd_error(w: &WeightFn, r: usize, h: f64, xs: &[f64]) -> f64 {
    xs.iter()
        .map(|&x| {
            let p = |s: f64| w.profile(x + s * h)[r - 1];
            let fd = (p(-2.0) - 8.0 * p(-1.0) + 8.0 * p(1.0) - p(2.0)) / (12.0 * h);
            (fd - w.profile(x)[r]).abs()
        })
        .sum()
}

fn samples() -> Vec<f64> {
    (0..=160).map(|j| -9.0 + 18.0 * j as f64 / 160.0 + 0.0123).collect()
}

#[test]
fn class_closure_matrix() {
    let g = grid();
    for spec in matrix() {
        let w = build_weight(spec, &g, WINDOW).unwrap();
        let rep = validate_weight(&w, &g, 1.0).unwrap_or_else(|e| panic!("{spec:?}: {e}"));
        let (c1, c2, c3, c4) = (rep.c1.unwrap(), rep.c2.unwrap(), rep.c3.unwrap(), rep.c4.unwrap());
        assert!(c1 > 0.0 && c3 > 0.0, "{spec:?}: {rep:?}");
        assert!(c1 <= c2 && c3 <= c4 && c2.is_finite() && c4.is_finite(), "{spec:?}: {rep:?}");
        assert!(rep.c5.is_finite(), "{spec:?}: {rep:?}");
    }
}

#[test]
fn antiderivative_lands_in_next_class() {
    let g = grid();
    for spec in matrix().into_iter().filter(|s| s.sigma > 0.0 && s.i < 4) {
        let base = build_weight(spec, &g, WINDOW).unwrap();
        let f = antiderivative_weight(&base).unwrap();
        assert_eq!(f.spec().i, spec.i + 1);
        let rep = validate_weight(&f, &g, 1.0).unwrap_or_else(|e| panic!("{spec:?}: {e}"));
        assert!(rep.c1.unwrap() > 0.0 && rep.c3.unwrap() > 0.0);
        for x in samples() {
            let (fx, gv) = (f.profile(x)[1], base.profile(x)[0]);
            assert!((fx - gv).abs() <= 1e-10 * gv.max(1.0), "{spec:?} at {x}: {fx} vs {gv}");
        }
    }
}

#[test]
fn antiderivative_is_increasing() {
    let g = grid();
    for (sigma, i) in [(0.5, 0), (1.0, 1), (1.0, 3)] {
        let f = antiderivative_weight(&build_weight(WeightSpec::new(sigma, i, 0), &g, WINDOW).unwrap()).unwrap();
        let xs = samples();
        for w in xs.windows(2) {
            assert!(f.profile(w[1])[0] > f.profile(w[0])[0]);
        }
    }
}

#[test]
fn analytic_derivatives_match_finite_differences() {
    let g = grid();
    let xs = samples();
    let specs = [
        WeightSpec::new(1.0, 2, 0),
        WeightSpec::new(0.5, 4, 1),
        WeightSpec::new(0.0, 3, 0),
        WeightSpec::new(1.0, 0, 2),
    ];
    for spec in specs {
        let b = build_weight(spec, &g, WINDOW).unwrap();
        let mut ws = vec![b.clone()];
        if spec.sigma > 0.0 {
            ws.push(antiderivative_weight(&b).unwrap());
        }
        for w in &ws {
            for r in 1..=4 {
                let e: Vec<f64> = [0.02, 0.01, 0.005].iter().map(|&h| fd_error(w, r, h, &xs)).collect();
                let order = (e[0] / e[2]).log2() / 2.0;
                assert!(e[0] < 1e-10 || order >= 3.5, "{:?} r = {r}: errors {e:?}", w.spec());
            }
        }
    }
}

#[test]
fn constant_weight_has_zero_ratios() {
    let g = grid();
    let w = build_weight(WeightSpec::new(0.0, 0, 0), &g, WINDOW).unwrap();
    let rep = validate_weight(&w, &g, 1.0).unwrap();
    assert_eq!(rep.c5, 0.0);
    assert_eq!(rep.c1, Some(1.0));
    assert_eq!(rep.c3, Some(1.0));
}

#[test]
fn exponential_tail_ratio() {
    let g = grid();
    let w = build_weight(WeightSpec::new(1.0, 0, 0), &g, WINDOW).unwrap();
    let rep = validate_weight(&w, &g, 1.0).unwrap();
    assert!(rep.c5 >= 1.0);
}

#[test]
fn polynomial_tail_within_constants() {
    let g = grid();
    let w = build_weight(WeightSpec::new(1.0, 2, 0), &g, WINDOW).unwrap();
    let rep = validate_weight(&w, &g, 1.0).unwrap();
    let v = w.eval(3.0, 0.5, 0) / 9.0;
    assert!(rep.c3.unwrap() <= v && v <= rep.c4.unwrap());
}

#[test]
fn validate_rejects_nonpositive_horizon() {
    let g = grid();
    let w = build_weight(WeightSpec::new(1.0, 1, 0), &g, WINDOW).unwrap();
    assert!(validate_weight(&w, &g, 0.0).is_err());
}

#[test]
fn persistence_family_is_dominated() {
    let g = grid();
    let fam = persistence_weight_family(3, &g, WINDOW).unwrap();
    assert_eq!(fam.len(), 4);
    for x in samples() {
        assert_eq!(fam[0].profile(x)[0], 1.0);
        for f in &fam {
            assert!(f.profile(x)[0] >= 1.0 - 1e-12);
        }
    }
    for i in 1..fam.len() {
        let c = derivative_domination(&fam[i], &fam[i - 1], &g);
        assert!(c.is_finite() && c > 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weights_are_positive(sigma in 0.0f64..2.0, i in 0u32..5, k in 0u32..4, x in -20.0f64..20.0, t in 0.01f64..1.0) {
        let w = build_weight(WeightSpec::new(sigma, i, k), &grid(), WINDOW).unwrap();
        let v = w.eval(x, t, 0);
        prop_assert!(v > 0.0 && v.is_finite());
    }

    #[test]
    fn scaling_is_linear(s in 0.1f64..10.0, x in -9.0f64..9.0) {
        let w = build_weight(WeightSpec::new(1.0, 2, 1), &grid(), WINDOW).unwrap();
        let ws = w.clone().scaled(s);
        for r in 0..5 {
            let (a, b) = (ws.eval(x, 0.5, r), s * w.eval(x, 0.5, r));
            prop_assert!((a - b).abs() <= 1e-14 * b.abs().max(1e-300));
        }
    }
}
