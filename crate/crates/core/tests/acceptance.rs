//! Primary acceptance criteria, one line each. Runs with its own harness so
//! the lines are always printed; `cargo test --release --test acceptance`
//! is the quick way to see them.
//!
//! Criteria listed in `KNOWN_FAILURES` are evaluated at their stated
//! tolerance like every other one and reported as FAIL; they do not fail
//! the target. Any other failure does, and so does a known failure that
//! starts passing, so the list cannot go stale silently.

use std::process::ExitCode;
use std::time::Instant;

use kpilab::dynamics::{solve, SolverConfig};
use kpilab::experiments::{self, Experiment, ExperimentConfig, Outcome};
use kpilab::identities::{check_leibniz, ibp_identity_check, leibniz_terms, Identity};
use kpilab::initial::{band_limited, line_soliton, InitialData};
use kpilab::io::{self, RunArtifact};
use kpilab::norms::embedding_corpus_maxima;
use kpilab::spectral::{deriv, inv_dx};
use kpilab::weights::{antiderivative_weight, build_weight, validate_weight, WeightFn, WeightSpec};
use kpilab::{par, Field, Grid, Result};

const KNOWN_FAILURES: [u32; 2] = [7, 11];

struct Check {
    passed: bool,
    detail: String,
}

fn check(passed: bool, detail: impl Into<String>) -> Result<Check> {
    Ok(Check { passed, detail: detail.into() })
}

fn rel(a: &Field, b: &Field) -> f64 {
    (a.sub(b).expect("same grid").l2_sq() / b.l2_sq()).sqrt()
}

fn verdict(name: Experiment) -> Result<Outcome> {
    experiments::run(&ExperimentConfig::defaults(name))
}

fn summary(out: &Outcome) -> String {
    let fails = out.verdict.failures();
    let keys: Vec<String> = out
        .verdict
        .measured
        .iter()
        .map(|(k, v)| format!("{k} = {v:.3e}"))
        .collect();
    if fails.is_empty() {
        keys.join(", ")
    } else {
        format!("failing: {}; {}", fails.join(", "), keys.join(", "))
    }
}

fn operator_calculus() -> Result<Check> {
    let g = Grid::new(128, 128, 8.0, 8.0)?;
    let mut worst = 0f64;
    for seed in 0..50 {
        let u = band_limited(&g, 40, 40, seed, false);
        let target = u.remove_x_mean();
        worst = worst.max(rel(&deriv(&inv_dx(&target)?, (1, 0)), &target));
        worst = worst.max(rel(&inv_dx(&deriv(&u, (1, 0)))?, &target));
    }
    check(worst <= 1e-12, format!("max relative error {worst:.2e} over 50 fields"))
}

fn soliton_propagation() -> Result<Check> {
    let g = Grid::new(512, 16, 40.0, 4.0)?;
    let phi = InitialData::LineSoliton { c: 1.0, x0: -1.0 }.realize(&g)?;
    let cfg = SolverConfig { dt: 4e-3, t_final: 1.0, record_every: 25, decay_tol: 1e-3, ..Default::default() };
    let tr = solve(&phi, &cfg)?;
    let mut err = 0f64;
    for u in &tr.snapshots {
        let t = u.time();
        let exact = Field::from_fn(&g, t, |x, _| line_soliton(1.0, -1.0, t, x));
        err = err.max(u.sub(&exact)?.l2_sq().sqrt());
    }
    let l0 = tr.l2_sq[0];
    let drift = tr.l2_sq.iter().map(|l| (l - l0).abs() / l0).fold(0.0, f64::max);
    check(err <= 1e-6 && drift <= 1e-8, format!("L2 error {err:.2e}, norm drift {drift:.2e}"))
}

fn temporal_order() -> Result<Check> {
    let g = Grid::new(64, 64, 8.0, 8.0)?;
    let phi = InitialData::Gaussian { amplitude: 1.0, x_width: 1.0, y_width: 1.0, x0: 0.0 }.realize(&g)?;
    let h = 0.04;
    let run = |dt: f64| -> Result<Field> {
        let cfg = SolverConfig { dt, t_final: 0.8, record_every: 1000, decay_tol: 1.0, ..Default::default() };
        Ok(solve(&phi, &cfg)?.last().clone())
    };
    let reference = run(h / 8.0)?;
    let mut e = Vec::new();
    for dt in [h, h / 2.0, h / 4.0] {
        e.push(rel(&run(dt)?, &reference));
    }
    let order = (e[0] / e[2]).log2() / 2.0;
    check(order >= 3.5, format!("errors {:.2e} {:.2e} {:.2e}, order {order:.2}", e[0], e[1], e[2]))
}

fn leibniz() -> Result<Check> {
    let g = Grid::new(64, 64, 6.0, 6.0)?;
    let orders: Vec<(u32, u32)> = (0..=4).flat_map(|n| (0..=n).map(move |a| (a, n - a))).collect();
    let mut sums_ok = true;
    for &a in &orders {
        let s: u64 = leibniz_terms(a).iter().map(|t| t.coeff).sum();
        sums_ok &= s == 1u64 << (a.0 + a.1);
    }
    let mut worst = 0f64;
    for seed in 0..10 {
        let u = band_limited(&g, 12, 12, seed, true);
        for &a in &orders {
            worst = worst.max(check_leibniz(&u, a));
        }
    }
    check(sums_ok && worst <= 1e-10, format!("binomial sums exact: {sums_ok}, max Leibniz error {worst:.2e}"))
}

fn main_equality() -> Result<Check> {
    let out = verdict(Experiment::Identities)?;
    let g = Grid::new(2048, 32, 20.0, 6.0)?;
    let mut worst = 0f64;
    for seed in 0..3 {
        let u = band_limited(&g, 60, 7, seed, true).scale(0.05);
        for spec in [WeightSpec::new(1.0, 1, 0), WeightSpec::new(1.0, 2, 0)] {
            let f = build_weight(spec, &g, 0.5)?;
            for alpha in [(1, 0), (2, 0), (1, 1)] {
                for which in Identity::ALL {
                    worst = worst.max(ibp_identity_check(&u, &f, 0.5, alpha, which)?.rel_error);
                }
            }
        }
    }
    check(
        out.verdict.passed && worst <= 1e-8,
        format!("run: {}; static identities max {worst:.2e}", summary(&out)),
    )
}

fn fd_order(w: &WeightFn) -> f64 {
    let xs: Vec<f64> = (0..=160).map(|j| -9.0 + 18.0 * j as f64 / 160.0 + 0.0123).collect();
    let mut worst = f64::INFINITY;
    for r in 1..=4 {
        let err = |h: f64| -> f64 {
            xs.iter()
                .map(|&x| {
                    let p = |s: f64| w.profile(x + s * h)[r - 1];
                    ((p(-2.0) - 8.0 * p(-1.0) + 8.0 * p(1.0) - p(2.0)) / (12.0 * h) - w.profile(x)[r]).abs()
                })
                .sum()
        };
        let (e0, e2) = (err(0.02), err(0.005));
        if e0 > 1e-10 {
            worst = worst.min((e0 / e2).log2() / 2.0);
        }
    }
    worst
}

fn weight_classes() -> Result<Check> {
    let g = Grid::new(512, 16, 20.0, 4.0)?;
    let mut bad = Vec::new();
    let mut min_order = f64::INFINITY;
    for sigma in [0.0, 0.5, 1.0] {
        for i in 0..=4 {
            for k in 0..=3 {
                let spec = WeightSpec::new(sigma, i, k);
                let w = build_weight(spec, &g, 0.5)?;
                let ok = |w: &WeightFn| match validate_weight(w, &g, 1.0) {
                    Ok(r) => {
                        let c = [r.c1, r.c2, r.c3, r.c4].map(|c| c.unwrap_or(f64::NAN));
                        c.iter().all(|v| v.is_finite()) && c[0] > 0.0 && c[2] > 0.0 && r.c5.is_finite()
                    }
                    Err(_) => false,
                };
                if !ok(&w) {
                    bad.push(format!("{spec:?}"));
                }
                min_order = min_order.min(fd_order(&w));
                if sigma > 0.0 {
                    let f = antiderivative_weight(&w)?;
                    if f.spec().i != i + 1 || !ok(&f) {
                        bad.push(format!("antiderivative of {spec:?}"));
                    }
                    min_order = min_order.min(fd_order(&f));
                }
            }
        }
    }
    check(
        bad.is_empty() && min_order >= 3.5,
        format!("60 classes, 40 antiderivatives, {} violations, min FD order {min_order:.2}", bad.len()),
    )
}

fn from_experiment(name: Experiment) -> Result<Check> {
    let out = verdict(name)?;
    check(out.verdict.passed, summary(&out))
}

fn embedding_corpora() -> Result<Check> {
    let g = Grid::new(128, 128, 8.0, 8.0)?;
    let mut m = Vec::new();
    for seed in 1..=5 {
        m.push(embedding_corpus_maxima(&g, 100, 24, 4.0, seed)?);
    }
    let spread = |v: Vec<f64>| {
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(0.0, f64::max);
        (hi - lo) / lo
    };
    let s_inf = spread(m.iter().map(|p| p.0).collect());
    let s_ln = spread(m.iter().map(|p| p.1).collect());
    check(
        s_inf <= 0.1 && s_ln <= 0.1,
        format!("seed-to-seed spread of corpus maxima: Linf {s_inf:.3}, L4 {s_ln:.3}"),
    )
}

fn determinism() -> Result<Check> {
    let dir = std::env::temp_dir().join(format!("kpilab-acceptance-{}", std::process::id()));
    let mut same = true;
    let mut details = Vec::new();
    for name in [Experiment::BlowupBound, Experiment::Uniqueness] {
        let cfg = ExperimentConfig::defaults(name);
        let mut csvs = Vec::new();
        let mut verdicts = Vec::new();
        for threads in [1, 4, 4] {
            let out = par::with_threads(threads, || experiments::run(&cfg))?;
            verdicts.push(out.verdict.clone());
            let path = io::write_artifact(&RunArtifact::from_outcome(&cfg, out), &dir.join(name.name()))?;
            csvs.push(std::fs::read(path.join(io::SERIES_FILE))?);
        }
        let ok = csvs.windows(2).all(|w| w[0] == w[1])
            && verdicts.windows(2).all(|w| w[0].passed == w[1].passed && w[0].measured == w[1].measured);
        details.push(format!("{name}: {}", if ok { "identical" } else { "differs" }));
        same &= ok;
    }
    let _ = std::fs::remove_dir_all(&dir);
    check(same, format!("series.csv and verdicts across 1/4/4 threads: {}", details.join(", ")))
}

type Criterion = (u32, &'static str, fn() -> Result<Check>);

fn main() -> ExitCode {
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let criteria: [Criterion; 13] = [
        (1, "operator calculus", operator_calculus),
        (2, "soliton propagation", soliton_propagation),
        (3, "temporal order", temporal_order),
        (4, "Leibniz equivalence", leibniz),
        (5, "weighted energy identity", main_equality),
        (6, "weight classes", weight_classes),
        (7, "uniqueness envelope", || from_experiment(Experiment::Uniqueness)),
        (8, "blow-up bound", || from_experiment(Experiment::BlowupBound)),
        (9, "Picard contraction", || from_experiment(Experiment::Picard)),
        (10, "persistence", || from_experiment(Experiment::Persistence)),
        (11, "gain of regularity", || from_experiment(Experiment::Gain)),
        (12, "embedding corpora", embedding_corpora),
        (13, "determinism", determinism),
    ];
    let mut unexpected = Vec::new();
    for (id, name, f) in criteria {
        let start = Instant::now();
        let (passed, detail) = match f() {
            Ok(c) => (c.passed, c.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let known = KNOWN_FAILURES.contains(&id);
        let tag = match (passed, known) {
            (true, false) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
            (true, true) => "PASS (listed as known failure)",
        };
        println!("criterion {id:>2} {name:<26} {tag}  [{:.1}s] {detail}", start.elapsed().as_secs_f64());
        if passed == known {
            unexpected.push(id);
        }
    }
    if unexpected.is_empty() {
        println!("acceptance: all criteria as expected; known failures {KNOWN_FAILURES:?}");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected outcome for criteria {unexpected:?}");
        ExitCode::FAILURE
    }
}
