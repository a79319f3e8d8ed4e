//! Hot kernels on one worker versus the full pool. Build with
//! `--no-default-features` to time the plain sequential fallback instead.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use kpilab::dynamics::{rhs, step, SolverConfig};
use kpilab::initial::{band_limited, InitialData};
use kpilab::spectral::weighted_integral;
use kpilab::weights::{build_weight, WeightSpec};
use kpilab::{par, Field, Grid};

fn pools() -> Vec<(&'static str, usize)> {
    let all = par::current_threads();
    if all > 1 {
        vec![("1 thread", 1), ("pool", all)]
    } else {
        vec![("1 thread", 1)]
    }
}

fn grids() -> Vec<Grid> {
    [(256, 64), (1024, 128)]
        .iter()
        .map(|&(nx, ny)| Grid::new(nx, ny, 20.0, 10.0).unwrap())
        .collect()
}

fn label(g: &Grid) -> String {
    format!("{}x{}", g.nx(), g.ny())
}

fn gaussian(g: &Grid) -> Field {
    InitialData::Gaussian { amplitude: 0.5, x_width: 1.5, y_width: 1.5, x0: 0.0 }.realize(g).unwrap()
}

fn bench_fft(c: &mut Criterion) {
    let mut group = c.benchmark_group("fft_round_trip");
    for g in grids() {
        let u = band_limited(&g, 20, 10, 1, true);
        let values = u.physical().into_owned();
        for (name, n) in pools() {
            group.bench_with_input(BenchmarkId::new(name, label(&g)), &values, |b, v| {
                par::with_threads(n, || {
                    b.iter(|| {
                        let f = Field::from_physical(&g, v.clone(), 0.0).unwrap().into_spectral();
                        black_box(f.into_physical())
                    })
                })
            });
        }
    }
    group.finish();
}

fn bench_rhs(c: &mut Criterion) {
    let mut group = c.benchmark_group("rhs");
    for g in grids() {
        let u = gaussian(&g);
        for (name, n) in pools() {
            group.bench_with_input(BenchmarkId::new(name, label(&g)), &u, |b, u| {
                par::with_threads(n, || b.iter(|| black_box(rhs(u).unwrap())))
            });
        }
    }
    group.finish();
}

fn bench_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("if_rk4_step");
    let cfg = SolverConfig::default();
    for g in grids() {
        let u = gaussian(&g);
        for (name, n) in pools() {
            group.bench_with_input(BenchmarkId::new(name, label(&g)), &u, |b, u| {
                par::with_threads(n, || b.iter(|| black_box(step(u, 1e-3, &cfg).unwrap())))
            });
        }
    }
    group.finish();
}

fn bench_quadrature(c: &mut Criterion) {
    let mut group = c.benchmark_group("weighted_quadrature");
    for g in grids() {
        let u = gaussian(&g);
        let w = build_weight(WeightSpec::new(1.0, 2, 1), &g, 0.5).unwrap().table(&g).f(0.5);
        for (name, n) in pools() {
            group.bench_with_input(BenchmarkId::new(name, label(&g)), &u, |b, u| {
                par::with_threads(n, || b.iter(|| black_box(weighted_integral(u, u, Some(&w), 1.0).unwrap())))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench_fft, bench_rhs, bench_step, bench_quadrature);
criterion_main!(benches);
