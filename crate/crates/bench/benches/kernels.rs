use std::hint::black_box;

use bellkit_core::bell::{gamma_coefficients, local_bounds_enumerated};
use bellkit_core::fixtures;
use bellkit_core::optimize::maximize;
use bellkit_core::polytope::affine_dimension;
use bellkit_core::quantum::probability_table;
use bellkit_core::{OptimizationConfig, Scenario};
use criterion::{criterion_group, criterion_main, Criterion};

fn bounds(c: &mut Criterion) {
    let i = fixtures::inequality_i();
    c.bench_function("gamma_coefficients/33|33", |b| {
        b.iter(|| gamma_coefficients(black_box(&i)))
    });
    c.bench_function("local_bounds_enumerated/33|33", |b| {
        b.iter(|| local_bounds_enumerated(black_box(&i)))
    });
}

fn quantum(c: &mut Criterion) {
    let s = fixtures::settings_inequality();
    c.bench_function("probability_table/D=3", |b| {
        b.iter(|| probability_table(black_box(&s)).unwrap())
    });
}

fn rank(c: &mut Criterion) {
    let s = Scenario::uniform(3).unwrap();
    c.bench_function("affine_dimension/33|33", |b| {
        b.iter(|| affine_dimension(black_box(s)).unwrap())
    });
}

fn search(c: &mut Criterion) {
    let i = fixtures::inequality_i();
    let config = OptimizationConfig {
        restarts: 1,
        max_iterations: 500,
        ..OptimizationConfig::default()
    };
    let mut g = c.benchmark_group("maximize");
    g.sample_size(20);
    g.bench_function("I/1x500", |b| {
        b.iter(|| maximize(black_box(&i), None, &config).unwrap())
    });
    g.finish();
}

criterion_group!(benches, bounds, quantum, rank, search);
criterion_main!(benches);
