//! Sequential vs rayon execution of the data-parallel hot paths.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use condtele::cv::{
    average_fidelity_with, boundary_scan, default_quadrature, QuadratureOptions, Route, TeleportConfig,
};
use condtele::{ComplexAmplitude, Execution, InputState, Parity, ResourceKind, SchmidtResource, TruncationPolicy};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn average_fidelity(c: &mut Criterion) {
    let policy = TruncationPolicy::default();
    let alpha = ComplexAmplitude::real(1.5).unwrap();
    let cat = InputState::cat(alpha, Parity::Even).unwrap();
    let mut group = c.benchmark_group("average_fidelity");
    group.sample_size(10);
    for kind in [ResourceKind::PhotonSubtracted, ResourceKind::PhotonAdded] {
        let res = SchmidtResource::build(kind, 0.8, &policy).unwrap();
        let cfg = TeleportConfig::new(1.0, cat.clone(), res).unwrap();
        let quad = default_quadrature(&cat, 0.8, &QuadratureOptions::default()).unwrap();
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(kind.label(), name), &exec, |b, &exec| {
                b.iter(|| average_fidelity_with(&cfg, &cat, &quad, Route::Auto, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn boundary(c: &mut Criterion) {
    let policy = TruncationPolicy::default();
    let alpha = ComplexAmplitude::real(3.0).unwrap();
    let grid: Vec<f64> = (1..=95).map(|i| i as f64 * 0.01).collect();
    let opts = QuadratureOptions::default();
    let mut group = c.benchmark_group("boundary_scan");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| boundary_scan(black_box(alpha), &grid, &opts, &policy, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, average_fidelity, boundary);
criterion_main!(benches);
