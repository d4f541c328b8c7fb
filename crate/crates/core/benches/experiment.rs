use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use rbmtls::experiment::{self, ExperimentConfig, NoiseCase};
use rbmtls::{solve_mtls, SolveOptions};

fn bench_config() -> ExperimentConfig {
    ExperimentConfig {
        m_values: vec![90, 110],
        trials: 4,
        case: NoiseCase::RhsAndSubset,
        ..Default::default()
    }
}

fn sweep(c: &mut Criterion) {
    let cfg = bench_config();
    let mut group = c.benchmark_group("experiment_sweep");
    group.sample_size(10);
    group.bench_function("sequential", |b| {
        b.iter(|| experiment::run_experiment_sequential(black_box(&cfg)).unwrap())
    });
    #[cfg(feature = "parallel")]
    group.bench_function("parallel", |b| {
        b.iter(|| experiment::run_experiment_parallel(black_box(&cfg)).unwrap())
    });
    group.finish();
}

fn single_solve(c: &mut Criterion) {
    let cfg = bench_config();
    let inst = experiment::generate_instance(&cfg, 150, 1).unwrap();
    let opts = SolveOptions::default();
    c.bench_function("solve_mtls_m150", |b| {
        b.iter(|| solve_mtls(black_box(&inst.problem), &opts).unwrap())
    });
}

criterion_group!(benches, sweep, single_solve);
criterion_main!(benches);
