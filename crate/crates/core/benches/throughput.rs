//! Sequential vs. data-parallel throughput of the hot loops.
//!
//! Parallel variants only differ from sequential ones when the `parallel`
//! feature is on; without it both rows measure the same code path.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use inverse_teleport::noise::NoiseConfig;
use inverse_teleport::parallel::Execution;
use inverse_teleport::protocol::UnitaryOracle;
use inverse_teleport::qmath::{preset_u1, DensityMatrix};
use inverse_teleport::runner::{cmd_invert, cmd_tomography, Preset, RunConfig, UnitarySpec};
use inverse_teleport::tomography::{mle_reconstruct, simulate_counts, HeraldedInverse};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn invert_batch(c: &mut Criterion) {
    let mut group = c.benchmark_group("invert");
    group.sample_size(10);
    for trials in [10_000u64, 100_000] {
        group.throughput(Throughput::Elements(trials));
        for (name, execution) in MODES {
            let cfg = RunConfig {
                unitary: UnitarySpec::Preset(Preset::U1),
                trials,
                execution,
                ..Default::default()
            };
            group.bench_with_input(BenchmarkId::new(name, trials), &cfg, |b, cfg| {
                b.iter(|| black_box(cmd_invert(cfg).unwrap()))
            });
        }
    }
    group.finish();
}

fn counts(c: &mut Criterion) {
    let channel = HeraldedInverse::new(
        UnitaryOracle::new(preset_u1()).unwrap(),
        NoiseConfig::output(0.0311).unwrap(),
    );
    let apply = |rho: &DensityMatrix| channel.apply(rho);
    let mut group = c.benchmark_group("simulate_counts");
    for (name, execution) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| black_box(simulate_counts(apply, 100_000, 7, execution).unwrap()))
        });
    }
    group.finish();
}

fn mle(c: &mut Criterion) {
    let inv = preset_u1().adjoint();
    let table = simulate_counts(
        |rho: &DensityMatrix| rho.conjugate_by(&inv),
        100_000,
        7,
        Execution::Sequential,
    )
    .unwrap();
    let mut group = c.benchmark_group("mle");
    group.sample_size(20);
    group.bench_function("u1_1e5_shots", |b| b.iter(|| black_box(mle_reconstruct(&table).unwrap())));
    group.finish();
}

fn tomography(c: &mut Criterion) {
    let mut group = c.benchmark_group("tomography");
    group.sample_size(10);
    for (name, execution) in MODES {
        let cfg = RunConfig {
            unitary: UnitarySpec::Preset(Preset::U2),
            execution,
            ..Default::default()
        };
        group.bench_function(name, |b| b.iter(|| black_box(cmd_tomography(&cfg).unwrap())));
    }
    group.finish();
}

criterion_group!(benches, invert_batch, counts, mle, tomography);
criterion_main!(benches);
