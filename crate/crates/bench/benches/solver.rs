use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use specsched::{
    estimate, slot_kernel, solve_optimal, Action, Belief, ChannelState, FadingParams, ModelConfig,
    ObservationMode, OccupancyParams, OccupancyState, PolicyKind, PolicySpec, SimConfig,
    SystemState,
};

fn instance() -> (ModelConfig, SystemState) {
    let cfg = ModelConfig::new(
        2,
        2,
        0.9,
        6,
        FadingParams::new(0.9, 0.1).unwrap(),
        OccupancyParams::new(1, 1.0, 2.0).unwrap(),
    )
    .unwrap();
    let initial = SystemState::new(
        vec![
            ChannelState {
                occupancy: OccupancyState::idle(10),
                belief: Belief::anchor(0.4).unwrap(),
            },
            ChannelState {
                occupancy: OccupancyState::idle(5),
                belief: Belief::anchor(0.7).unwrap(),
            },
        ],
        6,
    )
    .unwrap();
    (cfg, initial)
}

fn bench_kernel(c: &mut Criterion) {
    let (cfg, initial) = instance();
    c.bench_function("slot_kernel/original", |b| {
        b.iter(|| {
            slot_kernel(
                black_box(&initial),
                Action::Schedule(0),
                &cfg,
                ObservationMode::Original,
            )
            .unwrap()
        })
    });
    c.bench_function("slot_kernel/genie", |b| {
        b.iter(|| {
            slot_kernel(
                black_box(&initial),
                Action::Schedule(0),
                &cfg,
                ObservationMode::Genie,
            )
            .unwrap()
        })
    });
}

fn bench_solver(c: &mut Criterion) {
    let (cfg, initial) = instance();
    let mut group = c.benchmark_group("solve_optimal");
    group.sample_size(10);
    group.bench_function("original_m6", |b| {
        b.iter(|| solve_optimal(black_box(&cfg), &initial, ObservationMode::Original).unwrap())
    });
    group.bench_function("genie_m6", |b| {
        b.iter(|| solve_optimal(black_box(&cfg), &initial, ObservationMode::Genie).unwrap())
    });
    group.finish();
}

fn bench_simulation(c: &mut Criterion) {
    let (model, initial) = instance();
    let sim = SimConfig {
        trajectories: 1_000,
        seed: 7,
        model,
        initial,
        policy: PolicySpec {
            kind: PolicyKind::Greedy,
            mode: ObservationMode::Original,
        },
    };
    let mut group = c.benchmark_group("simulate");
    group.sample_size(20);
    group.bench_function("greedy_1k_trajectories", |b| {
        b.iter(|| estimate(black_box(&sim)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_kernel, bench_solver, bench_simulation);
criterion_main!(benches);
