use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use twinch_core::sim::{linspace, ratio_map, staged_phases};
use twinch_core::*;

fn string() -> StringParams {
    StringParams::rigid(0.5, 1e-3).unwrap()
}

fn winch() -> WinchGeometry {
    WinchGeometry::new(5e-3, 20e-3, 0.1).unwrap()
}

fn twisted_length(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_twisted_length");
    let opts = SolverOptions::default();
    let limit = twist_limit(0.5, 1e-3, 0.0);
    for frac in [0.1, 0.5, 0.9, 0.98] {
        let theta = frac * limit;
        group.bench_with_input(BenchmarkId::from_parameter(frac), &theta, |b, &theta| {
            b.iter(|| solve_twisted_length(black_box(0.5), 1e-3, black_box(theta), &opts))
        });
    }
    group.finish();
}

fn total_contraction(c: &mut Criterion) {
    let params = StringParams::new(0.5, 1e-3, Stiffness::Finite(60e3)).unwrap();
    let load = LoadCondition::axial(20.0).unwrap();
    let w = winch();
    c.bench_function("solve_total_contraction", |b| {
        b.iter(|| solve_total_contraction(&params, &w, &load, black_box(150.0), black_box(8.0)))
    });
}

fn velocity_law(c: &mut Criterion) {
    let state = solve_total_contraction(&string(), &winch(), &LoadCondition::default(), 150.0, 0.0)
        .unwrap();
    let settings = ControlSettings::default();
    let policy = AllocationPolicy::default();
    c.bench_function("velocity_command", |b| {
        b.iter(|| velocity_command(black_box(5e-3), &policy, &state, 1e-6, 5e-3, &settings))
    });
}

fn scenarios(c: &mut Criterion) {
    let mut group = c.benchmark_group("scenario");
    group.sample_size(10);
    let mut staged = Scenario::new(
        string(),
        winch(),
        staged_phases(5e-3, 90.56e-3, 2.0, 1.0, 200.0, 4.0),
    );
    staged.dt = 5e-3;
    group.bench_function("staged_run", |b| b.iter(|| run(black_box(&staged))));

    let thetas = linspace(0.0, 200.0, 21);
    let phis = linspace(0.0, 20.0, 5);
    group.bench_function("ratio_map_21x5", |b| {
        b.iter(|| ratio_map(&string(), &winch(), &LoadCondition::default(), &thetas, &phis))
    });
    group.finish();
}

criterion_group!(benches, twisted_length, total_contraction, velocity_law, scenarios);
criterion_main!(benches);
