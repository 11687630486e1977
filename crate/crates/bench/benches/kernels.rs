use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use qmeas_core::grid;
use qmeas_core::measurement::ozawa_terms;
use qmeas_core::numerics::mat_exp;
use qmeas_core::{
    CascadeScenario, GridConfig, GridState, GridUnitary, MeasurementModel, ModeGaussian,
    ModeSystem, MomentState, QuadraticHamiltonian, DEFAULT_TOL,
};

fn states() -> (MomentState, MomentState) {
    let object = MomentState::single_mode("object", ModeGaussian::new(0.3, -0.1, 1.2, 0.6, 0.2), 1.0).unwrap();
    let probe = MomentState::single_mode("probe", ModeGaussian::minimum_uncertainty(0.4, 1.0), 1.0).unwrap();
    (object, probe)
}

fn moment_kernels(c: &mut Criterion) {
    let sys = ModeSystem::natural(["object", "probe"]).unwrap();
    let h = QuadraticHamiltonian::build(&sys, &ozawa_terms()).unwrap();
    let generator = h.generator();
    c.bench_function("mat_exp 4x4 generator", |b| {
        b.iter(|| mat_exp(black_box(&generator), DEFAULT_TOL).unwrap())
    });
    c.bench_function("propagate position swap", |b| b.iter(|| h.propagate(black_box(1.0)).unwrap()));

    let model = MeasurementModel::ozawa(1.0).unwrap();
    let (object, probe) = states();
    c.bench_function("heisenberg verdict", |b| {
        b.iter(|| model.heisenberg_verdict(black_box(&object), black_box(&probe)).unwrap())
    });
    let cascade = CascadeScenario::new(model.clone(), object, probe).unwrap();
    c.bench_function("cascade repeatability", |b| {
        b.iter(|| black_box(&cascade).repeatability_deviation().unwrap())
    });
}

fn grid_kernels(c: &mut Criterion) {
    let object = ModeGaussian::minimum_uncertainty(1.0, 1.0);
    let probe = ModeGaussian::minimum_uncertainty(0.5, 1.0);
    let config = GridConfig::for_spreads(object.sigma_x, probe.sigma_x, 256, 12.0);
    let state = GridState::init_gaussian(&object, &probe, config).unwrap();
    let mut group = c.benchmark_group("grid 256x256");
    group.sample_size(20);
    group.bench_function("position swap unitary", |b| {
        b.iter(|| GridUnitary::Ozawa.applied(black_box(&state)).unwrap())
    });
    group.bench_function("noise", |b| {
        b.iter(|| grid::grid_noise(black_box(&state), GridUnitary::Ozawa).unwrap())
    });
    group.bench_function("moments", |b| b.iter(|| black_box(&state).moments()));
    group.finish();
}

criterion_group!(benches, moment_kernels, grid_kernels);
criterion_main!(benches);
