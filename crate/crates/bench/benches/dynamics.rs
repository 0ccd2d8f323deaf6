use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use eos_bench::relu_fixture;
use eos_core::mean_model::{kappa_interp, mm_step, threshold_eta, MeanModelConfig, MeanModelState};
use eos_core::numerics::erf;
use eos_core::single_neuron::{gd_step, initial_point, run, Record, Regime, State2D, StopRule};
use eos_core::LossSpec;

fn single_neuron(c: &mut Criterion) {
    let mut group = c.benchmark_group("single_neuron");
    for loss in [LossSpec::sqrt(), LossSpec::higher_order(2.0).unwrap()] {
        group.bench_with_input(BenchmarkId::new("gd_step", loss.to_string()), &loss, |b, loss| {
            b.iter(|| gd_step(black_box(State2D::new(0.3, 4.0)), loss, black_box(0.1)))
        });
    }
    let loss = LossSpec::higher_order(3.0).unwrap();
    for eta in [1e-1, 1e-2] {
        let s = initial_point(eta, 1.0, Regime::EdgeOfStability);
        let stop = StopRule { gap_rel_tol: Some(1e-3), record: Record::Ends, ..StopRule::default() };
        group.bench_with_input(BenchmarkId::new("run_to_convergence", eta), &eta, |b, &eta| {
            b.iter(|| run(s.x, s.y, &loss, eta, stop).unwrap())
        });
    }
    group.finish();
}

fn mean_model(c: &mut Criterion) {
    let d = 200;
    let cfg = MeanModelConfig::new(d, 1.25 * threshold_eta(d), 10.0);
    c.bench_function("mm_step", |b| b.iter(|| mm_step(black_box(MeanModelState { a: 10.0, b: -0.1 }), &cfg)));
    c.bench_function("kappa_interp", |b| b.iter(|| kappa_interp(black_box(-0.73))));
    c.bench_function("erf", |b| b.iter(|| erf(black_box(0.61))));
}

fn relu(c: &mut Criterion) {
    let (prep, p) = relu_fixture(7);
    c.bench_function("relu_evaluate_d200_n300", |b| b.iter(|| prep.evaluate(black_box(&p))));
}

criterion_group!(benches, single_neuron, mean_model, relu);
criterion_main!(benches);
