use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use kinsplit_bench::{gaussian_state, hydrogen_state, pib_state};
use kinsplit_core::dynamics::{cn_propagate, PIB_DT};
use kinsplit_core::functionals::{deformed_kinetic, osmotic_term, pointwise_residual};
use kinsplit_core::{decompose, RealField};

fn line_states(c: &mut Criterion) {
    let mut group = c.benchmark_group("decompose_1d");
    for (name, w) in [("gaussian", gaussian_state(1.5)), ("pib", pib_state(0.075))] {
        group.bench_with_input(BenchmarkId::from_parameter(name), &w, |b, w| {
            b.iter(|| decompose(black_box(w)).unwrap())
        });
    }
    group.finish();

    let w = pib_state(0.075);
    c.bench_function("pointwise_residual_pib", |b| b.iter(|| pointwise_residual(black_box(&w)).unwrap()));
    let u = osmotic_term(&w).unwrap();
    c.bench_function("deformed_kinetic_pib", |b| b.iter(|| deformed_kinetic(black_box(&w), &u).unwrap()));
}

fn hydrogen(c: &mut Criterion) {
    let mut group = c.benchmark_group("decompose_hydrogen");
    group.sample_size(10);
    for theta_points in [101, 201] {
        let w = hydrogen_state(2, 1, 1, theta_points);
        group.bench_with_input(BenchmarkId::from_parameter(theta_points), &w, |b, w| {
            b.iter(|| decompose(black_box(w)).unwrap())
        });
    }
    group.finish();
}

fn propagation(c: &mut Criterion) {
    let w = pib_state(0.0);
    let v = RealField::zeros(w.grid().len());
    c.bench_function("cn_pib_100_steps", |b| {
        b.iter(|| cn_propagate(black_box(&w), &v, PIB_DT, 100).unwrap())
    });
}

criterion_group!(benches, line_states, hydrogen, propagation);
criterion_main!(benches);
