//! Per-call cost of the three gradient estimators on the synthetic problem.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use zokit_core::estimators::{estimate_batch, estimate_component, EstimatorSpec};
use zokit_core::problems::synthetic_preset;
use zokit_core::sampling::{draw_minibatch, SamplingMode};
use zokit_core::{Objective, Point, Rng};

fn estimators(c: &mut Criterion) {
    let preset = synthetic_preset(0).unwrap();
    let obj = Objective::from_problem(preset.train);
    let (n, d) = (obj.n(), obj.dim());
    let x = Point::zeros(d);
    let specs = [
        EstimatorSpec::Rand { mu: 1e-3 },
        EstimatorSpec::AvgRand { mu: 1e-3, q: 10 },
        EstimatorSpec::coord_uniform(1e-3, d),
    ];
    let mut group = c.benchmark_group("component");
    for spec in &specs {
        let mut rng = Rng::seed_from(0);
        group.bench_function(spec.name(), |b| {
            b.iter(|| estimate_component(spec, &obj, black_box(7), &x, &mut rng).unwrap())
        });
    }
    group.finish();

    let mut group = c.benchmark_group("batch_b10");
    for spec in &specs {
        let mut rng = Rng::seed_from(1);
        let batch = draw_minibatch(&mut rng, n, 10, SamplingMode::WithReplacement).unwrap();
        group.bench_function(spec.name(), |b| b.iter(|| estimate_batch(spec, &obj, &batch, &x, &mut rng).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, estimators);
criterion_main!(benches);
