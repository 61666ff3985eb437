//! Whole-run cost of ZO-SVRG and ZO-SGD on the synthetic problem.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use zokit_core::optimizers::{run_zo_sgd, run_zo_svrg, OutputRule, RunConfig, StepSchedule};
use zokit_core::problems::synthetic_preset;
use zokit_core::{EstimatorSpec, Objective, Point};

fn config(d: usize, b: usize) -> RunConfig {
    let iterations = 200;
    let mut cfg = RunConfig::new(Point::zeros(d), EstimatorSpec::Rand { mu: 1.0 / ((d * iterations) as f64).sqrt() });
    cfg.iterations = iterations;
    cfg.epoch_len = 50;
    cfg.step = StepSchedule::Constant(0.01);
    cfg.batch_size = b;
    cfg.output_rule = OutputRule::LastIterate;
    cfg.record_grad_norm = false;
    cfg
}

fn runs(c: &mut Criterion) {
    let preset = synthetic_preset(0).unwrap();
    let obj = Objective::from_problem(preset.train);
    let d = obj.dim();
    let mut group = c.benchmark_group("run_T200");
    group.sample_size(10);
    for b in [1, 10, 40] {
        let cfg = config(d, b);
        group.bench_with_input(BenchmarkId::new("zo_svrg", b), &cfg, |bench, cfg| {
            bench.iter(|| run_zo_svrg(cfg, &obj).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("zo_sgd", b), &cfg, |bench, cfg| {
            bench.iter(|| run_zo_sgd(cfg, &obj).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, runs);
criterion_main!(benches);
