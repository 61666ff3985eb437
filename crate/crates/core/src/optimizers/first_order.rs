//! First-order references. These use the gradient oracle and exist to check
//! the zeroth-order runs against their unbiased counterparts.

use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::point::Point;
use crate::rng::{Rng, Role};
use crate::sampling::{draw_minibatch, MiniBatch};

use super::{descend, Recorder, RunConfig, RunTrace};

fn batch_gradient(obj: &Objective, batch: &MiniBatch, x: &[f64]) -> Result<Vec<f64>> {
    let mut acc = vec![0.0; obj.dim()];
    for &i in batch.indices() {
        let g = obj.component_gradient(i, x)?;
        acc.iter_mut().zip(&g).for_each(|(a, gi)| *a += gi);
    }
    let b = batch.len() as f64;
    acc.iter_mut().for_each(|a| *a /= b);
    Ok(acc)
}

/// `∇f_I(x) − ∇f_I(x_anchor) + g`
pub fn svrg_blend(
    obj: &Objective,
    batch: &MiniBatch,
    x: &[f64],
    x_anchor: &[f64],
    anchor_grad: &[f64],
) -> Result<Vec<f64>> {
    let a = batch_gradient(obj, batch, x)?;
    let c = batch_gradient(obj, batch, x_anchor)?;
    Ok(a.iter().zip(&c).zip(anchor_grad).map(|((a, c), g)| (a - c) + g).collect())
}

fn require_gradient(obj: &Objective) -> Result<()> {
    if obj.has_gradient() {
        Ok(())
    } else {
        Err(Error::Config("first-order runs need an objective with a gradient evaluator".into()))
    }
}

/// Mini-batch SVRG with exact component gradients. The trace's query
/// column counts component-gradient calls.
pub fn run_svrg_first_order(cfg: &RunConfig, obj: &Objective) -> Result<RunTrace> {
    cfg.validate(obj)?;
    require_gradient(obj)?;
    let mut rec = Recorder::new(obj, cfg);
    let n = obj.n();
    let full = MiniBatch::full(n);
    let mut snapshot: Point = cfg.x0.clone();

    for s in 1..=cfg.epochs() {
        let anchor = batch_gradient(obj, &full, &snapshot)?;
        rec.add_queries(n as u64);
        let mut x = snapshot.clone();
        for k in 0..cfg.epoch_steps(s) {
            let mut batch_rng = Rng::for_stream(cfg.seed, s as u64, k as u64, Role::MiniBatch);
            let batch = draw_minibatch(&mut batch_rng, n, cfg.batch_size, cfg.sampling)?;
            let v = svrg_blend(obj, &batch, &x, &snapshot, &anchor)?;
            rec.add_queries(2 * batch.len() as u64);
            rec.begin_step(&x);
            descend(&mut x, cfg.step.at(k), &v);
            rec.end_step(s, k, &x)?;
        }
        snapshot = x;
    }
    rec.finish()
}

/// Mini-batch SGD with exact component gradients.
pub fn run_sgd_first_order(cfg: &RunConfig, obj: &Objective) -> Result<RunTrace> {
    cfg.validate(obj)?;
    require_gradient(obj)?;
    let mut rec = Recorder::new(obj, cfg);
    let n = obj.n();
    let mut x = cfg.x0.clone();
    for t in 0..cfg.iterations {
        let mut batch_rng = Rng::for_stream(cfg.seed, 0, t as u64, Role::MiniBatch);
        let batch = draw_minibatch(&mut batch_rng, n, cfg.batch_size, cfg.sampling)?;
        let g = batch_gradient(obj, &batch, &x)?;
        rec.add_queries(batch.len() as u64);
        rec.begin_step(&x);
        descend(&mut x, cfg.step.at(t), &g);
        rec.end_step(t / cfg.epoch_len + 1, t % cfg.epoch_len, &x)?;
    }
    rec.finish()
}
