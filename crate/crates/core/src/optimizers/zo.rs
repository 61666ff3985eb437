use crate::error::Result;
use crate::estimators::{estimate_batch, estimate_batch_pair, EstimatorSpec};
use crate::objective::Objective;
use crate::point::Point;
use crate::rng::{Rng, Role};
use crate::sampling::{draw_minibatch, MiniBatch};

use super::{descend, Recorder, RunConfig, RunTrace};

/// Blended estimate `∇̂f_I(x) − ∇̂f_I(x_anchor) + ĝ`. The two mini-batch
/// estimates share each component's directions, so at `x == x_anchor` the
/// result is bitwise `ĝ`.
pub fn zo_blend(
    spec: &EstimatorSpec,
    obj: &Objective,
    batch: &MiniBatch,
    x: &[f64],
    x_anchor: &[f64],
    anchor_grad: &[f64],
    rng: &mut Rng,
) -> Result<(Vec<f64>, u64)> {
    let (at_x, at_anchor, queries) = estimate_batch_pair(spec, obj, batch, x, x_anchor, rng)?;
    let v = at_x.iter().zip(&at_anchor).zip(anchor_grad).map(|((a, c), g)| (a - c) + g).collect();
    Ok((v, queries))
}

/// ZO-SVRG. Per epoch `s`: a full-batch estimate `ĝ_s` at the snapshot, then
/// `m` blended steps `x ← x − η_k v̂_k^s`.
pub fn run_zo_svrg(cfg: &RunConfig, obj: &Objective) -> Result<RunTrace> {
    cfg.validate(obj)?;
    let _guard = obj.arm_zo_guard();
    let mut rec = Recorder::new(obj, cfg);
    let n = obj.n();
    let full = MiniBatch::full(n);
    let mut snapshot = cfg.x0.clone();

    for s in 1..=cfg.epochs() {
        let mut anchor_rng = Rng::for_stream(cfg.seed, s as u64, 0, Role::Anchor);
        let anchor = match estimate_batch(&cfg.estimator, obj, &full, &snapshot, &mut anchor_rng) {
            Ok(g) => g,
            Err(e) => return Err(rec.absorb(e)),
        };
        rec.add_queries(anchor.queries_used);

        let mut x = snapshot.clone();
        for k in 0..cfg.epoch_steps(s) {
            let mut batch_rng = Rng::for_stream(cfg.seed, s as u64, k as u64, Role::MiniBatch);
            let batch = draw_minibatch(&mut batch_rng, n, cfg.batch_size, cfg.sampling)?;
            let mut dir_rng = Rng::for_stream(cfg.seed, s as u64, k as u64, Role::Directions);
            let (v, q) = match zo_blend(&cfg.estimator, obj, &batch, &x, &snapshot, &anchor.vector, &mut dir_rng) {
                Ok(r) => r,
                Err(e) => return Err(rec.absorb(e)),
            };
            rec.add_queries(q);
            rec.begin_step(&x);
            descend(&mut x, cfg.step.at(k), &v);
            rec.end_step(s, k, &x)?;
        }
        snapshot = x;
    }
    debug_assert!(!obj.trap_tripped());
    rec.finish()
}

/// ZO-SGD: `x ← x − η ∇̂f_I(x)`, no snapshots. Epoch numbers in the trace
/// are `⌊t/m⌋ + 1` and serve only as a plotting axis.
pub fn run_zo_sgd(cfg: &RunConfig, obj: &Objective) -> Result<RunTrace> {
    cfg.validate(obj)?;
    let _guard = obj.arm_zo_guard();
    let mut rec = Recorder::new(obj, cfg);
    let n = obj.n();
    let mut x: Point = cfg.x0.clone();

    for t in 0..cfg.iterations {
        let mut batch_rng = Rng::for_stream(cfg.seed, 0, t as u64, Role::MiniBatch);
        let batch = draw_minibatch(&mut batch_rng, n, cfg.batch_size, cfg.sampling)?;
        let mut dir_rng = Rng::for_stream(cfg.seed, 0, t as u64, Role::Directions);
        let g = match estimate_batch(&cfg.estimator, obj, &batch, &x, &mut dir_rng) {
            Ok(g) => g,
            Err(e) => return Err(rec.absorb(e)),
        };
        rec.add_queries(g.queries_used);
        rec.begin_step(&x);
        descend(&mut x, cfg.step.at(t), &g.vector);
        rec.end_step(t / cfg.epoch_len + 1, t % cfg.epoch_len, &x)?;
    }
    rec.finish()
}
