use zokit_core::rng::Rng;
use zokit_core::sampling::{delta_n, draw_minibatch, sample_unit_ball, sample_unit_sphere, MiniBatch, SamplingMode};

#[test]
fn sphere_second_moment_is_isotropic() {
    let d = 6;
    let draws = 1_000_000;
    let mut rng = Rng::seed_from(11);
    let mut second = vec![0.0; d * d];
    let mut first = vec![0.0; d];
    for _ in 0..draws {
        let u = sample_unit_sphere(&mut rng, d).unwrap();
        assert!((u.norm_sq() - 1.0).abs() < 1e-12);
        for a in 0..d {
            first[a] += u[a];
            for b in 0..d {
                second[a * d + b] += u[a] * u[b];
            }
        }
    }
    let n = draws as f64;
    for a in 0..d {
        assert!((first[a] / n).abs() < 5e-3, "mean component {a}");
        for b in 0..d {
            let want = if a == b { 1.0 / d as f64 } else { 0.0 };
            assert!((second[a * d + b] / n - want).abs() < 5e-3, "E[uu^T][{a},{b}]");
        }
    }
}

#[test]
fn ball_radius_follows_power_law() {
    // P(‖v‖ ≤ r) = r^d for the uniform ball.
    let d = 3;
    let mut rng = Rng::seed_from(12);
    let draws = 200_000;
    let inside_half = (0..draws).filter(|_| sample_unit_ball(&mut rng, d).unwrap().norm() <= 0.5).count();
    let p = inside_half as f64 / draws as f64;
    let se = (0.125f64 * 0.875 / draws as f64).sqrt();
    assert!((p - 0.125).abs() < 5.0 * se, "{p}");
}

/// All index tuples of length b from 0..n (ordered, with repetition) or all
/// b-subsets, each equally likely.
fn enumerate_batches(n: usize, b: usize, mode: SamplingMode) -> Vec<Vec<usize>> {
    fn rec(n: usize, b: usize, start: usize, distinct: bool, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == b {
            out.push(cur.clone());
            return;
        }
        for i in (if distinct { start } else { 0 })..n {
            cur.push(i);
            rec(n, b, i + 1, distinct, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, b, 0, mode == SamplingMode::WithoutReplacement, &mut Vec::new(), &mut out);
    out
}

#[test]
fn minibatch_mean_variance_identity() {
    // For zero-mean a_i: E‖(1/b)Σ_{i∈I} a_i‖² equals (1/(bn))Σ‖a_i‖² with
    // replacement and (n−b)/(b(n−1))·(1/n)Σ‖a_i‖² without.
    let mut rng = Rng::seed_from(13);
    for n in 1..=4usize {
        for b in 1..=3usize {
            let mut a: Vec<[f64; 2]> = (0..n).map(|_| [rng.standard_normal(), rng.standard_normal()]).collect();
            let mean = [a.iter().map(|v| v[0]).sum::<f64>() / n as f64, a.iter().map(|v| v[1]).sum::<f64>() / n as f64];
            a.iter_mut().for_each(|v| {
                v[0] -= mean[0];
                v[1] -= mean[1];
            });
            let avg_sq = a.iter().map(|v| v[0] * v[0] + v[1] * v[1]).sum::<f64>() / n as f64;
            for mode in [SamplingMode::WithReplacement, SamplingMode::WithoutReplacement] {
                if mode == SamplingMode::WithoutReplacement && b > n {
                    continue;
                }
                let batches = enumerate_batches(n, b, mode);
                let mut mean_vec = [0.0; 2];
                let mut second = 0.0;
                for batch in &batches {
                    let s = batch.iter().fold([0.0, 0.0], |acc, &i| [acc[0] + a[i][0], acc[1] + a[i][1]]);
                    let s = [s[0] / b as f64, s[1] / b as f64];
                    mean_vec[0] += s[0];
                    mean_vec[1] += s[1];
                    second += s[0] * s[0] + s[1] * s[1];
                }
                let k = batches.len() as f64;
                assert!(mean_vec[0].abs() / k < 1e-12 && mean_vec[1].abs() / k < 1e-12);
                let expected = match mode {
                    SamplingMode::WithReplacement => avg_sq / b as f64,
                    SamplingMode::WithoutReplacement if n == 1 => 0.0,
                    SamplingMode::WithoutReplacement => (n - b) as f64 / (b * (n - 1)) as f64 * avg_sq,
                };
                assert!((second / k - expected).abs() < 1e-12, "n={n} b={b} {mode:?}");
                // δ_n bounds the factor in front of avg_sq / b.
                assert!(second / k <= delta_n(mode, b, n) as f64 * avg_sq / b as f64 + 1e-12);
            }
        }
    }
}

#[test]
fn without_replacement_draws_are_uniform_subsets() {
    let (n, b) = (5, 2);
    let mut rng = Rng::seed_from(14);
    let mut counts = std::collections::HashMap::new();
    let draws = 100_000;
    for _ in 0..draws {
        let mut idx = draw_minibatch(&mut rng, n, b, SamplingMode::WithoutReplacement).unwrap().indices().to_vec();
        idx.sort();
        assert!(idx[0] != idx[1]);
        *counts.entry(idx).or_insert(0usize) += 1;
    }
    assert_eq!(counts.len(), 10);
    let chi2: f64 = counts.values().map(|&c| (c as f64 - 10_000.0).powi(2) / 10_000.0).sum();
    // 9 degrees of freedom, p = 0.001
    assert!(chi2 < 27.88, "chi2 = {chi2}");
}

#[test]
fn full_batch_covers_every_component() {
    let full = MiniBatch::full(7);
    assert_eq!(full.indices(), &[0, 1, 2, 3, 4, 5, 6]);
    assert_eq!(delta_n(full.mode(), 7, 7), 0);
}
