use std::sync::Arc;

use zokit_core::problems::{
    attack_toy_preset, distortion_l2, eval_attack_loss, make_synthetic_nlls, read_dataset, synthetic_preset,
    write_dataset, AttackProblem, Classifier, ToySoftmax,
};
use zokit_core::{FiniteSum, Rng};

/// Direct transcription of the attack loss, independent of the library's
/// cached pre-images.
fn reference_attack_loss(clf: &dyn Classifier, a: &[f64], y: usize, x: &[f64], c: f64) -> f64 {
    let adv: Vec<f64> =
        a.iter().zip(x).map(|(ai, xi)| 0.5 * (0.5 * ((1.0 + 2.0 * ai) / (1.0 - 2.0 * ai)).ln() + xi).tanh()).collect();
    let s = clf.scores(&adv);
    let mut best_other = f64::NEG_INFINITY;
    for (k, v) in s.iter().enumerate() {
        if k != y && *v > best_other {
            best_other = *v;
        }
    }
    let dist: f64 = adv.iter().zip(a).map(|(p, q)| (p - q).powi(2)).sum();
    c * f64::max(s[y] - best_other, 0.0) + dist
}

#[test]
fn attack_loss_matches_reference_transcription() {
    let p = attack_toy_preset(9).unwrap();
    let clf = ToySoftmax::reference(16, 3);
    let mut rng = Rng::seed_from(1);
    for _ in 0..500 {
        let x: Vec<f64> = (0..16).map(|_| 2.0 * rng.standard_normal()).collect();
        let i = rng.below(p.n());
        let got = eval_attack_loss(&p, i, &x).unwrap();
        let want = reference_attack_loss(&clf, p.image(i), p.label(i), &x, 1.0);
        assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0), "{got} vs {want}");
        assert_eq!(got, p.eval_component(i, &x));
    }
}

#[test]
fn adversarial_images_stay_in_box() {
    let p = attack_toy_preset(10).unwrap();
    let mut rng = Rng::seed_from(2);
    for _ in 0..10_000 {
        let x: Vec<f64> = (0..16).map(|_| 20.0 * rng.standard_normal()).collect();
        let i = rng.below(p.n());
        assert!(p.adversarial(i, &x).iter().all(|v| (-0.5..=0.5).contains(v)));
    }
}

#[test]
fn strong_perturbation_flips_labels_and_reports_distortion() {
    let p = attack_toy_preset(11).unwrap();
    let clf = p.classifier().clone();
    let y = p.label(0);
    // Push every pixel toward the direction favouring another class.
    let other = (y + 1) % 3;
    let probe = |sign: f64| -> Vec<f64> {
        (0..16)
            .map(|j| {
                let mut e = vec![0.0; 16];
                e[j] = 1e-3;
                let up = clf.scores(&e);
                sign * ((up[other] - up[y]).signum()) * 3.0
            })
            .collect()
    };
    let x = probe(1.0);
    let hits = (0..p.n()).filter(|&i| p.is_successful(i, &x)).count();
    assert!(hits > 0);
    let all = distortion_l2(&p, &x, false).unwrap();
    let succ = distortion_l2(&p, &x, true).unwrap();
    assert!(all > 0.0 && succ > 0.0);
}

#[test]
fn construction_rejects_out_of_box_images() {
    let clf: Arc<dyn Classifier> = Arc::new(ToySoftmax::reference(3, 2));
    assert!(AttackProblem::new(vec![vec![0.1, 0.49, -0.5]], vec![1], clf, 1.0).is_err());
}

#[test]
fn dataset_round_trip_is_lossless() {
    let mut rng = Rng::seed_from(3);
    let p = make_synthetic_nlls(&mut rng, 17, 4, 0.7).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("data.csv");
    write_dataset(&path, &p).unwrap();
    assert_eq!(read_dataset(&path).unwrap(), p);
}

#[test]
fn synthetic_preset_is_learnable() {
    let preset = synthetic_preset(0).unwrap();
    // The planted direction separates the classes; the origin does not.
    let zero = vec![0.0; 145];
    assert_eq!(preset.train.error_rate(&zero), 0.5);
    let obj = zokit_core::Objective::from_problem(preset.train.clone());
    let g = obj.full_gradient_uninstrumented(&zero).unwrap();
    let step: Vec<f64> = g.iter().map(|v| -5.0 * v).collect();
    assert!(preset.test.error_rate(&step) < 0.4);
}

/// Largest eigenvalue by power iteration on a PSD matrix.
fn power_iteration(a: &[Vec<f64>]) -> f64 {
    let d = a.len();
    let mut v: Vec<f64> = (0..d).map(|i| 1.0 + 0.1 * i as f64).collect();
    let mut lambda = 0.0;
    for _ in 0..20_000 {
        let w: Vec<f64> = (0..d).map(|r| (0..d).map(|c| a[r][c] * v[c]).sum()).collect();
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        let next = w.iter().zip(&v).map(|(wi, vi)| wi * vi).sum::<f64>();
        v = w.iter().map(|x| x / norm).collect();
        if (next - lambda).abs() < 1e-15 * next.abs() {
            return next;
        }
        lambda = next;
    }
    lambda
}

#[test]
fn quadratic_smoothness_matches_power_iteration() {
    let preset = zokit_core::problems::quadratic_preset(4).unwrap();
    let p = &preset.problem;
    let d = preset.x0.len();
    let l = (0..p.num_components())
        .map(|i| {
            let m = p.matrix(i);
            power_iteration(&(0..d).map(|r| (0..d).map(|c| m[(r, c)]).collect()).collect::<Vec<_>>())
        })
        .fold(0.0, f64::max);
    assert!((l - p.smoothness().unwrap()).abs() < 1e-8 * l.max(1.0), "{l} vs {:?}", p.smoothness());
}
