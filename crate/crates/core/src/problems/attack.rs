//! Universal black-box adversarial perturbation against a score-only
//! classifier. Images live in `(−0.5, 0.5)^d`; the perturbation `x` acts in
//! `atanh(2a)` space so every adversarial image stays inside the box:
//! `a' = ½ tanh(atanh(2a) + x)`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::objective::FiniteSum;
use crate::rng::{Rng, Role};

/// Black-box classifier returning one score per class.
pub trait Classifier: Send + Sync {
    fn num_classes(&self) -> usize;
    fn dim(&self) -> usize;
    fn scores(&self, z: &[f64]) -> Vec<f64>;

    fn predict(&self, z: &[f64]) -> usize {
        let s = self.scores(z);
        (0..s.len()).fold(0, |best, k| if s[k] > s[best] { k } else { best })
    }
}

/// Linear softmax classifier whose outputs are log-probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct ToySoftmax {
    weights: Vec<f64>,
    bias: Vec<f64>,
    d: usize,
}

impl ToySoftmax {
    /// `weights` is `K × d` row-major.
    pub fn new(weights: Vec<f64>, bias: Vec<f64>) -> Result<Self> {
        let k = bias.len();
        if k < 2 || weights.is_empty() || !weights.len().is_multiple_of(k) {
            return Err(Error::Dimension("weights must be K x d with K >= 2".into()));
        }
        Ok(ToySoftmax { d: weights.len() / k, weights, bias })
    }

    /// Fixed weights `W_kj = sin(1.3·(k+1)·(j+1) + 0.7·k)`, zero bias.
    pub fn reference(d: usize, k: usize) -> Self {
        let weights = (0..k)
            .flat_map(|c| (0..d).map(move |j| (1.3 * (c + 1) as f64 * (j + 1) as f64 + 0.7 * c as f64).sin()))
            .collect();
        ToySoftmax { weights, bias: vec![0.0; k], d }
    }
}

impl Classifier for ToySoftmax {
    fn num_classes(&self) -> usize {
        self.bias.len()
    }

    fn dim(&self) -> usize {
        self.d
    }

    fn scores(&self, z: &[f64]) -> Vec<f64> {
        let logits: Vec<f64> = self
            .bias
            .iter()
            .enumerate()
            .map(|(c, b)| b + self.weights[c * self.d..(c + 1) * self.d].iter().zip(z).map(|(w, v)| w * v).sum::<f64>())
            .collect();
        let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + logits.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
        logits.iter().map(|v| v - lse).collect()
    }
}

/// Classifiers addressable by name.
#[derive(Clone, Default)]
pub struct ClassifierRegistry {
    entries: HashMap<String, Arc<dyn Classifier>>,
}

impl fmt::Debug for ClassifierRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut names: Vec<_> = self.entries.keys().collect();
        names.sort();
        f.debug_struct("ClassifierRegistry").field("names", &names).finish()
    }
}

pub const TOY_DIM: usize = 16;
pub const TOY_CLASSES: usize = 3;

impl ClassifierRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registry holding `toy-softmax` (16 inputs, 3 classes).
    pub fn with_builtins() -> Self {
        let mut r = Self::new();
        r.register("toy-softmax", Arc::new(ToySoftmax::reference(TOY_DIM, TOY_CLASSES)));
        r
    }

    pub fn register(&mut self, name: &str, classifier: Arc<dyn Classifier>) {
        self.entries.insert(name.to_string(), classifier);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn Classifier>> {
        self.entries.get(name).cloned().ok_or_else(|| Error::Config(format!("unknown classifier `{name}`")))
    }
}

/// One loss component per image; all images share the perturbation.
#[derive(Clone)]
pub struct AttackProblem {
    images: Vec<Vec<f64>>,
    pre_images: Vec<Vec<f64>>,
    labels: Vec<usize>,
    classifier: Arc<dyn Classifier>,
    c: f64,
}

impl fmt::Debug for AttackProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AttackProblem")
            .field("n", &self.images.len())
            .field("d", &self.dim())
            .field("c", &self.c)
            .finish()
    }
}

impl AttackProblem {
    /// `c` weights the misclassification term against the distortion.
    pub fn new(images: Vec<Vec<f64>>, labels: Vec<usize>, classifier: Arc<dyn Classifier>, c: f64) -> Result<Self> {
        if images.is_empty() || images.len() != labels.len() {
            return Err(Error::Input("need one label per image and at least one image".into()));
        }
        let d = classifier.dim();
        if let Some(i) = images.iter().position(|a| a.len() != d) {
            return Err(Error::Dimension(format!("image {i} has {} pixels, classifier expects {d}", images[i].len())));
        }
        if let Some(i) = labels.iter().position(|&y| y >= classifier.num_classes()) {
            return Err(Error::Input(format!("label of image {i} is out of range")));
        }
        if !(c.is_finite() && c >= 0.0) {
            return Err(Error::Config(format!("attack weight c must be nonnegative, got {c}")));
        }
        let pre_images = images
            .iter()
            .enumerate()
            .map(|(i, a)| {
                a.iter()
                    .map(|&v| {
                        if (2.0 * v).abs() < 1.0 {
                            Ok((2.0 * v).atanh())
                        } else {
                            Err(Error::Input(format!("image {i} has pixel {v} outside (-0.5, 0.5)")))
                        }
                    })
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(AttackProblem { images, pre_images, labels, classifier, c })
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    pub fn dim(&self) -> usize {
        self.classifier.dim()
    }

    pub fn image(&self, i: usize) -> &[f64] {
        &self.images[i]
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn classifier(&self) -> &Arc<dyn Classifier> {
        &self.classifier
    }

    pub fn adversarial(&self, i: usize, x: &[f64]) -> Vec<f64> {
        self.pre_images[i].iter().zip(x).map(|(p, v)| 0.5 * (p + v).tanh()).collect()
    }

    pub fn is_successful(&self, i: usize, x: &[f64]) -> bool {
        self.classifier.predict(&self.adversarial(i, x)) != self.labels[i]
    }

    fn loss(&self, i: usize, x: &[f64]) -> f64 {
        let adv = self.adversarial(i, x);
        let scores = self.classifier.scores(&adv);
        let y = self.labels[i];
        let other =
            scores.iter().enumerate().filter(|&(k, _)| k != y).map(|(_, s)| *s).fold(f64::NEG_INFINITY, f64::max);
        let margin = (scores[y] - other).max(0.0);
        let distortion: f64 = adv.iter().zip(&self.images[i]).map(|(p, a)| (p - a) * (p - a)).sum();
        self.c * margin + distortion
    }
}

/// Loss of image `i` under perturbation `x`.
pub fn eval_attack_loss(problem: &AttackProblem, i: usize, x: &[f64]) -> Result<f64> {
    if i >= problem.n() {
        return Err(Error::Input(format!("image index {i} out of range")));
    }
    if x.len() != problem.dim() {
        return Err(Error::Dimension(format!("perturbation has length {}, expected {}", x.len(), problem.dim())));
    }
    Ok(problem.loss(i, x))
}

/// Mean `‖a'_i − a_i‖₂`, optionally only over images the perturbation
/// misclassifies. `None` if no image qualifies.
pub fn distortion_l2(problem: &AttackProblem, x: &[f64], successful_only: bool) -> Option<f64> {
    let dists: Vec<f64> = (0..problem.n())
        .filter(|&i| !successful_only || problem.is_successful(i, x))
        .map(|i| {
            let adv = problem.adversarial(i, x);
            adv.iter().zip(problem.image(i)).map(|(p, a)| (p - a) * (p - a)).sum::<f64>().sqrt()
        })
        .collect();
    if dists.is_empty() {
        None
    } else {
        Some(dists.iter().sum::<f64>() / dists.len() as f64)
    }
}

impl FiniteSum for AttackProblem {
    fn num_components(&self) -> usize {
        self.n()
    }

    fn dim(&self) -> usize {
        self.classifier.dim()
    }

    fn eval_component(&self, i: usize, x: &[f64]) -> f64 {
        self.loss(i, x)
    }
}

pub const TOY_IMAGES: usize = 10;

/// Ten images in `(−0.45, 0.45)^16` that the built-in toy classifier assigns
/// to one common class, attacked with `c = 1`.
pub fn attack_toy_preset(seed: u64) -> Result<AttackProblem> {
    let classifier = ClassifierRegistry::with_builtins().get("toy-softmax")?;
    let mut rng = Rng::for_stream(seed, 0, 0, Role::Data);
    let draw = |rng: &mut Rng| (0..TOY_DIM).map(|_| 0.9 * rng.uniform() - 0.45).collect::<Vec<f64>>();
    let first = draw(&mut rng);
    let target = classifier.predict(&first);
    let mut images = vec![first];
    for _ in 0..100_000 {
        if images.len() == TOY_IMAGES {
            break;
        }
        let z = draw(&mut rng);
        if classifier.predict(&z) == target {
            images.push(z);
        }
    }
    if images.len() < TOY_IMAGES {
        return Err(Error::Config("could not find enough images of one class".into()));
    }
    AttackProblem::new(images, vec![target; TOY_IMAGES], classifier, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_softmax_normalizes() {
        let clf = ToySoftmax::reference(4, 3);
        let s = clf.scores(&[0.1, -0.2, 0.3, 0.0]);
        let total: f64 = s.iter().map(|v| v.exp()).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_perturbation_has_no_distortion() {
        let p = attack_toy_preset(1).unwrap();
        let x = vec![0.0; p.dim()];
        for i in 0..p.n() {
            let adv = p.adversarial(i, &x);
            for (a, b) in adv.iter().zip(p.image(i)) {
                assert!((a - b).abs() < 1e-15);
            }
            assert!(!p.is_successful(i, &x));
        }
        assert_eq!(distortion_l2(&p, &x, true), None);
        assert!(distortion_l2(&p, &x, false).unwrap() < 1e-14);
    }

    #[test]
    fn unattacked_loss_is_c_times_margin() {
        let p = attack_toy_preset(2).unwrap();
        let x = vec![0.0; p.dim()];
        let s = p.classifier().scores(p.image(0));
        let y = p.label(0);
        let other = s.iter().enumerate().filter(|&(k, _)| k != y).map(|(_, v)| *v).fold(f64::NEG_INFINITY, f64::max);
        let loss = eval_attack_loss(&p, 0, &x).unwrap();
        assert!((loss - (s[y] - other)).abs() < 1e-12);
    }

    #[test]
    fn boundary_pixel_is_rejected() {
        let clf: Arc<dyn Classifier> = Arc::new(ToySoftmax::reference(2, 2));
        let err = AttackProblem::new(vec![vec![0.5, 0.0]], vec![0], clf.clone(), 1.0).unwrap_err();
        assert!(matches!(err, Error::Input(_)));
        assert!(AttackProblem::new(vec![vec![-0.6, 0.0]], vec![0], clf, 1.0).is_err());
    }

    #[test]
    fn registry_lookup() {
        let r = ClassifierRegistry::with_builtins();
        assert_eq!(r.get("toy-softmax").unwrap().num_classes(), 3);
        assert!(r.get("resnet").is_err());
    }

    #[test]
    fn large_perturbation_stays_in_box() {
        let p = attack_toy_preset(4).unwrap();
        let x = vec![50.0; p.dim()];
        for i in 0..p.n() {
            assert!(p.adversarial(i, &x).iter().all(|v| v.abs() <= 0.5));
        }
    }
}
