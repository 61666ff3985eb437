//! Built-in black-box objectives.

mod attack;
mod dataset;
mod nlls;
mod quadratic;

pub use attack::{
    attack_toy_preset, distortion_l2, eval_attack_loss, AttackProblem, Classifier, ClassifierRegistry, ToySoftmax,
};
pub use dataset::{parse_dataset, read_dataset, write_dataset};
pub use nlls::{make_synthetic_nlls, synthetic_preset, NllsProblem, SyntheticPreset, NLLS_CURVATURE};
pub use quadratic::{quadratic_preset, QuadraticPreset, QuadraticSumProblem, ReferenceGrid};
