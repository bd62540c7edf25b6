//! The audited learning rules and the models they produce.

pub mod attack;
pub mod codec;
pub mod knn;
pub mod model;
pub mod noisy_majority;
pub mod radius;
pub mod rule;
pub mod smoothing;
pub mod table;
pub mod train;

pub use attack::{pgd_attack, project};
pub use codec::{decode_model, encode_model};
pub use model::{argmax, Model};
pub use noisy_majority::predict_noisy_majority;
pub use radius::adversarial_radius;
pub use rule::{AttackConfig, AttackNorm, LearningRule, RuleKind, TrainSchedule, DEFAULT_HIDDEN};
pub use smoothing::{smooth_predict, NoisePairing, SmoothingConfig};
pub use table::{table_dataset, table_rule, TableAssignment};
pub use train::{train, train_adversarial, train_trades, train_trial};
