//! Deterministic numeric kernel: seeded randomness, dense matrices, the MLP
//! family, losses and optimizers.

pub mod loss;
pub mod matrix;
pub mod mlp;
pub mod optim;
pub mod rng;

pub use loss::{backward, loss_value, LossKind};
pub use matrix::Matrix;
pub use mlp::{forward, init_params, MlpParams, OutputActivation};
pub use optim::{optimizer_step, OptimizerKind, OptimizerState};
pub use rng::Rng;
