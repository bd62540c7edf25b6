use sha2::{Digest, Sha256};

use super::attack::{kl_attack_on_params, pgd_on_params};
use super::knn::train_knn;
use super::model::Model;
use super::noisy_majority::predict_noisy_majority;
use super::rule::{AttackConfig, LearningRule, RuleKind, TrainSchedule};
use super::smoothing::NoisePairing;
use super::table::table_rule;
use crate::data::DatasetView;
use crate::error::{Error, Result};
use crate::numerics::loss::{trades_value_and_grad, value_and_grad, LossKind};
use crate::numerics::rng::{Rng, STREAM_ATTACK, STREAM_INIT, STREAM_NOISE, STREAM_SHUFFLE};
use crate::numerics::{init_params, optimizer_step, MlpParams, OptimizerState};

#[derive(Debug, Clone, Copy)]
enum Objective<'a> {
    Natural,
    Pgd(&'a AttackConfig),
    Trades(&'a AttackConfig, f64),
}

/// Trains the rule on the view. Randomized kinds use trial 0; see [`train_trial`].
pub fn train(rule: &LearningRule, view: &DatasetView<'_>) -> Result<Model> {
    train_trial(rule, view, 0)
}

/// Trains the rule with the rule-randomness draw `trial`. Deterministic kinds
/// ignore `trial`.
pub fn train_trial(rule: &LearningRule, view: &DatasetView<'_>, trial: u64) -> Result<Model> {
    rule.validate()?;
    if view.is_empty() {
        return Err(Error::Argument("cannot train on an empty dataset".into()));
    }
    let base = match &rule.kind {
        RuleKind::StandardMlp { hidden, schedule } => train_network(hidden, schedule, Objective::Natural, rule.seed, view)?,
        RuleKind::Linear { schedule } => train_network(&[], schedule, Objective::Natural, rule.seed, view)?,
        RuleKind::PgdAdversarial { .. } => train_adversarial(rule, view)?,
        RuleKind::Trades { .. } => train_trades(rule, view)?,
        RuleKind::Knn { k } => train_knn(view, *k)?,
        RuleKind::TableRule => table_rule(view)?,
        RuleKind::NoisyMajority { epsilon } => {
            let mut rng = Rng::derive_path(rule.seed, &[STREAM_NOISE, trial]);
            predict_noisy_majority(view, *epsilon, &mut rng)?
        }
        RuleKind::Constant { class, num_classes } => Model::constant(*class, *num_classes),
    };
    Ok(match rule.smoothing {
        None => base,
        Some(config) => {
            let noise_stream = match config.pairing {
                NoisePairing::CommonRandomNumbers => 0,
                NoisePairing::Independent => {
                    let d = Sha256::digest(view.digest().as_bytes());
                    u64::from_le_bytes(d[..8].try_into().unwrap()) ^ trial
                }
            };
            Model::Smoothed {
                base: Box::new(base),
                config,
                noise_stream,
            }
        }
    })
}

/// PGD adversarial training: each batch is replaced by its PGD iterate.
pub fn train_adversarial(rule: &LearningRule, view: &DatasetView<'_>) -> Result<Model> {
    match &rule.kind {
        RuleKind::PgdAdversarial { hidden, schedule, attack } => {
            train_network(hidden, schedule, Objective::Pgd(attack), rule.seed, view)
        }
        _ => Err(Error::Config(format!(
            "train_adversarial needs a pgd-adversarial rule, got {}",
            rule.kind_name()
        ))),
    }
}

/// TRADES: natural loss plus `beta · KL(model(x) ‖ model(x_adv))`.
pub fn train_trades(rule: &LearningRule, view: &DatasetView<'_>) -> Result<Model> {
    match &rule.kind {
        RuleKind::Trades {
            hidden,
            schedule,
            attack,
            beta,
        } => train_network(hidden, schedule, Objective::Trades(attack, *beta), rule.seed, view),
        _ => Err(Error::Config(format!(
            "train_trades needs a trades rule, got {}",
            rule.kind_name()
        ))),
    }
}

/// Layer widths for a network on this view: sigmoid head for two classes.
pub fn network_dims(input_dim: usize, hidden: &[usize], num_classes: usize) -> Vec<usize> {
    let mut dims = Vec::with_capacity(hidden.len() + 2);
    dims.push(input_dim);
    dims.extend_from_slice(hidden);
    dims.push(if num_classes == 2 { 1 } else { num_classes });
    dims
}

fn train_network(
    hidden: &[usize],
    schedule: &TrainSchedule,
    objective: Objective<'_>,
    seed: u64,
    view: &DatasetView<'_>,
) -> Result<Model> {
    schedule.validate()?;
    let dims = network_dims(view.dim(), hidden, view.num_classes());
    let mut params = init_params(&dims, &mut Rng::derive(seed, STREAM_INIT))?;
    let mut opt = OptimizerState::new(schedule.optimizer, schedule.learning_rate, &params)?;
    let mut shuffle = Rng::derive(seed, STREAM_SHUFFLE);
    let mut attack_rng = Rng::derive(seed, STREAM_ATTACK);
    let loss_kind = LossKind::natural_for(&params);
    let mut step = 0usize;
    for epoch in 0..schedule.epochs {
        let order = shuffle.permutation(view.len());
        for batch in order.chunks(schedule.batch_size) {
            let x = view.features_at(batch);
            let y = view.labels_at(batch);
            let (loss, grads) = batch_gradient(&params, &x, &y, loss_kind, objective, &mut attack_rng)?;
            if !loss.is_finite() {
                return Err(Error::Training {
                    epoch,
                    step,
                    message: format!("loss became {loss}"),
                });
            }
            optimizer_step(&mut params, &grads, &mut opt).map_err(|e| Error::Training {
                epoch,
                step,
                message: e.to_string(),
            })?;
            step += 1;
        }
    }
    Ok(Model::Mlp { params })
}

fn batch_gradient(
    params: &MlpParams,
    x: &crate::numerics::Matrix,
    y: &[usize],
    loss_kind: LossKind,
    objective: Objective<'_>,
    attack_rng: &mut Rng,
) -> Result<(f64, MlpParams)> {
    match objective {
        Objective::Natural => value_and_grad(params, x, y, loss_kind),
        Objective::Pgd(attack) => {
            let x_adv = pgd_on_params(params, x, y, attack)?;
            value_and_grad(params, &x_adv, y, loss_kind)
        }
        Objective::Trades(attack, beta) => {
            let x_adv = kl_attack_on_params(params, x, attack, attack_rng)?;
            trades_value_and_grad(params, x, &x_adv, y, beta)
        }
    }
}
