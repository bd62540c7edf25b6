use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::smoothing::SmoothingConfig;
use crate::error::{Error, Result};
use crate::numerics::OptimizerKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttackNorm {
    L2,
    Linf,
}

/// Projected-gradient attack settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttackConfig {
    pub norm: AttackNorm,
    pub radius: f64,
    pub steps: usize,
    /// Defaults to `2.5 · radius / steps`.
    pub step_size: Option<f64>,
}

impl Default for AttackConfig {
    fn default() -> Self {
        AttackConfig {
            norm: AttackNorm::L2,
            radius: 1.0,
            steps: 10,
            step_size: None,
        }
    }
}

impl AttackConfig {
    pub fn new(norm: AttackNorm, radius: f64, steps: usize) -> Self {
        AttackConfig {
            norm,
            radius,
            steps,
            step_size: None,
        }
    }

    pub fn effective_step_size(&self) -> f64 {
        self.step_size
            .unwrap_or_else(|| 2.5 * self.radius / self.steps.max(1) as f64)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius >= 0.0 && self.radius.is_finite()) {
            return Err(Error::Config(format!("attack radius must be non-negative, got {}", self.radius)));
        }
        if let Some(s) = self.step_size {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::Config(format!("attack step size must be positive, got {s}")));
            }
        }
        Ok(())
    }
}

/// Optimization schedule shared by the gradient-trained rules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainSchedule {
    pub epochs: usize,
    pub batch_size: usize,
    pub optimizer: OptimizerKind,
    pub learning_rate: f64,
}

impl Default for TrainSchedule {
    fn default() -> Self {
        TrainSchedule {
            epochs: 100,
            batch_size: 32,
            optimizer: OptimizerKind::Adam,
            learning_rate: 1e-3,
        }
    }
}

impl TrainSchedule {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be positive".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config("learning_rate must be positive".into()));
        }
        Ok(())
    }
}

pub const DEFAULT_HIDDEN: [usize; 3] = [128, 64, 16];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RuleKind {
    StandardMlp {
        hidden: Vec<usize>,
        schedule: TrainSchedule,
    },
    /// Logistic (binary) or softmax (multiclass) regression.
    Linear { schedule: TrainSchedule },
    PgdAdversarial {
        hidden: Vec<usize>,
        schedule: TrainSchedule,
        attack: AttackConfig,
    },
    Trades {
        hidden: Vec<usize>,
        schedule: TrainSchedule,
        attack: AttackConfig,
        beta: f64,
    },
    Knn { k: usize },
    /// The three-point lookup rule separating LOO-stability from LUF.
    TableRule,
    /// Constant classifier on the Laplace-noised label majority; `(ε, 0)`-DP.
    NoisyMajority { epsilon: f64 },
    /// Always predicts `class`.
    Constant { class: usize, num_classes: usize },
}

/// A seeded learning rule: every hyperparameter needed to map a dataset to a model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearningRule {
    pub kind: RuleKind,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smoothing: Option<SmoothingConfig>,
}

impl LearningRule {
    pub fn new(kind: RuleKind) -> Self {
        LearningRule {
            kind,
            seed: 0,
            smoothing: None,
        }
    }

    pub fn mlp(hidden: &[usize]) -> Self {
        Self::new(RuleKind::StandardMlp {
            hidden: hidden.to_vec(),
            schedule: TrainSchedule::default(),
        })
    }

    pub fn linear() -> Self {
        Self::new(RuleKind::Linear {
            schedule: TrainSchedule::default(),
        })
    }

    pub fn pgd(hidden: &[usize], attack: AttackConfig) -> Self {
        Self::new(RuleKind::PgdAdversarial {
            hidden: hidden.to_vec(),
            schedule: TrainSchedule::default(),
            attack,
        })
    }

    pub fn trades(hidden: &[usize], attack: AttackConfig, beta: f64) -> Self {
        Self::new(RuleKind::Trades {
            hidden: hidden.to_vec(),
            schedule: TrainSchedule::default(),
            attack,
            beta,
        })
    }

    pub fn knn(k: usize) -> Self {
        Self::new(RuleKind::Knn { k })
    }

    pub fn table() -> Self {
        Self::new(RuleKind::TableRule)
    }

    pub fn noisy_majority(epsilon: f64) -> Self {
        Self::new(RuleKind::NoisyMajority { epsilon })
    }

    pub fn constant(class: usize, num_classes: usize) -> Self {
        Self::new(RuleKind::Constant { class, num_classes })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_smoothing(mut self, smoothing: SmoothingConfig) -> Self {
        self.smoothing = Some(smoothing);
        self
    }

    pub fn with_epochs(mut self, epochs: usize) -> Self {
        if let Some(s) = self.schedule_mut() {
            s.epochs = epochs;
        }
        self
    }

    pub fn with_batch_size(mut self, batch_size: usize) -> Self {
        if let Some(s) = self.schedule_mut() {
            s.batch_size = batch_size;
        }
        self
    }

    pub fn with_optimizer(mut self, optimizer: OptimizerKind, learning_rate: f64) -> Self {
        if let Some(s) = self.schedule_mut() {
            s.optimizer = optimizer;
            s.learning_rate = learning_rate;
        }
        self
    }

    pub fn schedule(&self) -> Option<&TrainSchedule> {
        match &self.kind {
            RuleKind::StandardMlp { schedule, .. }
            | RuleKind::Linear { schedule }
            | RuleKind::PgdAdversarial { schedule, .. }
            | RuleKind::Trades { schedule, .. } => Some(schedule),
            _ => None,
        }
    }

    pub fn schedule_mut(&mut self) -> Option<&mut TrainSchedule> {
        match &mut self.kind {
            RuleKind::StandardMlp { schedule, .. }
            | RuleKind::Linear { schedule }
            | RuleKind::PgdAdversarial { schedule, .. }
            | RuleKind::Trades { schedule, .. } => Some(schedule),
            _ => None,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            RuleKind::StandardMlp { .. } => "standard-mlp",
            RuleKind::Linear { .. } => "linear",
            RuleKind::PgdAdversarial { .. } => "pgd-adversarial",
            RuleKind::Trades { .. } => "trades",
            RuleKind::Knn { .. } => "knn",
            RuleKind::TableRule => "table-rule",
            RuleKind::NoisyMajority { .. } => "noisy-majority",
            RuleKind::Constant { .. } => "constant",
        }
    }

    /// Whether training is a pure function of (rule, data). Smoothing with a
    /// fixed noise seed keeps a rule deterministic.
    pub fn is_deterministic(&self) -> bool {
        !matches!(self.kind, RuleKind::NoisyMajority { .. })
    }

    /// Declared `(ε, δ)` differential-privacy parameters, if any.
    pub fn dp_parameters(&self) -> Option<(f64, f64)> {
        match self.kind {
            RuleKind::NoisyMajority { epsilon } => Some((epsilon, 0.0)),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(s) = self.schedule() {
            s.validate()?;
        }
        match &self.kind {
            RuleKind::StandardMlp { hidden, .. }
            | RuleKind::PgdAdversarial { hidden, .. }
            | RuleKind::Trades { hidden, .. }
                if hidden.contains(&0) =>
            {
                return Err(Error::Config("hidden layer widths must be positive".into()))
            }
            RuleKind::PgdAdversarial { attack, .. } => attack.validate()?,
            RuleKind::Trades { attack, beta, .. } => {
                attack.validate()?;
                if !(*beta > 0.0 && beta.is_finite()) {
                    return Err(Error::Config(format!("trades beta must be positive, got {beta}")));
                }
            }
            RuleKind::Knn { k } if *k == 0 => return Err(Error::Config("k must be positive".into())),
            RuleKind::NoisyMajority { epsilon } if !(*epsilon > 0.0) => {
                return Err(Error::Config(format!("dp epsilon must be positive, got {epsilon}")))
            }
            RuleKind::Constant { class, num_classes } if class >= num_classes => {
                return Err(Error::Config(format!("class {class} outside {num_classes} classes")))
            }
            _ => {}
        }
        if let Some(s) = &self.smoothing {
            s.validate()?;
        }
        Ok(())
    }

    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("rules serialize")
    }

    /// SHA-256 of the canonical JSON form.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }
}
