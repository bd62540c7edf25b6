//! TOML audit configuration. Parsing rejects unknown and duplicate keys;
//! validation names the offending key.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::data::{
    ColumnDirective, Dataset, LeaveOutSource, MissingValuePolicy, PreprocessSpec, RawTable, SyntheticKind, SyntheticSpec,
    UnknownCategoryPolicy,
};
use crate::error::{Error, Result};
use crate::numerics::OptimizerKind;
use crate::rules::{adversarial_radius, AttackConfig, AttackNorm, LearningRule, SmoothingConfig, DEFAULT_HIDDEN};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Luf,
    LufRandomized,
    Stability,
    SeedInstability,
    ArchInstability,
    Scenario,
    Boundary,
    SmoothAudit,
}

/// Which points the audit reports on.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalSet {
    /// Every point of the dataset.
    #[default]
    All,
    Test,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticConfig {
    pub kind: String,
    pub n: usize,
    pub p: Option<f64>,
    pub diameter: Option<f64>,
    pub num_classes: Option<usize>,
    pub separation: Option<f64>,
    pub std: Option<f64>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    pub csv: Option<PathBuf>,
    pub label: Option<String>,
    #[serde(default)]
    pub columns: BTreeMap<String, ColumnDirective>,
    #[serde(default)]
    pub unknown_categories: UnknownCategoryPolicy,
    #[serde(default)]
    pub missing_values: MissingValuePolicy,
    pub synthetic: Option<SyntheticConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SplitConfig {
    pub train_fraction: f64,
    /// Size of the leave-out set; all training points when absent.
    pub o_size: Option<usize>,
    pub seed: u64,
    pub leave_out_source: LeaveOutSource,
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig {
            train_fraction: 0.8,
            o_size: None,
            seed: 0,
            leave_out_source: LeaveOutSource::Train,
        }
    }
}

/// Adversarial radius: a number, or `"auto"` for the minimum cross-class distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RadiusSetting {
    Value(f64),
    Named(String),
}

/// One rule, flat. Keys that do not apply to `kind` are rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleConfig {
    pub kind: String,
    pub seed: Option<u64>,
    pub hidden: Option<Vec<usize>>,
    pub epochs: Option<usize>,
    pub batch_size: Option<usize>,
    pub optimizer: Option<OptimizerKind>,
    pub learning_rate: Option<f64>,
    pub norm: Option<AttackNorm>,
    pub radius: Option<RadiusSetting>,
    pub steps: Option<usize>,
    pub step_size: Option<f64>,
    pub beta: Option<f64>,
    pub k: Option<usize>,
    pub epsilon: Option<f64>,
    pub class: Option<usize>,
    pub num_classes: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub seed: Option<u64>,
    pub diameter: Option<f64>,
    pub n: Option<usize>,
    pub grid: Option<usize>,
    pub epsilon: Option<f64>,
    pub trials: Option<usize>,
    pub layer_dims: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryConfig {
    /// Point to remove; a seeded pick when absent.
    pub removed_id: Option<u64>,
    pub resolution: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditConfig {
    pub mode: Mode,
    #[serde(default)]
    pub eval: EvalSet,
    pub trials: Option<usize>,
    pub seeds: Option<Vec<u64>>,
    pub parallelism: Option<usize>,
    pub output_dir: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub dataset: Option<DatasetConfig>,
    #[serde(default)]
    pub split: SplitConfig,
    #[serde(default)]
    pub rules: Vec<RuleConfig>,
    pub smoothing: Option<SmoothingConfig>,
    pub scenario: Option<ScenarioConfig>,
    pub boundary: Option<BoundaryConfig>,
}

fn semantic(key: impl Into<String>, message: impl Into<String>) -> Error {
    Error::ConfigSemantic {
        key: key.into(),
        message: message.into(),
    }
}

pub const DEFAULT_TRIALS: usize = 100;
pub const DEFAULT_SEEDS: usize = 10;
pub const SCENARIOS: [&str; 4] = ["prop1", "two-circles", "dp-bound", "figure1"];

/// Reads, parses and validates a config file. Relative paths inside it are
/// resolved against the file's directory.
pub fn parse_config(path: &Path) -> Result<AuditConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut config = parse_config_str(&text)?;
    let base = path.parent().unwrap_or(Path::new(""));
    config.resolve_paths(base);
    config.validate()?;
    Ok(config)
}

/// Parses without resolving paths or validating.
pub fn parse_config_str(text: &str) -> Result<AuditConfig> {
    toml::from_str(text).map_err(|e| Error::ConfigSyntax(e.to_string().trim_end().to_string()))
}

impl RuleConfig {
    /// Keys set on this entry, by name.
    fn present(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        macro_rules! check {
            ($($f:ident),*) => { $( if self.$f.is_some() { out.push(stringify!($f)); } )* };
        }
        check!(hidden, epochs, batch_size, optimizer, learning_rate, norm, radius, steps, step_size, beta, k, epsilon, class, num_classes);
        out
    }

    fn allowed(kind: &str) -> Option<&'static [&'static str]> {
        const TRAIN: [&str; 4] = ["epochs", "batch_size", "optimizer", "learning_rate"];
        Some(match kind {
            "standard-mlp" => &["hidden", TRAIN[0], TRAIN[1], TRAIN[2], TRAIN[3]],
            "linear" => &TRAIN,
            "pgd-adversarial" => &["hidden", TRAIN[0], TRAIN[1], TRAIN[2], TRAIN[3], "norm", "radius", "steps", "step_size"],
            "trades" => &["hidden", TRAIN[0], TRAIN[1], TRAIN[2], TRAIN[3], "norm", "radius", "steps", "step_size", "beta"],
            "knn" => &["k"],
            "table-rule" => &[],
            "noisy-majority" => &["epsilon"],
            "constant" => &["class", "num_classes"],
            _ => return None,
        })
    }

    fn check_keys(&self, prefix: &str) -> Result<()> {
        let allowed = Self::allowed(&self.kind).ok_or_else(|| {
            semantic(
                format!("{prefix}.kind"),
                format!(
                    "unknown rule kind '{}'; expected one of standard-mlp, linear, pgd-adversarial, trades, knn, table-rule, noisy-majority, constant",
                    self.kind
                ),
            )
        })?;
        for key in self.present() {
            if !allowed.contains(&key) {
                return Err(semantic(format!("{prefix}.{key}"), format!("not used by kind '{}'", self.kind)));
            }
        }
        Ok(())
    }

    /// Builds the rule. `dataset` is needed only for `radius = "auto"`.
    pub fn to_rule(&self, prefix: &str, dataset: Option<&Dataset>) -> Result<LearningRule> {
        self.check_keys(prefix)?;
        let hidden = self.hidden.clone().unwrap_or_else(|| DEFAULT_HIDDEN.to_vec());
        let attack = || -> Result<AttackConfig> {
            let norm = self.norm.unwrap_or(AttackNorm::L2);
            let radius = match &self.radius {
                None => AttackConfig::default().radius,
                Some(RadiusSetting::Value(r)) => *r,
                Some(RadiusSetting::Named(s)) if s == "auto" => match dataset {
                    Some(d) => adversarial_radius(d, norm, 2000, 0)?,
                    None => 0.0,
                },
                Some(RadiusSetting::Named(s)) => {
                    return Err(semantic(format!("{prefix}.radius"), format!("expected a number or \"auto\", got \"{s}\"")))
                }
            };
            let mut a = AttackConfig::new(norm, radius, self.steps.unwrap_or(AttackConfig::default().steps));
            a.step_size = self.step_size;
            a.validate().map_err(|e| semantic(format!("{prefix}.radius"), e.to_string()))?;
            Ok(a)
        };
        let mut rule = match self.kind.as_str() {
            "standard-mlp" => LearningRule::mlp(&hidden),
            "linear" => LearningRule::linear(),
            "pgd-adversarial" => LearningRule::pgd(&hidden, attack()?),
            "trades" => LearningRule::trades(&hidden, attack()?, self.beta.unwrap_or(6.0)),
            "knn" => LearningRule::knn(self.k.unwrap_or(1)),
            "table-rule" => LearningRule::table(),
            "noisy-majority" => LearningRule::noisy_majority(
                self.epsilon
                    .ok_or_else(|| semantic(format!("{prefix}.epsilon"), "required for noisy-majority"))?,
            ),
            "constant" => LearningRule::constant(self.class.unwrap_or(0), self.num_classes.unwrap_or(2)),
            _ => unreachable!("kind checked above"),
        };
        if let Some(s) = rule.schedule_mut() {
            if let Some(e) = self.epochs {
                s.epochs = e;
            }
            if let Some(b) = self.batch_size {
                s.batch_size = b;
            }
            if let Some(o) = self.optimizer {
                s.optimizer = o;
            }
            if let Some(lr) = self.learning_rate {
                s.learning_rate = lr;
            }
        }
        if let Some(seed) = self.seed {
            rule = rule.with_seed(seed);
        }
        rule.validate().map_err(|e| semantic(prefix.to_string(), e.to_string()))?;
        Ok(rule)
    }
}

impl SyntheticConfig {
    pub fn to_spec(&self) -> Result<SyntheticSpec> {
        let key = |k: &str| format!("dataset.synthetic.{k}");
        let need = |v: Option<f64>, k: &str| v.ok_or_else(|| semantic(key(k), format!("required for kind '{}'", self.kind)));
        let kind = match self.kind.as_str() {
            "uniform-bernoulli-square" => SyntheticKind::UniformBernoulliSquare {
                n: self.n,
                p: self.p.unwrap_or(0.5),
            },
            "two-circles" => SyntheticKind::TwoCircles {
                n: self.n,
                diameter: self.diameter.unwrap_or(1.0),
            },
            "gaussian-blobs" => SyntheticKind::GaussianBlobs {
                n: self.n,
                num_classes: self.num_classes.unwrap_or(2),
                separation: need(self.separation, "separation")?,
                std: self.std.unwrap_or(1.0),
            },
            other => {
                return Err(semantic(
                    key("kind"),
                    format!("unknown synthetic kind '{other}'; expected uniform-bernoulli-square, two-circles or gaussian-blobs"),
                ))
            }
        };
        Ok(SyntheticSpec { kind, seed: self.seed })
    }
}

impl DatasetConfig {
    pub fn preprocess_spec(&self) -> PreprocessSpec {
        PreprocessSpec {
            columns: self.columns.clone(),
            unknown_categories: self.unknown_categories,
            missing_values: self.missing_values,
        }
    }

    fn check(&self) -> Result<()> {
        match (&self.csv, &self.synthetic) {
            (Some(_), Some(_)) => Err(semantic("dataset", "set either csv or synthetic, not both")),
            (None, None) => Err(semantic("dataset", "set csv or synthetic")),
            (Some(path), None) => {
                if self.label.is_none() {
                    return Err(semantic("dataset.label", "required with csv"));
                }
                if !path.is_file() {
                    return Err(semantic("dataset.csv", format!("{} does not exist", path.display())));
                }
                Ok(())
            }
            (None, Some(s)) => {
                if self.label.is_some() || !self.columns.is_empty() {
                    return Err(semantic("dataset.label", "only used with csv"));
                }
                s.to_spec().map(|_| ())
            }
        }
    }

    /// Number of usable rows, without fitting preprocessing.
    fn num_rows(&self) -> Result<usize> {
        match (&self.csv, &self.synthetic) {
            (Some(path), _) => Ok(RawTable::read(path, self.missing_values)?.rows.len()),
            (_, Some(s)) => Ok(s.n),
            _ => unreachable!("checked"),
        }
    }
}

impl AuditConfig {
    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(d) = self.dataset.as_mut() {
            if let Some(p) = d.csv.as_mut() {
                fix(p);
            }
        }
        if let Some(p) = self.output_dir.as_mut() {
            fix(p);
        }
        if let Some(p) = self.cache_dir.as_mut() {
            fix(p);
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.parallelism == Some(0) {
            return Err(semantic("parallelism", "must be at least 1"));
        }
        let unused = |key: &str, set: bool| -> Result<()> {
            if set {
                Err(semantic(key, format!("not used in mode {:?}", self.mode)))
            } else {
                Ok(())
            }
        };
        if self.mode != Mode::Scenario {
            unused("scenario", self.scenario.is_some())?;
        }
        if self.mode != Mode::Boundary {
            unused("boundary", self.boundary.is_some())?;
        }
        if self.mode != Mode::SmoothAudit {
            unused("smoothing", self.smoothing.is_some())?;
        }
        if self.mode != Mode::LufRandomized {
            unused("trials", self.trials.is_some())?;
        }
        if self.mode != Mode::SeedInstability {
            unused("seeds", self.seeds.is_some())?;
        }

        if self.mode == Mode::Scenario {
            let s = self
                .scenario
                .as_ref()
                .ok_or_else(|| semantic("scenario", "mode scenario needs a [scenario] table"))?;
            if !SCENARIOS.contains(&s.name.as_str()) {
                return Err(semantic(
                    "scenario.name",
                    format!("unknown scenario '{}'; expected one of {}", s.name, SCENARIOS.join(", ")),
                ));
            }
            unused("dataset", self.dataset.is_some())?;
            return unused("rules", !self.rules.is_empty());
        }

        let dataset = self
            .dataset
            .as_ref()
            .ok_or_else(|| semantic("dataset", "a [dataset] table is required"))?;
        dataset.check()?;
        let want_rules = match self.mode {
            Mode::ArchInstability => 2..=usize::MAX,
            _ => 1..=1,
        };
        if !want_rules.contains(&self.rules.len()) {
            return Err(semantic(
                "rules",
                match self.mode {
                    Mode::ArchInstability => format!("mode arch-instability needs at least two rules, got {}", self.rules.len()),
                    _ => format!("this mode takes exactly one rule, got {}", self.rules.len()),
                },
            ));
        }
        for (i, r) in self.rules.iter().enumerate() {
            let rule = r.to_rule(&format!("rules[{i}]"), None)?;
            if matches!(self.mode, Mode::Luf | Mode::Stability | Mode::SmoothAudit) && !rule.is_deterministic() {
                return Err(semantic(
                    format!("rules[{i}].kind"),
                    format!("{} is randomized; use mode luf-randomized", rule.kind_name()),
                ));
            }
        }
        if let Some(t) = self.trials {
            if t < 2 {
                return Err(semantic("trials", format!("must be at least 2, got {t}")));
            }
        }
        if let Some(s) = &self.seeds {
            if s.len() < 2 {
                return Err(semantic("seeds", "needs at least two seeds"));
            }
        }
        if let Some(s) = &self.smoothing {
            s.validate().map_err(|e| semantic("smoothing", e.to_string()))?;
        }

        let split = &self.split;
        if !(split.train_fraction > 0.0 && split.train_fraction <= 1.0) {
            return Err(semantic("split.train_fraction", format!("must lie in (0, 1], got {}", split.train_fraction)));
        }
        let n = dataset.num_rows()?;
        let n_train = ((n as f64 * split.train_fraction).round() as usize).clamp(1, n.max(1));
        let pool = match split.leave_out_source {
            LeaveOutSource::Train => n_train,
            LeaveOutSource::Holdout => n - n_train,
        };
        if let Some(o) = split.o_size {
            if o > pool {
                return Err(semantic(
                    "split.o_size",
                    format!("{o} exceeds the {pool} points available to leave out"),
                ));
            }
        }
        if let Some(b) = &self.boundary {
            if b.resolution == Some(0) {
                return Err(semantic("boundary.resolution", "must be positive"));
            }
        }
        Ok(())
    }

    /// Hex sha256 of the canonical JSON form; paths are included as given.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("configs serialize");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    pub fn num_trials(&self) -> usize {
        self.trials.unwrap_or(DEFAULT_TRIALS)
    }

    pub fn seed_list(&self) -> Vec<u64> {
        self.seeds.clone().unwrap_or_else(|| (0..DEFAULT_SEEDS as u64).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
mode = "luf"

[dataset.synthetic]
kind = "two-circles"
n = 20

[[rules]]
kind = "knn"
"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config_str(MINIMAL).unwrap();
        c.validate().unwrap();
        assert_eq!(c.split.train_fraction, 0.8);
        assert_eq!(c.split.o_size, None);
        assert_eq!(c.eval, EvalSet::All);
        let rule = c.rules[0].to_rule("rules[0]", None).unwrap();
        assert_eq!(rule, LearningRule::knn(1));
    }

    #[test]
    fn o_size_too_large_names_the_key() {
        let text = format!("{MINIMAL}\n[split]\no_size = 17\n");
        let err = parse_config_str(&text).unwrap().validate().unwrap_err();
        assert!(matches!(err, Error::ConfigSemantic { ref key, .. } if key == "split.o_size"), "{err}");
        let ok = format!("{MINIMAL}\n[split]\no_size = 16\n");
        parse_config_str(&ok).unwrap().validate().unwrap();
    }

    #[test]
    fn duplicate_key_is_rejected() {
        let text = MINIMAL.replace("n = 20", "n = 20\nn = 21");
        assert!(matches!(parse_config_str(&text), Err(Error::ConfigSyntax(_))));
    }

    #[test]
    fn unknown_key_is_rejected() {
        let text = MINIMAL.replace("mode = \"luf\"", "mode = \"luf\"\nfoo = 1");
        assert!(matches!(parse_config_str(&text), Err(Error::ConfigSyntax(_))));
    }

    #[test]
    fn syntax_errors_carry_a_position() {
        let err = parse_config_str("mode = \n").unwrap_err().to_string();
        assert!(err.contains("line 1"), "{err}");
    }

    #[test]
    fn key_not_used_by_kind() {
        let text = MINIMAL.replace("kind = \"knn\"", "kind = \"knn\"\nepochs = 3");
        let err = parse_config_str(&text).unwrap().validate().unwrap_err();
        assert!(matches!(err, Error::ConfigSemantic { ref key, .. } if key == "rules[0].epochs"), "{err}");
    }

    #[test]
    fn randomized_rule_needs_randomized_mode() {
        let text = MINIMAL.replace("kind = \"knn\"", "kind = \"noisy-majority\"\nepsilon = 1.0");
        assert!(parse_config_str(&text).unwrap().validate().is_err());
        let text = text.replace("mode = \"luf\"", "mode = \"luf-randomized\"");
        parse_config_str(&text).unwrap().validate().unwrap();
    }

    #[test]
    fn hash_is_stable() {
        let a = parse_config_str(MINIMAL).unwrap();
        let b = parse_config_str(MINIMAL).unwrap();
        assert_eq!(a.hash(), b.hash());
        let c = parse_config_str(&MINIMAL.replace("n = 20", "n = 22")).unwrap();
        assert_ne!(a.hash(), c.hash());
    }
}
