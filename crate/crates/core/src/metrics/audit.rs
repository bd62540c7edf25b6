//! Leave-one-out audits: train the baseline on `S` and one variant per
//! removed point, then compare predictions point by point.

use rayon::prelude::*;

use super::report::{assemble, LufReport, PredictionRecord, ReportMetadata};
use crate::data::{leave_one_out, Dataset, DatasetView, SplitPlan};
use crate::error::{Error, Result};
use crate::numerics::Matrix;
use crate::rules::{argmax, train_trial, LearningRule, Model};

/// Source of trained models. The harness plugs in a caching implementation.
pub trait Trainer: Sync {
    fn train(&self, rule: &LearningRule, view: &DatasetView<'_>, trial: u64) -> Result<Model>;
}

/// Trains every request from scratch.
#[derive(Debug, Default, Clone, Copy)]
pub struct DirectTrainer;

impl Trainer for DirectTrainer {
    fn train(&self, rule: &LearningRule, view: &DatasetView<'_>, trial: u64) -> Result<Model> {
        train_trial(rule, view, trial)
    }
}

/// Runs audits through a [`Trainer`]. Variant trainings run on the current
/// rayon pool; results are reduced in a fixed order, so reports do not
/// depend on scheduling.
#[derive(Clone, Copy)]
pub struct Auditor<'t> {
    trainer: &'t dyn Trainer,
}

impl Default for Auditor<'static> {
    fn default() -> Self {
        Auditor { trainer: &DirectTrainer }
    }
}

pub(crate) fn metadata(
    mode: &str,
    variant_label: &str,
    rules: Vec<LearningRule>,
    dataset: &Dataset,
    plan: &SplitPlan,
    num_eval: usize,
) -> ReportMetadata {
    ReportMetadata {
        mode: mode.to_string(),
        variant_label: variant_label.to_string(),
        rules,
        split_seed: plan.seed,
        num_train: plan.train_ids.len(),
        leave_out_ids: plan.leave_out_ids.clone(),
        num_eval,
        trials: None,
        standard_error: None,
        dataset_digest: dataset.digest().to_string(),
    }
}

pub(crate) fn records(eval_ids: &[u64], probs: &Matrix) -> Vec<PredictionRecord> {
    eval_ids
        .iter()
        .zip(probs.iter_rows())
        .map(|(&id, p)| PredictionRecord::new(id, p.to_vec()))
        .collect()
}

pub(crate) fn flip_row(baseline: &[PredictionRecord], labels: &[usize]) -> Vec<f64> {
    baseline
        .iter()
        .zip(labels)
        .map(|(b, &l)| if b.label == l { 0.0 } else { 1.0 })
        .collect()
}

fn check_eval(eval_ids: &[u64]) -> Result<()> {
    if eval_ids.is_empty() {
        return Err(Error::Argument("the evaluation set is empty".into()));
    }
    Ok(())
}

impl<'t> Auditor<'t> {
    pub fn new(trainer: &'t dyn Trainer) -> Self {
        Auditor { trainer }
    }

    pub fn trainer(&self) -> &'t dyn Trainer {
        self.trainer
    }

    fn train_variant(&self, rule: &LearningRule, dataset: &Dataset, plan: &SplitPlan, removed: u64, trial: u64) -> Result<Model> {
        let view = leave_one_out(dataset, plan, removed)?;
        self.trainer.train(rule, &view, trial).map_err(|e| Error::Audit {
            removed_id: removed,
            source: Box::new(e),
        })
    }

    /// Deterministic-rule audit: a point's LUF is 1 iff some variant's
    /// argmax differs from the baseline's.
    pub fn audit_deterministic(&self, rule: &LearningRule, dataset: &Dataset, plan: &SplitPlan, eval_ids: &[u64]) -> Result<LufReport> {
        if !rule.is_deterministic() {
            return Err(Error::Config(format!(
                "{} is randomized; use audit_randomized",
                rule.kind_name()
            )));
        }
        check_eval(eval_ids)?;
        let x_eval = dataset.features_of(eval_ids)?;
        let base = self.trainer.train(rule, &plan.train_view(dataset)?, 0)?;
        let baseline = records(eval_ids, &base.predict_proba(&x_eval)?);
        let diffs = plan
            .leave_out_ids
            .par_iter()
            .map(|&removed| {
                let model = self.train_variant(rule, dataset, plan, removed, 0)?;
                Ok(flip_row(&baseline, &model.predict(&x_eval)?))
            })
            .collect::<Result<Vec<_>>>()?;
        let meta = metadata("luf", "removed-id", vec![rule.clone()], dataset, plan, eval_ids.len());
        Ok(assemble(meta, baseline, &plan.leave_out_ids, &diffs, base.num_classes()))
    }

    /// Randomized-rule audit: argmax frequencies over `trials` rule draws per
    /// training set; LUF is the largest class-frequency gap over removals.
    /// Trial `t` uses the same rule-randomness draw for every training set.
    pub fn audit_randomized(
        &self,
        rule: &LearningRule,
        dataset: &Dataset,
        plan: &SplitPlan,
        eval_ids: &[u64],
        trials: usize,
    ) -> Result<LufReport> {
        if trials < 2 {
            return Err(Error::Config(format!("trials must be at least 2, got {trials}")));
        }
        check_eval(eval_ids)?;
        let x_eval = dataset.features_of(eval_ids)?;
        // a deterministic rule gives the same model for every trial
        let draws = if rule.is_deterministic() { 1 } else { trials };
        let frequencies = |view: &DatasetView<'_>, removed: Option<u64>| -> Result<(Matrix, Matrix)> {
            let mut counts: Option<Matrix> = None;
            let mut proba_sum: Option<Matrix> = None;
            for t in 0..draws as u64 {
                let model = self.trainer.train(rule, view, t).map_err(|e| match removed {
                    Some(id) => Error::Audit {
                        removed_id: id,
                        source: Box::new(e),
                    },
                    None => e,
                })?;
                let p = model.predict_proba(&x_eval)?;
                let c = counts.get_or_insert_with(|| Matrix::zeros(p.rows(), p.cols()));
                for (r, row) in p.iter_rows().enumerate() {
                    let k = argmax(row);
                    c.set(r, k, c.get(r, k) + 1.0);
                }
                match proba_sum.as_mut() {
                    None => proba_sum = Some(p),
                    Some(s) => {
                        for (a, b) in s.data_mut().iter_mut().zip(p.data()) {
                            *a += b;
                        }
                    }
                }
            }
            let mut counts = counts.expect("at least one draw");
            let mut mean = proba_sum.expect("at least one draw");
            for v in counts.data_mut() {
                *v /= draws as f64;
            }
            if draws > 1 {
                for v in mean.data_mut() {
                    *v /= draws as f64;
                }
            }
            Ok((counts, mean))
        };
        let (base_freq, base_mean) = frequencies(&plan.train_view(dataset)?, None)?;
        let baseline = records(eval_ids, &base_mean);
        let diffs = plan
            .leave_out_ids
            .par_iter()
            .map(|&removed| {
                let view = leave_one_out(dataset, plan, removed)?;
                let (freq, _) = frequencies(&view, Some(removed))?;
                Ok((0..eval_ids.len())
                    .map(|r| {
                        base_freq
                            .row(r)
                            .iter()
                            .zip(freq.row(r))
                            .map(|(a, b)| (a - b).abs())
                            .fold(0.0, f64::max)
                    })
                    .collect::<Vec<f64>>())
            })
            .collect::<Result<Vec<_>>>()?;
        let mut meta = metadata("luf-randomized", "removed-id", vec![rule.clone()], dataset, plan, eval_ids.len());
        meta.trials = Some(trials);
        meta.standard_error = Some(1.0 / (2.0 * (trials as f64).sqrt()));
        Ok(assemble(meta, baseline, &plan.leave_out_ids, &diffs, base_freq.cols()))
    }
}

/// All point ids of the dataset, in dataset order.
pub fn all_ids(dataset: &Dataset) -> Vec<u64> {
    dataset.point_ids().to_vec()
}

pub fn audit_deterministic(rule: &LearningRule, dataset: &Dataset, split_plan: &SplitPlan, eval_ids: &[u64]) -> Result<LufReport> {
    Auditor::default().audit_deterministic(rule, dataset, split_plan, eval_ids)
}

pub fn audit_randomized(
    rule: &LearningRule,
    dataset: &Dataset,
    split_plan: &SplitPlan,
    eval_ids: &[u64],
    trials: usize,
) -> Result<LufReport> {
    Auditor::default().audit_randomized(rule, dataset, split_plan, eval_ids, trials)
}
