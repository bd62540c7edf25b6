//! Prediction instability across seeds or architectures at a fixed training set.

use rayon::prelude::*;

use super::audit::{flip_row, metadata, records, Auditor};
use super::report::LufReport;
use crate::data::{Dataset, SplitPlan};
use crate::error::{Error, Result};
use crate::rules::LearningRule;

impl<'t> Auditor<'t> {
    /// Flips relative to the first seed's model. Variant ids are the seeds.
    pub fn seed_instability(&self, rule: &LearningRule, dataset: &Dataset, plan: &SplitPlan, seeds: &[u64], eval_ids: &[u64]) -> Result<LufReport> {
        if seeds.len() < 2 {
            return Err(Error::Config("seed instability needs at least two seeds".into()));
        }
        let rules: Vec<LearningRule> = seeds.iter().map(|&s| rule.clone().with_seed(s)).collect();
        let mut report = self.compare(&rules, dataset, plan, eval_ids, seeds)?;
        report.metadata.mode = "seed-instability".into();
        report.metadata.variant_label = "seed".into();
        report.metadata.rules = vec![rule.clone()];
        Ok(report)
    }

    /// Flips relative to the first rule. Every rule is trained with the first
    /// rule's seed; variant ids are rule indices.
    pub fn architecture_instability(&self, rules: &[LearningRule], dataset: &Dataset, plan: &SplitPlan, eval_ids: &[u64]) -> Result<LufReport> {
        if rules.len() < 2 {
            return Err(Error::Config("architecture instability needs at least two rules".into()));
        }
        let seed = rules[0].seed;
        let seeded: Vec<LearningRule> = rules.iter().map(|r| r.clone().with_seed(seed)).collect();
        let ids: Vec<u64> = (0..rules.len() as u64).collect();
        let mut report = self.compare(&seeded, dataset, plan, eval_ids, &ids)?;
        report.metadata.mode = "arch-instability".into();
        report.metadata.variant_label = "rule-index".into();
        Ok(report)
    }

    fn compare(&self, rules: &[LearningRule], dataset: &Dataset, plan: &SplitPlan, eval_ids: &[u64], ids: &[u64]) -> Result<LufReport> {
        if eval_ids.is_empty() {
            return Err(Error::Argument("the evaluation set is empty".into()));
        }
        let x_eval = dataset.features_of(eval_ids)?;
        let view = plan.train_view(dataset)?;
        let models = rules
            .par_iter()
            .map(|r| self.trainer().train(r, &view, 0))
            .collect::<Result<Vec<_>>>()?;
        let k = models[0].num_classes();
        if let Some((i, m)) = models.iter().enumerate().find(|(_, m)| m.num_classes() != k) {
            return Err(Error::Config(format!(
                "rule {i} predicts {} classes but rule 0 predicts {k}",
                m.num_classes()
            )));
        }
        let baseline = records(eval_ids, &models[0].predict_proba(&x_eval)?);
        let diffs = models[1..]
            .par_iter()
            .map(|m| Ok(flip_row(&baseline, &m.predict(&x_eval)?)))
            .collect::<Result<Vec<_>>>()?;
        let meta = metadata("", "", rules.to_vec(), dataset, plan, eval_ids.len());
        Ok(super::report::assemble(meta, baseline, &ids[1..], &diffs, k))
    }
}

pub fn seed_instability(rule: &LearningRule, dataset: &Dataset, split_plan: &SplitPlan, seeds: &[u64]) -> Result<LufReport> {
    Auditor::default().seed_instability(rule, dataset, split_plan, seeds, dataset.point_ids())
}

pub fn architecture_instability(rules: &[LearningRule], dataset: &Dataset, split_plan: &SplitPlan) -> Result<LufReport> {
    Auditor::default().architecture_instability(rules, dataset, split_plan, dataset.point_ids())
}
