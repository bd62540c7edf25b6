use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::audit::Auditor;
use super::bound::dp_luf_bound;
use crate::data::{leave_one_out, Dataset, SplitPlan};
use crate::error::{Error, Result};
use crate::rules::LearningRule;

/// Own-point 0-1 loss with and without the point, for one removed point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OwnLossChange {
    pub point_id: u64,
    pub loss_with: f64,
    pub loss_without: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityEstimate {
    /// Plug-in LOO-stability rate under 0-1 loss at the audited training set.
    pub loo_stability_rate: f64,
    /// `e^ε − 1 + δ` when the rule declares DP parameters.
    pub dp_bound: Option<f64>,
    pub per_point: Vec<OwnLossChange>,
}

impl<'t> Auditor<'t> {
    /// Mean over `i ∈ O` of `|ℓ01(h_S, z_i) − ℓ01(h_{S∖i}, z_i)|`.
    pub fn loo_stability(&self, rule: &LearningRule, dataset: &Dataset, plan: &SplitPlan) -> Result<StabilityEstimate> {
        if plan.leave_out_ids.is_empty() {
            return Err(Error::Argument("LOO-stability needs a nonempty leave-out set".into()));
        }
        let x_o = dataset.features_of(&plan.leave_out_ids)?;
        let rows = dataset.rows_of(&plan.leave_out_ids)?;
        let y_o: Vec<usize> = rows.iter().map(|&r| dataset.labels()[r]).collect();
        let base = self.trainer().train(rule, &plan.train_view(dataset)?, 0)?;
        let base_pred = base.predict(&x_o)?;
        let per_point = plan
            .leave_out_ids
            .par_iter()
            .enumerate()
            .map(|(j, &id)| {
                let view = leave_one_out(dataset, plan, id)?;
                let model = self.trainer().train(rule, &view, 0).map_err(|e| Error::Audit {
                    removed_id: id,
                    source: Box::new(e),
                })?;
                let pred = model.predict(&x_o.select_rows(&[j]))?[0];
                Ok(OwnLossChange {
                    point_id: id,
                    loss_with: f64::from(u8::from(base_pred[j] != y_o[j])),
                    loss_without: f64::from(u8::from(pred != y_o[j])),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let rate = per_point
            .iter()
            .map(|c| (c.loss_with - c.loss_without).abs())
            .sum::<f64>()
            / per_point.len() as f64;
        let dp_bound = match rule.dp_parameters() {
            Some((eps, delta)) => Some(dp_luf_bound(eps, delta)?),
            None => None,
        };
        Ok(StabilityEstimate {
            loo_stability_rate: rate,
            dp_bound,
            per_point,
        })
    }
}

pub fn loo_stability(rule: &LearningRule, dataset: &Dataset, split_plan: &SplitPlan) -> Result<StabilityEstimate> {
    Auditor::default().loo_stability(rule, dataset, split_plan)
}
