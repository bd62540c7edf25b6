use serde::{Deserialize, Serialize};

use super::oracle::{luf_oracle, oracle_stability_rate};
use crate::data::{Dataset, SplitPlan};
use crate::error::Result;
use crate::rules::LearningRule;

/// Exact LOO-stability rate and max LUF over the training points of one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prop2Verdict {
    pub loo_stability_rate: f64,
    pub max_luf: f64,
    pub holds: bool,
}

/// Checks `rate ≤ max_x LUF(h, S, x)` at the plan's training set.
pub fn prop2_check(rule: &LearningRule, dataset: &Dataset, split_plan: &SplitPlan) -> Result<Prop2Verdict> {
    let train = dataset.subset(&split_plan.train_ids)?;
    let rate = oracle_stability_rate(rule, &train)?;
    let max_luf = luf_oracle(rule, &train)?
        .iter()
        .map(|e| e.luf_value)
        .fold(0.0, f64::max);
    Ok(Prop2Verdict {
        loo_stability_rate: rate,
        max_luf,
        holds: rate <= max_luf,
    })
}
