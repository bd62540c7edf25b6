use super::result::{Claim, ScenarioResult};
use crate::data::SplitPlan;
use crate::error::Result;
use crate::metrics::{luf_oracle, Auditor, LufReport};
use crate::rules::{table_dataset, LearningRule};

/// Full audit of the table rule with every point left out once.
pub fn prop1_report() -> Result<LufReport> {
    let data = table_dataset();
    let plan = SplitPlan::exhaustive(&data);
    Auditor::default().audit_deterministic(&LearningRule::table(), &data, &plan, data.point_ids())
}

/// The table rule is LOO-stable with rate 0, yet every point has LUF 1.
pub fn run_prop1_scenario() -> Result<ScenarioResult> {
    let rule = LearningRule::table();
    let data = table_dataset();
    let plan = SplitPlan::exhaustive(&data);
    let mut out = ScenarioResult::new("prop1");

    let stability = Auditor::default().loo_stability(&rule, &data, &plan)?;
    out.claims.push(Claim::exact("LOO-stability rate", 0.0, stability.loo_stability_rate));
    for e in luf_oracle(&rule, &data)? {
        out.claims.push(Claim::exact(format!("oracle LUF at x{}", e.point_id), 1.0, e.luf_value));
    }
    let report = prop1_report()?;
    out.claims.push(Claim::exact("expected LUF", 1.0, report.expected_luf));
    out.note("points", crate::rules::table::TABLE_POINTS);
    out.note("labels", crate::rules::table::TABLE_LABELS);
    Ok(out)
}
