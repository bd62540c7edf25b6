use super::result::{Claim, Comparison, ScenarioResult};
use crate::data::{Dataset, SplitPlan};
use crate::error::{Error, Result};
use crate::metrics::{dp_luf_bound, Auditor};
use crate::numerics::Matrix;
use crate::rules::LearningRule;

/// Points per class in the balanced dataset.
const HALF: usize = 5;

/// Balanced labels, so the signed count is 0 and every removal moves it by one.
pub fn balanced_dataset() -> Dataset {
    let n = 2 * HALF;
    let x = Matrix::new(n, 1, (0..n).map(|i| i as f64).collect()).unwrap();
    Dataset::with_row_ids(x, (0..n).map(|i| i % 2).collect(), 2).unwrap()
}

/// Slack of three binomial standard errors.
pub fn dp_slack(trials: usize) -> f64 {
    3.0 / (2.0 * (trials as f64).sqrt())
}

/// Monte Carlo LUF of the noisy-majority rule against its DP bound.
pub fn run_dp_bound_scenario(epsilon: f64, trials: usize, seed: u64) -> Result<ScenarioResult> {
    if trials < 1000 {
        return Err(Error::Config(format!("trials must be at least 1000, got {trials}")));
    }
    let bound = dp_luf_bound(epsilon, 0.0)?;
    let data = balanced_dataset();
    let plan = SplitPlan::exhaustive(&data);
    let rule = LearningRule::noisy_majority(epsilon).with_seed(seed);
    let report = Auditor::default().audit_randomized(&rule, &data, &plan, data.point_ids(), trials)?;
    let slack = dp_slack(trials);
    let mut out = ScenarioResult::new("dp-bound");
    for e in &report.estimates {
        out.claims.push(Claim::new(
            format!("Monte Carlo LUF at point {}", e.point_id),
            bound + slack,
            e.luf_value,
            Comparison::AtMost,
        ));
    }
    out.note("epsilon", epsilon);
    out.note("trials", trials);
    out.note("bound", bound);
    out.note("slack", slack);
    out.note("seed", seed);
    out.note("expected_luf", report.expected_luf);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slack_halves_with_four_times_the_trials() {
        assert!((dp_slack(10_000) - 0.015).abs() < 1e-15);
        assert!((dp_slack(40_000) * 2.0 - dp_slack(10_000)).abs() < 1e-15);
    }

    #[test]
    fn too_few_trials() {
        assert!(run_dp_bound_scenario(0.5, 999, 0).is_err());
    }
}
