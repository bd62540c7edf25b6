// Two cheaper kinds of arbitrariness next to leave-one-out: retraining with a
// different seed, and swapping the architecture. Both reuse the LUF machinery
// with the variant axis changed.
//
//     cargo run --release --example instability

use loo_audit::data::{make_split, sample_synthetic, SyntheticSpec};
use loo_audit::metrics::{architecture_instability, audit_deterministic, seed_instability};
use loo_audit::numerics::OptimizerKind;
use loo_audit::rules::LearningRule;

fn main() -> loo_audit::Result<()> {
    let data = sample_synthetic(&SyntheticSpec::gaussian_blobs(90, 2, 2.0, 1.0, 3))?;
    let plan = make_split(&data, 0.8, 15, 3)?;
    let fit = |r: LearningRule| r.with_epochs(50).with_optimizer(OptimizerKind::Adam, 1e-2);
    let rule = fit(LearningRule::mlp(&[16, 16]));

    let loo = audit_deterministic(&rule, &data, &plan, data.point_ids())?;
    let seeds: Vec<u64> = (0..8).collect();
    let by_seed = seed_instability(&rule, &data, &plan, &seeds)?;
    // the first rule is the baseline the others are compared with
    let archs = [
        rule.clone(),
        fit(LearningRule::linear()),
        fit(LearningRule::mlp(&[8])),
        fit(LearningRule::mlp(&[32, 32, 32])),
    ];
    let by_arch = architecture_instability(&archs, &data, &plan)?;

    println!("{:<22} {:>8} {:>12}", "variants", "count", "expected LUF");
    println!("{:<22} {:>8} {:>12.3}", "leave one out", plan.leave_out_ids.len(), loo.expected_luf);
    println!("{:<22} {:>8} {:>12.3}", "training seed", seeds.len(), by_seed.expected_luf);
    println!("{:<22} {:>8} {:>12.3}", "architecture", archs.len(), by_arch.expected_luf);
    Ok(())
}
