// Does adversarial training make predictions more or less sensitive to a
// single training point? Audits standard, PGD and TRADES training on the
// same split.
//
//     cargo run --release --example adversarial

use loo_audit::data::{make_split, sample_synthetic, SyntheticSpec};
use loo_audit::metrics::audit_deterministic;
use loo_audit::rules::{adversarial_radius, AttackConfig, AttackNorm, LearningRule};

fn main() -> loo_audit::Result<()> {
    let data = sample_synthetic(&SyntheticSpec::gaussian_blobs(80, 2, 2.5, 1.0, 11))?;
    let plan = make_split(&data, 0.8, 20, 11)?;

    // smallest distance between two points of different classes
    let radius = adversarial_radius(&data, AttackNorm::L2, 500, 11)?;
    let attack = AttackConfig::new(AttackNorm::L2, radius, 10);
    println!("l2 radius {radius:.4}, 10 steps");

    let rules = [
        ("standard", LearningRule::mlp(&[16, 16])),
        ("pgd", LearningRule::pgd(&[16, 16], attack)),
        ("trades b=1", LearningRule::trades(&[16, 16], attack, 1.0)),
        ("trades b=6", LearningRule::trades(&[16, 16], attack, 6.0)),
    ];
    println!("{:<12} {:>12} {:>10}", "rule", "expected LUF", "conf>=0.1");
    for (name, rule) in rules {
        let rule = rule.with_epochs(40).with_seed(11);
        let r = audit_deterministic(&rule, &data, &plan, data.point_ids())?;
        let high = r.expected_luf_above(0.1).map_or("-".to_string(), |v| format!("{v:.3}"));
        println!("{name:<12} {:>12.3} {high:>10}", r.expected_luf);
    }
    Ok(())
}
