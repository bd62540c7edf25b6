// A rule can be perfectly stable on its own training points and still flip
// predictions elsewhere. Compares the LOO-stability rate with LUF for 1-NN
// on random points, and checks that LUF = 0 forces stability.
//
//     cargo run --release --example stability_vs_luf

use loo_audit::data::{sample_synthetic, SplitPlan, SyntheticSpec};
use loo_audit::metrics::{dp_luf_bound, luf_oracle, oracle_stability_rate, prop2_check};
use loo_audit::rules::LearningRule;

fn main() -> loo_audit::Result<()> {
    println!("{:>4} {:>5} {:>12} {:>9} {:>8}", "seed", "p", "stability", "max LUF", "holds");
    for seed in 0..6 {
        for p in [0.0, 0.5] {
            let data = sample_synthetic(&SyntheticSpec::uniform_bernoulli_square(12, p, seed))?;
            let rule = LearningRule::knn(1);
            let plan = SplitPlan::exhaustive(&data);
            let v = prop2_check(&rule, &data, &plan)?;
            let flagged = luf_oracle(&rule, &data)?.iter().filter(|e| e.luf_value > 0.0).count();
            assert_eq!(v.loo_stability_rate, oracle_stability_rate(&rule, &data)?);
            println!(
                "{seed:>4} {p:>5} {:>12.3} {:>9} {:>8}  ({flagged} points flagged)",
                v.loo_stability_rate, v.max_luf, v.holds
            );
        }
    }
    println!("\nfor comparison, an (eps, 0)-DP rule has LUF at most e^eps - 1:");
    for eps in [0.01, 0.1, 0.5, 1.0] {
        println!("  eps {eps:<5} bound {:.4}", dp_luf_bound(eps, 0.0)?);
    }
    Ok(())
}
