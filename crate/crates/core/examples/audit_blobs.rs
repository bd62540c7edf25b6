// Leave-one-out audit of a small MLP on three Gaussian blobs: expected LUF,
// the confidence curve and the removals that move the most predictions.
//
//     cargo run --release --example audit_blobs -- [out_dir]

use std::path::PathBuf;

use loo_audit::data::{make_split, sample_synthetic, SyntheticSpec};
use loo_audit::harness::{emit_plots, write_report};
use loo_audit::metrics::audit_deterministic;
use loo_audit::rules::LearningRule;

fn main() -> loo_audit::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "audit_blobs".into()));
    let data = sample_synthetic(&SyntheticSpec::gaussian_blobs(150, 3, 3.0, 1.0, 7))?;
    let plan = make_split(&data, 0.8, 30, 7)?;
    let rule = LearningRule::mlp(&[32, 32]).with_epochs(60).with_seed(7);

    let report = audit_deterministic(&rule, &data, &plan, data.point_ids())?;
    println!("{} points, {} leave-out models", data.len(), plan.leave_out_ids.len());
    println!("expected LUF        {:.3}", report.expected_luf);
    println!("points ever flipped {:.1}%", 100.0 * report.flipped_fraction());

    println!("\nconfidence >=  points  expected LUF");
    for p in &report.confidence_curve {
        match p.expected_luf {
            Some(v) => println!("{:>12.2}  {:>6}  {v:.3}", p.threshold, p.num_points),
            None => println!("{:>12.2}  {:>6}  -", p.threshold, p.num_points),
        }
    }

    let mut worst = report.flip_fractions.clone();
    worst.sort_by(|a, b| b.flipped.cmp(&a.flipped).then(a.removed_id.cmp(&b.removed_id)));
    println!("\nremovals with the most flips:");
    for f in worst.iter().take(5) {
        println!("  drop {:>3} -> {:>3} predictions change", f.removed_id, f.flipped);
    }

    let mut files = write_report(&report, &out)?;
    files.extend(emit_plots(&report, &out)?);
    println!("\nwrote {} files to {}", files.len(), out.display());
    Ok(())
}
