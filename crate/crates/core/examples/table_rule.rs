// The three-point table rule: no point's own loss ever changes when it is
// removed, yet every point's prediction flips under some removal.
//
//     cargo run --example table_rule

use loo_audit::scenarios::{prop1_report, run_prop1_scenario};

fn main() -> loo_audit::Result<()> {
    let result = run_prop1_scenario()?;
    for c in &result.claims {
        println!(
            "{:<24} expected {:>4} observed {:>4}  {}",
            c.description,
            c.expected,
            c.observed,
            if c.passed { "ok" } else { "FAILED" }
        );
    }
    let report = prop1_report()?;
    println!("\nremoved id  flipped share");
    for f in &report.flip_fractions {
        println!("{:>10}  {:.3}", f.removed_id, f.fraction);
    }
    std::process::exit(if result.passed() { 0 } else { 1 });
}
