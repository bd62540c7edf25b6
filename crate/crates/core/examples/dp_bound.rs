// Monte Carlo LUF of the noisy-majority rule next to its DP bound e^ε − 1.
//
//     cargo run --release --example dp_bound -- [epsilon] [trials]

use loo_audit::metrics::dp_luf_bound;
use loo_audit::scenarios::run_dp_bound_scenario;

fn main() -> loo_audit::Result<()> {
    let mut args = std::env::args().skip(1);
    let epsilon: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.5);
    let trials: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(10_000);
    let result = run_dp_bound_scenario(epsilon, trials, 7)?;
    println!("bound e^{epsilon} - 1 = {:.6}", dp_luf_bound(epsilon, 0.0)?);
    println!("slack            = {}", result.metadata["slack"]);
    let worst = result.claims.iter().map(|c| c.observed).fold(0.0, f64::max);
    println!("largest LUF      = {worst:.4}");
    println!("all within bound = {}", result.passed());
    Ok(())
}
