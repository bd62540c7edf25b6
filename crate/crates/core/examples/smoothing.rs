// Randomized smoothing as a post-hoc fix: audit an MLP, then the same models
// wrapped in Gaussian smoothing. All smoothed models share one noise sequence,
// so a flip reflects the removed point and not fresh noise.
//
//     cargo run --release --example smoothing -- [sigma_squared]

use loo_audit::data::{make_split, sample_synthetic, SyntheticSpec};
use loo_audit::metrics::audit_deterministic;
use loo_audit::rules::{LearningRule, NoisePairing, SmoothingConfig};

fn main() -> loo_audit::Result<()> {
    let sigma_squared: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.1);
    let data = sample_synthetic(&SyntheticSpec::uniform_bernoulli_square(60, 0.5, 5))?;
    let plan = make_split(&data, 0.8, 12, 5)?;
    let base = LearningRule::mlp(&[32, 32]).with_epochs(150).with_seed(5);

    let plain = audit_deterministic(&base, &data, &plan, data.point_ids())?;
    println!("base      expected LUF {:.3}", plain.expected_luf);
    for pairing in [NoisePairing::CommonRandomNumbers, NoisePairing::Independent] {
        let smoothed = base.clone().with_smoothing(SmoothingConfig {
            sigma_squared,
            num_samples: 1000,
            noise_seed: 0,
            pairing,
        });
        let r = audit_deterministic(&smoothed, &data, &plan, data.point_ids())?;
        println!("smoothed  expected LUF {:.3}  ({pairing:?}, sigma^2 = {sigma_squared})", r.expected_luf);
    }
    Ok(())
}
