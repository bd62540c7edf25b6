mod common;

use common::{max_relative_error, random_case};
use loo_audit::numerics::Rng;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn analytic_gradient_matches_central_differences(seed in any::<u64>(), kind in 0usize..3) {
        let case = random_case(&mut Rng::new(seed), kind);
        let err = max_relative_error(&case);
        prop_assert!(err <= 1e-5, "relative error {err} for dims {:?}", case.params.layer_dims);
    }
}

#[test]
fn error_floor_survey() {
    let mut rng = Rng::new(99);
    let worst = (0..60)
        .map(|i| max_relative_error(&random_case(&mut rng, i % 3)))
        .fold(0.0, f64::max);
    println!("worst relative error over 60 cases: {worst:e}");
    assert!(worst <= 1e-5);
}
