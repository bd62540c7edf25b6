use loo_audit::data::{sample_synthetic, Dataset, SyntheticSpec};
use loo_audit::numerics::Matrix;
use loo_audit::rules::LearningRule;
use loo_audit::scenarios::{
    boundary_rasters, dp_slack, run_dp_bound_scenario, run_figure1_scenario, run_prop1_scenario, run_two_circles_scenario,
};

#[test]
fn reruns_serialize_identically() {
    assert_eq!(run_prop1_scenario().unwrap().to_json(), run_prop1_scenario().unwrap().to_json());
    let tc = || run_two_circles_scenario(1.0, 16, 10, 4).unwrap().to_json();
    assert_eq!(tc(), tc());
    let dp = || run_dp_bound_scenario(0.5, 2000, 9).unwrap().to_json();
    assert_eq!(dp(), dp());
}

#[test]
fn boundary_scenario_rerun_is_bit_identical() {
    let run = || run_figure1_scenario(30, &[2, 8, 8, 1], 24, 2).unwrap();
    let (a, ra) = run();
    let (b, rb) = run();
    assert_eq!(a.to_json(), b.to_json());
    let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&ra.baseline.values), bits(&rb.baseline.values));
    assert_eq!(bits(&ra.variant.values), bits(&rb.variant.values));
    assert_eq!(ra.flipped_cells, rb.flipped_cells);
}

#[test]
fn boundary_scenario_needs_two_features() {
    assert!(run_figure1_scenario(30, &[3, 8, 1], 10, 0).is_err());
    let three = Dataset::with_row_ids(Matrix::zeros(4, 3), vec![0, 1, 0, 1], 2).unwrap();
    assert!(boundary_rasters(&LearningRule::knn(1), &three, 0, 10).is_err());
}

#[test]
fn removing_a_duplicate_flips_nothing_under_1nn() {
    let base = sample_synthetic(&SyntheticSpec::uniform_bernoulli_square(20, 0.5, 3)).unwrap();
    let mut rows: Vec<Vec<f64>> = base.features().iter_rows().map(<[f64]>::to_vec).collect();
    let mut labels = base.labels().to_vec();
    rows.push(rows[7].clone());
    labels.push(labels[7]);
    let d = Dataset::with_row_ids(Matrix::from_rows(&rows).unwrap(), labels, 2).unwrap();
    // ties break to the lowest index, so the copy at id 20 is never the answer
    let r = boundary_rasters(&LearningRule::knn(1), &d, 20, 60).unwrap();
    assert_eq!(r.flipped_cells, 0);
    assert!(r.difference.values.iter().all(|&v| v == 0.0));
}

#[test]
fn dp_slack_scales_as_inverse_root() {
    for trials in [1000, 2500, 10_000] {
        assert!((dp_slack(4 * trials) - dp_slack(trials) / 2.0).abs() < 1e-15);
    }
    assert_eq!(dp_slack(10_000), 0.015);
}

#[test]
fn huge_epsilon_stays_under_the_bound() {
    let r = run_dp_bound_scenario(1e6, 1000, 0).unwrap();
    assert!(r.passed());
}

#[test]
fn dp_claims_hold_at_several_epsilons() {
    for eps in [0.1, 0.5, 1.0, 2.0] {
        let r = run_dp_bound_scenario(eps, 4000, 1).unwrap();
        assert!(r.passed(), "epsilon {eps}");
    }
}

#[test]
fn two_circles_holds_across_seeds_and_diameters() {
    for (d, seed) in [(1.0, 0), (0.5, 1), (2.0, 2), (1.0, 3)] {
        let r = run_two_circles_scenario(d, 20, 15, seed).unwrap();
        assert!(r.passed(), "d {d} seed {seed}");
    }
}

#[test]
fn degenerate_two_circles_sample_is_rejected() {
    let err = run_two_circles_scenario(1.0, 3, 10, 0).unwrap_err();
    assert!(err.to_string().contains("seed"), "{err}");
}
