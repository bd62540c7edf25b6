use loo_audit::data::{sample_synthetic, Dataset, SyntheticSpec};
use loo_audit::numerics::{loss_value, LossKind, Matrix, MlpParams, OptimizerKind};
use loo_audit::numerics::loss::trades_loss;
use loo_audit::rules::{pgd_attack, smooth_predict, train, AttackConfig, AttackNorm, LearningRule, Model, SmoothingConfig};

fn accuracy(model: &Model, d: &Dataset) -> f64 {
    let pred = model.predict(d.features()).unwrap();
    pred.iter().zip(d.labels()).filter(|(p, y)| p == y).count() as f64 / d.len() as f64
}

fn bits(m: &Model) -> Vec<u64> {
    m.mlp_params().unwrap().flatten().iter().map(|v| v.to_bits()).collect()
}

#[test]
fn training_is_bit_deterministic() {
    let d = sample_synthetic(&SyntheticSpec::gaussian_blobs(60, 3, 3.0, 1.0, 1)).unwrap();
    let attack = AttackConfig::new(AttackNorm::L2, 0.3, 3);
    for rule in [
        LearningRule::mlp(&[8, 8]).with_epochs(15),
        LearningRule::pgd(&[8], attack).with_epochs(5),
        LearningRule::trades(&[8], attack, 2.0).with_epochs(5),
    ] {
        let a = train(&rule, &d.full_view()).unwrap();
        let b = train(&rule, &d.full_view()).unwrap();
        assert_eq!(bits(&a), bits(&b), "{}", rule.kind_name());
    }
}

#[test]
fn linear_fits_separable_blobs() {
    for seed in 0..4 {
        let d = sample_synthetic(&SyntheticSpec::gaussian_blobs(200, 2, 8.0, 1.0, seed)).unwrap();
        let rule = LearningRule::linear().with_epochs(100).with_optimizer(OptimizerKind::Adam, 1e-2);
        let acc = accuracy(&train(&rule, &d.full_view()).unwrap(), &d);
        assert!(acc >= 0.99, "seed {seed}: train accuracy {acc}");
    }
}

#[test]
fn zero_radius_pgd_training_is_standard_training() {
    let d = sample_synthetic(&SyntheticSpec::uniform_bernoulli_square(30, 0.5, 2)).unwrap();
    let zero = AttackConfig::new(AttackNorm::Linf, 0.0, 4);
    let pgd = train(&LearningRule::pgd(&[6], zero).with_epochs(10).with_seed(3), &d.full_view()).unwrap();
    let plain = train(&LearningRule::mlp(&[6]).with_epochs(10).with_seed(3), &d.full_view()).unwrap();
    assert_eq!(bits(&pgd), bits(&plain));
}

#[test]
fn pgd_training_fits_two_circles() {
    // radius 0.3 < d/2, so no attack crosses the gap between the discs
    for seed in 0..4 {
        let d = sample_synthetic(&SyntheticSpec::two_circles(40, 1.0, seed)).unwrap();
        let rule = LearningRule::pgd(&[16], AttackConfig::new(AttackNorm::L2, 0.3, 5))
            .with_epochs(100)
            .with_optimizer(OptimizerKind::Adam, 1e-2);
        let acc = accuracy(&train(&rule, &d.full_view()).unwrap(), &d);
        assert!(acc >= 0.99, "seed {seed}: train accuracy {acc}");
    }
}

fn small_network() -> (MlpParams, Matrix, Vec<usize>) {
    let d = sample_synthetic(&SyntheticSpec::uniform_bernoulli_square(20, 0.5, 8)).unwrap();
    let m = train(&LearningRule::mlp(&[5]).with_epochs(3), &d.full_view()).unwrap();
    (m.mlp_params().unwrap().clone(), d.features().clone(), d.labels().to_vec())
}

#[test]
fn trades_degenerates_to_natural_loss() {
    let (params, x, y) = small_network();
    let natural = loss_value(&params, &x, &y, LossKind::BinaryCrossEntropy).unwrap();
    let mut shifted = x.clone();
    for v in shifted.data_mut() {
        *v += 0.2;
    }
    let tiny_beta = trades_loss(&params, &x, &shifted, &y, 1e-12).unwrap();
    assert!((tiny_beta - natural).abs() <= 1e-8);
    // radius 0: the adversarial point is x itself, KL is exactly 0
    let same_point = trades_loss(&params, &x, &x, &y, 6.0).unwrap();
    assert!((same_point - natural).abs() <= 1e-12);
}

#[test]
fn zero_radius_attack_is_identity() {
    let (params, x, y) = small_network();
    for norm in [AttackNorm::L2, AttackNorm::Linf] {
        let out = pgd_attack(&Model::Mlp { params: params.clone() }, &x, &y, &AttackConfig::new(norm, 0.0, 5)).unwrap();
        assert_eq!(out, x);
    }
}

#[test]
fn wide_margin_survives_smoothing() {
    let mut params = MlpParams::zeros(&[2, 1]).unwrap();
    params.weights[0].set(0, 0, 1.0);
    let m = Model::Mlp { params };
    // distance 1 from the boundary, sigma 0.1: ten sigmas
    let x = Matrix::from_rows(&[vec![1.0, 0.0], vec![-1.0, 0.5]]).unwrap();
    let config = SmoothingConfig {
        sigma_squared: 0.01,
        num_samples: 1000,
        noise_seed: 17,
        ..Default::default()
    };
    let p = smooth_predict(&m, &config, &x).unwrap();
    assert!(p.get(0, 1) >= 0.999);
    assert!(p.get(1, 0) >= 0.999);
    assert_eq!(p, smooth_predict(&m, &config, &x).unwrap());
}

#[test]
fn probabilities_are_distributions() {
    let d = sample_synthetic(&SyntheticSpec::gaussian_blobs(45, 3, 2.0, 1.0, 9)).unwrap();
    let m = train(&LearningRule::mlp(&[8]).with_epochs(10), &d.full_view()).unwrap();
    let p = m.predict_proba(d.features()).unwrap();
    for row in p.iter_rows() {
        assert!((row.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        assert!(row.iter().all(|v| (0.0..=1.0).contains(v)));
    }
}
