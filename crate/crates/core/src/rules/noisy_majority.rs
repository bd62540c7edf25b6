use super::model::Model;
use crate::data::DatasetView;
use crate::error::{Error, Result};
use crate::numerics::Rng;

/// Laplace scale for the signed label count: its sensitivity is 2 under
/// remove-one adjacency.
pub fn noisy_majority_scale(epsilon: f64) -> f64 {
    2.0 / epsilon
}

/// Constant classifier on `sign(#1 − #0 + Laplace(2/ε))`; `(ε, 0)`-DP.
pub fn predict_noisy_majority(view: &DatasetView<'_>, dp_epsilon: f64, rng: &mut Rng) -> Result<Model> {
    if view.num_classes() != 2 {
        return Err(Error::UnsupportedModel(
            "noisy majority is defined for binary labels only".into(),
        ));
    }
    if !(dp_epsilon > 0.0) {
        return Err(Error::Config(format!("dp epsilon must be positive, got {dp_epsilon}")));
    }
    let signed: i64 = view.labels().iter().map(|&l| if l == 1 { 1 } else { -1 }).sum();
    let noisy = signed as f64 + rng.laplace(noisy_majority_scale(dp_epsilon));
    Ok(Model::constant(usize::from(noisy > 0.0), 2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Dataset;
    use crate::numerics::Matrix;

    fn data(labels: Vec<usize>) -> Dataset {
        let n = labels.len();
        Dataset::with_row_ids(Matrix::zeros(n, 1), labels, 2).unwrap()
    }

    #[test]
    fn huge_epsilon_follows_the_majority() {
        let d = data((0..100).map(|i| usize::from(i >= 10)).collect());
        let mut rng = Rng::new(1);
        let ones = (0..10_000)
            .filter(|_| {
                let m = predict_noisy_majority(&d.full_view(), 1e6, &mut rng).unwrap();
                m.predict(&Matrix::zeros(1, 1)).unwrap()[0] == 1
            })
            .count();
        assert!(ones as f64 / 10_000.0 >= 0.999);
    }

    #[test]
    fn unanimous_labels_win_more_often_than_not() {
        for n in [1, 2, 5] {
            let d = data(vec![1; n]);
            let mut rng = Rng::new(n as u64);
            let ones = (0..4000)
                .filter(|_| {
                    let m = predict_noisy_majority(&d.full_view(), 1.0, &mut rng).unwrap();
                    m.predict(&Matrix::zeros(1, 1)).unwrap()[0] == 1
                })
                .count();
            assert!(ones > 2000, "n={n}: {ones}");
        }
    }

    #[test]
    fn genuinely_randomized() {
        let d = data(vec![0, 1]);
        let mut rng = Rng::new(4);
        let outcomes: std::collections::BTreeSet<usize> = (0..200)
            .map(|_| {
                predict_noisy_majority(&d.full_view(), 1.0, &mut rng)
                    .unwrap()
                    .predict(&Matrix::zeros(1, 1))
                    .unwrap()[0]
            })
            .collect();
        assert_eq!(outcomes.len(), 2);
    }

    #[test]
    fn multiclass_is_unsupported() {
        let d = Dataset::with_row_ids(Matrix::zeros(3, 1), vec![0, 1, 2], 3).unwrap();
        assert!(predict_noisy_majority(&d.full_view(), 1.0, &mut Rng::new(0)).is_err());
    }
}
