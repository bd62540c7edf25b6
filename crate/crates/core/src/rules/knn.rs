//! Brute-force exact k-nearest-neighbour classification (Euclidean).

use super::model::Model;
use crate::data::DatasetView;
use crate::error::{Error, Result};
use crate::numerics::Matrix;

/// Stores the training view verbatim, in view order.
pub fn train_knn(view: &DatasetView<'_>, k: usize) -> Result<Model> {
    if k == 0 {
        return Err(Error::Config("k must be positive".into()));
    }
    if view.is_empty() {
        return Err(Error::Argument("k-NN needs at least one training point".into()));
    }
    Ok(Model::Knn {
        k,
        features: view.features(),
        labels: view.labels(),
        num_classes: view.num_classes(),
    })
}

/// Positions of the `k` nearest stored points; distance ties go to the lower position.
pub fn nearest(features: &Matrix, query: &[f64], k: usize) -> Vec<usize> {
    let mut dists: Vec<(f64, usize)> = features
        .iter_rows()
        .enumerate()
        .map(|(i, row)| {
            let d: f64 = row.iter().zip(query).map(|(a, b)| (a - b) * (a - b)).sum();
            (d, i)
        })
        .collect();
    let k = k.min(dists.len());
    dists.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    dists[..k].iter().map(|&(_, i)| i).collect()
}

pub(crate) fn knn_predict_proba(
    features: &Matrix,
    labels: &[usize],
    num_classes: usize,
    k: usize,
    x: &Matrix,
) -> Result<Matrix> {
    if x.cols() != features.cols() {
        return Err(Error::Dimension {
            context: "k-NN query width",
            expected: features.cols(),
            got: x.cols(),
        });
    }
    let mut out = Matrix::zeros(x.rows(), num_classes);
    for (r, q) in x.iter_rows().enumerate() {
        let nn = nearest(features, q, k);
        let w = 1.0 / nn.len() as f64;
        for i in nn {
            let c = labels[i];
            out.set(r, c, out.get(r, c) + w);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Dataset;

    #[test]
    fn one_nn_returns_own_label() {
        let x = Matrix::from_rows(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 3.0]]).unwrap();
        let d = Dataset::with_row_ids(x.clone(), vec![1, 0, 1], 2).unwrap();
        let m = train_knn(&d.full_view(), 1).unwrap();
        assert_eq!(m.predict(&x).unwrap(), vec![1, 0, 1]);
        if let Model::Knn { features, labels, .. } = &m {
            assert_eq!(features, &x);
            assert_eq!(labels, &vec![1, 0, 1]);
        }
    }

    #[test]
    fn distance_ties_use_lowest_index() {
        let f = Matrix::from_rows(&[vec![1.0], vec![-1.0]]).unwrap();
        assert_eq!(nearest(&f, &[0.0], 1), vec![0]);
    }

    #[test]
    fn vote_fractions() {
        let x = Matrix::from_rows(&[vec![0.0], vec![0.1], vec![0.2], vec![5.0]]).unwrap();
        let d = Dataset::with_row_ids(x, vec![0, 1, 1, 0], 2).unwrap();
        let m = train_knn(&d.full_view(), 3).unwrap();
        let p = m.predict_proba(&Matrix::from_rows(&[vec![0.05]]).unwrap()).unwrap();
        assert!((p.get(0, 1) - 2.0 / 3.0).abs() < 1e-15);
    }
}
