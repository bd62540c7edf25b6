use std::collections::HashMap;
use std::sync::OnceLock;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::numerics::Matrix;

/// Immutable labelled sample: features (n × d), class labels and stable point ids.
#[derive(Debug, Clone)]
pub struct Dataset {
    features: Matrix,
    labels: Vec<usize>,
    num_classes: usize,
    point_ids: Vec<u64>,
    index: HashMap<u64, usize>,
    digest: OnceLock<String>,
}

impl PartialEq for Dataset {
    fn eq(&self, other: &Self) -> bool {
        self.features == other.features
            && self.labels == other.labels
            && self.num_classes == other.num_classes
            && self.point_ids == other.point_ids
    }
}

impl Dataset {
    pub fn new(features: Matrix, labels: Vec<usize>, num_classes: usize, point_ids: Vec<u64>) -> Result<Self> {
        let n = features.rows();
        if n == 0 {
            return Err(Error::Argument("a dataset needs at least one point".into()));
        }
        if labels.len() != n || point_ids.len() != n {
            return Err(Error::Dimension {
                context: "dataset labels/ids vs feature rows",
                expected: n,
                got: if labels.len() != n { labels.len() } else { point_ids.len() },
            });
        }
        if num_classes < 1 {
            return Err(Error::Argument("num_classes must be positive".into()));
        }
        if let Some(bad) = labels.iter().find(|&&l| l >= num_classes) {
            return Err(Error::Argument(format!(
                "label {bad} outside [0, {num_classes})"
            )));
        }
        let mut index = HashMap::with_capacity(n);
        for (row, &id) in point_ids.iter().enumerate() {
            if index.insert(id, row).is_some() {
                return Err(Error::Argument(format!("duplicate point id {id}")));
            }
        }
        Ok(Dataset {
            features,
            labels,
            num_classes,
            point_ids,
            index,
            digest: OnceLock::new(),
        })
    }

    /// Dataset whose point ids are the row indices.
    pub fn with_row_ids(features: Matrix, labels: Vec<usize>, num_classes: usize) -> Result<Self> {
        let ids = (0..features.rows() as u64).collect();
        Dataset::new(features, labels, num_classes, ids)
    }

    pub fn len(&self) -> usize {
        self.features.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.features.cols()
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn point_ids(&self) -> &[u64] {
        &self.point_ids
    }

    pub fn row_of(&self, id: u64) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn rows_of(&self, ids: &[u64]) -> Result<Vec<usize>> {
        ids.iter()
            .map(|&id| {
                self.row_of(id)
                    .ok_or_else(|| Error::Argument(format!("unknown point id {id}")))
            })
            .collect()
    }

    pub fn features_of(&self, ids: &[u64]) -> Result<Matrix> {
        Ok(self.features.select_rows(&self.rows_of(ids)?))
    }

    pub fn full_view(&self) -> DatasetView<'_> {
        DatasetView {
            dataset: self,
            rows: (0..self.len()).collect(),
        }
    }

    /// View over the given ids, in the given order.
    pub fn view(&self, ids: &[u64]) -> Result<DatasetView<'_>> {
        Ok(DatasetView {
            dataset: self,
            rows: self.rows_of(ids)?,
        })
    }

    /// New dataset holding only `ids`, in the given order, with their ids kept.
    pub fn subset(&self, ids: &[u64]) -> Result<Dataset> {
        let rows = self.rows_of(ids)?;
        Dataset::new(
            self.features.select_rows(&rows),
            rows.iter().map(|&r| self.labels[r]).collect(),
            self.num_classes,
            ids.to_vec(),
        )
    }

    /// Same points with feature columns reordered.
    pub fn with_permuted_columns(&self, order: &[usize]) -> Result<Dataset> {
        let mut seen = vec![false; self.dim()];
        if order.len() != self.dim() {
            return Err(Error::Dimension {
                context: "column permutation length",
                expected: self.dim(),
                got: order.len(),
            });
        }
        for &c in order {
            if c >= self.dim() || std::mem::replace(&mut seen[c], true) {
                return Err(Error::Argument(format!("{order:?} is not a permutation")));
            }
        }
        Dataset::new(
            self.features.select_cols(order),
            self.labels.clone(),
            self.num_classes,
            self.point_ids.clone(),
        )
    }

    /// SHA-256 over features, labels, class count and ids.
    pub fn digest(&self) -> &str {
        self.digest.get_or_init(|| {
            let mut h = Sha256::new();
            h.update((self.features.rows() as u64).to_le_bytes());
            h.update((self.features.cols() as u64).to_le_bytes());
            for v in self.features.data() {
                h.update(v.to_bits().to_le_bytes());
            }
            h.update((self.num_classes as u64).to_le_bytes());
            for &l in &self.labels {
                h.update((l as u64).to_le_bytes());
            }
            for &id in &self.point_ids {
                h.update(id.to_le_bytes());
            }
            hex::encode(h.finalize())
        })
    }
}

/// Training view: a row mask over a shared dataset. Row order follows `rows`.
#[derive(Debug, Clone)]
pub struct DatasetView<'a> {
    dataset: &'a Dataset,
    rows: Vec<usize>,
}

impl<'a> DatasetView<'a> {
    pub fn dataset(&self) -> &'a Dataset {
        self.dataset
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dataset.dim()
    }

    pub fn num_classes(&self) -> usize {
        self.dataset.num_classes()
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn point_ids(&self) -> Vec<u64> {
        self.rows.iter().map(|&r| self.dataset.point_ids[r]).collect()
    }

    pub fn features(&self) -> Matrix {
        self.dataset.features.select_rows(&self.rows)
    }

    /// Features of the view positions `positions`, in that order.
    pub fn features_at(&self, positions: &[usize]) -> Matrix {
        let rows: Vec<usize> = positions.iter().map(|&p| self.rows[p]).collect();
        self.dataset.features.select_rows(&rows)
    }

    pub fn labels(&self) -> Vec<usize> {
        self.rows.iter().map(|&r| self.dataset.labels[r]).collect()
    }

    pub fn labels_at(&self, positions: &[usize]) -> Vec<usize> {
        positions.iter().map(|&p| self.dataset.labels[self.rows[p]]).collect()
    }

    pub fn row_features(&self, position: usize) -> &'a [f64] {
        self.dataset.features.row(self.rows[position])
    }

    pub fn label(&self, position: usize) -> usize {
        self.dataset.labels[self.rows[position]]
    }

    /// Digest of the dataset content and the exact ordered id list of this view.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.dataset.digest().as_bytes());
        for &r in &self.rows {
            h.update(self.dataset.point_ids[r].to_le_bytes());
        }
        hex::encode(h.finalize())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> Dataset {
        let x = Matrix::from_rows(&[vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        Dataset::new(x, vec![0, 1, 1], 2, vec![10, 20, 30]).unwrap()
    }

    #[test]
    fn rejects_bad_inputs() {
        let x = Matrix::from_rows(&[vec![0.0], vec![1.0]]).unwrap();
        assert!(Dataset::new(x.clone(), vec![0, 2], 2, vec![0, 1]).is_err());
        assert!(Dataset::new(x.clone(), vec![0, 1], 2, vec![5, 5]).is_err());
        assert!(Dataset::new(x, vec![0], 2, vec![0, 1]).is_err());
        assert!(Dataset::new(Matrix::zeros(0, 2), vec![], 2, vec![]).is_err());
    }

    #[test]
    fn views_follow_ids() {
        let d = tiny();
        let v = d.view(&[30, 10]).unwrap();
        assert_eq!(v.point_ids(), vec![30, 10]);
        assert_eq!(v.labels(), vec![1, 0]);
        assert_eq!(v.features().data(), &[2.0, 0.0]);
        assert!(d.view(&[99]).is_err());
    }

    #[test]
    fn digest_is_stable_and_content_sensitive() {
        let a = tiny();
        assert_eq!(a.digest(), tiny().digest());
        let x = Matrix::from_rows(&[vec![0.0], vec![1.0], vec![2.5]]).unwrap();
        let b = Dataset::new(x, vec![0, 1, 1], 2, vec![10, 20, 30]).unwrap();
        assert_ne!(a.digest(), b.digest());
        assert_ne!(a.view(&[10, 20]).unwrap().digest(), a.view(&[20, 10]).unwrap().digest());
    }
}
