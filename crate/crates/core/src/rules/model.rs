use serde::{Deserialize, Serialize};

use super::knn::knn_predict_proba;
use super::smoothing::{smooth_predict_stream, SmoothingConfig};
use super::table::TableAssignment;
use crate::error::{Error, Result};
use crate::numerics::loss::class_probs;
use crate::numerics::mlp::forward;
use crate::numerics::{Matrix, MlpParams};

/// A trained predictor. Immutable after training.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Model {
    Mlp {
        params: MlpParams,
    },
    Knn {
        k: usize,
        features: Matrix,
        labels: Vec<usize>,
        num_classes: usize,
    },
    Table {
        assignment: TableAssignment,
    },
    Constant {
        probs: Vec<f64>,
    },
    /// Base model evaluated under Gaussian input noise.
    Smoothed {
        base: Box<Model>,
        config: SmoothingConfig,
        noise_stream: u64,
    },
}

/// Index of the largest entry; ties go to the lowest index.
pub fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (k, &v) in row.iter().enumerate() {
        if v > row[best] {
            best = k;
        }
    }
    best
}

impl Model {
    pub fn num_classes(&self) -> usize {
        match self {
            Model::Mlp { params } => params.num_classes(),
            Model::Knn { num_classes, .. } => *num_classes,
            Model::Table { .. } => 2,
            Model::Constant { probs } => probs.len(),
            Model::Smoothed { base, .. } => base.num_classes(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Model::Mlp { .. } => "mlp",
            Model::Knn { .. } => "knn",
            Model::Table { .. } => "table",
            Model::Constant { .. } => "constant",
            Model::Smoothed { .. } => "smoothed",
        }
    }

    pub fn constant(class: usize, num_classes: usize) -> Model {
        let mut probs = vec![0.0; num_classes];
        probs[class] = 1.0;
        Model::Constant { probs }
    }

    /// Per-class probabilities, one row per input row (binary models give two columns).
    pub fn predict_proba(&self, x: &Matrix) -> Result<Matrix> {
        match self {
            Model::Mlp { params } => {
                let out = forward(params, x)?;
                let k = params.num_classes();
                let mut data = Vec::with_capacity(x.rows() * k);
                for r in 0..x.rows() {
                    data.extend(class_probs(params.output, &out, r));
                }
                Matrix::new(x.rows(), k, data)
            }
            Model::Knn {
                k,
                features,
                labels,
                num_classes,
            } => knn_predict_proba(features, labels, *num_classes, *k, x),
            Model::Table { assignment } => {
                let mut data = Vec::with_capacity(2 * x.rows());
                for row in x.iter_rows() {
                    let class = assignment.classify(row);
                    data.extend_from_slice(if class == 1 { &[0.0, 1.0] } else { &[1.0, 0.0] });
                }
                Matrix::new(x.rows(), 2, data)
            }
            Model::Constant { probs } => {
                let mut data = Vec::with_capacity(probs.len() * x.rows());
                for _ in 0..x.rows() {
                    data.extend_from_slice(probs);
                }
                Matrix::new(x.rows(), probs.len(), data)
            }
            Model::Smoothed {
                base,
                config,
                noise_stream,
            } => smooth_predict_stream(base, config, *noise_stream, x),
        }
    }

    pub fn predict(&self, x: &Matrix) -> Result<Vec<usize>> {
        let p = self.predict_proba(x)?;
        Ok(p.iter_rows().map(argmax).collect())
    }

    /// The underlying network, for attacks and gradient-based tooling.
    pub fn mlp_params(&self) -> Result<&MlpParams> {
        match self {
            Model::Mlp { params } => Ok(params),
            other => Err(Error::UnsupportedModel(format!(
                "{} models are not differentiable",
                other.kind_name()
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmax_breaks_ties_low() {
        assert_eq!(argmax(&[0.5, 0.5]), 0);
        assert_eq!(argmax(&[0.2, 0.4, 0.4]), 1);
    }

    #[test]
    fn constant_model_rows() {
        let m = Model::constant(2, 3);
        let p = m.predict_proba(&Matrix::zeros(4, 5)).unwrap();
        assert_eq!(p.rows(), 4);
        assert_eq!(m.predict(&Matrix::zeros(2, 1)).unwrap(), vec![2, 2]);
    }

    #[test]
    fn knn_is_not_differentiable() {
        let m = Model::constant(0, 2);
        assert!(matches!(m.mlp_params(), Err(Error::UnsupportedModel(_))));
    }
}
