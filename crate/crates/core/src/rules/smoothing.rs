//! Randomized smoothing: the class frequencies of the base model's argmax over
//! Gaussian-perturbed copies of each input.
//!
//! Draw `j` uses the same noise vector for every input row, and the noise
//! sequence depends only on `(noise_seed, stream)`. Under common random numbers
//! the stream is fixed, so every model in an audit sees identical noise.

use serde::{Deserialize, Serialize};

use super::model::{argmax, Model};
use crate::error::{Error, Result};
use crate::numerics::rng::{Rng, STREAM_NOISE};
use crate::numerics::Matrix;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoisePairing {
    #[default]
    CommonRandomNumbers,
    Independent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmoothingConfig {
    pub sigma_squared: f64,
    pub num_samples: usize,
    #[serde(default)]
    pub noise_seed: u64,
    #[serde(default)]
    pub pairing: NoisePairing,
}

impl Default for SmoothingConfig {
    fn default() -> Self {
        SmoothingConfig {
            sigma_squared: 0.1,
            num_samples: 1000,
            noise_seed: 0,
            pairing: NoisePairing::CommonRandomNumbers,
        }
    }
}

impl SmoothingConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_squared > 0.0 && self.sigma_squared.is_finite()) {
            return Err(Error::Config(format!(
                "sigma_squared must be positive, got {}",
                self.sigma_squared
            )));
        }
        if self.num_samples == 0 {
            return Err(Error::Config("num_samples must be at least 1".into()));
        }
        Ok(())
    }
}

/// Per-draw class counts accumulated over the first `num_samples` draws.
pub(crate) fn smoothed_counts(base: &Model, config: &SmoothingConfig, stream: u64, x: &Matrix) -> Result<Vec<Vec<u64>>> {
    config.validate()?;
    let sigma = config.sigma_squared.sqrt();
    let k = base.num_classes();
    let mut counts = vec![vec![0u64; k]; x.rows()];
    let mut rng = Rng::derive_path(config.noise_seed, &[STREAM_NOISE, stream]);
    let d = x.cols();
    let mut eta = vec![0.0; d];
    let mut noisy = x.clone();
    for _ in 0..config.num_samples {
        for e in eta.iter_mut() {
            *e = sigma * rng.normal();
        }
        for r in 0..x.rows() {
            for ((o, &v), &e) in noisy.row_mut(r).iter_mut().zip(x.row(r)).zip(&eta) {
                *o = v + e;
            }
        }
        let p = base.predict_proba(&noisy)?;
        for (r, row) in p.iter_rows().enumerate() {
            counts[r][argmax(row)] += 1;
        }
    }
    Ok(counts)
}

pub(crate) fn smooth_predict_stream(base: &Model, config: &SmoothingConfig, stream: u64, x: &Matrix) -> Result<Matrix> {
    let counts = smoothed_counts(base, config, stream, x)?;
    let k = base.num_classes();
    let n = config.num_samples as f64;
    let data = counts.into_iter().flatten().map(|c| c as f64 / n).collect();
    Matrix::new(x.rows(), k, data)
}

/// Smoothed class probabilities of `model` at each row of `x`.
pub fn smooth_predict(model: &Model, config: &SmoothingConfig, x: &Matrix) -> Result<Matrix> {
    smooth_predict_stream(model, config, 0, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::MlpParams;

    #[test]
    fn constant_classifier_is_unchanged() {
        let m = Model::constant(1, 3);
        for (s2, n) in [(0.01, 1), (5.0, 50)] {
            let cfg = SmoothingConfig {
                sigma_squared: s2,
                num_samples: n,
                ..Default::default()
            };
            let p = smooth_predict(&m, &cfg, &Matrix::zeros(3, 2)).unwrap();
            assert_eq!(p, m.predict_proba(&Matrix::zeros(3, 2)).unwrap());
        }
    }

    #[test]
    fn prefix_counts_are_consistent() {
        let mut params = MlpParams::zeros(&[2, 1]).unwrap();
        params.weights[0].set(0, 0, 1.0);
        let m = Model::Mlp { params };
        let x = Matrix::from_rows(&[vec![0.1, 0.0], vec![-0.2, 0.3]]).unwrap();
        let cfg = SmoothingConfig {
            sigma_squared: 0.1,
            num_samples: 400,
            ..Default::default()
        };
        let full = smoothed_counts(&m, &cfg, 0, &x).unwrap();
        let short = smoothed_counts(&m, &SmoothingConfig { num_samples: 150, ..cfg }, 0, &x).unwrap();
        let rest = {
            // counts over draws 150..400 recomputed by differencing
            full.iter().zip(&short).map(|(f, s)| f.iter().zip(s).map(|(a, b)| a - b).collect::<Vec<_>>()).collect::<Vec<_>>()
        };
        for (r, s) in rest.iter().zip(&short) {
            assert_eq!(r.iter().sum::<u64>(), 250);
            assert_eq!(s.iter().sum::<u64>(), 150);
        }
        let p = smooth_predict(&m, &SmoothingConfig { num_samples: 150, ..cfg }, &x).unwrap();
        for (r, s) in short.iter().enumerate() {
            for (k, &c) in s.iter().enumerate() {
                assert_eq!(p.get(r, k), c as f64 / 150.0);
            }
        }
    }

    #[test]
    fn rejects_bad_config() {
        let m = Model::constant(0, 2);
        let bad = SmoothingConfig {
            num_samples: 0,
            ..Default::default()
        };
        assert!(smooth_predict(&m, &bad, &Matrix::zeros(1, 1)).is_err());
    }
}
