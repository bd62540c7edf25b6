use serde::{Deserialize, Serialize};

use super::dataset::Dataset;
use crate::error::{Error, Result};
use crate::numerics::rng::{Rng, STREAM_SYNTHETIC};
use crate::numerics::Matrix;

/// Synthetic distributions used by the scenarios and examples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SyntheticKind {
    /// Features uniform on the unit square, labels Bernoulli(`p`).
    UniformBernoulliSquare { n: usize, p: f64 },
    /// Class 0 uniform in a disc of the given diameter at the origin, class 1
    /// in an equal disc centred `3·diameter` away along the first axis.
    TwoCircles { n: usize, diameter: f64 },
    /// Isotropic Gaussian classes with means on a circle of diameter `separation`.
    GaussianBlobs {
        n: usize,
        num_classes: usize,
        separation: f64,
        std: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    #[serde(flatten)]
    pub kind: SyntheticKind,
    #[serde(default)]
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn two_circles(n: usize, diameter: f64, seed: u64) -> Self {
        SyntheticSpec {
            kind: SyntheticKind::TwoCircles { n, diameter },
            seed,
        }
    }

    pub fn uniform_bernoulli_square(n: usize, p: f64, seed: u64) -> Self {
        SyntheticSpec {
            kind: SyntheticKind::UniformBernoulliSquare { n, p },
            seed,
        }
    }

    pub fn gaussian_blobs(n: usize, num_classes: usize, separation: f64, std: f64, seed: u64) -> Self {
        SyntheticSpec {
            kind: SyntheticKind::GaussianBlobs {
                n,
                num_classes,
                separation,
                std,
            },
            seed,
        }
    }
}

/// Centres of the two discs for a given diameter.
pub fn two_circle_centers(diameter: f64) -> [[f64; 2]; 2] {
    [[0.0, 0.0], [3.0 * diameter, 0.0]]
}

fn point_in_disc(rng: &mut Rng, center: [f64; 2], radius: f64) -> [f64; 2] {
    // sqrt(u) with u < 1 keeps the point strictly inside
    let r = radius * rng.next_f64().sqrt();
    let theta = rng.uniform(0.0, std::f64::consts::TAU);
    [center[0] + r * theta.cos(), center[1] + r * theta.sin()]
}

pub fn sample_synthetic(spec: &SyntheticSpec) -> Result<Dataset> {
    let mut rng = Rng::derive(spec.seed, STREAM_SYNTHETIC);
    match spec.kind {
        SyntheticKind::UniformBernoulliSquare { n, p } => {
            if n == 0 {
                return Err(Error::Config("n must be positive".into()));
            }
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("label probability {p} outside [0, 1]")));
            }
            let mut data = Vec::with_capacity(2 * n);
            let mut labels = Vec::with_capacity(n);
            for _ in 0..n {
                data.push(rng.next_f64());
                data.push(rng.next_f64());
                labels.push(usize::from(rng.bernoulli(p)));
            }
            Dataset::with_row_ids(Matrix::new(n, 2, data)?, labels, 2)
        }
        SyntheticKind::TwoCircles { n, diameter } => {
            if n == 0 {
                return Err(Error::Config("n must be positive".into()));
            }
            if !(diameter > 0.0 && diameter.is_finite()) {
                return Err(Error::Config(format!("diameter must be positive, got {diameter}")));
            }
            let centers = two_circle_centers(diameter);
            let mut data = Vec::with_capacity(2 * n);
            let mut labels = Vec::with_capacity(n);
            for i in 0..n {
                let class = i % 2;
                let p = point_in_disc(&mut rng, centers[class], diameter / 2.0);
                data.extend_from_slice(&p);
                labels.push(class);
            }
            Dataset::with_row_ids(Matrix::new(n, 2, data)?, labels, 2)
        }
        SyntheticKind::GaussianBlobs {
            n,
            num_classes,
            separation,
            std,
        } => {
            if n == 0 || num_classes < 2 {
                return Err(Error::Config("need n > 0 and at least two classes".into()));
            }
            if !(std >= 0.0 && separation >= 0.0) {
                return Err(Error::Config("std and separation must be non-negative".into()));
            }
            let mut data = Vec::with_capacity(2 * n);
            let mut labels = Vec::with_capacity(n);
            for i in 0..n {
                let class = i % num_classes;
                let angle = std::f64::consts::PI + std::f64::consts::TAU * class as f64 / num_classes as f64;
                let (mx, my) = (0.5 * separation * angle.cos(), 0.5 * separation * angle.sin());
                data.push(mx + std * rng.normal());
                data.push(my + std * rng.normal());
                labels.push(class);
            }
            Dataset::with_row_ids(Matrix::new(n, 2, data)?, labels, num_classes)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(a: &[f64], b: &[f64]) -> f64 {
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
    }

    #[test]
    fn two_circles_geometry() {
        let d = sample_synthetic(&SyntheticSpec::two_circles(100, 1.0, 9)).unwrap();
        let centers = two_circle_centers(1.0);
        let x = d.features();
        for i in 0..d.len() {
            assert!(dist(x.row(i), &centers[d.labels()[i]]) < 0.5);
        }
        let mut min_cross = f64::INFINITY;
        for i in 0..d.len() {
            for j in 0..d.len() {
                if d.labels()[i] != d.labels()[j] {
                    min_cross = min_cross.min(dist(x.row(i), x.row(j)));
                }
            }
        }
        assert!(min_cross >= 2.0 - 1e-12);
    }

    #[test]
    fn bernoulli_zero_gives_all_zeros() {
        let d = sample_synthetic(&SyntheticSpec::uniform_bernoulli_square(50, 0.0, 1)).unwrap();
        assert!(d.labels().iter().all(|&l| l == 0));
        assert!(d.features().data().iter().all(|&v| (0.0..1.0).contains(&v)));
    }

    #[test]
    fn deterministic_per_seed() {
        let s = SyntheticSpec::gaussian_blobs(40, 3, 4.0, 0.5, 2);
        assert_eq!(sample_synthetic(&s).unwrap(), sample_synthetic(&s).unwrap());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(sample_synthetic(&SyntheticSpec::two_circles(10, 0.0, 0)).is_err());
        assert!(sample_synthetic(&SyntheticSpec::two_circles(0, 1.0, 0)).is_err());
        assert!(sample_synthetic(&SyntheticSpec::uniform_bernoulli_square(0, 0.5, 0)).is_err());
    }
}
