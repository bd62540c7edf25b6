//! Probability rasters over the unit square and their PPM encodings.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::numerics::Matrix;
use crate::rules::Model;

/// Row-major `resolution × resolution` values; row 0 is the top edge (y = 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Raster {
    pub resolution: usize,
    pub values: Vec<f64>,
}

impl Raster {
    /// Centre of cell `(row, col)` in `[0, 1]²`.
    pub fn cell_center(&self, row: usize, col: usize) -> [f64; 2] {
        let r = self.resolution as f64;
        [(col as f64 + 0.5) / r, 1.0 - (row as f64 + 0.5) / r]
    }

    /// Class-1 probability of `model` at every cell centre.
    pub fn of_model(model: &Model, resolution: usize) -> Result<Raster> {
        let mut data = Vec::with_capacity(2 * resolution * resolution);
        let blank = Raster {
            resolution,
            values: Vec::new(),
        };
        for row in 0..resolution {
            for col in 0..resolution {
                data.extend_from_slice(&blank.cell_center(row, col));
            }
        }
        let p = model.predict_proba(&Matrix::new(resolution * resolution, 2, data)?)?;
        Ok(Raster {
            resolution,
            values: (0..p.rows()).map(|r| p.get(r, 1)).collect(),
        })
    }

    /// `other − self`, cell by cell.
    pub fn difference(&self, other: &Raster) -> Raster {
        Raster {
            resolution: self.resolution,
            values: self.values.iter().zip(&other.values).map(|(a, b)| b - a).collect(),
        }
    }

    fn ppm(&self, color: impl Fn(f64) -> [u8; 3]) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.resolution, self.resolution).into_bytes();
        for &v in &self.values {
            out.extend_from_slice(&color(v));
        }
        out
    }

    /// Grayscale, black at 0 and white at 1.
    pub fn to_ppm(&self) -> Vec<u8> {
        self.ppm(|v| {
            let g = (v.clamp(0.0, 1.0) * 255.0).round() as u8;
            [g, g, g]
        })
    }

    /// Blue for −1, white for 0, red for +1.
    pub fn to_diverging_ppm(&self) -> Vec<u8> {
        self.ppm(|v| {
            let t = v.clamp(-1.0, 1.0);
            let fade = ((1.0 - t.abs()) * 255.0).round() as u8;
            if t >= 0.0 {
                [255, fade, fade]
            } else {
                [fade, fade, 255]
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ppm_header_and_size() {
        let r = Raster {
            resolution: 2,
            values: vec![0.0, 1.0, 0.5, 0.25],
        };
        let bytes = r.to_ppm();
        assert!(bytes.starts_with(b"P6\n2 2\n255\n"));
        assert_eq!(bytes.len(), 11 + 12);
        let d = r.to_diverging_ppm();
        assert_eq!(&d[11..14], &[255, 255, 255]);
        assert_eq!(&d[14..17], &[255, 0, 0]);
    }

    #[test]
    fn centers_run_top_down() {
        let r = Raster {
            resolution: 4,
            values: vec![],
        };
        assert_eq!(r.cell_center(0, 0), [0.125, 0.875]);
        assert_eq!(r.cell_center(3, 3), [0.875, 0.125]);
    }
}
