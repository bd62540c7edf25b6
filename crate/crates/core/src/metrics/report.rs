use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Baseline prediction for one evaluation point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub point_id: u64,
    pub probabilities: Vec<f64>,
    pub label: usize,
    pub confidence: f64,
}

impl PredictionRecord {
    pub fn new(point_id: u64, probabilities: Vec<f64>) -> Self {
        let label = crate::rules::argmax(&probabilities);
        let confidence = confidence(&probabilities);
        PredictionRecord {
            point_id,
            probabilities,
            label,
            confidence,
        }
    }
}

/// Binary: `|p1 − 0.5|`. Multiclass: top-1 minus top-2 probability.
pub fn confidence(probs: &[f64]) -> f64 {
    match probs.len() {
        0 | 1 => 0.0,
        2 => (probs[1] - 0.5).abs(),
        _ => {
            let (mut top, mut second) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
            for &p in probs {
                if p > top {
                    second = top;
                    top = p;
                } else if p > second {
                    second = p;
                }
            }
            top - second
        }
    }
}

/// Threshold grid of the confidence curve.
pub fn confidence_grid(num_classes: usize) -> Vec<f64> {
    let steps = if num_classes <= 2 { 5 } else { 10 };
    (0..steps).map(|i| i as f64 / 10.0).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LufEstimate {
    pub point_id: u64,
    pub luf_value: f64,
    /// A variant attaining the maximum (the first in variant order); absent when the value is 0.
    pub responsible_removed_id: Option<u64>,
    pub num_leave_out_models: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidencePoint {
    pub threshold: f64,
    /// Mean LUF over points with confidence ≥ threshold; `None` if there are none.
    pub expected_luf: Option<f64>,
    pub num_points: usize,
}

/// Share of evaluation points whose prediction changes under one variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlipFraction {
    pub removed_id: u64,
    pub fraction: f64,
    pub flipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub mode: String,
    /// What a variant id denotes: `removed-id`, `seed` or `rule-index`.
    pub variant_label: String,
    pub rules: Vec<crate::rules::LearningRule>,
    pub split_seed: u64,
    pub num_train: usize,
    pub leave_out_ids: Vec<u64>,
    pub num_eval: usize,
    pub trials: Option<usize>,
    /// Binomial standard-error bound `1 / (2·sqrt(trials))` for randomized audits.
    pub standard_error: Option<f64>,
    pub dataset_digest: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LufReport {
    pub metadata: ReportMetadata,
    pub baseline: Vec<PredictionRecord>,
    pub estimates: Vec<LufEstimate>,
    pub expected_luf: f64,
    pub confidence_curve: Vec<ConfidencePoint>,
    pub flip_fractions: Vec<FlipFraction>,
    pub flip_histogram: Vec<HistogramBin>,
}

pub(crate) fn curve_from(baseline: &[PredictionRecord], estimates: &[LufEstimate], num_classes: usize) -> Vec<ConfidencePoint> {
    confidence_grid(num_classes)
        .into_iter()
        .map(|c| {
            let vals: Vec<f64> = baseline
                .iter()
                .zip(estimates)
                .filter(|(b, _)| b.confidence >= c)
                .map(|(_, e)| e.luf_value)
                .collect();
            ConfidencePoint {
                threshold: c,
                expected_luf: if vals.is_empty() {
                    None
                } else {
                    Some(vals.iter().sum::<f64>() / vals.len() as f64)
                },
                num_points: vals.len(),
            }
        })
        .collect()
}

pub(crate) fn histogram_from(fractions: &[FlipFraction]) -> Vec<HistogramBin> {
    const BINS: usize = 10;
    let max = fractions.iter().map(|f| f.fraction).fold(0.0, f64::max);
    let width = max / BINS as f64;
    let mut bins: Vec<HistogramBin> = (0..BINS)
        .map(|b| HistogramBin {
            lower: width * b as f64,
            upper: if b + 1 == BINS { max } else { width * (b + 1) as f64 },
            count: 0,
        })
        .collect();
    for f in fractions {
        let b = if width > 0.0 {
            ((f.fraction / width).floor() as usize).min(BINS - 1)
        } else {
            0
        };
        bins[b].count += 1;
    }
    bins
}

/// Builds a report from baseline records and a `variants × points` matrix of
/// per-point prediction differences in `[0, 1]`.
pub(crate) fn assemble(
    metadata: ReportMetadata,
    baseline: Vec<PredictionRecord>,
    variant_ids: &[u64],
    diffs: &[Vec<f64>],
    num_classes: usize,
) -> LufReport {
    let n = baseline.len();
    let estimates: Vec<LufEstimate> = (0..n)
        .map(|p| {
            let mut best = 0.0;
            let mut who = None;
            for (v, row) in diffs.iter().enumerate() {
                if row[p] > best {
                    best = row[p];
                    who = Some(variant_ids[v]);
                }
            }
            LufEstimate {
                point_id: baseline[p].point_id,
                luf_value: best,
                responsible_removed_id: who,
                num_leave_out_models: variant_ids.len(),
            }
        })
        .collect();
    let expected_luf = if n == 0 {
        0.0
    } else {
        estimates.iter().map(|e| e.luf_value).sum::<f64>() / n as f64
    };
    let flip_fractions: Vec<FlipFraction> = variant_ids
        .iter()
        .zip(diffs)
        .map(|(&id, row)| FlipFraction {
            removed_id: id,
            fraction: if n == 0 { 0.0 } else { row.iter().sum::<f64>() / n as f64 },
            flipped: row.iter().filter(|&&d| d > 0.0).count(),
        })
        .collect();
    let confidence_curve = curve_from(&baseline, &estimates, num_classes);
    let flip_histogram = histogram_from(&flip_fractions);
    LufReport {
        metadata,
        baseline,
        estimates,
        expected_luf,
        confidence_curve,
        flip_fractions,
        flip_histogram,
    }
}

impl LufReport {
    pub fn luf_of(&self, point_id: u64) -> Option<&LufEstimate> {
        self.estimates.iter().find(|e| e.point_id == point_id)
    }

    pub fn num_classes(&self) -> usize {
        self.baseline.first().map_or(2, |b| b.probabilities.len())
    }

    /// Fraction of evaluation points with a positive LUF value.
    pub fn flipped_fraction(&self) -> f64 {
        if self.estimates.is_empty() {
            return 0.0;
        }
        self.estimates.iter().filter(|e| e.luf_value > 0.0).count() as f64 / self.estimates.len() as f64
    }

    /// Expected LUF over points with baseline confidence ≥ `threshold`.
    pub fn expected_luf_above(&self, threshold: f64) -> Option<f64> {
        let vals: Vec<f64> = self
            .baseline
            .iter()
            .zip(&self.estimates)
            .filter(|(b, _)| b.confidence >= threshold)
            .map(|(_, e)| e.luf_value)
            .collect();
        (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
    }

    /// Recomputes the derived fields from the per-point records and checks
    /// they match what is stored.
    pub fn check_consistency(&self) -> Result<()> {
        let mean = if self.estimates.is_empty() {
            0.0
        } else {
            self.estimates.iter().map(|e| e.luf_value).sum::<f64>() / self.estimates.len() as f64
        };
        if (mean - self.expected_luf).abs() > 1e-12 {
            return Err(Error::Argument(format!(
                "expected LUF {} differs from the mean {mean}",
                self.expected_luf
            )));
        }
        if curve_from(&self.baseline, &self.estimates, self.num_classes()) != self.confidence_curve {
            return Err(Error::Argument("confidence curve does not match the per-point records".into()));
        }
        if histogram_from(&self.flip_fractions) != self.flip_histogram {
            return Err(Error::Argument("flip histogram does not match the flip fractions".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn confidence_definitions() {
        assert!((confidence(&[0.2, 0.8]) - 0.3).abs() < 1e-15);
        assert!((confidence(&[0.1, 0.6, 0.3]) - 0.3).abs() < 1e-15);
        assert_eq!(confidence(&[0.5, 0.5]), 0.0);
    }

    #[test]
    fn grids() {
        assert_eq!(confidence_grid(2), vec![0.0, 0.1, 0.2, 0.3, 0.4]);
        assert_eq!(confidence_grid(10).len(), 10);
    }

    #[test]
    fn histogram_deciles() {
        let f = |x: f64| FlipFraction {
            removed_id: 0,
            fraction: x,
            flipped: 0,
        };
        let h = histogram_from(&[f(0.0), f(0.05), f(0.5), f(0.5)]);
        assert_eq!(h.len(), 10);
        assert_eq!(h[0].count, 1);
        assert_eq!(h[1].count, 1);
        assert_eq!(h[9].count, 2);
        assert_eq!(h[9].upper, 0.5);
        let zeros = histogram_from(&[f(0.0), f(0.0)]);
        assert_eq!(zeros[0].count, 2);
    }
}
