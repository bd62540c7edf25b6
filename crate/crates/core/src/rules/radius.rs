use super::rule::AttackNorm;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::numerics::Rng;

/// Fraction of cross-class pairs allowed to be closer than the fallback radius.
pub const FALLBACK_QUANTILE: f64 = 0.01;

fn distance(a: &[f64], b: &[f64], norm: AttackNorm) -> f64 {
    match norm {
        AttackNorm::L2 => a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt(),
        AttackNorm::Linf => a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max),
    }
}

/// Adversarial radius from the data: the minimum cross-class distance over a
/// sample of at most `max_points` rows. When that minimum is zero, falls back
/// to the distance exceeded by 99% of cross-class pairs.
pub fn adversarial_radius(dataset: &Dataset, norm: AttackNorm, max_points: usize, seed: u64) -> Result<f64> {
    let mut rows: Vec<usize> = (0..dataset.len()).collect();
    if rows.len() > max_points {
        Rng::new(seed).shuffle(&mut rows);
        rows.truncate(max_points);
        rows.sort_unstable();
    }
    let x = dataset.features();
    let labels = dataset.labels();
    let mut dists = Vec::new();
    for (a, &i) in rows.iter().enumerate() {
        for &j in &rows[a + 1..] {
            if labels[i] != labels[j] {
                dists.push(distance(x.row(i), x.row(j), norm));
            }
        }
    }
    if dists.is_empty() {
        return Err(Error::Argument("the sample has no cross-class pairs".into()));
    }
    dists.sort_by(f64::total_cmp);
    if dists[0] > 0.0 {
        return Ok(dists[0]);
    }
    let idx = ((dists.len() as f64) * FALLBACK_QUANTILE).floor() as usize;
    let r = dists[idx.min(dists.len() - 1)];
    if r > 0.0 {
        Ok(r)
    } else {
        Err(Error::Degenerate(
            "more than 1% of cross-class pairs coincide; no positive radius".into(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Matrix;

    #[test]
    fn minimum_cross_class_distance() {
        let x = Matrix::from_rows(&[vec![0.0, 0.0], vec![3.0, 4.0], vec![0.0, 1.0]]).unwrap();
        let d = Dataset::with_row_ids(x, vec![0, 1, 0], 2).unwrap();
        assert!((adversarial_radius(&d, AttackNorm::L2, 100, 0).unwrap() - 18f64.sqrt()).abs() < 1e-12);
        assert_eq!(adversarial_radius(&d, AttackNorm::Linf, 100, 0).unwrap(), 3.0);
    }

    #[test]
    fn falls_back_when_classes_overlap() {
        // one duplicated cross-class pair among many
        let mut rows = vec![vec![0.0], vec![0.0]];
        let mut labels = vec![0, 1];
        for i in 0..200 {
            rows.push(vec![10.0 + i as f64]);
            labels.push(i % 2);
        }
        let d = Dataset::with_row_ids(Matrix::from_rows(&rows).unwrap(), labels, 2).unwrap();
        let r = adversarial_radius(&d, AttackNorm::L2, 1000, 0).unwrap();
        assert!(r > 0.0);
    }
}
