use serde::Serialize;

use super::result::{Claim, ScenarioResult};
use crate::data::synthetic::two_circle_centers;
use crate::data::{sample_synthetic, SyntheticSpec};
use crate::error::{Error, Result};
use crate::metrics::luf_oracle_at;
use crate::numerics::Matrix;
use crate::rules::{LearningRule, Model};

const SEGMENT_PROBES: usize = 2001;

/// Adjacent training sets and a probe whose 1-NN output moves from
/// probability 1 to probability 0 for the baseline class.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DpWitness {
    pub probe: [f64; 2],
    pub removed_id: u64,
    pub class: usize,
    pub prob_with: f64,
    pub prob_without: f64,
}

/// Grid-cell centres of a `res × res` lattice over the disc's bounding
/// square, kept if strictly inside the disc.
fn disc_grid(center: [f64; 2], radius: f64, res: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for i in 0..res {
        for j in 0..res {
            let x = center[0] - radius + 2.0 * radius * (i as f64 + 0.5) / res as f64;
            let y = center[1] - radius + 2.0 * radius * (j as f64 + 0.5) / res as f64;
            if (x - center[0]).hypot(y - center[1]) < radius {
                out.push(vec![x, y]);
            }
        }
    }
    out
}

fn label_at(model: &Model, x: f64) -> Result<usize> {
    Ok(model.predict(&Matrix::from_rows(&[vec![x, 0.0]])?)?[0])
}

/// Probes along the open segment between the two discs, plus the two points
/// straddling the baseline decision boundary after bisection.
fn segment_probes(model: &Model, diameter: f64) -> Result<Vec<Vec<f64>>> {
    let (lo, hi) = (diameter / 2.0, 2.5 * diameter);
    let mut probes: Vec<Vec<f64>> = (1..SEGMENT_PROBES)
        .map(|i| vec![lo + (hi - lo) * i as f64 / SEGMENT_PROBES as f64, 0.0])
        .collect();
    let (mut a, mut b) = (lo, hi);
    let (la, lb) = (label_at(model, a)?, label_at(model, b)?);
    if la != lb {
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if label_at(model, m)? == la {
                a = m;
            } else {
                b = m;
            }
        }
        probes.push(vec![a, 0.0]);
        probes.push(vec![b, 0.0]);
    }
    Ok(probes)
}

/// 1-NN on two well-separated discs: zero LUF on the support, flips off it,
/// and a single-removal witness that 1-NN is not differentially private.
pub fn run_two_circles_scenario(diameter: f64, n: usize, grid_resolution: usize, seed: u64) -> Result<ScenarioResult> {
    if !(diameter > 0.0) {
        return Err(Error::Config(format!("diameter must be positive, got {diameter}")));
    }
    if grid_resolution == 0 {
        return Err(Error::Config("grid resolution must be positive".into()));
    }
    let data = sample_synthetic(&SyntheticSpec::two_circles(n, diameter, seed))?;
    let per_class = [0, 1].map(|c| data.labels().iter().filter(|&&l| l == c).count());
    if per_class.iter().any(|&c| c < 2) {
        return Err(Error::Degenerate(format!(
            "two-circles sample has {} and {} points per class; need at least 2 each, use n >= 4 or another seed",
            per_class[0], per_class[1]
        )));
    }
    let rule = LearningRule::knn(1);
    let mut out = ScenarioResult::new("two-circles");

    let mut grid = Vec::new();
    for c in two_circle_centers(diameter) {
        grid.extend(disc_grid(c, diameter / 2.0, grid_resolution));
    }
    let in_support = luf_oracle_at(&rule, &data, &Matrix::from_rows(&grid)?)?;
    let max_in = in_support.iter().map(|e| e.luf_value).fold(0.0, f64::max);
    out.claims.push(Claim::exact("max oracle LUF over in-disc grid", 0.0, max_in));
    out.note("in_disc_grid_points", grid.len());

    let full = crate::rules::train(&rule, &data.full_view())?;
    let probes = segment_probes(&full, diameter)?;
    let probe_m = Matrix::from_rows(&probes)?;
    let off_support = luf_oracle_at(&rule, &data, &probe_m)?;
    let flipping: Vec<usize> = (0..probes.len()).filter(|&p| off_support[p].luf_value > 0.0).collect();
    out.claims.push(Claim::new(
        "flipping probes between the discs",
        1.0,
        flipping.len() as f64,
        super::result::Comparison::AtLeast,
    ));
    out.note("segment_probes", probes.len());

    let witness = match flipping.first() {
        Some(&p) => {
            let removed = off_support[p].responsible_removed_id.expect("flip has a cause");
            let ids: Vec<u64> = data.point_ids().iter().copied().filter(|&i| i != removed).collect();
            let reduced = crate::rules::train(&rule, &data.view(&ids)?)?;
            let x = probe_m.select_rows(&[p]);
            let class = full.predict(&x)?[0];
            Some(DpWitness {
                probe: [probes[p][0], probes[p][1]],
                removed_id: removed,
                class,
                prob_with: full.predict_proba(&x)?.get(0, class),
                prob_without: reduced.predict_proba(&x)?.get(0, class),
            })
        }
        None => None,
    };
    // P[h(S)=k] ≤ e^ε·P[h(S')=k] + δ fails for every finite ε when δ < gap
    let gap = witness.as_ref().map_or(0.0, |w| w.prob_with - w.prob_without);
    out.claims.push(Claim::exact("DP witness probability gap", 1.0, gap));
    out.note("dp_witness", &witness);
    out.note("seed", seed);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_points_stay_inside() {
        let g = disc_grid([3.0, 0.0], 0.5, 25);
        assert!(!g.is_empty());
        assert!(g.iter().all(|p| (p[0] - 3.0).hypot(p[1]) < 0.5));
    }

    #[test]
    fn too_small_sample_is_rejected() {
        assert!(matches!(
            run_two_circles_scenario(1.0, 3, 5, 0),
            Err(Error::Degenerate(_))
        ));
    }
}
