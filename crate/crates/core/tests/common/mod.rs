#![allow(dead_code)]

use loo_audit::numerics::loss::{trades_loss, trades_value_and_grad, value_and_grad};
use loo_audit::numerics::{init_params, loss_value, LossKind, Matrix, MlpParams, Rng};

pub const FD_STEP: f64 = 1e-6;
/// Denominator floor of the relative error. Central differences at h = 1e-6
/// carry ~1e-10 of absolute roundoff, so coordinates with |g| below 1e-4 are
/// judged on an absolute scale of 1e-9 instead.
pub const REL_FLOOR: f64 = 1e-4;
/// Hidden pre-activations closer than this to 0 would let a finite-difference
/// step cross a ReLU kink.
pub const KINK_MARGIN: f64 = 1e-3;

#[derive(Debug, Clone)]
pub struct GradCase {
    pub params: MlpParams,
    pub x: Matrix,
    pub x_adv: Option<Matrix>,
    pub y: Vec<usize>,
    pub loss: LossKind,
}

/// Hidden pre-activations, recomputed here from the raw weights.
fn hidden_preactivations(params: &MlpParams, x: &Matrix) -> Vec<f64> {
    let mut out = Vec::new();
    for r in 0..x.rows() {
        let mut a = x.row(r).to_vec();
        for l in 0..params.weights.len() - 1 {
            let w = &params.weights[l];
            let z: Vec<f64> = (0..w.rows())
                .map(|i| (0..w.cols()).map(|j| w.get(i, j) * a[j]).sum::<f64>() + params.biases[l][i])
                .collect();
            out.extend_from_slice(&z);
            a = z.into_iter().map(|v| v.max(0.0)).collect();
        }
    }
    out
}

/// A random case away from ReLU kinks. `kind` 0 is sigmoid cross-entropy,
/// 1 softmax cross-entropy, 2 the TRADES objective.
pub fn random_case(rng: &mut Rng, kind: usize) -> GradCase {
    loop {
        let d = 1 + rng.below(4) as usize;
        let depth = rng.below(4) as usize;
        let mut dims = vec![d];
        for _ in 0..depth {
            dims.push(1 + rng.below(6) as usize);
        }
        let out = match kind {
            0 => 1,
            1 => 2 + rng.below(3) as usize,
            _ => {
                if rng.bernoulli(0.5) {
                    1
                } else {
                    2 + rng.below(3) as usize
                }
            }
        };
        dims.push(out);
        let mut params = init_params(&dims, rng).unwrap();
        for b in &mut params.biases {
            for v in b {
                *v = 0.1 * rng.normal();
            }
        }
        let n = 1 + rng.below(5) as usize;
        let x = Matrix::new(n, d, (0..n * d).map(|_| rng.normal()).collect()).unwrap();
        let classes = params.num_classes();
        let y: Vec<usize> = (0..n).map(|_| rng.below(classes as u64) as usize).collect();
        let (x_adv, loss) = if kind == 2 {
            let adv = Matrix::new(n, d, x.data().iter().map(|v| v + 0.3 * rng.normal()).collect()).unwrap();
            (Some(adv), LossKind::TradesComposite { beta: rng.uniform(0.1, 6.0) })
        } else {
            (None, LossKind::natural_for(&params))
        };
        let mut pre = hidden_preactivations(&params, &x);
        if let Some(a) = &x_adv {
            pre.extend(hidden_preactivations(&params, a));
        }
        if pre.iter().all(|z| z.abs() > KINK_MARGIN) {
            return GradCase { params, x, x_adv, y, loss };
        }
    }
}

fn value(case: &GradCase, params: &MlpParams) -> f64 {
    match case.loss {
        LossKind::TradesComposite { beta } => trades_loss(params, &case.x, case.x_adv.as_ref().unwrap(), &case.y, beta).unwrap(),
        other => loss_value(params, &case.x, &case.y, other).unwrap(),
    }
}

fn analytic(case: &GradCase) -> Vec<f64> {
    let g = match case.loss {
        LossKind::TradesComposite { beta } => {
            trades_value_and_grad(&case.params, &case.x, case.x_adv.as_ref().unwrap(), &case.y, beta)
                .unwrap()
                .1
        }
        other => value_and_grad(&case.params, &case.x, &case.y, other).unwrap().1,
    };
    g.flatten()
}

fn perturbed(params: &MlpParams, index: usize, delta: f64) -> MlpParams {
    let mut p = params.clone();
    let mut k = 0;
    p.for_each_mut(|_, v| {
        if k == index {
            *v += delta;
        }
        k += 1;
    });
    p
}

/// Largest per-coordinate `|a − n| / max(|a|, |n|, REL_FLOOR)` over all
/// parameters, with `n` from central differences.
pub fn max_relative_error(case: &GradCase) -> f64 {
    let a = analytic(case);
    let mut worst: f64 = 0.0;
    for (i, &ai) in a.iter().enumerate() {
        let up = value(case, &perturbed(&case.params, i, FD_STEP));
        let down = value(case, &perturbed(&case.params, i, -FD_STEP));
        let ni = (up - down) / (2.0 * FD_STEP);
        let diff = (ai - ni).abs();
        let err = if diff == 0.0 { 0.0 } else { diff / ai.abs().max(ni.abs()).max(REL_FLOOR) };
        worst = worst.max(err);
    }
    worst
}
