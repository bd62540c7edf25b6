//! Projected gradient ascent on the input, for cross-entropy (PGD) and for the
//! KL objective used by TRADES.

use super::model::Model;
use super::rule::{AttackConfig, AttackNorm};
use crate::error::{Error, Result};
use crate::numerics::loss::{input_gradient, kl_input_gradient};
use crate::numerics::mlp::forward;
use crate::numerics::{Matrix, MlpParams, Rng};

/// Scale of the Gaussian start used by the KL attack, whose gradient vanishes at `x_adv = x`.
pub const KL_ATTACK_START_SCALE: f64 = 1e-3;

/// Projects every row of `x_adv` into the norm ball of `radius` around `x`.
pub fn project(x: &Matrix, x_adv: &mut Matrix, norm: AttackNorm, radius: f64) {
    for r in 0..x.rows() {
        let base = x.row(r);
        let row = x_adv.row_mut(r);
        match norm {
            AttackNorm::Linf => {
                for (v, &b) in row.iter_mut().zip(base) {
                    *v = v.clamp(b - radius, b + radius);
                }
            }
            AttackNorm::L2 => {
                let norm2: f64 = row.iter().zip(base).map(|(v, b)| (v - b) * (v - b)).sum::<f64>().sqrt();
                if norm2 > radius {
                    let s = radius / norm2;
                    for (v, &b) in row.iter_mut().zip(base) {
                        *v = b + (*v - b) * s;
                    }
                }
            }
        }
    }
}

fn ascend(x_adv: &mut Matrix, grad: &Matrix, norm: AttackNorm, step: f64) {
    for r in 0..x_adv.rows() {
        let g = grad.row(r);
        let row = x_adv.row_mut(r);
        match norm {
            AttackNorm::Linf => {
                for (v, &gv) in row.iter_mut().zip(g) {
                    if gv > 0.0 {
                        *v += step;
                    } else if gv < 0.0 {
                        *v -= step;
                    }
                }
            }
            AttackNorm::L2 => {
                let gn = g.iter().map(|v| v * v).sum::<f64>().sqrt();
                if gn > 0.0 {
                    for (v, &gv) in row.iter_mut().zip(g) {
                        *v += step * gv / gn;
                    }
                }
            }
        }
    }
}

pub(crate) fn pgd_on_params(params: &MlpParams, x: &Matrix, y: &[usize], attack: &AttackConfig) -> Result<Matrix> {
    attack.validate()?;
    if attack.radius == 0.0 || attack.steps == 0 {
        return Ok(x.clone());
    }
    let step = attack.effective_step_size();
    let mut x_adv = x.clone();
    for _ in 0..attack.steps {
        let (_, grad) = input_gradient(params, &x_adv, y)?;
        ascend(&mut x_adv, &grad, attack.norm, step);
        project(x, &mut x_adv, attack.norm, attack.radius);
    }
    Ok(x_adv)
}

/// Inner maximization of `KL(model(x) ‖ model(x_adv))` from a small Gaussian start.
pub(crate) fn kl_attack_on_params(params: &MlpParams, x: &Matrix, attack: &AttackConfig, rng: &mut Rng) -> Result<Matrix> {
    attack.validate()?;
    if attack.radius == 0.0 || attack.steps == 0 {
        return Ok(x.clone());
    }
    let clean = forward(params, x)?;
    let step = attack.effective_step_size();
    let mut x_adv = x.clone();
    for v in x_adv.data_mut() {
        *v += KL_ATTACK_START_SCALE * rng.normal();
    }
    project(x, &mut x_adv, attack.norm, attack.radius);
    for _ in 0..attack.steps {
        let (_, grad) = kl_input_gradient(params, &clean, &x_adv)?;
        ascend(&mut x_adv, &grad, attack.norm, step);
        project(x, &mut x_adv, attack.norm, attack.radius);
    }
    Ok(x_adv)
}

/// Deterministic PGD (no random start) against a differentiable model's
/// cross-entropy. Returns the final iterate.
pub fn pgd_attack(model: &Model, x: &Matrix, y: &[usize], attack: &AttackConfig) -> Result<Matrix> {
    let params = model.mlp_params().map_err(|_| {
        Error::UnsupportedModel(format!("cannot attack a {} model", model.kind_name()))
    })?;
    pgd_on_params(params, x, y, attack)
}
