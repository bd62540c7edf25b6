use serde::{Deserialize, Serialize};

use super::mlp::MlpParams;
use crate::error::{Error, Result};

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPSILON: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OptimizerKind {
    Sgd,
    Adam,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState {
    pub kind: OptimizerKind,
    pub learning_rate: f64,
    first_moment: Option<MlpParams>,
    second_moment: Option<MlpParams>,
    step: u64,
}

impl OptimizerState {
    pub fn new(kind: OptimizerKind, learning_rate: f64, params: &MlpParams) -> Result<Self> {
        if !(learning_rate > 0.0 && learning_rate.is_finite()) {
            return Err(Error::Config(format!(
                "learning rate must be positive, got {learning_rate}"
            )));
        }
        let (first_moment, second_moment) = match kind {
            OptimizerKind::Sgd => (None, None),
            OptimizerKind::Adam => (Some(params.zeros_like()), Some(params.zeros_like())),
        };
        Ok(OptimizerState {
            kind,
            learning_rate,
            first_moment,
            second_moment,
            step: 0,
        })
    }

    pub fn step(&self) -> u64 {
        self.step
    }
}

fn check_finite(grads: &MlpParams) -> Result<()> {
    for (l, (w, b)) in grads.weights.iter().zip(&grads.biases).enumerate() {
        if !w.is_finite() || b.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric {
                layer: l,
                message: "non-finite gradient".into(),
            });
        }
    }
    Ok(())
}

/// Applies one update in place: SGD `p -= lr·g`, or bias-corrected Adam.
pub fn optimizer_step(params: &mut MlpParams, grads: &MlpParams, state: &mut OptimizerState) -> Result<()> {
    if params.layer_dims != grads.layer_dims {
        return Err(Error::Config(format!(
            "gradient shape {:?} does not match parameters {:?}",
            grads.layer_dims, params.layer_dims
        )));
    }
    check_finite(grads)?;
    state.step += 1;
    let lr = state.learning_rate;
    let g = grads.flatten();
    match state.kind {
        OptimizerKind::Sgd => {
            let mut i = 0;
            params.for_each_mut(|_, p| {
                *p -= lr * g[i];
                i += 1;
            });
        }
        OptimizerKind::Adam => {
            let t = state.step as i32;
            let c1 = 1.0 - ADAM_BETA1.powi(t);
            let c2 = 1.0 - ADAM_BETA2.powi(t);
            let m = state.first_moment.as_mut().expect("adam state");
            let v = state.second_moment.as_mut().expect("adam state");
            let mut i = 0;
            m.for_each_mut(|_, mv| {
                *mv = ADAM_BETA1 * *mv + (1.0 - ADAM_BETA1) * g[i];
                i += 1;
            });
            i = 0;
            v.for_each_mut(|_, vv| {
                *vv = ADAM_BETA2 * *vv + (1.0 - ADAM_BETA2) * g[i] * g[i];
                i += 1;
            });
            let (mf, vf) = (m.flatten(), v.flatten());
            i = 0;
            params.for_each_mut(|_, p| {
                let m_hat = mf[i] / c1;
                let v_hat = vf[i] / c2;
                *p -= lr * m_hat / (v_hat.sqrt() + ADAM_EPSILON);
                i += 1;
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(v: f64) -> MlpParams {
        let mut p = MlpParams::zeros(&[1, 1]).unwrap();
        p.weights[0].set(0, 0, v);
        p
    }

    #[test]
    fn sgd_arithmetic() {
        let mut p = scalar(1.0);
        let g = scalar(0.5);
        let mut st = OptimizerState::new(OptimizerKind::Sgd, 0.1, &p).unwrap();
        optimizer_step(&mut p, &g, &mut st).unwrap();
        assert!((p.weights[0].get(0, 0) - 0.95).abs() < 1e-15);
    }

    #[test]
    fn adam_first_step_moves_by_learning_rate() {
        let mut p = scalar(1.0);
        let g = scalar(0.5);
        let mut st = OptimizerState::new(OptimizerKind::Adam, 1e-3, &p).unwrap();
        optimizer_step(&mut p, &g, &mut st).unwrap();
        // m̂ = g, v̂ = g², so the step is lr·g/(|g| + eps)
        let expected = 1.0 - 1e-3 * 0.5 / (0.5 + 1e-8);
        assert!((p.weights[0].get(0, 0) - expected).abs() < 1e-15);
        assert!(((1.0 - p.weights[0].get(0, 0)) - 1e-3).abs() < 1e-10);
    }

    #[test]
    fn zero_gradient_keeps_params_and_counts_the_step() {
        let mut p = scalar(0.25);
        let g = scalar(0.0);
        let mut st = OptimizerState::new(OptimizerKind::Adam, 1e-3, &p).unwrap();
        optimizer_step(&mut p, &g, &mut st).unwrap();
        assert_eq!(p, scalar(0.25));
        assert_eq!(st.step(), 1);
    }

    #[test]
    fn non_finite_gradient_names_the_layer() {
        let mut p = MlpParams::zeros(&[1, 2, 1]).unwrap();
        let mut g = p.zeros_like();
        g.biases[1][0] = f64::NAN;
        let mut st = OptimizerState::new(OptimizerKind::Sgd, 0.1, &p).unwrap();
        match optimizer_step(&mut p, &g, &mut st) {
            Err(Error::Numeric { layer, .. }) => assert_eq!(layer, 1),
            other => panic!("unexpected {other:?}"),
        }
    }
}
