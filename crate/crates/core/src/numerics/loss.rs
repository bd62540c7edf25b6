//! Losses over MLP outputs and their exact gradients.
//!
//! Probabilities are clipped to `[PROB_CLIP, 1 - PROB_CLIP]` inside every
//! logarithm; where the clip is active the loss is locally constant and the
//! gradient contribution is zero.

use serde::{Deserialize, Serialize};

use super::matrix::Matrix;
use super::mlp::{backprop, forward_trace, MlpParams, OutputActivation, Trace};
use crate::error::{Error, Result};

pub const PROB_CLIP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "tag")]
pub enum LossKind {
    BinaryCrossEntropy,
    SoftmaxCrossEntropy,
    /// Evaluation only.
    ZeroOne,
    /// Natural cross-entropy plus `beta · KL(model(x) ‖ model(x_adv))`.
    TradesComposite { beta: f64 },
}

impl LossKind {
    /// The cross-entropy matching the network's output activation.
    pub fn natural_for(params: &MlpParams) -> LossKind {
        match params.output {
            OutputActivation::Sigmoid => LossKind::BinaryCrossEntropy,
            OutputActivation::Softmax => LossKind::SoftmaxCrossEntropy,
        }
    }
}

#[inline]
fn clip(p: f64) -> (f64, bool) {
    if p < PROB_CLIP {
        (PROB_CLIP, true)
    } else if p > 1.0 - PROB_CLIP {
        (1.0 - PROB_CLIP, true)
    } else {
        (p, false)
    }
}

fn check_labels(params: &MlpParams, x: &Matrix, y: &[usize]) -> Result<()> {
    if y.len() != x.rows() {
        return Err(Error::Dimension {
            context: "label count vs batch rows",
            expected: x.rows(),
            got: y.len(),
        });
    }
    let k = params.num_classes();
    if let Some(&bad) = y.iter().find(|&&c| c >= k) {
        return Err(Error::Argument(format!(
            "label {bad} out of range for {k} classes"
        )));
    }
    Ok(())
}

fn check_pairing(params: &MlpParams, loss: LossKind) -> Result<()> {
    match (loss, params.output) {
        (LossKind::BinaryCrossEntropy, OutputActivation::Softmax) => Err(Error::UnsupportedLoss(
            "binary cross-entropy needs a single sigmoid output".into(),
        )),
        (LossKind::SoftmaxCrossEntropy, OutputActivation::Sigmoid) => Err(Error::UnsupportedLoss(
            "softmax cross-entropy needs a softmax output".into(),
        )),
        _ => Ok(()),
    }
}

/// Class-probability row for output row `r` (expands sigmoid to two classes).
pub(crate) fn class_probs(output: OutputActivation, probs: &Matrix, r: usize) -> Vec<f64> {
    match output {
        OutputActivation::Sigmoid => {
            let p = probs.get(r, 0);
            vec![1.0 - p, p]
        }
        OutputActivation::Softmax => probs.row(r).to_vec(),
    }
}

/// Per-row cross-entropy values and `d(sum of row losses)/d logits`.
fn cross_entropy_rows(output: OutputActivation, trace: &Trace, y: &[usize]) -> (Vec<f64>, Matrix) {
    let probs = &trace.probs;
    let mut dlogits = Matrix::zeros(probs.rows(), probs.cols());
    let mut values = Vec::with_capacity(probs.rows());
    for (r, &label) in y.iter().enumerate() {
        match output {
            OutputActivation::Sigmoid => {
                let p = probs.get(r, 0);
                let target = label as f64;
                // loss depends on p only through the probability of the true class
                let p_true = if label == 1 { p } else { 1.0 - p };
                let (pc, clipped) = clip(p_true);
                values.push(-pc.ln());
                if !clipped {
                    dlogits.set(r, 0, p - target);
                }
            }
            OutputActivation::Softmax => {
                let row = probs.row(r);
                let (pc, clipped) = clip(row[label]);
                values.push(-pc.ln());
                if !clipped {
                    let d = dlogits.row_mut(r);
                    for (k, (dv, &pv)) in d.iter_mut().zip(row).enumerate() {
                        *dv = pv - if k == label { 1.0 } else { 0.0 };
                    }
                }
            }
        }
    }
    (values, dlogits)
}

/// Per-row `KL(P ‖ Q)` and the gradients of their sum w.r.t. the logits
/// behind `P` (clean) and `Q` (adversarial).
fn kl_rows(output: OutputActivation, clean: &Matrix, adv: &Matrix) -> (Vec<f64>, Matrix, Matrix) {
    let n = clean.rows();
    let mut values = Vec::with_capacity(n);
    let mut d_clean = Matrix::zeros(n, clean.cols());
    let mut d_adv = Matrix::zeros(n, adv.cols());
    for r in 0..n {
        let p = class_probs(output, clean, r);
        let q = class_probs(output, adv, r);
        let mut kl = 0.0;
        let mut gp = vec![0.0; p.len()];
        let mut gq = vec![0.0; q.len()];
        for k in 0..p.len() {
            let (pc, p_clipped) = clip(p[k]);
            let (qc, q_clipped) = clip(q[k]);
            let (lp, lq) = (pc.ln(), qc.ln());
            kl += p[k] * (lp - lq);
            gp[k] = lp - lq + if p_clipped { 0.0 } else { 1.0 };
            gq[k] = if q_clipped { 0.0 } else { -p[k] / qc };
        }
        values.push(kl);
        match output {
            OutputActivation::Sigmoid => {
                let (pp, qq) = (p[1], q[1]);
                d_clean.set(r, 0, (gp[1] - gp[0]) * pp * (1.0 - pp));
                d_adv.set(r, 0, (gq[1] - gq[0]) * qq * (1.0 - qq));
            }
            OutputActivation::Softmax => {
                softmax_vjp(&p, &gp, d_clean.row_mut(r));
                softmax_vjp(&q, &gq, d_adv.row_mut(r));
            }
        }
    }
    (values, d_clean, d_adv)
}

fn softmax_vjp(p: &[f64], g: &[f64], out: &mut [f64]) {
    let dot: f64 = p.iter().zip(g).map(|(a, b)| a * b).sum();
    for ((o, &pj), &gj) in out.iter_mut().zip(p).zip(g) {
        *o = pj * (gj - dot);
    }
}

fn scale(m: &mut Matrix, s: f64) {
    for v in m.data_mut() {
        *v *= s;
    }
}

fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (k, &v) in row.iter().enumerate() {
        if v > row[best] {
            best = k;
        }
    }
    best
}

/// Mean loss over the batch. TRADES needs an adversarial batch; use [`trades_loss`].
pub fn loss_value(params: &MlpParams, x: &Matrix, y: &[usize], loss: LossKind) -> Result<f64> {
    check_labels(params, x, y)?;
    let n = x.rows().max(1) as f64;
    match loss {
        LossKind::ZeroOne => {
            let trace = forward_trace(params, x)?;
            let wrong = y
                .iter()
                .enumerate()
                .filter(|&(r, &label)| argmax(&class_probs(params.output, &trace.probs, r)) != label)
                .count();
            Ok(wrong as f64 / n)
        }
        LossKind::TradesComposite { .. } => Err(Error::UnsupportedLoss(
            "trades-composite needs an adversarial batch".into(),
        )),
        natural => {
            check_pairing(params, natural)?;
            let trace = forward_trace(params, x)?;
            let (values, _) = cross_entropy_rows(params.output, &trace, y);
            Ok(values.iter().sum::<f64>() / n)
        }
    }
}

/// Mean loss and its exact gradient w.r.t. the parameters.
pub fn value_and_grad(
    params: &MlpParams,
    x: &Matrix,
    y: &[usize],
    loss: LossKind,
) -> Result<(f64, MlpParams)> {
    check_labels(params, x, y)?;
    match loss {
        LossKind::ZeroOne => Err(Error::UnsupportedLoss(
            "zero-one loss is not differentiable".into(),
        )),
        LossKind::TradesComposite { .. } => Err(Error::UnsupportedLoss(
            "trades-composite needs an adversarial batch; use trades_value_and_grad".into(),
        )),
        natural => {
            check_pairing(params, natural)?;
            let n = x.rows().max(1) as f64;
            let trace = forward_trace(params, x)?;
            let (values, mut dlogits) = cross_entropy_rows(params.output, &trace, y);
            scale(&mut dlogits, 1.0 / n);
            let (grads, _) = backprop(params, &trace, dlogits, false)?;
            Ok((values.iter().sum::<f64>() / n, grads))
        }
    }
}

/// Exact gradient of the mean batch loss, shaped like the parameters.
pub fn backward(params: &MlpParams, x_batch: &Matrix, y_batch: &[usize], loss_kind: LossKind) -> Result<MlpParams> {
    value_and_grad(params, x_batch, y_batch, loss_kind).map(|(_, g)| g)
}

/// Per-row natural losses and the gradient of their sum w.r.t. the input rows.
pub fn input_gradient(params: &MlpParams, x: &Matrix, y: &[usize]) -> Result<(Vec<f64>, Matrix)> {
    check_labels(params, x, y)?;
    let trace = forward_trace(params, x)?;
    let (values, dlogits) = cross_entropy_rows(params.output, &trace, y);
    let (_, input) = backprop(params, &trace, dlogits, true)?;
    Ok((values, input.expect("input gradient requested")))
}

/// Per-row `KL(clean ‖ model(x_adv))` and the gradient of their sum w.r.t. `x_adv`.
pub fn kl_input_gradient(params: &MlpParams, clean_probs: &Matrix, x_adv: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    let trace = forward_trace(params, x_adv)?;
    let (values, _, d_adv) = kl_rows(params.output, clean_probs, &trace.probs);
    let (_, input) = backprop(params, &trace, d_adv, true)?;
    Ok((values, input.expect("input gradient requested")))
}

/// Mean TRADES objective: natural loss at `x` plus `beta ·` mean KL to `x_adv`.
pub fn trades_loss(params: &MlpParams, x: &Matrix, x_adv: &Matrix, y: &[usize], beta: f64) -> Result<f64> {
    trades_value_and_grad(params, x, x_adv, y, beta).map(|(v, _)| v)
}

pub fn trades_value_and_grad(
    params: &MlpParams,
    x: &Matrix,
    x_adv: &Matrix,
    y: &[usize],
    beta: f64,
) -> Result<(f64, MlpParams)> {
    check_labels(params, x, y)?;
    if x_adv.rows() != x.rows() {
        return Err(Error::Dimension {
            context: "adversarial batch rows",
            expected: x.rows(),
            got: x_adv.rows(),
        });
    }
    let n = x.rows().max(1) as f64;
    let clean = forward_trace(params, x)?;
    let adv = forward_trace(params, x_adv)?;
    let (ce, mut d_clean) = cross_entropy_rows(params.output, &clean, y);
    let (kl, d_kl_clean, mut d_kl_adv) = kl_rows(params.output, &clean.probs, &adv.probs);
    for (d, k) in d_clean.data_mut().iter_mut().zip(d_kl_clean.data()) {
        *d = (*d + beta * k) / n;
    }
    scale(&mut d_kl_adv, beta / n);
    let (mut grads, _) = backprop(params, &clean, d_clean, false)?;
    let (g_adv, _) = backprop(params, &adv, d_kl_adv, false)?;
    for (gw, ga) in grads.weights.iter_mut().zip(&g_adv.weights) {
        for (a, b) in gw.data_mut().iter_mut().zip(ga.data()) {
            *a += b;
        }
    }
    for (gb, ga) in grads.biases.iter_mut().zip(&g_adv.biases) {
        for (a, b) in gb.iter_mut().zip(ga) {
            *a += b;
        }
    }
    let value = ce.iter().zip(&kl).map(|(c, k)| c + beta * k).sum::<f64>() / n;
    Ok((value, grads))
}
