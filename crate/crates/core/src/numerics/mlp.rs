//! Fixed-family multilayer perceptron: ReLU hidden layers, sigmoid output for a
//! single output unit and softmax otherwise.

use serde::{Deserialize, Serialize};

use super::matrix::Matrix;
use super::rng::Rng;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputActivation {
    Sigmoid,
    Softmax,
}

/// Weights and biases of an MLP. Also used as the gradient container.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpParams {
    pub layer_dims: Vec<usize>,
    /// `weights[l]` is `layer_dims[l+1] × layer_dims[l]`.
    pub weights: Vec<Matrix>,
    pub biases: Vec<Vec<f64>>,
    pub output: OutputActivation,
}

impl MlpParams {
    pub fn zeros(layer_dims: &[usize]) -> Result<Self> {
        validate_dims(layer_dims)?;
        let weights = layer_dims
            .windows(2)
            .map(|w| Matrix::zeros(w[1], w[0]))
            .collect();
        let biases = layer_dims[1..].iter().map(|&d| vec![0.0; d]).collect();
        Ok(MlpParams {
            layer_dims: layer_dims.to_vec(),
            weights,
            biases,
            output: output_for(layer_dims),
        })
    }

    pub fn zeros_like(&self) -> Self {
        MlpParams::zeros(&self.layer_dims).expect("dims already validated")
    }

    pub fn num_layers(&self) -> usize {
        self.weights.len()
    }

    pub fn input_dim(&self) -> usize {
        self.layer_dims[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.layer_dims.last().unwrap()
    }

    /// Number of classes the output layer encodes.
    pub fn num_classes(&self) -> usize {
        match self.output {
            OutputActivation::Sigmoid => 2,
            OutputActivation::Softmax => self.output_dim(),
        }
    }

    pub fn num_parameters(&self) -> usize {
        self.weights.iter().map(|w| w.data().len()).sum::<usize>()
            + self.biases.iter().map(Vec::len).sum::<usize>()
    }

    /// Visits every scalar parameter in a fixed order (layer by layer, weights then biases).
    pub fn for_each_mut(&mut self, mut f: impl FnMut(usize, &mut f64)) {
        for (l, (w, b)) in self.weights.iter_mut().zip(self.biases.iter_mut()).enumerate() {
            for v in w.data_mut() {
                f(l, v);
            }
            for v in b {
                f(l, v);
            }
        }
    }

    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.num_parameters());
        for (w, b) in self.weights.iter().zip(&self.biases) {
            out.extend_from_slice(w.data());
            out.extend_from_slice(b);
        }
        out
    }

    pub fn l2_norm(&self) -> f64 {
        self.flatten().iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

fn output_for(layer_dims: &[usize]) -> OutputActivation {
    if *layer_dims.last().unwrap() == 1 {
        OutputActivation::Sigmoid
    } else {
        OutputActivation::Softmax
    }
}

fn validate_dims(layer_dims: &[usize]) -> Result<()> {
    if layer_dims.len() < 2 {
        return Err(Error::Config(format!(
            "an MLP needs at least input and output widths, got {layer_dims:?}"
        )));
    }
    if layer_dims.contains(&0) {
        return Err(Error::Config(format!(
            "layer widths must be positive, got {layer_dims:?}"
        )));
    }
    Ok(())
}

/// Glorot-uniform weights, zero biases.
pub fn init_params(layer_dims: &[usize], rng: &mut Rng) -> Result<MlpParams> {
    let mut params = MlpParams::zeros(layer_dims)?;
    for w in &mut params.weights {
        let (fan_out, fan_in) = (w.rows(), w.cols());
        let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
        for v in w.data_mut() {
            *v = rng.uniform(-bound, bound);
        }
    }
    Ok(params)
}

#[inline]
pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

pub(crate) fn softmax_in_place(row: &mut [f64]) {
    let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in row.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    for v in row.iter_mut() {
        *v /= sum;
    }
}

/// Intermediate values of a forward pass, kept for backpropagation.
#[derive(Debug, Clone)]
pub(crate) struct Trace {
    /// `inputs[l]` is the input to layer `l` (post-ReLU for `l > 0`).
    pub inputs: Vec<Matrix>,
    /// Pre-activations of each layer; the last one holds the logits.
    pub pre: Vec<Matrix>,
    /// Output-layer probabilities (n × output_dim).
    pub probs: Matrix,
}

fn check_input(params: &MlpParams, x: &Matrix) -> Result<()> {
    if x.cols() != params.input_dim() {
        return Err(Error::Dimension {
            context: "MLP input width",
            expected: params.input_dim(),
            got: x.cols(),
        });
    }
    Ok(())
}

pub(crate) fn forward_trace(params: &MlpParams, x: &Matrix) -> Result<Trace> {
    check_input(params, x)?;
    let last = params.num_layers() - 1;
    let mut inputs = Vec::with_capacity(params.num_layers());
    let mut pre = Vec::with_capacity(params.num_layers());
    let mut current = x.clone();
    for (l, (w, b)) in params.weights.iter().zip(&params.biases).enumerate() {
        let mut z = current.matmul_transposed(w)?;
        for r in 0..z.rows() {
            for (v, bv) in z.row_mut(r).iter_mut().zip(b) {
                *v += bv;
            }
        }
        let next = if l < last {
            let mut a = z.clone();
            for v in a.data_mut() {
                if *v < 0.0 {
                    *v = 0.0;
                }
            }
            a
        } else {
            let mut p = z.clone();
            match params.output {
                OutputActivation::Sigmoid => {
                    for v in p.data_mut() {
                        *v = sigmoid(*v);
                    }
                }
                OutputActivation::Softmax => {
                    for r in 0..p.rows() {
                        softmax_in_place(p.row_mut(r));
                    }
                }
            }
            p
        };
        inputs.push(current);
        pre.push(z);
        current = next;
    }
    Ok(Trace {
        inputs,
        pre,
        probs: current,
    })
}

/// Output probabilities: n×1 for sigmoid (probability of class 1), n×k for softmax.
pub fn forward(params: &MlpParams, x_batch: &Matrix) -> Result<Matrix> {
    Ok(forward_trace(params, x_batch)?.probs)
}

/// Backpropagates gradients w.r.t. the output logits through the network.
/// Returns parameter gradients and, if requested, the gradient w.r.t. the input.
pub(crate) fn backprop(
    params: &MlpParams,
    trace: &Trace,
    dlogits: Matrix,
    want_input: bool,
) -> Result<(MlpParams, Option<Matrix>)> {
    let mut grads = params.zeros_like();
    let mut delta = dlogits;
    let mut input_grad = None;
    for l in (0..params.num_layers()).rev() {
        let a_in = &trace.inputs[l];
        grads.weights[l] = delta.transpose_matmul(a_in)?;
        let gb = &mut grads.biases[l];
        for r in 0..delta.rows() {
            for (g, d) in gb.iter_mut().zip(delta.row(r)) {
                *g += d;
            }
        }
        if l > 0 || want_input {
            let mut prev = delta.matmul(&params.weights[l])?;
            if l > 0 {
                let z_prev = &trace.pre[l - 1];
                for (g, &z) in prev.data_mut().iter_mut().zip(z_prev.data()) {
                    if z <= 0.0 {
                        *g = 0.0;
                    }
                }
                delta = prev;
            } else {
                input_grad = Some(prev);
            }
        }
    }
    Ok((grads, input_grad))
}
