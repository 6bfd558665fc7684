//! Numeric state for a [`Network`]: per-layer parameters plus flat views
//! used by the optimizer, the gradient checker and parameter averaging.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{LayerSpec, Network};
use crate::{Matrix, SeededRng};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum LayerParams {
    /// Placeholder for parameter-free layers, keeps indices aligned with the
    /// network's layer list.
    None,
    Dense {
        /// `in_width × out_width`, applied as `y = x·w + b`.
        w: Matrix,
        b: Vec<f64>,
    },
    BatchNorm {
        gamma: Vec<f64>,
        beta: Vec<f64>,
        moving_mean: Vec<f64>,
        moving_var: Vec<f64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamSet {
    pub layers: Vec<LayerParams>,
}

/// Gradients share the parameter layout; moving statistics are carried as
/// zeros and ignored by the optimizer.
pub type GradSet = ParamSet;

impl ParamSet {
    /// Fresh parameters: dense weights drawn uniformly from
    /// `±sqrt(6 / (fan_in + fan_out))`, biases zero, batch norm at the
    /// identity (`gamma = 1`, `beta = 0`) with unit moving variance.
    pub fn init(net: &Network, rng: &mut SeededRng) -> Self {
        let layers = net
            .layers()
            .iter()
            .enumerate()
            .map(|(i, spec)| match spec {
                LayerSpec::Dense { width } => {
                    let fan_in = net.in_width(i);
                    let bound = (6.0 / (fan_in + width) as f64).sqrt();
                    let data = (0..fan_in * width)
                        .map(|_| rng.random_range(-bound..bound))
                        .collect();
                    LayerParams::Dense {
                        w: Matrix::from_vec(fan_in, *width, data),
                        b: vec![0.0; *width],
                    }
                }
                LayerSpec::BatchNorm { .. } => {
                    let n = net.width(i);
                    LayerParams::BatchNorm {
                        gamma: vec![1.0; n],
                        beta: vec![0.0; n],
                        moving_mean: vec![0.0; n],
                        moving_var: vec![1.0; n],
                    }
                }
                _ => LayerParams::None,
            })
            .collect();
        Self { layers }
    }

    /// All-zero set with the network's layout; the starting point for
    /// gradient accumulation.
    pub fn zeros(net: &Network) -> Self {
        let layers = net
            .layers()
            .iter()
            .enumerate()
            .map(|(i, spec)| match spec {
                LayerSpec::Dense { width } => LayerParams::Dense {
                    w: Matrix::zeros(net.in_width(i), *width),
                    b: vec![0.0; *width],
                },
                LayerSpec::BatchNorm { .. } => {
                    let n = net.width(i);
                    LayerParams::BatchNorm {
                        gamma: vec![0.0; n],
                        beta: vec![0.0; n],
                        moving_mean: vec![0.0; n],
                        moving_var: vec![0.0; n],
                    }
                }
                _ => LayerParams::None,
            })
            .collect();
        Self { layers }
    }

    pub fn trainable_len(&self) -> usize {
        self.layers
            .iter()
            .map(|l| match l {
                LayerParams::Dense { w, b } => w.data().len() + b.len(),
                LayerParams::BatchNorm { gamma, beta, .. } => gamma.len() + beta.len(),
                LayerParams::None => 0,
            })
            .sum()
    }

    /// Learned scalars in a fixed order: per layer, dense weights row-major
    /// then bias, or batch norm gamma then beta.
    pub fn flatten_trainable(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.trainable_len());
        for layer in &self.layers {
            match layer {
                LayerParams::Dense { w, b } => {
                    out.extend_from_slice(w.data());
                    out.extend_from_slice(b);
                }
                LayerParams::BatchNorm { gamma, beta, .. } => {
                    out.extend_from_slice(gamma);
                    out.extend_from_slice(beta);
                }
                LayerParams::None => {}
            }
        }
        out
    }

    /// Writes a flat vector produced by [`ParamSet::flatten_trainable`] back
    /// into the structured layout.
    pub fn set_trainable(&mut self, vals: &[f64]) {
        assert_eq!(vals.len(), self.trainable_len(), "flat parameter length mismatch");
        let mut pos = 0;
        for layer in &mut self.layers {
            match layer {
                LayerParams::Dense { w, b } => {
                    let n = w.data().len();
                    w.data_mut().copy_from_slice(&vals[pos..pos + n]);
                    pos += n;
                    let nb = b.len();
                    b.copy_from_slice(&vals[pos..pos + nb]);
                    pos += nb;
                }
                LayerParams::BatchNorm { gamma, beta, .. } => {
                    let ng = gamma.len();
                    gamma.copy_from_slice(&vals[pos..pos + ng]);
                    pos += ng;
                    let nb = beta.len();
                    beta.copy_from_slice(&vals[pos..pos + nb]);
                    pos += nb;
                }
                LayerParams::None => {}
            }
        }
    }

    /// Moving statistics (batch norm mean then variance per layer), the part
    /// of the state that is tracked rather than learned.
    pub fn flatten_moving(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for layer in &self.layers {
            if let LayerParams::BatchNorm {
                moving_mean,
                moving_var,
                ..
            } = layer
            {
                out.extend_from_slice(moving_mean);
                out.extend_from_slice(moving_var);
            }
        }
        out
    }

    pub fn set_moving(&mut self, vals: &[f64]) {
        let mut pos = 0;
        for layer in &mut self.layers {
            if let LayerParams::BatchNorm {
                moving_mean,
                moving_var,
                ..
            } = layer
            {
                let nm = moving_mean.len();
                moving_mean.copy_from_slice(&vals[pos..pos + nm]);
                pos += nm;
                let nv = moving_var.len();
                moving_var.copy_from_slice(&vals[pos..pos + nv]);
                pos += nv;
            }
        }
        assert_eq!(pos, vals.len(), "flat moving-stat length mismatch");
    }

    /// True when every learned scalar is bit-identical.
    pub fn trainable_bits_eq(&self, other: &ParamSet) -> bool {
        let a = self.flatten_trainable();
        let b = other.flatten_trainable();
        a.len() == b.len()
            && a.iter()
                .zip(&b)
                .all(|(x, y)| x.to_bits() == y.to_bits())
    }
}
