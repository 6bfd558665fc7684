//! Dense feed-forward networks with explicit, inspectable layers.
//!
//! A [`Network`] is a validated stack of [`LayerSpec`]s; the numeric state
//! lives separately in a [`ParamSet`] so the same architecture can be
//! replicated, averaged, snapshotted and serialized without touching the
//! topology. Training runs through [`forward_train`] / [`backward`] /
//! [`adam_step`]; inference through [`infer`].

mod adam;
mod check;
mod loss;
mod params;
mod run;

pub use adam::{adam_step, AdamConfig, AdamState};
pub use check::grad_check;
pub use loss::{bce, softmax_cross_entropy};
pub use params::{GradSet, LayerParams, ParamSet};
pub use run::{backward, forward_train, infer, ForwardCache};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// One layer of a [`Network`]. Layers either carry parameters (`Dense`,
/// `BatchNorm`) or transform activations in place.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum LayerSpec {
    /// Affine map to `width` outputs.
    Dense { width: usize },
    /// `x` for `x > 0`, `alpha * x` otherwise.
    LeakyRelu { alpha: f64 },
    /// Elementwise logistic function.
    Sigmoid,
    /// Per-feature batch normalization with learned scale/shift and moving
    /// statistics for inference.
    BatchNorm { momentum: f64 },
    /// Inverted dropout; active only in training mode.
    Dropout { rate: f64 },
    /// Splits the incoming features into contiguous segments and applies
    /// sigmoid or a per-segment softmax to each. Used as the output head of
    /// generators over mixed numeric/categorical rows.
    MixedActivation { segments: Vec<Segment> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub width: usize,
    pub kind: SegmentKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SegmentKind {
    Sigmoid,
    Softmax,
}

/// A validated layer stack. Construction checks every width and hyper
/// parameter once so the forward/backward passes can assume consistency.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Network {
    input_width: usize,
    layers: Vec<LayerSpec>,
    /// Output width of each layer, aligned with `layers`.
    widths: Vec<usize>,
}

impl Network {
    pub fn new(input_width: usize, layers: Vec<LayerSpec>) -> Result<Self> {
        if input_width == 0 {
            return Err(Error::Argument("network input width must be positive".into()));
        }
        let mut widths = Vec::with_capacity(layers.len());
        let mut cur = input_width;
        for (i, layer) in layers.iter().enumerate() {
            match layer {
                LayerSpec::Dense { width } => {
                    if *width == 0 {
                        return Err(Error::Dimension {
                            layer: i,
                            detail: "dense width must be positive".into(),
                        });
                    }
                    cur = *width;
                }
                LayerSpec::LeakyRelu { alpha } => {
                    if !alpha.is_finite() || *alpha < 0.0 {
                        return Err(Error::Argument(format!(
                            "layer {i}: leaky relu slope must be finite and non-negative, got {alpha}"
                        )));
                    }
                }
                LayerSpec::Sigmoid => {}
                LayerSpec::BatchNorm { momentum } => {
                    if !momentum.is_finite() || !(0.0..=1.0).contains(momentum) {
                        return Err(Error::Argument(format!(
                            "layer {i}: batch norm momentum must lie in [0, 1], got {momentum}"
                        )));
                    }
                }
                LayerSpec::Dropout { rate } => {
                    if !rate.is_finite() || !(0.0..1.0).contains(rate) {
                        return Err(Error::Argument(format!(
                            "layer {i}: dropout rate must lie in [0, 1), got {rate}"
                        )));
                    }
                }
                LayerSpec::MixedActivation { segments } => {
                    if segments.is_empty() {
                        return Err(Error::Dimension {
                            layer: i,
                            detail: "mixed activation needs at least one segment".into(),
                        });
                    }
                    let total: usize = segments.iter().map(|s| s.width).sum();
                    if segments.iter().any(|s| s.width == 0) {
                        return Err(Error::Dimension {
                            layer: i,
                            detail: "mixed activation segment width must be positive".into(),
                        });
                    }
                    if total != cur {
                        return Err(Error::Dimension {
                            layer: i,
                            detail: format!(
                                "mixed activation covers {total} features but the layer receives {cur}"
                            ),
                        });
                    }
                }
            }
            widths.push(cur);
        }
        Ok(Self {
            input_width,
            layers,
            widths,
        })
    }

    pub fn input_width(&self) -> usize {
        self.input_width
    }

    pub fn out_width(&self) -> usize {
        self.widths.last().copied().unwrap_or(self.input_width)
    }

    pub fn layers(&self) -> &[LayerSpec] {
        &self.layers
    }

    /// Input width seen by layer `i`.
    pub(crate) fn in_width(&self, i: usize) -> usize {
        if i == 0 {
            self.input_width
        } else {
            self.widths[i - 1]
        }
    }

    pub(crate) fn width(&self, i: usize) -> usize {
        self.widths[i]
    }

    /// Number of learned scalars (dense weights/biases, batch norm
    /// scale/shift).
    pub fn trainable_param_count(&self) -> usize {
        self.layers
            .iter()
            .enumerate()
            .map(|(i, l)| match l {
                LayerSpec::Dense { width } => self.in_width(i) * width + width,
                LayerSpec::BatchNorm { .. } => 2 * self.width(i),
                _ => 0,
            })
            .sum()
    }

    /// Number of tracked-but-not-learned scalars (batch norm moving
    /// statistics).
    pub fn non_trainable_param_count(&self) -> usize {
        self.layers
            .iter()
            .enumerate()
            .map(|(i, l)| match l {
                LayerSpec::BatchNorm { .. } => 2 * self.width(i),
                _ => 0,
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn widths_flow_through_layers() {
        let net = Network::new(
            10,
            vec![
                LayerSpec::Dense { width: 64 },
                LayerSpec::LeakyRelu { alpha: 0.2 },
                LayerSpec::Dense { width: 3 },
                LayerSpec::Sigmoid,
            ],
        )
        .unwrap();
        assert_eq!(net.out_width(), 3);
        assert_eq!(net.in_width(2), 64);
        assert_eq!(net.trainable_param_count(), 10 * 64 + 64 + 64 * 3 + 3);
    }

    #[test]
    fn mixed_activation_must_cover_layer_width() {
        let err = Network::new(
            4,
            vec![LayerSpec::MixedActivation {
                segments: vec![Segment {
                    width: 3,
                    kind: SegmentKind::Softmax,
                }],
            }],
        )
        .unwrap_err();
        assert!(matches!(err, Error::Dimension { layer: 0, .. }));
    }

    #[test]
    fn rejects_bad_hyper_parameters() {
        assert!(Network::new(1, vec![LayerSpec::Dropout { rate: 1.0 }]).is_err());
        assert!(Network::new(1, vec![LayerSpec::BatchNorm { momentum: 1.5 }]).is_err());
        assert!(Network::new(0, vec![]).is_err());
    }

    #[test]
    fn batch_norm_counts_moving_stats_separately() {
        let net = Network::new(
            8,
            vec![
                LayerSpec::Dense { width: 64 },
                LayerSpec::BatchNorm { momentum: 0.99 },
                LayerSpec::Dense { width: 64 },
                LayerSpec::BatchNorm { momentum: 0.99 },
                LayerSpec::Dense { width: 64 },
                LayerSpec::BatchNorm { momentum: 0.99 },
            ],
        )
        .unwrap();
        assert_eq!(net.non_trainable_param_count(), 384);
    }
}
