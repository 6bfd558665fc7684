//! The fixed generator and discriminator architectures.

use super::config::{GanConfig, Preset};
use crate::nn::{LayerSpec, Network, Segment};
use crate::Result;

const HIDDEN: usize = 64;
const LEAKY: f64 = 0.2;
const BN_MOMENTUM: f64 = 0.99;

/// Builds the generator for the configured preset.
///
/// The output head is described by `feature_segments` (one segment per
/// modeled column: width-1 sigmoid for a continuous column, width-k softmax
/// for a k-category one-hot block); `cond_width` columns of condition one-hot
/// are appended to the noise input for conditional setups.
///
/// * `gan1d` / `cgan2d`: noise(+condition) → 2 × [dense(64) → leaky_relu(0.2)]
///   → dense(out) → sigmoid.
/// * `discgan`: noise(+condition) → 3 × [dense(64) → leaky_relu(0.2) →
///   batch_norm] → leaky_relu(0.2) → dense(out) → per-segment activation.
pub fn build_generator(
    cfg: &GanConfig,
    feature_segments: &[Segment],
    cond_width: usize,
) -> Result<Network> {
    let out_width: usize = feature_segments.iter().map(|s| s.width).sum();
    let input = cfg.noise_dim + cond_width;
    let layers = match cfg.preset {
        Preset::Gan1d | Preset::Cgan2d => vec![
            LayerSpec::Dense { width: HIDDEN },
            LayerSpec::LeakyRelu { alpha: LEAKY },
            LayerSpec::Dense { width: HIDDEN },
            LayerSpec::LeakyRelu { alpha: LEAKY },
            LayerSpec::Dense { width: out_width },
            LayerSpec::Sigmoid,
        ],
        Preset::Discgan => vec![
            LayerSpec::Dense { width: HIDDEN },
            LayerSpec::LeakyRelu { alpha: LEAKY },
            LayerSpec::BatchNorm { momentum: BN_MOMENTUM },
            LayerSpec::Dense { width: HIDDEN },
            LayerSpec::LeakyRelu { alpha: LEAKY },
            LayerSpec::BatchNorm { momentum: BN_MOMENTUM },
            LayerSpec::Dense { width: HIDDEN },
            LayerSpec::LeakyRelu { alpha: LEAKY },
            LayerSpec::BatchNorm { momentum: BN_MOMENTUM },
            LayerSpec::LeakyRelu { alpha: LEAKY },
            LayerSpec::Dense { width: out_width },
            LayerSpec::MixedActivation {
                segments: feature_segments.to_vec(),
            },
        ],
    };
    Network::new(input, layers)
}

/// Builds the discriminator: data(+condition) → 2 × [dense(64) →
/// leaky_relu(0.2) → dropout] → dense(1) → sigmoid. The same shape serves
/// every preset; only the input width varies.
pub fn build_discriminator(cfg: &GanConfig, in_width: usize, cond_width: usize) -> Result<Network> {
    Network::new(
        in_width + cond_width,
        vec![
            LayerSpec::Dense { width: HIDDEN },
            LayerSpec::LeakyRelu { alpha: LEAKY },
            LayerSpec::Dropout {
                rate: cfg.disc_dropout,
            },
            LayerSpec::Dense { width: HIDDEN },
            LayerSpec::LeakyRelu { alpha: LEAKY },
            LayerSpec::Dropout {
                rate: cfg.disc_dropout,
            },
            LayerSpec::Dense { width: 1 },
            LayerSpec::Sigmoid,
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::SegmentKind;

    fn sigmoid_segment() -> Vec<Segment> {
        vec![Segment {
            width: 1,
            kind: SegmentKind::Sigmoid,
        }]
    }

    #[test]
    fn gan1d_generator_matches_published_chain() {
        let cfg = GanConfig::preset_defaults(Preset::Gan1d, 10, 0);
        let g = build_generator(&cfg, &sigmoid_segment(), 0).unwrap();
        assert_eq!(g.input_width(), 50);
        assert_eq!(g.out_width(), 1);
        let kinds: Vec<&LayerSpec> = g.layers().iter().collect();
        assert_eq!(kinds.len(), 6);
        assert!(matches!(kinds[0], LayerSpec::Dense { width: 64 }));
        assert!(matches!(kinds[1], LayerSpec::LeakyRelu { alpha } if *alpha == 0.2));
        assert!(matches!(kinds[4], LayerSpec::Dense { width: 1 }));
        assert!(matches!(kinds[5], LayerSpec::Sigmoid));
        assert_eq!(g.non_trainable_param_count(), 0);
    }

    #[test]
    fn conditional_input_widths_concatenate() {
        let cfg = GanConfig::preset_defaults(Preset::Cgan2d, 10, 0);
        let g = build_generator(&cfg, &sigmoid_segment(), 6).unwrap();
        assert_eq!(g.input_width(), 56);
        let d = build_discriminator(&cfg, 1, 6).unwrap();
        assert_eq!(d.input_width(), 7);
    }

    #[test]
    fn discgan_generator_has_three_norm_layers() {
        let cfg = GanConfig::preset_defaults(Preset::Discgan, 10, 0);
        let segments = vec![
            Segment {
                width: 1,
                kind: SegmentKind::Sigmoid,
            },
            Segment {
                width: 29,
                kind: SegmentKind::Softmax,
            },
        ];
        let g = build_generator(&cfg, &segments, 0).unwrap();
        assert_eq!(g.out_width(), 30);
        let bn_layers = g
            .layers()
            .iter()
            .filter(|l| matches!(l, LayerSpec::BatchNorm { .. }))
            .count();
        assert_eq!(bn_layers, 3);
        assert_eq!(g.non_trainable_param_count(), 384);
    }

    #[test]
    fn discriminator_outputs_probability_shape() {
        let cfg = GanConfig::preset_defaults(Preset::Discgan, 10, 0);
        let d = build_discriminator(&cfg, 30, 6).unwrap();
        assert_eq!(d.input_width(), 36);
        assert_eq!(d.out_width(), 1);
        let dropouts = d
            .layers()
            .iter()
            .filter(|l| matches!(l, LayerSpec::Dropout { rate } if *rate == 0.1))
            .count();
        assert_eq!(dropouts, 2);
    }
}
