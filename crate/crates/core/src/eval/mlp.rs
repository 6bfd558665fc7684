//! Small feed-forward classifier used to score machine-learning utility.

use crate::nn::{
    adam_step, backward, forward_train, infer, softmax_cross_entropy, AdamConfig, AdamState,
    LayerSpec, Network, ParamSet,
};
use crate::{rng, Error, Matrix, Result};

pub const HIDDEN_WIDTH: usize = 64;
const LEAKY_ALPHA: f64 = 0.01;
pub const EPOCHS: usize = 200;

#[derive(Clone, Debug)]
pub struct MlpModel {
    net: Network,
    params: ParamSet,
    pub n_classes: usize,
}

/// Trains a one-hidden-layer classifier (`dense 64 → leaky relu → dense k`)
/// with softmax cross-entropy, full-batch Adam at the default learning rate,
/// for a fixed number of epochs. Fully deterministic for a given seed: the
/// network has no stochastic layers, so randomness enters only through
/// weight initialization.
pub fn fit_mlp(x: &Matrix, y: &[usize], n_classes: usize, seed: u64) -> Result<MlpModel> {
    if x.rows() == 0 || y.is_empty() {
        return Err(Error::Argument("cannot fit a classifier on an empty dataset".into()));
    }
    if x.rows() != y.len() {
        return Err(Error::Argument(format!(
            "{} rows but {} labels",
            x.rows(),
            y.len()
        )));
    }
    if n_classes == 0 || y.iter().any(|&l| l >= n_classes) {
        return Err(Error::Argument("labels out of range".into()));
    }

    let net = Network::new(
        x.cols(),
        vec![
            LayerSpec::Dense { width: HIDDEN_WIDTH },
            LayerSpec::LeakyRelu { alpha: LEAKY_ALPHA },
            LayerSpec::Dense { width: n_classes },
        ],
    )?;
    let mut r = rng::seeded(seed);
    let mut params = ParamSet::init(&net, &mut r);
    let mut adam = AdamState::new(params.trainable_len());
    let cfg = AdamConfig {
        lr: 1e-3,
        beta1: 0.9,
        ..AdamConfig::default()
    };

    let mut onehot = Matrix::zeros(y.len(), n_classes);
    for (row, &label) in y.iter().enumerate() {
        onehot.set(row, label, 1.0);
    }

    for _ in 0..EPOCHS {
        let (logits, cache) = forward_train(&net, &mut params, x, &mut r)?;
        let (_, dlogits) = softmax_cross_entropy(&logits, &onehot)?;
        let (grads, _) = backward(&net, &params, &cache, &dlogits);
        adam_step(&mut params, &grads, &mut adam, &cfg)?;
    }

    Ok(MlpModel {
        net,
        params,
        n_classes,
    })
}

/// Class with the highest logit per row; ties resolve to the lowest index.
pub fn predict_mlp(model: &MlpModel, x: &Matrix) -> Result<Vec<usize>> {
    let logits = infer(&model.net, &model.params, x)?;
    Ok(logits
        .iter_rows()
        .map(|row| {
            let mut best = 0;
            for (i, &v) in row.iter().enumerate() {
                if v > row[best] {
                    best = i;
                }
            }
            best
        })
        .collect())
}
