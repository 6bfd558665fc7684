//! Forward and backward passes.
//!
//! `forward_train` keeps per-layer intermediates in a [`ForwardCache`] and
//! applies training-time behavior: batch statistics (updating the moving
//! averages in place) and inverted dropout. `infer` is the deterministic
//! evaluation path using moving statistics and no dropout. `backward`
//! consumes the cache and returns gradients for every learned parameter
//! plus the gradient with respect to the network input, which adversarial
//! training needs to push through a frozen discriminator.

use rand::Rng as _;

use super::{GradSet, LayerParams, LayerSpec, Network, ParamSet, SegmentKind};
use crate::{Error, Matrix, Result, SeededRng};

const BN_EPS: f64 = 1e-5;

enum LayerCache {
    Dense { x: Matrix },
    LeakyRelu { x: Matrix },
    Sigmoid { y: Matrix },
    BatchNorm { x_hat: Matrix, inv_std: Vec<f64> },
    /// Mask entries are `0` or `1/keep`, so forward and backward are the
    /// same elementwise product.
    Dropout { mask: Option<Matrix> },
    Mixed { y: Matrix },
}

pub struct ForwardCache {
    layers: Vec<LayerCache>,
}

fn check_input(net: &Network, x: &Matrix) -> Result<()> {
    if x.rows() == 0 {
        return Err(Error::Argument("forward pass needs at least one row".into()));
    }
    if x.cols() != net.input_width() {
        return Err(Error::Dimension {
            layer: 0,
            detail: format!(
                "input has {} features but the network expects {}",
                x.cols(),
                net.input_width()
            ),
        });
    }
    Ok(())
}

fn dense_forward(x: &Matrix, w: &Matrix, b: &[f64]) -> Matrix {
    let mut y = x.matmul(w);
    y.add_row_vec(b);
    y
}

fn sigmoid(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

/// Row-wise softmax over `cols[lo..hi)`, written in place; subtracts the row
/// maximum first so large logits cannot overflow.
fn softmax_span(y: &mut Matrix, lo: usize, hi: usize) {
    for r in 0..y.rows() {
        let row = &mut y.row_mut(r)[lo..hi];
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for v in row.iter_mut() {
            *v = (*v - max).exp();
            sum += *v;
        }
        for v in row.iter_mut() {
            *v /= sum;
        }
    }
}

fn mixed_forward(mut y: Matrix, segments: &[super::Segment]) -> Matrix {
    let mut lo = 0;
    for seg in segments {
        let hi = lo + seg.width;
        match seg.kind {
            SegmentKind::Sigmoid => {
                for r in 0..y.rows() {
                    for v in &mut y.row_mut(r)[lo..hi] {
                        *v = sigmoid(*v);
                    }
                }
            }
            SegmentKind::Softmax => softmax_span(&mut y, lo, hi),
        }
        lo = hi;
    }
    y
}

/// Training-mode forward pass. Updates batch norm moving statistics inside
/// `params` and draws dropout masks from `rng` (nothing is drawn when the
/// rate is zero, so disabling dropout leaves the random stream untouched).
pub fn forward_train(
    net: &Network,
    params: &mut ParamSet,
    x: &Matrix,
    rng: &mut SeededRng,
) -> Result<(Matrix, ForwardCache)> {
    check_input(net, x)?;
    let mut cur = x.clone();
    let mut caches = Vec::with_capacity(net.layers().len());
    for (spec, layer_params) in net.layers().iter().zip(&mut params.layers) {
        match (spec, layer_params) {
            (LayerSpec::Dense { .. }, LayerParams::Dense { w, b }) => {
                let y = dense_forward(&cur, w, b);
                caches.push(LayerCache::Dense { x: cur });
                cur = y;
            }
            (LayerSpec::LeakyRelu { alpha }, _) => {
                let y = cur.map(|v| if v > 0.0 { v } else { alpha * v });
                caches.push(LayerCache::LeakyRelu { x: cur });
                cur = y;
            }
            (LayerSpec::Sigmoid, _) => {
                cur = cur.map(sigmoid);
                caches.push(LayerCache::Sigmoid { y: cur.clone() });
            }
            (
                LayerSpec::BatchNorm { momentum },
                LayerParams::BatchNorm {
                    gamma,
                    beta,
                    moving_mean,
                    moving_var,
                },
            ) => {
                let b = cur.rows() as f64;
                let n = cur.cols();
                let mut mean = cur.col_sum();
                for m in &mut mean {
                    *m /= b;
                }
                let mut var = vec![0.0; n];
                for row in cur.iter_rows() {
                    for (j, &v) in row.iter().enumerate() {
                        let d = v - mean[j];
                        var[j] += d * d;
                    }
                }
                for v in &mut var {
                    *v /= b;
                }
                let inv_std: Vec<f64> = var.iter().map(|&v| 1.0 / (v + BN_EPS).sqrt()).collect();
                let mut x_hat = cur.clone();
                for r in 0..x_hat.rows() {
                    for (j, v) in x_hat.row_mut(r).iter_mut().enumerate() {
                        *v = (*v - mean[j]) * inv_std[j];
                    }
                }
                let mut y = x_hat.clone();
                for r in 0..y.rows() {
                    for (j, v) in y.row_mut(r).iter_mut().enumerate() {
                        *v = gamma[j] * *v + beta[j];
                    }
                }
                for j in 0..n {
                    moving_mean[j] = momentum * moving_mean[j] + (1.0 - momentum) * mean[j];
                    moving_var[j] = momentum * moving_var[j] + (1.0 - momentum) * var[j];
                }
                caches.push(LayerCache::BatchNorm { x_hat, inv_std });
                cur = y;
            }
            (LayerSpec::Dropout { rate }, _) => {
                if *rate == 0.0 {
                    caches.push(LayerCache::Dropout { mask: None });
                } else {
                    let keep = 1.0 - rate;
                    let mut mask = Matrix::zeros(cur.rows(), cur.cols());
                    for v in mask.data_mut() {
                        if rng.random::<f64>() < keep {
                            *v = 1.0 / keep;
                        }
                    }
                    for (c, &m) in cur.data_mut().iter_mut().zip(mask.data()) {
                        *c *= m;
                    }
                    caches.push(LayerCache::Dropout { mask: Some(mask) });
                }
            }
            (LayerSpec::MixedActivation { segments }, _) => {
                cur = mixed_forward(cur, segments);
                caches.push(LayerCache::Mixed { y: cur.clone() });
            }
            (spec, _) => unreachable!("parameter layout out of sync at {spec:?}"),
        }
    }
    Ok((cur, ForwardCache { layers: caches }))
}

/// Evaluation-mode forward pass: batch norm uses moving statistics, dropout
/// is the identity.
pub fn infer(net: &Network, params: &ParamSet, x: &Matrix) -> Result<Matrix> {
    check_input(net, x)?;
    let mut cur = x.clone();
    for (spec, layer_params) in net.layers().iter().zip(&params.layers) {
        match (spec, layer_params) {
            (LayerSpec::Dense { .. }, LayerParams::Dense { w, b }) => {
                cur = dense_forward(&cur, w, b);
            }
            (LayerSpec::LeakyRelu { alpha }, _) => {
                cur = cur.map(|v| if v > 0.0 { v } else { alpha * v });
            }
            (LayerSpec::Sigmoid, _) => cur = cur.map(sigmoid),
            (
                LayerSpec::BatchNorm { .. },
                LayerParams::BatchNorm {
                    gamma,
                    beta,
                    moving_mean,
                    moving_var,
                },
            ) => {
                for r in 0..cur.rows() {
                    for (j, v) in cur.row_mut(r).iter_mut().enumerate() {
                        let inv = 1.0 / (moving_var[j] + BN_EPS).sqrt();
                        *v = gamma[j] * (*v - moving_mean[j]) * inv + beta[j];
                    }
                }
            }
            (LayerSpec::Dropout { .. }, _) => {}
            (LayerSpec::MixedActivation { segments }, _) => {
                cur = mixed_forward(cur, segments);
            }
            (spec, _) => unreachable!("parameter layout out of sync at {spec:?}"),
        }
    }
    Ok(cur)
}

/// Reverse pass over a cached forward run. `out_grad` is dL/d(output); the
/// returned pair is (parameter gradients, dL/d(input)). The loss gradient is
/// expected to already carry any 1/batch factor.
pub fn backward(
    net: &Network,
    params: &ParamSet,
    cache: &ForwardCache,
    out_grad: &Matrix,
) -> (GradSet, Matrix) {
    let mut grads = ParamSet::zeros(net);
    let mut g = out_grad.clone();
    for i in (0..net.layers().len()).rev() {
        match (&net.layers()[i], &params.layers[i], &cache.layers[i]) {
            (LayerSpec::Dense { .. }, LayerParams::Dense { w, .. }, LayerCache::Dense { x }) => {
                let dw = x.t_matmul(&g);
                let db = g.col_sum();
                let dx = g.matmul_t(w);
                grads.layers[i] = LayerParams::Dense { w: dw, b: db };
                g = dx;
            }
            (LayerSpec::LeakyRelu { alpha }, _, LayerCache::LeakyRelu { x }) => {
                for (gv, &xv) in g.data_mut().iter_mut().zip(x.data()) {
                    if xv <= 0.0 {
                        *gv *= alpha;
                    }
                }
            }
            (LayerSpec::Sigmoid, _, LayerCache::Sigmoid { y }) => {
                for (gv, &yv) in g.data_mut().iter_mut().zip(y.data()) {
                    *gv *= yv * (1.0 - yv);
                }
            }
            (
                LayerSpec::BatchNorm { .. },
                LayerParams::BatchNorm { gamma, .. },
                LayerCache::BatchNorm { x_hat, inv_std },
            ) => {
                let b = g.rows() as f64;
                let n = g.cols();
                let mut dgamma = vec![0.0; n];
                let mut dbeta = vec![0.0; n];
                for (grow, xrow) in g.iter_rows().zip(x_hat.iter_rows()) {
                    for j in 0..n {
                        dgamma[j] += grow[j] * xrow[j];
                        dbeta[j] += grow[j];
                    }
                }
                // dL/dx via the batch-statistics chain:
                //   dx = inv_std/b * (b*dxh - sum(dxh) - xh * sum(dxh*xh))
                // where dxh = g * gamma.
                let mut sum_dxh = vec![0.0; n];
                let mut sum_dxh_xh = vec![0.0; n];
                for (grow, xrow) in g.iter_rows().zip(x_hat.iter_rows()) {
                    for j in 0..n {
                        let dxh = grow[j] * gamma[j];
                        sum_dxh[j] += dxh;
                        sum_dxh_xh[j] += dxh * xrow[j];
                    }
                }
                let mut dx = Matrix::zeros(g.rows(), n);
                for r in 0..g.rows() {
                    let grow = g.row(r);
                    let xrow = x_hat.row(r);
                    let drow = dx.row_mut(r);
                    for j in 0..n {
                        let dxh = grow[j] * gamma[j];
                        drow[j] = inv_std[j] / b
                            * (b * dxh - sum_dxh[j] - xrow[j] * sum_dxh_xh[j]);
                    }
                }
                grads.layers[i] = LayerParams::BatchNorm {
                    gamma: dgamma,
                    beta: dbeta,
                    moving_mean: vec![0.0; n],
                    moving_var: vec![0.0; n],
                };
                g = dx;
            }
            (LayerSpec::Dropout { .. }, _, LayerCache::Dropout { mask }) => {
                if let Some(mask) = mask {
                    for (gv, &m) in g.data_mut().iter_mut().zip(mask.data()) {
                        *gv *= m;
                    }
                }
            }
            (LayerSpec::MixedActivation { segments }, _, LayerCache::Mixed { y }) => {
                let mut lo = 0;
                for seg in segments {
                    let hi = lo + seg.width;
                    match seg.kind {
                        SegmentKind::Sigmoid => {
                            for r in 0..g.rows() {
                                let yrow = y.row(r).to_vec();
                                for (j, gv) in g.row_mut(r)[lo..hi].iter_mut().enumerate() {
                                    let yv = yrow[lo + j];
                                    *gv *= yv * (1.0 - yv);
                                }
                            }
                        }
                        SegmentKind::Softmax => {
                            // dz_i = y_i * (g_i - sum_j g_j y_j) within the block.
                            for r in 0..g.rows() {
                                let yrow = y.row(r)[lo..hi].to_vec();
                                let grow = &mut g.row_mut(r)[lo..hi];
                                let dot: f64 =
                                    grow.iter().zip(&yrow).map(|(&gv, &yv)| gv * yv).sum();
                                for (gv, &yv) in grow.iter_mut().zip(&yrow) {
                                    *gv = yv * (*gv - dot);
                                }
                            }
                        }
                    }
                    lo = hi;
                }
            }
            (spec, ..) => unreachable!("cache out of sync at {spec:?}"),
        }
    }
    (grads, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::Segment;
    use crate::rng;
    use rand::Rng;

    fn identity_params(net: &Network) -> ParamSet {
        // Dense layers as identity maps where square; used to probe single
        // activation layers.
        let mut p = ParamSet::zeros(net);
        for layer in &mut p.layers {
            if let LayerParams::Dense { w, .. } = layer {
                for i in 0..w.rows().min(w.cols()) {
                    w.set(i, i, 1.0);
                }
            }
        }
        p
    }

    #[test]
    fn sigmoid_of_zero_is_half() {
        let net = Network::new(1, vec![LayerSpec::Sigmoid]).unwrap();
        let p = ParamSet::zeros(&net);
        let y = infer(&net, &p, &Matrix::from_vec(1, 1, vec![0.0])).unwrap();
        assert_eq!(y.get(0, 0), 0.5);
    }

    #[test]
    fn leaky_relu_slope() {
        let net = Network::new(2, vec![LayerSpec::LeakyRelu { alpha: 0.2 }]).unwrap();
        let p = ParamSet::zeros(&net);
        let y = infer(&net, &p, &Matrix::from_vec(1, 2, vec![1.0, -1.0])).unwrap();
        assert_eq!(y.row(0), &[1.0, -0.2]);
    }

    #[test]
    fn batch_norm_maps_constant_batch_to_shift() {
        let net = Network::new(2, vec![LayerSpec::BatchNorm { momentum: 0.99 }]).unwrap();
        let mut p = ParamSet::init(&net, &mut rng::seeded(0));
        let x = Matrix::from_rows(&[vec![3.0, -1.0], vec![3.0, -1.0], vec![3.0, -1.0]]);
        let (y, _) = forward_train(&net, &mut p, &x, &mut rng::seeded(0)).unwrap();
        // zero variance => normalized activations are exactly beta
        assert!(y.data().iter().all(|&v| v == 0.0));
        // moving stats moved toward the batch statistics
        let LayerParams::BatchNorm {
            moving_mean,
            moving_var,
            ..
        } = &p.layers[0]
        else {
            panic!("expected batch norm params");
        };
        assert!((moving_mean[0] - 0.01 * 3.0).abs() < 1e-12);
        assert!((moving_var[0] - 0.99).abs() < 1e-12);
    }

    #[test]
    fn dropout_keeps_expected_mass_and_draws_nothing_at_rate_zero() {
        let net = Network::new(1, vec![LayerSpec::Dropout { rate: 0.1 }]).unwrap();
        let mut p = ParamSet::zeros(&net);
        let x = Matrix::from_vec(20_000, 1, vec![1.0; 20_000]);
        let (y, _) = forward_train(&net, &mut p, &x, &mut rng::seeded(3)).unwrap();
        let mean = y.data().iter().sum::<f64>() / y.data().len() as f64;
        assert!((mean - 1.0).abs() < 0.02, "inverted dropout mean {mean}");

        let off = Network::new(1, vec![LayerSpec::Dropout { rate: 0.0 }]).unwrap();
        let mut r1 = rng::seeded(5);
        let mut r2 = rng::seeded(5);
        let _ = forward_train(&off, &mut ParamSet::zeros(&off), &x, &mut r1).unwrap();
        assert_eq!(r1.random::<u64>(), r2.random::<u64>(), "rate 0 must not consume rng");
    }

    #[test]
    fn mixed_softmax_rows_sum_to_one() {
        let net = Network::new(
            5,
            vec![LayerSpec::MixedActivation {
                segments: vec![
                    Segment {
                        width: 2,
                        kind: SegmentKind::Sigmoid,
                    },
                    Segment {
                        width: 3,
                        kind: SegmentKind::Softmax,
                    },
                ],
            }],
        )
        .unwrap();
        let p = ParamSet::zeros(&net);
        let x = Matrix::from_vec(2, 5, vec![0.0, 2.0, 1.0, 1.0, 1.0, -3.0, 0.5, 900.0, 901.0, 899.0]);
        let y = infer(&net, &p, &x).unwrap();
        for r in 0..2 {
            let s: f64 = y.row(r)[2..5].iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
            assert!(y.row(r).iter().all(|v| v.is_finite()));
        }
        assert_eq!(y.get(0, 0), 0.5);
    }

    #[test]
    fn infer_matches_train_for_deterministic_layers() {
        let net = Network::new(
            3,
            vec![
                LayerSpec::Dense { width: 3 },
                LayerSpec::LeakyRelu { alpha: 0.2 },
                LayerSpec::Dense { width: 2 },
                LayerSpec::Sigmoid,
            ],
        )
        .unwrap();
        let p = identity_params(&net);
        let x = Matrix::from_rows(&[vec![0.3, -0.7, 2.0], vec![1.0, 0.0, -1.0]]);
        let (train_y, _) = forward_train(&net, &mut p.clone(), &x, &mut rng::seeded(0)).unwrap();
        let infer_y = infer(&net, &p, &x).unwrap();
        assert_eq!(train_y, infer_y);
    }

    #[test]
    fn rejects_wrong_input_width() {
        let net = Network::new(3, vec![LayerSpec::Sigmoid]).unwrap();
        let p = ParamSet::zeros(&net);
        assert!(infer(&net, &p, &Matrix::zeros(1, 2)).is_err());
        assert!(infer(&net, &p, &Matrix::zeros(0, 3)).is_err());
    }
}
