//! Finite-difference validation of the backward pass.

use super::{backward, forward_train, Network, ParamSet};
use crate::{Matrix, Result};
use crate::rng;

/// Compares analytic gradients against central differences of the scalar
/// probe loss `L = 0.5 * mean(y^2)` and returns the worst relative error
/// `|ga - gn| / max(|ga| + |gn|, 1e-6)`.
///
/// Every loss evaluation clones the parameters (so batch-norm moving
/// statistics cannot drift between probes) and reseeds the random stream
/// with `seed` (so dropout masks are identical across probes).
pub fn grad_check(net: &Network, params: &ParamSet, x: &Matrix, seed: u64) -> Result<f64> {
    let loss_of = |theta: &[f64]| -> Result<f64> {
        let mut p = params.clone();
        p.set_trainable(theta);
        let (y, _) = forward_train(net, &mut p, x, &mut rng::seeded(seed))?;
        let n = (y.rows() * y.cols()) as f64;
        Ok(0.5 * y.data().iter().map(|v| v * v).sum::<f64>() / n)
    };

    // Analytic pass.
    let mut p = params.clone();
    let (y, cache) = forward_train(net, &mut p, x, &mut rng::seeded(seed))?;
    let n = (y.rows() * y.cols()) as f64;
    let dl_dy = y.map(|v| v / n);
    let (grads, _) = backward(net, &p, &cache, &dl_dy);
    let analytic = grads.flatten_trainable();

    // Numeric pass.
    let theta = params.flatten_trainable();
    let eps = 1e-5;
    let mut worst = 0.0f64;
    for i in 0..theta.len() {
        let mut plus = theta.clone();
        plus[i] += eps;
        let mut minus = theta.clone();
        minus[i] -= eps;
        let numeric = (loss_of(&plus)? - loss_of(&minus)?) / (2.0 * eps);
        let ga = analytic[i];
        let rel = (ga - numeric).abs() / (ga.abs() + numeric.abs()).max(1e-6);
        worst = worst.max(rel);
    }
    Ok(worst)
}
