//! Loss functions with their gradients.

use crate::{Error, Matrix, Result};

/// Probabilities are clamped away from {0, 1} before taking logs so a
/// saturated discriminator yields large-but-finite losses.
const P_EPS: f64 = 1e-7;

/// Binary cross-entropy averaged over every element, plus dL/d(pred).
/// The returned gradient already carries the 1/n factor, so it can be fed
/// straight into [`super::backward`].
pub fn bce(pred: &Matrix, target: &Matrix) -> Result<(f64, Matrix)> {
    if pred.rows() != target.rows() || pred.cols() != target.cols() {
        return Err(Error::Argument(format!(
            "prediction is {}x{} but target is {}x{}",
            pred.rows(),
            pred.cols(),
            target.rows(),
            target.cols()
        )));
    }
    let n = (pred.rows() * pred.cols()) as f64;
    let mut loss = 0.0;
    let mut grad = Matrix::zeros(pred.rows(), pred.cols());
    for ((g, &p), &t) in grad.data_mut().iter_mut().zip(pred.data()).zip(target.data()) {
        let p = p.clamp(P_EPS, 1.0 - P_EPS);
        loss -= t * p.ln() + (1.0 - t) * (1.0 - p).ln();
        *g = (p - t) / (p * (1.0 - p)) / n;
    }
    Ok((loss / n, grad))
}

/// Softmax cross-entropy computed from raw logits against one-hot targets,
/// fused for stability: the loss goes through log-sum-exp and the gradient
/// is `(softmax(z) - y) / rows`.
pub fn softmax_cross_entropy(logits: &Matrix, onehot: &Matrix) -> Result<(f64, Matrix)> {
    if logits.rows() != onehot.rows() || logits.cols() != onehot.cols() {
        return Err(Error::Argument(format!(
            "logits are {}x{} but targets are {}x{}",
            logits.rows(),
            logits.cols(),
            onehot.rows(),
            onehot.cols()
        )));
    }
    let rows = logits.rows() as f64;
    let mut loss = 0.0;
    let mut grad = Matrix::zeros(logits.rows(), logits.cols());
    for r in 0..logits.rows() {
        let z = logits.row(r);
        let y = onehot.row(r);
        let max = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = z.iter().map(|&v| (v - max).exp()).sum();
        let lse = max + sum.ln();
        let picked: f64 = z.iter().zip(y).map(|(&zv, &yv)| zv * yv).sum();
        loss += lse - picked;
        for (j, g) in grad.row_mut(r).iter_mut().enumerate() {
            let p = (z[j] - lse).exp();
            *g = (p - y[j]) / rows;
        }
    }
    Ok((loss / rows, grad))
}
