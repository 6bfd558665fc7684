//! Adam optimizer over the flattened trainable parameters.

use serde::{Deserialize, Serialize};

use super::{GradSet, ParamSet};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    /// The adversarial-training setting (low momentum, small step) used by
    /// the GAN presets. Classifier training overrides `lr`/`beta1` with the
    /// conventional 1e-3 / 0.9.
    fn default() -> Self {
        Self {
            lr: 2e-4,
            beta1: 0.5,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// First/second moment accumulators plus the step counter, over the same
/// flat ordering as [`ParamSet::flatten_trainable`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    t: u64,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl AdamState {
    pub fn new(len: usize) -> Self {
        Self {
            t: 0,
            m: vec![0.0; len],
            v: vec![0.0; len],
        }
    }

    pub fn steps(&self) -> u64 {
        self.t
    }

    /// One bias-corrected update of `params` in place:
    /// `p -= lr * m_hat / (sqrt(v_hat) + eps)`.
    pub fn step(&mut self, cfg: &AdamConfig, params: &mut [f64], grads: &[f64]) -> Result<()> {
        if params.len() != self.m.len() || grads.len() != self.m.len() {
            return Err(Error::Argument(format!(
                "optimizer holds {} parameters but was given {} params / {} grads",
                self.m.len(),
                params.len(),
                grads.len()
            )));
        }
        if let Some(i) = grads.iter().position(|g| !g.is_finite()) {
            return Err(Error::Numeric(format!(
                "non-finite gradient at flat index {i}: {}",
                grads[i]
            )));
        }
        self.t += 1;
        let bc1 = 1.0 - cfg.beta1.powi(self.t as i32);
        let bc2 = 1.0 - cfg.beta2.powi(self.t as i32);
        for ((p, g), (m, v)) in params
            .iter_mut()
            .zip(grads)
            .zip(self.m.iter_mut().zip(self.v.iter_mut()))
        {
            *m = cfg.beta1 * *m + (1.0 - cfg.beta1) * g;
            *v = cfg.beta2 * *v + (1.0 - cfg.beta2) * g * g;
            let m_hat = *m / bc1;
            let v_hat = *v / bc2;
            *p -= cfg.lr * m_hat / (v_hat.sqrt() + cfg.epsilon);
        }
        Ok(())
    }
}

/// Applies one Adam step to a structured parameter set.
pub fn adam_step(
    params: &mut ParamSet,
    grads: &GradSet,
    state: &mut AdamState,
    cfg: &AdamConfig,
) -> Result<()> {
    let mut flat = params.flatten_trainable();
    let gflat = grads.flatten_trainable();
    state.step(cfg, &mut flat, &gflat)?;
    params.set_trainable(&flat);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_leaves_parameters_unchanged() {
        let mut st = AdamState::new(3);
        let mut p = vec![1.0, -2.0, 0.5];
        st.step(&AdamConfig::default(), &mut p, &[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(p, vec![1.0, -2.0, 0.5]);
    }

    #[test]
    fn first_step_is_lr_scaled_sign_step() {
        // With bias correction the first update is lr * g / (|g| + eps).
        let cfg = AdamConfig {
            lr: 1e-3,
            ..AdamConfig::default()
        };
        let mut st = AdamState::new(1);
        let mut p = vec![1.0];
        st.step(&cfg, &mut p, &[1.0]).unwrap();
        let expected = 1.0 - 1e-3 / (1.0 + 1e-8);
        assert!((p[0] - expected).abs() < 1e-15);

        let mut st2 = AdamState::new(1);
        let mut q = vec![1.0];
        st2.step(&AdamConfig::default(), &mut q, &[1.0]).unwrap();
        let expected_default = 1.0 - 2e-4 / (1.0 + 1e-8);
        assert!((q[0] - expected_default).abs() < 1e-15);
    }

    #[test]
    fn rejects_nan_gradients() {
        let mut st = AdamState::new(1);
        let mut p = vec![0.0];
        let err = st.step(&AdamConfig::default(), &mut p, &[f64::NAN]).unwrap_err();
        assert!(matches!(err, Error::Numeric(_)));
        assert_eq!(p, vec![0.0], "state must be untouched after a rejected step");
    }

    #[test]
    fn descends_a_quadratic() {
        // Minimize (x - 3)^2; Adam should get close within a few thousand steps.
        let cfg = AdamConfig {
            lr: 0.01,
            ..AdamConfig::default()
        };
        let mut st = AdamState::new(1);
        let mut p = vec![-4.0];
        for _ in 0..5000 {
            let g = 2.0 * (p[0] - 3.0);
            st.step(&cfg, &mut p, &[g]).unwrap();
        }
        assert!((p[0] - 3.0).abs() < 1e-3, "ended at {}", p[0]);
    }
}
