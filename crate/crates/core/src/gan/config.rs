//! Training configuration for the GAN presets.

use serde::{Deserialize, Serialize};

use crate::data::ContinuousScaling;
use crate::dist::{DistConfig, DistScope};
use crate::nn::AdamConfig;
use crate::{Error, Result};

/// The three fixed architectures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// Unconditional generator for a single continuous column.
    Gan1d,
    /// Single continuous column conditioned on one discrete column.
    Cgan2d,
    /// Mixed-table generator: at most one continuous column plus any number
    /// of discrete columns, optional condition, batch-normalized generator.
    Discgan,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GanConfig {
    pub preset: Preset,
    /// Width of the random input vector.
    #[serde(default = "default_noise_dim")]
    pub noise_dim: usize,
    #[serde(default = "default_batch_size")]
    pub batch_size: usize,
    /// Total training steps (one batch per step).
    pub steps: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_lr")]
    pub learning_rate: f64,
    #[serde(default = "default_beta1")]
    pub beta1: f64,
    #[serde(default = "default_beta2")]
    pub beta2: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Cadence (in steps) of trace logging and interim evaluation.
    #[serde(default = "default_eval_every")]
    pub eval_every: u64,
    /// Dropout rate inside the discriminator.
    #[serde(default = "default_disc_dropout")]
    pub disc_dropout: f64,
    /// Optional discrete column whose categories are drawn uniformly when
    /// sampling training batches, countering skewed marginals.
    #[serde(default)]
    pub balance_on: Option<String>,
    #[serde(default)]
    pub scaling: ContinuousScaling,
    #[serde(default)]
    pub distribution: DistConfig,
}

fn default_noise_dim() -> usize {
    50
}
fn default_batch_size() -> usize {
    32
}
fn default_lr() -> f64 {
    2e-4
}
fn default_beta1() -> f64 {
    0.5
}
fn default_beta2() -> f64 {
    0.999
}
fn default_epsilon() -> f64 {
    1e-8
}
fn default_eval_every() -> u64 {
    1000
}
fn default_disc_dropout() -> f64 {
    0.1
}

impl GanConfig {
    /// A config with every optional knob at its default.
    pub fn preset_defaults(preset: Preset, steps: u64, seed: u64) -> Self {
        Self {
            preset,
            noise_dim: default_noise_dim(),
            batch_size: default_batch_size(),
            steps,
            seed,
            learning_rate: default_lr(),
            beta1: default_beta1(),
            beta2: default_beta2(),
            epsilon: default_epsilon(),
            eval_every: default_eval_every(),
            disc_dropout: default_disc_dropout(),
            balance_on: None,
            scaling: ContinuousScaling::default(),
            distribution: DistConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.noise_dim == 0 {
            return Err(Error::Argument("noise_dim must be at least 1".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Argument("batch_size must be at least 1".into()));
        }
        if self.preset == Preset::Discgan && self.batch_size < 2 {
            return Err(Error::Argument(
                "batch_size must be at least 2: the discgan generator normalizes over the batch"
                    .into(),
            ));
        }
        if self.steps == 0 {
            return Err(Error::Argument("steps must be at least 1".into()));
        }
        if self.eval_every == 0 {
            return Err(Error::Argument("eval_every must be at least 1".into()));
        }
        if !self.learning_rate.is_finite() || self.learning_rate <= 0.0 {
            return Err(Error::Argument(format!(
                "learning_rate must be a positive real, got {}",
                self.learning_rate
            )));
        }
        for (name, v) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if !v.is_finite() || !(0.0..1.0).contains(&v) {
                return Err(Error::Argument(format!(
                    "{name} must lie in [0, 1), got {v}"
                )));
            }
        }
        if !self.epsilon.is_finite() || self.epsilon <= 0.0 {
            return Err(Error::Argument(format!(
                "epsilon must be a positive real, got {}",
                self.epsilon
            )));
        }
        if !self.disc_dropout.is_finite() || !(0.0..1.0).contains(&self.disc_dropout) {
            return Err(Error::Argument(format!(
                "disc_dropout must lie in [0, 1), got {}",
                self.disc_dropout
            )));
        }
        self.distribution.validate()
    }

    pub fn adam(&self) -> AdamConfig {
        AdamConfig {
            lr: self.learning_rate,
            beta1: self.beta1,
            beta2: self.beta2,
            epsilon: self.epsilon,
        }
    }

    /// True when any step work is routed through the worker pool.
    pub fn is_distributed(&self) -> bool {
        self.distribution.scope != DistScope::None && self.distribution.workers > 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_json_fills_defaults() {
        let cfg: GanConfig =
            serde_json::from_str(r#"{"preset":"gan1d","steps":5000}"#).unwrap();
        assert_eq!(cfg.preset, Preset::Gan1d);
        assert_eq!(cfg.noise_dim, 50);
        assert_eq!(cfg.batch_size, 32);
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.learning_rate, 2e-4);
        assert_eq!(cfg.beta1, 0.5);
        assert_eq!(cfg.beta2, 0.999);
        assert_eq!(cfg.epsilon, 1e-8);
        assert_eq!(cfg.eval_every, 1000);
        assert_eq!(cfg.disc_dropout, 0.1);
        assert_eq!(cfg.balance_on, None);
        assert_eq!(cfg.distribution.workers, 1);
        cfg.validate().unwrap();
    }

    #[test]
    fn distribution_block_parses() {
        let cfg: GanConfig = serde_json::from_str(
            r#"{"preset":"discgan","steps":10,
                "distribution":{"workers":2,"scope":"discriminator","sync_batch_norm":false}}"#,
        )
        .unwrap();
        assert_eq!(cfg.distribution.workers, 2);
        assert!(cfg.is_distributed());
        cfg.validate().unwrap();
    }

    #[test]
    fn rejects_bad_values() {
        let mut cfg = GanConfig::preset_defaults(Preset::Gan1d, 10, 0);
        cfg.noise_dim = 0;
        assert!(cfg.validate().is_err());

        let mut cfg = GanConfig::preset_defaults(Preset::Discgan, 10, 0);
        cfg.batch_size = 1;
        assert!(cfg.validate().is_err());

        let mut cfg = GanConfig::preset_defaults(Preset::Gan1d, 10, 0);
        cfg.batch_size = 1;
        cfg.validate().unwrap();

        let mut cfg = GanConfig::preset_defaults(Preset::Gan1d, 10, 0);
        cfg.disc_dropout = 1.0;
        assert!(cfg.validate().is_err());

        let mut cfg = GanConfig::preset_defaults(Preset::Gan1d, 10, 0);
        cfg.steps = 0;
        assert!(cfg.validate().is_err());
    }
}
