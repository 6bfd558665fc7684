//! The paired generator/discriminator with its data plumbing: construction
//! from a schema'd table, single training steps, sampling, checkpoints.

use std::path::Path;

use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::config::{GanConfig, Preset};
use super::presets::{build_discriminator, build_generator};
use crate::data::{ColumnKind, Layout, RawTable, Schema, TableTransform};
use crate::nn::{
    adam_step, backward, bce, forward_train, infer, AdamState, GradSet, Network, ParamSet,
    Segment, SegmentKind,
};
use crate::rng::derive_seed;
use crate::{rng, Error, Matrix, Result, SeededRng};

/// Noise-stream coordinates: every random draw in a training run comes from
/// `derive_seed(config.seed, [step, lane])` (plus a worker index for dropout),
/// so runs are reproducible and a run's data/noise tensors do not depend on
/// how many workers later shard them.
pub(crate) const LANE_BATCH: u64 = 0;
pub(crate) const LANE_D_NOISE: u64 = 1;
pub(crate) const LANE_G_NOISE: u64 = 2;
pub(crate) const LANE_D_DROPOUT: u64 = 3;
pub(crate) const LANE_G_DROPOUT: u64 = 4;
pub(crate) const LANE_EVAL: u64 = 5;

pub(crate) fn lane_rng(seed: u64, step: u64, lane: u64) -> SeededRng {
    rng::seeded(derive_seed(seed, &[step, lane]))
}

pub(crate) fn worker_rng(seed: u64, step: u64, lane: u64, worker: usize) -> SeededRng {
    rng::seeded(derive_seed(seed, &[step, lane, worker as u64]))
}

/// Standard-normal noise drawn row-major.
pub fn draw_noise(rng: &mut SeededRng, rows: usize, dim: usize) -> Matrix {
    let data = (0..rows * dim)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    Matrix::from_vec(rows, dim, data)
}

/// The condition column as seen by the networks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CondInfo {
    pub name: String,
    pub vocab: Vec<String>,
    /// Category proportions in the real training table, used when generation
    /// is not pinned to one category. Aligned with `vocab`.
    pub marginal: Vec<f64>,
}

impl CondInfo {
    pub fn width(&self) -> usize {
        self.vocab.len()
    }
}

#[derive(Clone, Debug)]
pub struct GanModel {
    pub config: GanConfig,
    pub transform: TableTransform,
    pub condition: Option<CondInfo>,
    pub generator: Network,
    pub g_params: ParamSet,
    pub g_adam: AdamState,
    pub discriminator: Network,
    pub d_params: ParamSet,
    pub d_adam: AdamState,
}

/// Output-head segments for the modeled columns: width-1 sigmoid per
/// continuous column, width-k softmax per one-hot block, in layout order.
pub fn feature_segments(layout: &Layout) -> Vec<Segment> {
    layout
        .spans
        .iter()
        .filter(|s| s.hi <= layout.feature_width)
        .map(|s| Segment {
            width: s.hi - s.lo,
            kind: if s.continuous {
                SegmentKind::Sigmoid
            } else {
                SegmentKind::Softmax
            },
        })
        .collect()
}

fn check_preset_fits(preset: Preset, schema: &Schema) -> Result<()> {
    let modeled: Vec<_> = schema.modeled().collect();
    let continuous = schema.continuous_modeled_count();
    let has_condition = schema.condition().is_some();
    match preset {
        Preset::Gan1d => {
            if modeled.len() != 1 || continuous != 1 {
                return Err(Error::Schema(
                    "the gan1d preset models exactly one continuous column".into(),
                ));
            }
            if has_condition {
                return Err(Error::Schema(
                    "the gan1d preset is unconditional; use cgan2d for a condition column".into(),
                ));
            }
        }
        Preset::Cgan2d => {
            if modeled.len() != 1 || continuous != 1 {
                return Err(Error::Schema(
                    "the cgan2d preset models exactly one continuous column".into(),
                ));
            }
            if !has_condition {
                return Err(Error::Schema(
                    "the cgan2d preset needs a discrete condition column".into(),
                ));
            }
        }
        Preset::Discgan => {
            if continuous > 1 {
                return Err(Error::Schema(format!(
                    "the discgan preset supports at most one continuous column, got {continuous}; \
                     representative multi-continuous generation is out of scope"
                )));
            }
        }
    }
    Ok(())
}

impl GanModel {
    /// Fits the encoding transforms on `real` and builds freshly initialized
    /// networks for the configured preset.
    pub fn new(config: GanConfig, real: &RawTable) -> Result<Self> {
        config.validate()?;
        check_preset_fits(config.preset, &real.schema)?;
        let transform = TableTransform::fit(real, config.scaling)?;
        let layout = transform.layout().clone();

        let condition = match real.schema.condition() {
            None => None,
            Some((idx, spec)) => {
                let vocab: Vec<String> = transform
                    .vocab(&spec.name)
                    .expect("condition columns are discrete")
                    .to_vec();
                let values = real.columns[idx]
                    .as_discrete()
                    .expect("condition columns are discrete");
                let mut counts = vec![0usize; vocab.len()];
                for v in values {
                    let i = vocab
                        .binary_search(v)
                        .expect("vocabulary was fitted on this column");
                    counts[i] += 1;
                }
                let n = values.len() as f64;
                Some(CondInfo {
                    name: spec.name.clone(),
                    vocab,
                    marginal: counts.iter().map(|&c| c as f64 / n).collect(),
                })
            }
        };

        if let Some(balance) = &config.balance_on {
            match real.schema.column(balance) {
                Some((_, spec)) if spec.kind == ColumnKind::Discrete => {}
                Some(_) => {
                    return Err(Error::Argument(format!(
                        "balance_on column `{balance}` must be discrete"
                    )))
                }
                None => {
                    return Err(Error::Argument(format!(
                        "balance_on column `{balance}` is not in the schema"
                    )))
                }
            }
        }

        let segments = feature_segments(&layout);
        let generator = build_generator(&config, &segments, layout.cond_width)?;
        let discriminator = build_discriminator(&config, layout.feature_width, layout.cond_width)?;
        let g_params = ParamSet::init(
            &generator,
            &mut rng::seeded(derive_seed(config.seed, &[u64::MAX, 0])),
        );
        let d_params = ParamSet::init(
            &discriminator,
            &mut rng::seeded(derive_seed(config.seed, &[u64::MAX, 1])),
        );
        let g_adam = AdamState::new(g_params.trainable_len());
        let d_adam = AdamState::new(d_params.trainable_len());
        Ok(Self {
            config,
            transform,
            condition,
            generator,
            g_params,
            g_adam,
            discriminator,
            d_params,
            d_adam,
        })
    }

    pub fn layout(&self) -> &Layout {
        self.transform.layout()
    }

    pub fn schema(&self) -> &Schema {
        &self.transform.schema
    }

    /// The condition block of encoded rows, when the schema has one.
    pub(crate) fn cond_slice(&self, rows: &Matrix) -> Option<Matrix> {
        let layout = self.layout();
        (layout.cond_width > 0)
            .then(|| rows.slice_cols(layout.feature_width, layout.total_width()))
    }

    /// Discriminator-phase gradients on one batch (or shard): real rows
    /// labeled 1, generator samples from `noise` labeled 0, loss = sum of the
    /// two per-half mean BCEs. The generator runs in inference mode (frozen,
    /// moving statistics); no parameters are updated here.
    pub fn d_phase(
        &mut self,
        real_rows: &Matrix,
        noise: &Matrix,
        dropout_rng: &mut SeededRng,
    ) -> Result<(GradSet, f64)> {
        let b = real_rows.rows();
        if b == 0 || noise.rows() != b {
            return Err(Error::Argument(format!(
                "discriminator phase needs matching non-empty halves, got {} real rows and {} noise rows",
                b,
                noise.rows()
            )));
        }
        let (fw, cw) = {
            let layout = self.layout();
            (layout.feature_width, layout.cond_width)
        };
        let cond = self.cond_slice(real_rows);
        let g_in = match &cond {
            Some(c) => noise.hstack(c),
            None => noise.clone(),
        };
        let fake_features = infer(&self.generator, &self.g_params, &g_in)?;
        let fake_rows = match &cond {
            Some(c) => fake_features.hstack(c),
            None => fake_features,
        };
        debug_assert_eq!(fake_rows.cols(), real_rows.cols());
        debug_assert_eq!(fw + cw, real_rows.cols());

        let d_in = real_rows.vstack(&fake_rows);
        let (pred, cache) = forward_train(&self.discriminator, &mut self.d_params, &d_in, dropout_rng)?;
        let ones = Matrix::from_vec(b, 1, vec![1.0; b]);
        let zeros = Matrix::zeros(b, 1);
        let (loss_real, grad_real) = bce(&pred.slice_rows(0, b), &ones)?;
        let (loss_fake, grad_fake) = bce(&pred.slice_rows(b, 2 * b), &zeros)?;
        let d_loss = loss_real + loss_fake;
        if !d_loss.is_finite() {
            return Err(Error::Numeric("discriminator loss is not finite".into()));
        }
        let out_grad = grad_real.vstack(&grad_fake);
        let (grads, _) = backward(&self.discriminator, &self.d_params, &cache, &out_grad);
        Ok((grads, d_loss))
    }

    /// Generator-phase gradients on one noise batch (or shard): samples flow
    /// through the (frozen) discriminator and the generator is pushed toward
    /// label 1 — the non-saturating objective. `cond_rows` must carry the
    /// condition block row-aligned with `noise` for conditional setups.
    /// Generator batch-norm runs in training mode, so its moving statistics
    /// advance here.
    pub fn g_phase(
        &mut self,
        cond_rows: Option<&Matrix>,
        noise: &Matrix,
        dropout_rng: &mut SeededRng,
    ) -> Result<(GradSet, f64)> {
        let b = noise.rows();
        if b == 0 {
            return Err(Error::Argument("generator phase needs a non-empty batch".into()));
        }
        let (fw, cw) = {
            let layout = self.layout();
            (layout.feature_width, layout.cond_width)
        };
        if cw > 0 {
            match cond_rows {
                Some(c) if c.rows() == b && c.cols() == cw => {}
                _ => {
                    return Err(Error::Argument(
                        "conditional generator phase needs a row-aligned condition block".into(),
                    ))
                }
            }
        }
        let g_in = match cond_rows {
            Some(c) => noise.hstack(c),
            None => noise.clone(),
        };
        // The generator has no dropout layers, so it consumes nothing from
        // `dropout_rng`; the stream is positioned for the discriminator pass.
        let (fake_features, g_cache) =
            forward_train(&self.generator, &mut self.g_params, &g_in, dropout_rng)?;
        let d_in = match cond_rows {
            Some(c) => fake_features.hstack(c),
            None => fake_features,
        };
        let (pred, d_cache) =
            forward_train(&self.discriminator, &mut self.d_params, &d_in, dropout_rng)?;
        let ones = Matrix::from_vec(b, 1, vec![1.0; b]);
        let (g_loss, dpred) = bce(&pred, &ones)?;
        if !g_loss.is_finite() {
            return Err(Error::Numeric("generator loss is not finite".into()));
        }
        let (_discarded, d_input_grad) =
            backward(&self.discriminator, &self.d_params, &d_cache, &dpred);
        let feature_grad = if cw > 0 {
            d_input_grad.slice_cols(0, fw)
        } else {
            d_input_grad
        };
        let (g_grads, _) = backward(&self.generator, &self.g_params, &g_cache, &feature_grad);
        Ok((g_grads, g_loss))
    }

    pub fn apply_d(&mut self, grads: &GradSet) -> Result<()> {
        adam_step(&mut self.d_params, grads, &mut self.d_adam, &self.config.adam())
    }

    pub fn apply_g(&mut self, grads: &GradSet) -> Result<()> {
        adam_step(&mut self.g_params, grads, &mut self.g_adam, &self.config.adam())
    }
}

/// One adversarial round on a full batch: discriminator update, then
/// generator update, each with its own derived noise stream for `step`.
pub fn train_step(model: &mut GanModel, real_batch: &Matrix, step: u64) -> Result<(f64, f64)> {
    let b = model.config.batch_size;
    if real_batch.rows() != b {
        return Err(Error::Argument(format!(
            "training step expects a full batch of {b} rows, got {}",
            real_batch.rows()
        )));
    }
    let seed = model.config.seed;
    let nd = model.config.noise_dim;

    let noise_d = draw_noise(&mut lane_rng(seed, step, LANE_D_NOISE), b, nd);
    let mut drop_d = worker_rng(seed, step, LANE_D_DROPOUT, 0);
    let (d_grads, d_loss) = model.d_phase(real_batch, &noise_d, &mut drop_d)?;
    model.apply_d(&d_grads)?;

    let noise_g = draw_noise(&mut lane_rng(seed, step, LANE_G_NOISE), b, nd);
    let cond = model.cond_slice(real_batch);
    let mut drop_g = worker_rng(seed, step, LANE_G_DROPOUT, 0);
    let (g_grads, g_loss) = model.g_phase(cond.as_ref(), &noise_g, &mut drop_g)?;
    model.apply_g(&g_grads)?;

    Ok((d_loss, g_loss))
}

const GENERATE_CHUNK: usize = 4096;

/// Draws `n` synthetic encoded rows from the trained generator (inference
/// mode). One-hot blocks are hardened to exact indicators by argmax. The
/// condition block is pinned to `condition` when given, otherwise sampled
/// from the real table's category proportions; the emitted rows carry the
/// condition block so they decode as full table rows.
pub fn generate(
    model: &GanModel,
    n: usize,
    condition: Option<&str>,
    rng: &mut SeededRng,
) -> Result<Matrix> {
    if n == 0 {
        return Err(Error::Argument("cannot generate zero rows".into()));
    }
    let layout = model.layout();
    let forced = match condition {
        None => None,
        Some(value) => {
            let Some(info) = &model.condition else {
                return Err(Error::Argument(
                    "this model has no condition column to pin".into(),
                ));
            };
            match info.vocab.binary_search(&value.to_string()) {
                Ok(i) => Some(i),
                Err(_) => {
                    return Err(Error::Vocabulary {
                        value: value.to_string(),
                        column: info.name.clone(),
                    })
                }
            }
        }
    };

    let mut out = Matrix::zeros(0, layout.total_width());
    let mut remaining = n;
    while remaining > 0 {
        let chunk = remaining.min(GENERATE_CHUNK);
        let noise = draw_noise(rng, chunk, model.config.noise_dim);
        let cond_block = match &model.condition {
            None => None,
            Some(info) => {
                let mut block = Matrix::zeros(chunk, info.width());
                for r in 0..chunk {
                    let idx = match forced {
                        Some(i) => i,
                        None => {
                            let u: f64 = rng.random();
                            let mut acc = 0.0;
                            let mut picked = info.marginal.len() - 1;
                            for (i, &p) in info.marginal.iter().enumerate() {
                                acc += p;
                                if u < acc {
                                    picked = i;
                                    break;
                                }
                            }
                            picked
                        }
                    };
                    block.set(r, idx, 1.0);
                }
                Some(block)
            }
        };
        let g_in = match &cond_block {
            Some(c) => noise.hstack(c),
            None => noise,
        };
        let features = infer(&model.generator, &model.g_params, &g_in)?;
        let hardened = harden_features(&features, layout);
        let rows = match &cond_block {
            Some(c) => hardened.hstack(c),
            None => hardened,
        };
        out = if out.rows() == 0 { rows } else { out.vstack(&rows) };
        remaining -= chunk;
    }
    Ok(out)
}

/// Argmax-hardens every one-hot block; continuous channels pass through.
fn harden_features(features: &Matrix, layout: &Layout) -> Matrix {
    let mut out = features.clone();
    for span in &layout.spans {
        if span.continuous || span.hi > layout.feature_width {
            continue;
        }
        for r in 0..out.rows() {
            let row = out.row_mut(r);
            let block = &mut row[span.lo..span.hi];
            let mut best = 0;
            for (i, &v) in block.iter().enumerate() {
                if v > block[best] {
                    best = i;
                }
            }
            for (i, v) in block.iter_mut().enumerate() {
                *v = if i == best { 1.0 } else { 0.0 };
            }
        }
    }
    out
}

/// Everything needed to resume or reuse a trained model, JSON-serializable.
/// Network topology is rebuilt from the config rather than stored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format_version: u32,
    pub step: u64,
    pub config: GanConfig,
    pub transform: TableTransform,
    pub condition: Option<CondInfo>,
    pub g_params: ParamSet,
    pub g_adam: AdamState,
    pub d_params: ParamSet,
    pub d_adam: AdamState,
}

pub const CHECKPOINT_VERSION: u32 = 1;

impl GanModel {
    pub fn checkpoint(&self, step: u64) -> Checkpoint {
        Checkpoint {
            format_version: CHECKPOINT_VERSION,
            step,
            config: self.config.clone(),
            transform: self.transform.clone(),
            condition: self.condition.clone(),
            g_params: self.g_params.clone(),
            g_adam: self.g_adam.clone(),
            d_params: self.d_params.clone(),
            d_adam: self.d_adam.clone(),
        }
    }

    /// Rebuilds a model from a checkpoint, revalidating the architecture
    /// against the stored parameters.
    pub fn from_checkpoint(cp: Checkpoint) -> Result<(Self, u64)> {
        if cp.format_version != CHECKPOINT_VERSION {
            return Err(Error::State(format!(
                "checkpoint format {} is not supported (expected {})",
                cp.format_version, CHECKPOINT_VERSION
            )));
        }
        cp.config.validate()?;
        let layout = cp.transform.layout().clone();
        let segments = feature_segments(&layout);
        let generator = build_generator(&cp.config, &segments, layout.cond_width)?;
        let discriminator =
            build_discriminator(&cp.config, layout.feature_width, layout.cond_width)?;
        if cp.g_params.trainable_len() != generator.trainable_param_count()
            || cp.d_params.trainable_len() != discriminator.trainable_param_count()
        {
            return Err(Error::State(
                "checkpoint parameters do not match the preset architecture".into(),
            ));
        }
        let step = cp.step;
        Ok((
            Self {
                config: cp.config,
                transform: cp.transform,
                condition: cp.condition,
                generator,
                g_params: cp.g_params,
                g_adam: cp.g_adam,
                discriminator,
                d_params: cp.d_params,
                d_adam: cp.d_adam,
            },
            step,
        ))
    }
}

pub fn save_checkpoint(path: &Path, cp: &Checkpoint) -> Result<()> {
    let text = serde_json::to_string_pretty(cp)?;
    // Write-then-rename so a crash mid-write never corrupts the previous
    // checkpoint.
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, text)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{make_standin_dataset, ColumnRole, ColumnSpec};

    fn age_table(n: usize) -> RawTable {
        let spec = crate::data::builtin("icu_age").unwrap();
        make_standin_dataset(&spec, n, &mut rng::seeded(42)).unwrap()
    }

    fn age_by_ethnicity_table(n: usize) -> RawTable {
        let spec = crate::data::builtin("icu_age_by_ethnicity").unwrap();
        make_standin_dataset(&spec, n, &mut rng::seeded(42)).unwrap()
    }

    #[test]
    fn untrained_discriminator_sits_near_chance() {
        let real = age_table(500);
        let cfg = GanConfig::preset_defaults(Preset::Gan1d, 10, 3);
        let mut model = GanModel::new(cfg, &real).unwrap();
        let data = model.transform.encode(&real).unwrap();
        let batch = data.slice_rows(0, 32);
        let noise = draw_noise(&mut rng::seeded(9), 32, model.config.noise_dim);
        let (_, d_loss) = model
            .d_phase(&batch, &noise, &mut rng::seeded(10))
            .unwrap();
        let chance = 2.0 * std::f64::consts::LN_2;
        assert!(
            (d_loss - chance).abs() < 0.5,
            "untrained loss {d_loss} too far from {chance}"
        );
    }

    #[test]
    fn zeroed_discriminator_gives_exact_ln2_generator_loss() {
        let real = age_table(200);
        let cfg = GanConfig::preset_defaults(Preset::Gan1d, 10, 3);
        let mut model = GanModel::new(cfg, &real).unwrap();
        model.d_params = ParamSet::zeros(&model.discriminator);
        let noise = draw_noise(&mut rng::seeded(1), 32, model.config.noise_dim);
        let (_, g_loss) = model.g_phase(None, &noise, &mut rng::seeded(2)).unwrap();
        // every per-row term is exactly ln 2; averaging 32 of them costs a
        // few ulps of sequential-summation rounding
        assert!((g_loss - std::f64::consts::LN_2).abs() < 1e-14);
    }

    #[test]
    fn train_step_is_deterministic() {
        let real = age_table(300);
        let cfg = GanConfig::preset_defaults(Preset::Gan1d, 10, 7);
        let model0 = GanModel::new(cfg, &real).unwrap();
        let data = model0.transform.encode(&real).unwrap();
        let batch = data.slice_rows(0, 32);

        let mut a = model0.clone();
        let mut b = model0.clone();
        let (da, ga) = train_step(&mut a, &batch, 1).unwrap();
        let (db, gb) = train_step(&mut b, &batch, 1).unwrap();
        assert_eq!(da.to_bits(), db.to_bits());
        assert_eq!(ga.to_bits(), gb.to_bits());
        assert!(a.g_params.trainable_bits_eq(&b.g_params));
        assert!(a.d_params.trainable_bits_eq(&b.d_params));
        // and losses actually moved the parameters
        assert!(!a.g_params.trainable_bits_eq(&model0.g_params));
    }

    #[test]
    fn wrong_batch_size_is_rejected() {
        let real = age_table(100);
        let cfg = GanConfig::preset_defaults(Preset::Gan1d, 10, 7);
        let mut model = GanModel::new(cfg, &real).unwrap();
        let data = model.transform.encode(&real).unwrap();
        let small = data.slice_rows(0, 5);
        assert!(train_step(&mut model, &small, 1).is_err());
    }

    #[test]
    fn preset_schema_mismatches_are_rejected() {
        let eth = age_by_ethnicity_table(100);
        let cfg = GanConfig::preset_defaults(Preset::Gan1d, 10, 0);
        // gan1d on a schema with a condition column
        assert!(GanModel::new(cfg, &eth).is_err());

        let age = age_table(100);
        let cfg = GanConfig::preset_defaults(Preset::Cgan2d, 10, 0);
        // cgan2d without a condition column
        assert!(GanModel::new(cfg, &age).is_err());

        // discgan with two continuous modeled columns
        let schema = Schema::new(vec![
            ColumnSpec {
                name: "a".into(),
                kind: ColumnKind::Continuous,
                role: ColumnRole::Feature,
            },
            ColumnSpec {
                name: "b".into(),
                kind: ColumnKind::Continuous,
                role: ColumnRole::Feature,
            },
        ])
        .unwrap();
        let table = RawTable::new(
            schema,
            vec![
                crate::data::ColumnData::Continuous(vec![1.0, 2.0, 3.0]),
                crate::data::ColumnData::Continuous(vec![4.0, 5.0, 6.0]),
            ],
        )
        .unwrap();
        let cfg = GanConfig::preset_defaults(Preset::Discgan, 10, 0);
        let err = GanModel::new(cfg, &table).unwrap_err();
        assert!(err.to_string().contains("at most one continuous"));
    }

    #[test]
    fn generation_respects_encoding_invariants() {
        let real = age_by_ethnicity_table(400);
        let cfg = GanConfig::preset_defaults(Preset::Cgan2d, 10, 5);
        let model = GanModel::new(cfg, &real).unwrap();
        let layout = model.layout().clone();
        let rows = generate(&model, 5000, None, &mut rng::seeded(77)).unwrap();
        assert_eq!(rows.rows(), 5000);
        assert_eq!(rows.cols(), layout.total_width());
        for r in 0..rows.rows() {
            let row = rows.row(r);
            for span in &layout.spans {
                if span.continuous {
                    assert!((0.0..=1.0).contains(&row[span.lo]));
                } else {
                    let block = &row[span.lo..span.hi];
                    let sum: f64 = block.iter().sum();
                    assert_eq!(sum, 1.0);
                    assert!(block.iter().all(|&v| v == 0.0 || v == 1.0));
                }
            }
        }
        // decodes into a full table
        let decoded = model.transform.decode(&rows).unwrap();
        assert_eq!(decoded.n_rows(), 5000);
    }

    #[test]
    fn forced_condition_pins_every_row() {
        let real = age_by_ethnicity_table(300);
        let cfg = GanConfig::preset_defaults(Preset::Cgan2d, 10, 5);
        let model = GanModel::new(cfg, &real).unwrap();
        let info = model.condition.clone().unwrap();
        let target = &info.vocab[2];
        let rows = generate(&model, 200, Some(target), &mut rng::seeded(3)).unwrap();
        let span = model.layout().span(&info.name).unwrap().clone();
        for r in 0..rows.rows() {
            let block = &rows.row(r)[span.lo..span.hi];
            assert_eq!(block[2], 1.0);
            assert_eq!(block.iter().sum::<f64>(), 1.0);
        }
        // unknown category errors
        assert!(matches!(
            generate(&model, 5, Some("not-a-category"), &mut rng::seeded(3)),
            Err(Error::Vocabulary { .. })
        ));
    }

    #[test]
    fn unforced_condition_follows_real_marginal() {
        let real = age_by_ethnicity_table(2000);
        let cfg = GanConfig::preset_defaults(Preset::Cgan2d, 10, 5);
        let model = GanModel::new(cfg, &real).unwrap();
        let info = model.condition.clone().unwrap();
        let span = model.layout().span(&info.name).unwrap().clone();
        let n = 20_000;
        let rows = generate(&model, n, None, &mut rng::seeded(123)).unwrap();
        let mut counts = vec![0usize; info.width()];
        for r in 0..rows.rows() {
            let block = &rows.row(r)[span.lo..span.hi];
            let idx = block.iter().position(|&v| v == 1.0).unwrap();
            counts[idx] += 1;
        }
        for (i, &p) in info.marginal.iter().enumerate() {
            let observed = counts[i] as f64 / n as f64;
            let sd = (p * (1.0 - p) / n as f64).sqrt();
            assert!(
                (observed - p).abs() < 4.0 * sd + 1e-3,
                "category {i}: observed {observed} vs marginal {p}"
            );
        }
    }

    #[test]
    fn checkpoint_round_trips_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let real = age_by_ethnicity_table(250);
        let cfg = GanConfig::preset_defaults(Preset::Cgan2d, 10, 21);
        let mut model = GanModel::new(cfg, &real).unwrap();
        let data = model.transform.encode(&real).unwrap();
        let batch = data.slice_rows(0, 32);
        for step in 1..=3 {
            train_step(&mut model, &batch, step).unwrap();
        }
        let path = dir.path().join("model.json");
        save_checkpoint(&path, &model.checkpoint(3)).unwrap();
        let (loaded, step) = GanModel::from_checkpoint(load_checkpoint(&path).unwrap()).unwrap();
        assert_eq!(step, 3);
        assert!(loaded.g_params.trainable_bits_eq(&model.g_params));
        assert!(loaded.d_params.trainable_bits_eq(&model.d_params));
        assert_eq!(loaded.g_adam, model.g_adam);
        assert_eq!(loaded.transform, model.transform);
        // the restored model continues identically
        let mut resumed = loaded;
        let mut original = model;
        let (da, ga) = train_step(&mut resumed, &batch, 4).unwrap();
        let (db, gb) = train_step(&mut original, &batch, 4).unwrap();
        assert_eq!(da.to_bits(), db.to_bits());
        assert_eq!(ga.to_bits(), gb.to_bits());
    }

    #[test]
    fn discgan_moving_stats_advance_in_generator_phase() {
        let real = age_table(200);
        let mut cfg = GanConfig::preset_defaults(Preset::Discgan, 10, 4);
        cfg.disc_dropout = 0.0;
        let mut model = GanModel::new(cfg, &real).unwrap();
        let before = model.g_params.flatten_moving();
        let noise = draw_noise(&mut rng::seeded(8), 32, model.config.noise_dim);
        model.g_phase(None, &noise, &mut rng::seeded(9)).unwrap();
        let after = model.g_params.flatten_moving();
        assert_ne!(before, after);

        // ...but not during the discriminator phase (inference mode there)
        let data = model.transform.encode(&real).unwrap();
        let batch = data.slice_rows(0, 32);
        let noise2 = draw_noise(&mut rng::seeded(10), 32, model.config.noise_dim);
        model.d_phase(&batch, &noise2, &mut rng::seeded(11)).unwrap();
        assert_eq!(model.g_params.flatten_moving(), after);
    }
}
