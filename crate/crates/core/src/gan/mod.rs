//! Conditional tabular GAN presets: model construction, adversarial
//! training, and synthetic-row sampling.

mod config;
mod model;
mod presets;
mod train;

pub use config::{GanConfig, Preset};
pub use model::{
    draw_noise, feature_segments, generate, load_checkpoint, save_checkpoint, train_step,
    Checkpoint, CondInfo, GanModel, CHECKPOINT_VERSION,
};
pub(crate) use model::{
    lane_rng, worker_rng, LANE_BATCH, LANE_D_DROPOUT, LANE_D_NOISE, LANE_EVAL, LANE_G_DROPOUT,
    LANE_G_NOISE,
};
pub use train::{
    run_training, train, LocalEngine, StepEngine, TraceEntry, TrainOptions, TrainTrace,
};
