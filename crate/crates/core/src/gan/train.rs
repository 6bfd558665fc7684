//! The step loop shared by local and multi-worker training: batch draws,
//! loss/interim-metric tracing, and timing capture.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::GanConfig;
use super::model::{generate, lane_rng, train_step, GanModel};
use super::{LANE_BATCH, LANE_EVAL};
use crate::data::{sample_batch, ColumnKind, RawTable};
use crate::eval::{cs_test, ks_test_value};
use crate::{Error, Matrix, Result};

/// One logged point of a training run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub step: u64,
    pub d_loss: f64,
    pub g_loss: f64,
    /// Interim distribution-similarity scores against the held real table;
    /// absent when no evaluation table was supplied or the schema has no
    /// column of the needed kind.
    pub ks: Option<f64>,
    pub cs: Option<f64>,
}

/// Full record of a run: logged entries plus per-step wall-clock seconds.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainTrace {
    pub entries: Vec<TraceEntry>,
    pub timings: Vec<(u64, f64)>,
}

fn push_f64(out: &mut String, v: f64) {
    // `{}` on f64 is the shortest representation that round-trips exactly.
    out.push_str(&format!("{v}"));
}

impl TrainTrace {
    /// Logged entries as CSV (`ks`/`cs` empty when absent).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,d_loss,g_loss,ks,cs\n");
        for e in &self.entries {
            out.push_str(&format!("{},", e.step));
            push_f64(&mut out, e.d_loss);
            out.push(',');
            push_f64(&mut out, e.g_loss);
            out.push(',');
            if let Some(ks) = e.ks {
                push_f64(&mut out, ks);
            }
            out.push(',');
            if let Some(cs) = e.cs {
                push_f64(&mut out, cs);
            }
            out.push('\n');
        }
        out
    }

    /// Per-step wall-clock seconds as CSV.
    pub fn timings_csv(&self) -> String {
        let mut out = String::from("step,seconds\n");
        for &(step, secs) in &self.timings {
            out.push_str(&format!("{step},"));
            push_f64(&mut out, secs);
            out.push('\n');
        }
        out
    }
}

/// Knobs for a training run that are not part of the model config.
#[derive(Default)]
pub struct TrainOptions<'a> {
    /// Real table to score interim samples against at each log point.
    pub eval_against: Option<&'a RawTable>,
    /// Rows generated per interim evaluation (0 means the 2000-row default).
    pub eval_rows: usize,
    /// Called at every log point with the entry and the current model, e.g.
    /// for progress output or checkpointing.
    #[allow(clippy::type_complexity)]
    pub on_log: Option<&'a mut dyn FnMut(&TraceEntry, &GanModel)>,
}

const DEFAULT_EVAL_ROWS: usize = 2000;

/// Where a step actually executes. The local engine runs the whole batch in
/// process; the multi-worker engine shards it across replicas.
pub trait StepEngine {
    fn run_step(&mut self, step: u64, batch: &Matrix) -> Result<(f64, f64)>;
    fn model(&self) -> &GanModel;
}

pub struct LocalEngine<'a> {
    pub model: &'a mut GanModel,
}

impl StepEngine for LocalEngine<'_> {
    fn run_step(&mut self, step: u64, batch: &Matrix) -> Result<(f64, f64)> {
        train_step(self.model, batch, step)
    }

    fn model(&self) -> &GanModel {
        self.model
    }
}

fn with_step_context(e: Error, step: u64) -> Error {
    match e {
        Error::Numeric(m) => Error::Numeric(format!("step {step}: {m}")),
        other => other,
    }
}

fn interim_scores(
    model: &GanModel,
    real: &RawTable,
    rows: usize,
    step: u64,
) -> Result<(Option<f64>, Option<f64>)> {
    let mut rng = lane_rng(model.config.seed, step, LANE_EVAL);
    let encoded = generate(model, rows, None, &mut rng)?;
    let decoded = model.transform.decode(&encoded)?;
    let has = |kind: ColumnKind| real.schema.columns.iter().any(|c| c.kind == kind);
    let ks = if has(ColumnKind::Continuous) {
        Some(ks_test_value(real, &decoded)?)
    } else {
        None
    };
    let cs = if has(ColumnKind::Discrete) {
        Some(cs_test(real, &decoded)?)
    } else {
        None
    };
    Ok((ks, cs))
}

/// Runs `config.steps` adversarial rounds through `engine`, drawing each
/// step's batch from `encoded` on the batch noise lane. Logs every
/// `eval_every` steps and at the final step.
pub fn run_training(
    engine: &mut dyn StepEngine,
    encoded: &Matrix,
    mut opts: TrainOptions<'_>,
) -> Result<TrainTrace> {
    let config: GanConfig = engine.model().config.clone();
    let layout = engine.model().layout().clone();
    let eval_rows = if opts.eval_rows == 0 {
        DEFAULT_EVAL_ROWS
    } else {
        opts.eval_rows
    };
    let mut trace = TrainTrace::default();
    for step in 1..=config.steps {
        let started = Instant::now();
        let mut batch_rng = lane_rng(config.seed, step, LANE_BATCH);
        let batch = sample_batch(
            encoded,
            &layout,
            config.batch_size,
            &mut batch_rng,
            config.balance_on.as_deref(),
        )?;
        let (d_loss, g_loss) = engine
            .run_step(step, &batch)
            .map_err(|e| with_step_context(e, step))?;
        trace.timings.push((step, started.elapsed().as_secs_f64()));

        let at_cadence = config.eval_every > 0 && step % config.eval_every == 0;
        if at_cadence || step == config.steps {
            let (ks, cs) = match opts.eval_against {
                Some(real) => interim_scores(engine.model(), real, eval_rows, step)?,
                None => (None, None),
            };
            let entry = TraceEntry {
                step,
                d_loss,
                g_loss,
                ks,
                cs,
            };
            if let Some(cb) = opts.on_log.as_mut() {
                cb(&entry, engine.model());
            }
            trace.entries.push(entry);
        }
    }
    Ok(trace)
}

/// Builds a model for `config`, trains it on `real`, and returns it with the
/// run's trace. Routes to the multi-worker path when the config asks for one.
pub fn train(
    config: GanConfig,
    real: &RawTable,
    opts: TrainOptions<'_>,
) -> Result<(GanModel, TrainTrace)> {
    let mut model = GanModel::new(config, real)?;
    let encoded = model.transform.encode(real)?;
    if model.config.is_distributed() {
        crate::dist::run_distributed_training(model, &encoded, opts)
    } else {
        let trace = run_training(&mut LocalEngine { model: &mut model }, &encoded, opts)?;
        Ok((model, trace))
    }
}
