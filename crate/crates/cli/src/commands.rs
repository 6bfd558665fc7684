//! The four subcommand implementations. All file outputs go through a
//! write-to-temp-then-rename step so an interrupted run never leaves a
//! half-written artifact behind.

use std::path::{Path, PathBuf};

use tabgan::data::{load_csv, make_standin_dataset, write_csv, RawTable};
use tabgan::eval::{full_report_with_mode, CsMode, SplitSpec};
use tabgan::gan::{
    generate, save_checkpoint, train, Checkpoint, GanModel, TraceEntry, TrainOptions,
};
use tabgan::plot::column_comparison_svg;
use tabgan::{rng, Error, Result};

use crate::config::{load_schema, read_user_json, resolve_standin_spec, RunConfig};
use crate::Commands;

pub fn run(cmd: Commands) -> Result<()> {
    match cmd {
        Commands::Standin {
            spec,
            n,
            out,
            seed,
            schema_out,
        } => cmd_standin(&spec, n, &out, seed, schema_out.as_deref()),
        Commands::Train { config } => cmd_train(&config),
        Commands::Generate {
            checkpoint,
            n,
            condition,
            out,
            seed,
        } => cmd_generate(&checkpoint, n, condition.as_deref(), &out, seed),
        Commands::Evaluate {
            real,
            generated,
            schema,
            targets,
            out,
            train_fraction,
            split_seed,
            cs_mode,
        } => cmd_evaluate(
            &real,
            &generated,
            &schema,
            &targets,
            &out,
            train_fraction,
            split_seed,
            &cs_mode,
        ),
    }
}

fn write_text_atomic(path: &Path, text: &str) -> Result<()> {
    let tmp = tmp_sibling(path);
    std::fs::write(&tmp, text)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn write_csv_atomic(table: &RawTable, path: &Path) -> Result<()> {
    let tmp = tmp_sibling(path);
    write_csv(table, &tmp)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn tmp_sibling(path: &Path) -> PathBuf {
    let mut name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".to_string());
    name.push_str(".tmp");
    path.with_file_name(name)
}

fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    Ok(())
}

fn cmd_standin(
    spec: &str,
    n: usize,
    out: &Path,
    seed: u64,
    schema_out: Option<&Path>,
) -> Result<()> {
    let spec = resolve_standin_spec(spec)?;
    let table = make_standin_dataset(&spec, n, &mut rng::seeded(seed))?;
    ensure_parent(out)?;
    write_csv_atomic(&table, out)?;
    println!("wrote {} rows to {}", table.n_rows(), out.display());
    if let Some(schema_path) = schema_out {
        ensure_parent(schema_path)?;
        write_text_atomic(schema_path, &serde_json::to_string_pretty(&table.schema)?)?;
        println!("wrote schema to {}", schema_path.display());
    }
    Ok(())
}

fn format_entry(e: &TraceEntry, total: u64) -> String {
    let mut line = format!(
        "step {}/{total}  d_loss={:.4} g_loss={:.4}",
        e.step, e.d_loss, e.g_loss
    );
    if let Some(ks) = e.ks {
        line.push_str(&format!("  ks={ks:.4}"));
    }
    if let Some(cs) = e.cs {
        line.push_str(&format!("  cs={cs:.4}"));
    }
    line
}

fn cmd_train(config_path: &Path) -> Result<()> {
    let cfg: RunConfig = read_user_json(config_path, "run config")?;
    cfg.gan.validate()?;
    let real = cfg.load_table()?;
    cfg.check_targets(&real.schema)?;
    std::fs::create_dir_all(&cfg.out)?;

    let out = cfg.out.clone();
    let total = cfg.gan.steps;
    let ckpt_path = out.join("checkpoint.json");
    let mut on_log = |e: &TraceEntry, m: &GanModel| {
        println!("{}", format_entry(e, total));
        // Interim checkpoints are a convenience; the post-run save is the
        // one that must succeed.
        if let Err(err) = save_checkpoint(&ckpt_path, &m.checkpoint(e.step)) {
            eprintln!("warning: interim checkpoint failed: {err}");
        }
    };
    let opts = TrainOptions {
        eval_against: Some(&real),
        eval_rows: 0,
        on_log: Some(&mut on_log),
    };
    let started = std::time::Instant::now();
    let (model, trace) = train(cfg.gan.clone(), &real, opts)?;
    let elapsed = started.elapsed().as_secs_f64();

    save_checkpoint(&ckpt_path, &model.checkpoint(total))?;
    write_text_atomic(&out.join("trace.csv"), &trace.to_csv())?;
    write_text_atomic(&out.join("timing.csv"), &trace.timings_csv())?;
    println!(
        "trained {total} steps in {elapsed:.1}s; outputs in {}",
        out.display()
    );

    if !cfg.targets.is_empty() {
        let mut gen_rng = rng::seeded(cfg.gan.seed);
        let encoded = generate(&model, real.n_rows(), None, &mut gen_rng)?;
        let synthetic = model.transform.decode(&encoded)?;
        let report = full_report_with_mode(
            &real,
            &synthetic,
            &cfg.targets,
            SplitSpec::default(),
            CsMode::default(),
        )?;
        write_text_atomic(&out.join("report.json"), &serde_json::to_string_pretty(&report)?)?;
        println!(
            "report: ks_test={} cs_test={} -> {}",
            report.ks_test.map_or("n/a".into(), |v| format!("{v:.4}")),
            report.cs_test.map_or("n/a".into(), |v| format!("{v:.4}")),
            out.join("report.json").display()
        );
    }
    Ok(())
}

fn cmd_generate(
    checkpoint: &Path,
    n: usize,
    condition: Option<&str>,
    out: &Path,
    seed: u64,
) -> Result<()> {
    let cp: Checkpoint = read_user_json(checkpoint, "checkpoint")?;
    let (model, _) = GanModel::from_checkpoint(cp)?;
    let encoded = generate(&model, n, condition, &mut rng::seeded(seed))?;
    let table = model.transform.decode(&encoded)?;
    ensure_parent(out)?;
    write_csv_atomic(&table, out)?;
    println!("wrote {} rows to {}", table.n_rows(), out.display());
    Ok(())
}

fn parse_cs_mode(s: &str) -> Result<CsMode> {
    match s {
        "proportions" => Ok(CsMode::Proportions),
        "scaled-counts" | "scaled_counts" => Ok(CsMode::ScaledCounts),
        other => Err(Error::Argument(format!(
            "unknown cs-mode `{other}` (expected `proportions` or `scaled-counts`)"
        ))),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_evaluate(
    real_path: &Path,
    gen_path: &Path,
    schema_path: &Path,
    targets: &[String],
    out: &Path,
    train_fraction: f64,
    split_seed: u64,
    cs_mode: &str,
) -> Result<()> {
    let mode = parse_cs_mode(cs_mode)?;
    let schema = load_schema(schema_path)?;
    for (what, path) in [("real", real_path), ("generated", gen_path)] {
        if !path.exists() {
            return Err(Error::Argument(format!(
                "{what} table `{}` does not exist",
                path.display()
            )));
        }
    }
    let real = load_csv(real_path, &schema)?;
    let generated = load_csv(gen_path, &schema)?;
    let split = SplitSpec {
        train_fraction,
        seed: split_seed,
    };
    let report = full_report_with_mode(&real, &generated, targets, split, mode)?;
    std::fs::create_dir_all(out)?;
    write_text_atomic(&out.join("report.json"), &serde_json::to_string_pretty(&report)?)?;
    for col in &schema.columns {
        let svg = column_comparison_svg(&real, &generated, &col.name)?;
        write_text_atomic(&out.join(format!("plot_{}.svg", col.name)), &svg)?;
    }
    println!(
        "report: ks_test={} cs_test={} -> {}",
        report.ks_test.map_or("n/a".into(), |v| format!("{v:.4}")),
        report.cs_test.map_or("n/a".into(), |v| format!("{v:.4}")),
        out.join("report.json").display()
    );
    Ok(())
}
