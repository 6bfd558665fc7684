//! Ratio comparison metrics and the combined evaluation report.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::chi2::{cs_per_column, cs_test_with_mode, CsMode};
use super::efficacy::{ml_efficacy_detailed, ClassifierKind, EfficacyResult, SplitSpec, TREE_MAX_DEPTH};
use super::ks::{ks_statistic, ks_test_value};
use super::mlp;
use crate::data::{ColumnKind, RawTable};
use crate::{rng, Error, Result};

/// `1 − |1 − gen/real|`: equals 1 exactly when the two scores coincide,
/// and falls off linearly with the relative error in either direction.
fn ratio_comparison(generated: f64, real: f64, what: &str) -> Result<f64> {
    if real == 0.0 {
        return Err(Error::UndefinedMetric(format!(
            "{what} comparison is undefined when the real-data score is zero"
        )));
    }
    Ok(1.0 - (1.0 - generated / real).abs())
}

/// Compares a generated-data KS test value against the real-data baseline.
pub fn kstc(ks_generated: f64, ks_real: f64) -> Result<f64> {
    ratio_comparison(ks_generated, ks_real, "KS test")
}

/// Compares a generated-data CS test value against the real-data baseline.
pub fn cstc(cs_generated: f64, cs_real: f64) -> Result<f64> {
    ratio_comparison(cs_generated, cs_real, "CS test")
}

/// Compares classifier accuracy under generated training data against the
/// accuracy achieved with real training data.
pub fn mlec(mle_generated: f64, mle_real: f64) -> Result<f64> {
    ratio_comparison(mle_generated, mle_real, "ML efficacy")
}

/// Distribution scores for one column of the full generated-vs-real
/// comparison; the inapplicable side is `None`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColumnMetric {
    /// KS D statistic (continuous columns).
    pub ks_d: Option<f64>,
    /// 1 − D (continuous columns).
    pub ks_value: Option<f64>,
    /// Chi-squared p-value (discrete columns).
    pub cs_pvalue: Option<f64>,
}

/// Accuracy of one (target, classifier) pair when trained on generated data
/// versus trained on real data, both scored on the held-out real test rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MlePair {
    pub generated: EfficacyResult,
    pub real: EfficacyResult,
}

/// Scores computed on the train/test split geometry: the real-data baseline
/// (train half vs. test half) and the generated table's train-sized half vs.
/// the same real test half. These are the inputs to the ratio comparisons.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitScores {
    pub real_ks_test: Option<f64>,
    pub real_cs_test: Option<f64>,
    pub generated_ks_test: Option<f64>,
    pub generated_cs_test: Option<f64>,
}

/// Settings echoed into the report so a reader can reproduce it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub split: SplitSpec,
    pub targets: Vec<String>,
    pub cs_mode: CsMode,
    pub tree_max_depth: usize,
    pub mlp_hidden_width: usize,
    pub mlp_epochs: usize,
    pub n_real_rows: usize,
    pub n_generated_rows: usize,
    /// Library version that produced the report.
    pub tool_version: String,
}

/// The full evaluation battery for a generated table against the real one.
///
/// `ks_test` and `cs_test` compare the complete tables. The ratio metrics
/// (`kstc`, `cstc`, `mlec`) instead compare like against like on the split
/// geometry recorded in `baseline`, so that a generated table identical to
/// the real one scores exactly 1 on every comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    /// Mean over continuous columns of 1 − D; `null` if none exist.
    pub ks_test: Option<f64>,
    /// Mean chi-squared p-value over discrete columns; `null` if none exist.
    pub cs_test: Option<f64>,
    pub per_column: BTreeMap<String, ColumnMetric>,
    /// Keyed `"{target}:{classifier}"`.
    pub mle: BTreeMap<String, MlePair>,
    pub kstc: Option<f64>,
    pub cstc: Option<f64>,
    /// Keyed `"{target}:{classifier}"`.
    pub mlec: BTreeMap<String, f64>,
    pub baseline: SplitScores,
    pub config_echo: ConfigEcho,
}

pub fn full_report(
    real: &RawTable,
    gen: &RawTable,
    targets: &[String],
    split: SplitSpec,
) -> Result<MetricsReport> {
    full_report_with_mode(real, gen, targets, split, CsMode::default())
}

pub fn full_report_with_mode(
    real: &RawTable,
    gen: &RawTable,
    targets: &[String],
    split: SplitSpec,
    cs_mode: CsMode,
) -> Result<MetricsReport> {
    if real.schema != gen.schema {
        return Err(Error::Schema(
            "real and generated tables must share a schema".into(),
        ));
    }
    for t in targets {
        match real.schema.column(t) {
            None => {
                return Err(Error::Argument(format!(
                    "target column `{t}` is not in the schema"
                )))
            }
            Some((_, spec)) if spec.kind != ColumnKind::Discrete => {
                return Err(Error::Argument(format!(
                    "target column `{t}` must be discrete"
                )))
            }
            _ => {}
        }
    }

    let has_continuous = real
        .schema
        .columns
        .iter()
        .any(|c| c.kind == ColumnKind::Continuous);
    let has_discrete = real
        .schema
        .columns
        .iter()
        .any(|c| c.kind == ColumnKind::Discrete);

    // Whole-table comparison.
    let ks = if has_continuous {
        Some(ks_test_value(real, gen)?)
    } else {
        None
    };
    let cs = if has_discrete {
        Some(cs_test_with_mode(real, gen, cs_mode)?)
    } else {
        None
    };

    let mut per_column = BTreeMap::new();
    for (i, spec) in real.schema.columns.iter().enumerate() {
        if spec.kind == ColumnKind::Continuous {
            let a = real.columns[i].as_continuous().expect("kind checked");
            let b = gen.columns[i].as_continuous().expect("kind checked");
            let d = ks_statistic(a, b)?;
            per_column.insert(
                spec.name.clone(),
                ColumnMetric {
                    ks_d: Some(d),
                    ks_value: Some(1.0 - d),
                    cs_pvalue: None,
                },
            );
        }
    }
    if has_discrete {
        for (name, p) in cs_per_column(real, gen, cs_mode)? {
            per_column.insert(
                name,
                ColumnMetric {
                    ks_d: None,
                    ks_value: None,
                    cs_pvalue: Some(p),
                },
            );
        }
    }

    // Split geometry: the real table's train/test halves give the baseline;
    // the generated table contributes a train-sized half drawn with the same
    // split settings, scored against the same real test half.
    let (real_train, real_test) = real.split(split.train_fraction, &mut rng::seeded(split.seed))?;
    let (gen_train, _) = gen.split(split.train_fraction, &mut rng::seeded(split.seed))?;

    let (real_ks, gen_ks) = if has_continuous {
        (
            Some(ks_test_value(&real_test, &real_train)?),
            Some(ks_test_value(&real_test, &gen_train)?),
        )
    } else {
        (None, None)
    };
    let (real_cs, gen_cs) = if has_discrete {
        (
            Some(cs_test_with_mode(&real_test, &real_train, cs_mode)?),
            Some(cs_test_with_mode(&real_test, &gen_train, cs_mode)?),
        )
    } else {
        (None, None)
    };

    let kstc_value = match (gen_ks, real_ks) {
        (Some(g), Some(r)) => Some(kstc(g, r)?),
        _ => None,
    };
    let cstc_value = match (gen_cs, real_cs) {
        (Some(g), Some(r)) => Some(cstc(g, r)?),
        _ => None,
    };

    let mut mle = BTreeMap::new();
    let mut mlec_map = BTreeMap::new();
    for target in targets {
        for kind in [ClassifierKind::Tree, ClassifierKind::Mlp] {
            let key = format!("{target}:{}", kind.label());
            let real_result = ml_efficacy_detailed(&real_train, &real_test, target, kind)?;
            let gen_result = ml_efficacy_detailed(&gen_train, &real_test, target, kind)?;
            mlec_map.insert(key.clone(), mlec(gen_result.accuracy, real_result.accuracy)?);
            mle.insert(
                key,
                MlePair {
                    generated: gen_result,
                    real: real_result,
                },
            );
        }
    }

    Ok(MetricsReport {
        ks_test: ks,
        cs_test: cs,
        per_column,
        mle,
        kstc: kstc_value,
        cstc: cstc_value,
        mlec: mlec_map,
        baseline: SplitScores {
            real_ks_test: real_ks,
            real_cs_test: real_cs,
            generated_ks_test: gen_ks,
            generated_cs_test: gen_cs,
        },
        config_echo: ConfigEcho {
            split,
            targets: targets.to_vec(),
            cs_mode,
            tree_max_depth: TREE_MAX_DEPTH,
            mlp_hidden_width: mlp::HIDDEN_WIDTH,
            mlp_epochs: mlp::EPOCHS,
            n_real_rows: real.n_rows(),
            n_generated_rows: gen.n_rows(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{ColumnData, ColumnRole, ColumnSpec, Schema};
    use rand::Rng;

    fn mixed_table(n: usize, seed: u64) -> RawTable {
        let schema = Schema::new(vec![
            ColumnSpec {
                name: "age".into(),
                kind: ColumnKind::Continuous,
                role: ColumnRole::Feature,
            },
            ColumnSpec {
                name: "flag".into(),
                kind: ColumnKind::Discrete,
                role: ColumnRole::Target,
            },
            ColumnSpec {
                name: "group".into(),
                kind: ColumnKind::Discrete,
                role: ColumnRole::Feature,
            },
        ])
        .unwrap();
        let mut r = crate::rng::seeded(seed);
        let mut age = Vec::new();
        let mut flag = Vec::new();
        let mut group = Vec::new();
        for _ in 0..n {
            let high = r.random::<f64>() < 0.5;
            // target is predictable from age so classifiers beat chance
            age.push(if high {
                70.0 + 10.0 * r.random::<f64>()
            } else {
                30.0 + 10.0 * r.random::<f64>()
            });
            flag.push(if high { "yes".to_string() } else { "no".to_string() });
            group.push(if r.random::<f64>() < 0.3 { "a".to_string() } else { "b".to_string() });
        }
        RawTable::new(
            schema,
            vec![
                ColumnData::Continuous(age),
                ColumnData::Discrete(flag),
                ColumnData::Discrete(group),
            ],
        )
        .unwrap()
    }

    #[test]
    fn comparison_formula_fixed_points_and_symmetry() {
        assert_eq!(kstc(0.9, 0.9).unwrap(), 1.0);
        assert_eq!(cstc(-3.0, -3.0).unwrap(), 1.0);
        assert_eq!(mlec(0.5, 1.0).unwrap(), 0.5);
        assert_eq!(mlec(1.5, 1.0).unwrap(), 0.5);
        assert!(matches!(
            mlec(0.4, 0.0),
            Err(Error::UndefinedMetric(_))
        ));
    }

    #[test]
    fn published_pairing_is_reproduced() {
        let v = kstc(0.911, 0.988).unwrap();
        assert!((v - 0.922).abs() < 5e-4, "got {v}");
    }

    #[test]
    fn identical_tables_score_one_everywhere() {
        let t = mixed_table(120, 7);
        let report = full_report(&t, &t, &["flag".to_string()], SplitSpec::default()).unwrap();
        assert_eq!(report.ks_test, Some(1.0));
        assert_eq!(report.cs_test, Some(1.0));
        assert_eq!(report.kstc, Some(1.0));
        assert_eq!(report.cstc, Some(1.0));
        assert_eq!(report.mlec.len(), 2);
        for (k, v) in &report.mlec {
            assert_eq!(*v, 1.0, "{k}");
        }
        for pair in report.mle.values() {
            assert_eq!(pair.generated.accuracy, pair.real.accuracy);
        }
    }

    #[test]
    fn two_targets_yield_four_mlec_entries() {
        let mut t = mixed_table(80, 3);
        // promote "group" to a second target
        t.schema.columns[2].role = ColumnRole::Target;
        let targets = vec!["flag".to_string(), "group".to_string()];
        let report = full_report(&t, &t, &targets, SplitSpec::default()).unwrap();
        assert_eq!(report.mlec.len(), 4);
        assert_eq!(report.mle.len(), 4);
        let keys: Vec<&String> = report.mlec.keys().collect();
        assert!(keys.contains(&&"flag:tree".to_string()));
        assert!(keys.contains(&&"group:mlp".to_string()));
    }

    #[test]
    fn report_round_trips_through_json() {
        let t = mixed_table(60, 11);
        let u = mixed_table(60, 12);
        let report = full_report(&t, &u, &["flag".to_string()], SplitSpec::default()).unwrap();
        let text = serde_json::to_string_pretty(&report).unwrap();
        for field in [
            "ks_test",
            "cs_test",
            "per_column",
            "mle",
            "kstc",
            "cstc",
            "mlec",
            "baseline",
            "config_echo",
        ] {
            assert!(text.contains(&format!("\"{field}\"")), "missing {field}");
        }
        let back: MetricsReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn per_column_sides_match_column_kinds() {
        let t = mixed_table(50, 2);
        let u = mixed_table(50, 4);
        let report = full_report(&t, &u, &[], SplitSpec::default()).unwrap();
        let age = &report.per_column["age"];
        assert!(age.ks_d.is_some() && age.cs_pvalue.is_none());
        let flag = &report.per_column["flag"];
        assert!(flag.ks_d.is_none() && flag.cs_pvalue.is_some());
        assert!(report.mle.is_empty() && report.mlec.is_empty());
    }

    #[test]
    fn mismatched_schemas_are_rejected() {
        let t = mixed_table(30, 1);
        let mut u = mixed_table(30, 1);
        u.schema.columns[0].name = "years".into();
        u.schema.columns[0].role = ColumnRole::Feature;
        assert!(full_report(&t, &u, &[], SplitSpec::default()).is_err());
    }

    #[test]
    fn continuous_target_is_rejected() {
        let t = mixed_table(30, 1);
        assert!(full_report(&t, &t, &["age".to_string()], SplitSpec::default()).is_err());
    }
}
