//! Machine-learning utility scoring: train a classifier on one table,
//! measure accuracy on another.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::mlp::{fit_mlp, predict_mlp};
use super::tree::{fit_decision_tree, predict_tree};
use crate::data::{ColumnKind, ColumnRole, ColumnSpec, ContinuousScaling, RawTable, Schema, TableTransform};
use crate::{Error, Result};

pub const TREE_MAX_DEPTH: usize = 8;
/// Weight-initialization seed for the MLP classifier. A fixed constant so
/// that identical train/test inputs always reproduce the same accuracy.
const FIT_SEED: u64 = 2_625_393;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierKind {
    Tree,
    Mlp,
}

impl ClassifierKind {
    pub fn label(self) -> &'static str {
        match self {
            ClassifierKind::Tree => "tree",
            ClassifierKind::Mlp => "mlp",
        }
    }
}

/// How to partition a table into train and test portions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    #[serde(default = "default_train_fraction")]
    pub train_fraction: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_train_fraction() -> f64 {
    0.8
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train_fraction: 0.8,
            seed: 0,
        }
    }
}

/// Per-category confusion tallies on the test table.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassStats {
    /// Rows in the test table with this true category.
    pub test_count: usize,
    /// Rows the classifier assigned to this category.
    pub predicted_count: usize,
    /// Rows with this true category that were classified correctly.
    pub correct: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EfficacyResult {
    /// Plain accuracy: correctly classified test rows / test rows.
    pub accuracy: f64,
    /// Macro-averaged F1 over every category observed in test labels or
    /// predictions; a secondary view that weights rare categories equally.
    pub macro_f1: f64,
    pub n_test: usize,
    pub per_class: BTreeMap<String, ClassStats>,
}

/// Accuracy of a classifier fitted on `train` and scored on `test`, predicting
/// the discrete `target` column from every other column in the schema.
///
/// Feature encodings (min–max scaling, one-hot vocabularies) and the label
/// vocabulary are fitted on `train` only. Test rows with feature categories
/// unseen in training encode as an all-zero block; test rows whose target
/// category never occurred in training count as misclassifications. The
/// result is invariant to the row order of both tables: training rows are
/// brought into a canonical order before fitting, and accuracy is a count.
pub fn ml_efficacy(
    train: &RawTable,
    test: &RawTable,
    target: &str,
    kind: ClassifierKind,
) -> Result<f64> {
    Ok(ml_efficacy_detailed(train, test, target, kind)?.accuracy)
}

/// As [`ml_efficacy`], but also reports macro-F1 and per-category test counts
/// so that class-weighted summaries can be recomputed downstream.
pub fn ml_efficacy_detailed(
    train: &RawTable,
    test: &RawTable,
    target: &str,
    kind: ClassifierKind,
) -> Result<EfficacyResult> {
    if train.schema != test.schema {
        return Err(Error::Schema(
            "train and test tables must share a schema".into(),
        ));
    }
    if test.n_rows() == 0 {
        return Err(Error::Argument("test table has no rows".into()));
    }
    let Some((target_idx, target_spec)) = train.schema.column(target) else {
        return Err(Error::Argument(format!(
            "target column `{target}` is not in the schema"
        )));
    };
    if target_spec.kind != ColumnKind::Discrete {
        return Err(Error::Argument(format!(
            "target column `{target}` must be discrete"
        )));
    }

    // Every non-target column becomes a plain feature for the classifier.
    let feature_specs: Vec<ColumnSpec> = train
        .schema
        .columns
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != target_idx)
        .map(|(_, spec)| ColumnSpec {
            name: spec.name.clone(),
            kind: spec.kind,
            role: ColumnRole::Feature,
        })
        .collect();
    if feature_specs.is_empty() {
        return Err(Error::Argument(
            "need at least one feature column besides the target".into(),
        ));
    }
    let feature_schema = Schema::new(feature_specs)?;
    let strip_target = |t: &RawTable| -> Result<RawTable> {
        let columns = t
            .columns
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != target_idx)
            .map(|(_, c)| c.clone())
            .collect();
        RawTable::new(feature_schema.clone(), columns)
    };
    let train_features = strip_target(train)?;
    let test_features = strip_target(test)?;

    let transform = TableTransform::fit(&train_features, ContinuousScaling::MinMax)?;
    let x_train = transform.encode(&train_features)?;
    let x_test = transform.encode_lenient(&test_features)?;

    let train_labels_raw = train.columns[target_idx]
        .as_discrete()
        .expect("target kind checked above");
    let test_labels_raw = test.columns[target_idx]
        .as_discrete()
        .expect("target kind checked above");
    let mut vocab: Vec<String> = train_labels_raw.to_vec();
    vocab.sort();
    vocab.dedup();
    let n_classes = vocab.len();
    let label_of = |s: &String| -> usize {
        // categories unseen during training map past the last real class,
        // an id the classifier can never emit
        vocab.binary_search(s).unwrap_or(n_classes)
    };
    let y_train: Vec<usize> = train_labels_raw.iter().map(&label_of).collect();
    let y_test: Vec<usize> = test_labels_raw.iter().map(&label_of).collect();

    // Canonical training order (sort by encoded features, then label) so the
    // floating-point accumulation order inside the fit never depends on how
    // the caller happened to order the rows.
    let mut order: Vec<usize> = (0..x_train.rows()).collect();
    order.sort_by(|&a, &b| {
        let (ra, rb) = (x_train.row(a), x_train.row(b));
        for (va, vb) in ra.iter().zip(rb) {
            let c = va.total_cmp(vb);
            if c != std::cmp::Ordering::Equal {
                return c;
            }
        }
        y_train[a].cmp(&y_train[b])
    });
    let x_sorted = x_train.gather_rows(&order);
    let y_sorted: Vec<usize> = order.iter().map(|&i| y_train[i]).collect();

    let predictions = match kind {
        ClassifierKind::Tree => {
            let model = fit_decision_tree(&x_sorted, &y_sorted, n_classes, TREE_MAX_DEPTH)?;
            predict_tree(&model, &x_test)
        }
        ClassifierKind::Mlp => {
            let model = fit_mlp(&x_sorted, &y_sorted, n_classes, FIT_SEED)?;
            predict_mlp(&model, &x_test)?
        }
    };

    let mut per_class: BTreeMap<String, ClassStats> = BTreeMap::new();
    let mut n_correct = 0usize;
    for (row, (&truth, &pred)) in y_test.iter().zip(&predictions).enumerate() {
        let truth_name = &test_labels_raw[row];
        let entry = per_class.entry(truth_name.clone()).or_default();
        entry.test_count += 1;
        if truth == pred {
            entry.correct += 1;
            n_correct += 1;
        }
        per_class
            .entry(vocab[pred].clone())
            .or_default()
            .predicted_count += 1;
    }

    let mut f1_sum = 0.0;
    let mut f1_classes = 0usize;
    for stats in per_class.values() {
        let tp = stats.correct as f64;
        let precision_denom = stats.predicted_count as f64;
        let recall_denom = stats.test_count as f64;
        let precision = if precision_denom > 0.0 { tp / precision_denom } else { 0.0 };
        let recall = if recall_denom > 0.0 { tp / recall_denom } else { 0.0 };
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        f1_sum += f1;
        f1_classes += 1;
    }

    Ok(EfficacyResult {
        accuracy: n_correct as f64 / y_test.len() as f64,
        macro_f1: if f1_classes > 0 { f1_sum / f1_classes as f64 } else { 0.0 },
        n_test: y_test.len(),
        per_class,
    })
}
