//! Statistical comparison of generated tables against real ones: two-sample
//! distribution tests per column, classifier-based utility scoring, and the
//! ratio metrics that condense both into "how close to real-data quality".

mod chi2;
mod efficacy;
mod ks;
mod mlp;
mod report;
mod tree;

pub use chi2::{chi2_pvalue, cs_per_column, cs_test, cs_test_with_mode, gamma_q, ln_gamma, CsMode};
pub use efficacy::{
    ml_efficacy, ml_efficacy_detailed, ClassStats, ClassifierKind, EfficacyResult, SplitSpec,
    TREE_MAX_DEPTH,
};
pub use ks::{ks_statistic, ks_test_value};
pub use mlp::{fit_mlp, predict_mlp, MlpModel};
pub use report::{
    cstc, full_report, full_report_with_mode, kstc, mlec, ColumnMetric, ConfigEcho, MetricsReport,
    MlePair, SplitScores,
};
pub use tree::{fit_decision_tree, predict_tree, TreeModel};
