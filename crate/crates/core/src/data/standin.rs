//! Configurable stand-in dataset generation.
//!
//! Real ICU records are access-restricted, so experiments and tests run
//! against synthetic tables drawn from a declared spec: Gaussian mixtures
//! for continuous columns (optionally switched per category of a discrete
//! column) and weighted categories for discrete columns. The built-in specs
//! mirror the published summary statistics of an ICU unit-stay table.

use std::collections::BTreeMap;

use rand::Rng as _;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::schema::{ColumnKind, ColumnRole, ColumnSpec, Schema};
use super::table::{ColumnData, RawTable};
use crate::{Error, Result, SeededRng};

fn default_role() -> ColumnRole {
    ColumnRole::Feature
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussComponent {
    pub mean: f64,
    pub sd: f64,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub value: String,
    pub weight: f64,
}

/// Per-category mixture override: rows whose `column` value has an entry in
/// `mixtures` draw from that mixture instead of the column default.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ByCategory {
    pub column: String,
    pub mixtures: BTreeMap<String, Vec<GaussComponent>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StandinColumn {
    Continuous {
        name: String,
        #[serde(default = "default_role")]
        role: ColumnRole,
        components: Vec<GaussComponent>,
        #[serde(default)]
        by: Option<ByCategory>,
        /// [lo, hi] censoring bounds applied after sampling.
        #[serde(default)]
        clamp: Option<[f64; 2]>,
        /// Round to the nearest integer (after clamping).
        #[serde(default)]
        round: bool,
    },
    Discrete {
        name: String,
        #[serde(default = "default_role")]
        role: ColumnRole,
        levels: Vec<Level>,
    },
}

impl StandinColumn {
    pub fn name(&self) -> &str {
        match self {
            StandinColumn::Continuous { name, .. } => name,
            StandinColumn::Discrete { name, .. } => name,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StandinSpec {
    pub columns: Vec<StandinColumn>,
}

const WEIGHT_TOL: f64 = 1e-9;

fn check_mixture(name: &str, components: &[GaussComponent]) -> Result<()> {
    if components.is_empty() {
        return Err(Error::Argument(format!("column `{name}` has an empty mixture")));
    }
    let mut sum = 0.0;
    for c in components {
        if !(c.sd > 0.0) || !c.mean.is_finite() {
            return Err(Error::Argument(format!(
                "column `{name}`: mixture component needs finite mean and positive sd"
            )));
        }
        if !(c.weight >= 0.0) {
            return Err(Error::Argument(format!(
                "column `{name}`: negative mixture weight"
            )));
        }
        sum += c.weight;
    }
    if (sum - 1.0).abs() > WEIGHT_TOL {
        return Err(Error::Argument(format!(
            "column `{name}`: mixture weights sum to {sum}, expected 1"
        )));
    }
    Ok(())
}

impl StandinSpec {
    pub fn validate(&self) -> Result<()> {
        self.schema()?;
        for col in &self.columns {
            match col {
                StandinColumn::Continuous {
                    name,
                    components,
                    by,
                    clamp,
                    ..
                } => {
                    check_mixture(name, components)?;
                    if let Some([lo, hi]) = clamp {
                        if !(lo < hi) {
                            return Err(Error::Argument(format!(
                                "column `{name}`: clamp bounds [{lo}, {hi}] are not increasing"
                            )));
                        }
                    }
                    if let Some(by) = by {
                        let refers = self.columns.iter().find(|c| c.name() == by.column);
                        match refers {
                            Some(StandinColumn::Discrete { .. }) => {}
                            _ => {
                                return Err(Error::Argument(format!(
                                    "column `{name}` conditions on `{}`, which is not a discrete spec column",
                                    by.column
                                )))
                            }
                        }
                        for (cat, mixture) in &by.mixtures {
                            check_mixture(&format!("{name}[{cat}]"), mixture)?;
                        }
                    }
                }
                StandinColumn::Discrete { name, levels, .. } => {
                    if levels.is_empty() {
                        return Err(Error::Argument(format!("column `{name}` has no levels")));
                    }
                    let mut sum = 0.0;
                    for l in levels {
                        if !(l.weight >= 0.0) {
                            return Err(Error::Argument(format!(
                                "column `{name}`: negative level weight"
                            )));
                        }
                        sum += l.weight;
                    }
                    if (sum - 1.0).abs() > WEIGHT_TOL {
                        return Err(Error::Argument(format!(
                            "column `{name}`: level weights sum to {sum}, expected 1"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// The table schema this spec generates.
    pub fn schema(&self) -> Result<Schema> {
        Schema::new(
            self.columns
                .iter()
                .map(|c| match c {
                    StandinColumn::Continuous { name, role, .. } => ColumnSpec {
                        name: name.clone(),
                        kind: ColumnKind::Continuous,
                        role: *role,
                    },
                    StandinColumn::Discrete { name, role, .. } => ColumnSpec {
                        name: name.clone(),
                        kind: ColumnKind::Discrete,
                        role: *role,
                    },
                })
                .collect(),
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: StandinSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }
}

fn draw_mixture(components: &[GaussComponent], rng: &mut SeededRng) -> f64 {
    let mut u: f64 = rng.random();
    let mut pick = &components[components.len() - 1];
    for c in components {
        if u < c.weight {
            pick = c;
            break;
        }
        u -= c.weight;
    }
    let normal = Normal::new(pick.mean, pick.sd).expect("validated sd > 0");
    normal.sample(rng)
}

/// Draws `n` i.i.d. rows from the spec. Discrete columns are generated first
/// (in spec order) so per-category continuous mixtures can condition on them;
/// within each pass, column order follows the spec.
pub fn make_standin_dataset(spec: &StandinSpec, n: usize, rng: &mut SeededRng) -> Result<RawTable> {
    if n == 0 {
        return Err(Error::Argument("cannot generate a zero-row dataset".into()));
    }
    spec.validate()?;
    let schema = spec.schema()?;
    let mut discrete: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    for col in &spec.columns {
        if let StandinColumn::Discrete { name, levels, .. } = col {
            let mut values = Vec::with_capacity(n);
            for _ in 0..n {
                let mut u: f64 = rng.random();
                let mut pick = &levels[levels.len() - 1];
                for l in levels {
                    if u < l.weight {
                        pick = l;
                        break;
                    }
                    u -= l.weight;
                }
                values.push(pick.value.clone());
            }
            discrete.insert(name, values);
        }
    }
    let mut columns = Vec::with_capacity(spec.columns.len());
    for col in &spec.columns {
        match col {
            StandinColumn::Discrete { name, .. } => {
                columns.push(ColumnData::Discrete(discrete[name.as_str()].clone()));
            }
            StandinColumn::Continuous {
                components,
                by,
                clamp,
                round,
                ..
            } => {
                let mut values = Vec::with_capacity(n);
                for row in 0..n {
                    let mixture = by
                        .as_ref()
                        .and_then(|b| b.mixtures.get(&discrete[b.column.as_str()][row]))
                        .map(Vec::as_slice)
                        .unwrap_or(components);
                    let mut v = draw_mixture(mixture, rng);
                    if let Some([lo, hi]) = clamp {
                        v = v.clamp(*lo, *hi);
                    }
                    if *round {
                        v = v.round();
                    }
                    values.push(v);
                }
                columns.push(ColumnData::Continuous(values));
            }
        }
    }
    RawTable::new(schema, columns)
}

fn single(mean: f64, sd: f64) -> Vec<GaussComponent> {
    vec![GaussComponent {
        mean,
        sd,
        weight: 1.0,
    }]
}

fn levels(pairs: &[(&str, f64)]) -> Vec<Level> {
    pairs
        .iter()
        .map(|(v, w)| Level {
            value: (*v).to_string(),
            weight: *w,
        })
        .collect()
}

fn indicator(name: &str, prevalence: f64, role: ColumnRole) -> StandinColumn {
    StandinColumn::Discrete {
        name: name.into(),
        role,
        levels: levels(&[("0", 1.0 - prevalence), ("1", prevalence)]),
    }
}

const AGE_MEAN: f64 = 63.3;
const AGE_SD: f64 = 17.72;

fn age_column(role: ColumnRole, by: Option<ByCategory>) -> StandinColumn {
    StandinColumn::Continuous {
        name: "age".into(),
        role,
        components: single(AGE_MEAN, AGE_SD),
        by,
        clamp: Some([15.0, 90.0]),
        round: true,
    }
}

const ETHNICITY_LEVELS: [(&str, f64); 6] = [
    ("African American", 0.0920),
    ("Asian", 0.0332),
    ("Caucasian", 0.8040),
    ("Hispanic", 0.0328),
    ("Native American", 0.0048),
    ("Other/Unknown", 0.0332),
];

/// Ages clamped to [15, 90] around the published mean 63.3 / sd 17.72.
pub fn icu_age() -> StandinSpec {
    StandinSpec {
        columns: vec![age_column(ColumnRole::Feature, None)],
    }
}

/// Age conditioned on ethnicity, with per-ethnicity means/sds taken from the
/// published per-class table and the remaining classes at the overall moments.
pub fn icu_age_by_ethnicity() -> StandinSpec {
    let mut mixtures = BTreeMap::new();
    mixtures.insert("African American".to_string(), single(56.2, 16.8));
    mixtures.insert("Caucasian".to_string(), single(64.4, 17.4));
    mixtures.insert("Native American".to_string(), single(50.5, 19.5));
    StandinSpec {
        columns: vec![
            StandinColumn::Discrete {
                name: "ethnicity".into(),
                role: ColumnRole::Condition,
                levels: levels(&ETHNICITY_LEVELS),
            },
            age_column(
                ColumnRole::Feature,
                Some(ByCategory {
                    column: "ethnicity".into(),
                    mixtures,
                }),
            ),
        ],
    }
}

/// Age conditioned on ICU unit type.
pub fn icu_age_by_unit() -> StandinSpec {
    let mut mixtures = BTreeMap::new();
    mixtures.insert("Cardiac ICU".to_string(), single(60.2, 17.1));
    mixtures.insert("CTICU".to_string(), single(61.7, 10.3));
    mixtures.insert("CSICU".to_string(), single(67.6, 9.3));
    StandinSpec {
        columns: vec![
            StandinColumn::Discrete {
                name: "unit".into(),
                role: ColumnRole::Condition,
                levels: levels(&[
                    ("CSICU", 0.0260),
                    ("CTICU", 0.0208),
                    ("Cardiac ICU", 0.0532),
                    ("MICU", 0.1500),
                    ("Med-Surg ICU", 0.6000),
                    ("Neuro ICU", 0.1500),
                ]),
            },
            age_column(
                ColumnRole::Feature,
                Some(ByCategory {
                    column: "unit".into(),
                    mixtures,
                }),
            ),
        ],
    }
}

/// The full mixed table: one continuous stay-duration column plus the
/// discrete history/demographic columns, with prevalences of the same order
/// as the source data.
pub fn icu_full() -> StandinSpec {
    StandinSpec {
        columns: vec![
            StandinColumn::Continuous {
                name: "hospitaldischargeoffset".into(),
                role: ColumnRole::Feature,
                components: vec![
                    GaussComponent {
                        mean: 2500.0,
                        sd: 1200.0,
                        weight: 0.6,
                    },
                    GaussComponent {
                        mean: 5500.0,
                        sd: 2500.0,
                        weight: 0.4,
                    },
                ],
                by: None,
                clamp: Some([1.0, 20_000.0]),
                round: true,
            },
            indicator("CHF", 0.13, ColumnRole::Target),
            indicator("COPD_moderate", 0.06, ColumnRole::Feature),
            indicator("COPD_nolimitations", 0.09, ColumnRole::Feature),
            indicator("COPD_severe", 0.05, ColumnRole::Target),
            indicator("NoHealthProblems", 0.17, ColumnRole::Feature),
            indicator("asthma", 0.07, ColumnRole::Feature),
            indicator("homeoxygen", 0.03, ColumnRole::Feature),
            indicator("hypertensionrequiringtreatment", 0.33, ColumnRole::Feature),
            indicator("restrictivepulmonarydisease", 0.025, ColumnRole::Feature),
            StandinColumn::Discrete {
                name: "past_history_count".into(),
                role: ColumnRole::Feature,
                levels: levels(&[
                    ("0", 0.17),
                    ("1", 0.22),
                    ("2", 0.19),
                    ("3", 0.14),
                    ("4", 0.10),
                    ("5", 0.08),
                    ("6", 0.06),
                    ("7+", 0.04),
                ]),
            },
            StandinColumn::Discrete {
                name: "ethnicity".into(),
                role: ColumnRole::Feature,
                levels: levels(&ETHNICITY_LEVELS),
            },
            StandinColumn::Discrete {
                name: "gender".into(),
                role: ColumnRole::Feature,
                levels: levels(&[("Female", 0.46), ("Male", 0.54)]),
            },
            StandinColumn::Discrete {
                name: "dischargestatus".into(),
                role: ColumnRole::Feature,
                levels: levels(&[("Alive", 0.92), ("Expired", 0.07), ("Other", 0.01)]),
            },
        ],
    }
}

/// Named built-in specs usable from the command line.
pub fn builtin(name: &str) -> Option<StandinSpec> {
    match name {
        "icu_full" => Some(icu_full()),
        "icu_age" => Some(icu_age()),
        "icu_age_by_ethnicity" => Some(icu_age_by_ethnicity()),
        "icu_age_by_unit" => Some(icu_age_by_unit()),
        _ => None,
    }
}
