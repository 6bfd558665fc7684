//! Fitted forward/inverse transforms between raw tables and the dense
//! matrices the networks consume.
//!
//! Encoding order is: every modeled column in schema order, then the
//! condition column's one-hot block last (when present), so models can treat
//! the leading `feature_width` channels as the generated part and the tail
//! as side input. Decoding maps spans back to schema columns by name, so the
//! resulting table is in schema order again.

use serde::{Deserialize, Serialize};

use super::schema::{ColumnKind, Schema};
use super::table::{ColumnData, RawTable};
use crate::{Error, Matrix, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContinuousScaling {
    /// Map observed [min, max] onto [0, 1]; required by sigmoid output heads.
    #[default]
    MinMax,
    /// Zero-mean unit-variance standardization, for experiments whose output
    /// head is not bounded.
    ZScore,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ColumnTransform {
    MinMax { lo: f64, hi: f64 },
    ZScore { mean: f64, sd: f64 },
    OneHot { vocab: Vec<String> },
}

/// One encoded span: matrix columns `lo..hi` belong to schema column `name`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Span {
    pub name: String,
    pub lo: usize,
    pub hi: usize,
    pub continuous: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Layout {
    /// Modeled columns in schema order, then the condition column (if any).
    pub spans: Vec<Span>,
    /// Total width of the modeled block (everything before the condition).
    pub feature_width: usize,
    /// Width of the condition block; 0 for unconditional schemas.
    pub cond_width: usize,
}

impl Layout {
    pub fn total_width(&self) -> usize {
        self.feature_width + self.cond_width
    }

    pub fn span(&self, name: &str) -> Option<&Span> {
        self.spans.iter().find(|s| s.name == name)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableTransform {
    pub schema: Schema,
    /// Aligned with `schema.columns`.
    columns: Vec<ColumnTransform>,
    layout: Layout,
}

fn sorted_copy(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

impl TableTransform {
    /// Fits per-column transforms from observed data: continuous ranges (or
    /// moments) and lexicographically sorted category vocabularies. The fit
    /// is row-order insensitive.
    pub fn fit(table: &RawTable, scaling: ContinuousScaling) -> Result<Self> {
        if table.n_rows() == 0 {
            return Err(Error::Argument("cannot fit transforms on an empty table".into()));
        }
        let mut columns = Vec::with_capacity(table.columns.len());
        for (spec, data) in table.schema.columns.iter().zip(&table.columns) {
            let t = match data {
                ColumnData::Continuous(values) => {
                    // Sorting first makes the reductions independent of row
                    // order down to the last bit.
                    let sorted = sorted_copy(values);
                    let lo = sorted[0];
                    let hi = sorted[sorted.len() - 1];
                    if hi - lo == 0.0 {
                        return Err(Error::DegenerateColumn(spec.name.clone()));
                    }
                    match scaling {
                        ContinuousScaling::MinMax => ColumnTransform::MinMax { lo, hi },
                        ContinuousScaling::ZScore => {
                            let n = sorted.len() as f64;
                            let mean = sorted.iter().sum::<f64>() / n;
                            let var = sorted.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
                            let sd = var.sqrt();
                            if sd == 0.0 {
                                return Err(Error::DegenerateColumn(spec.name.clone()));
                            }
                            ColumnTransform::ZScore { mean, sd }
                        }
                    }
                }
                ColumnData::Discrete(values) => {
                    let mut vocab: Vec<String> = values.to_vec();
                    vocab.sort();
                    vocab.dedup();
                    ColumnTransform::OneHot { vocab }
                }
            };
            columns.push(t);
        }
        let layout = Self::build_layout(&table.schema, &columns);
        Ok(Self {
            schema: table.schema.clone(),
            columns,
            layout,
        })
    }

    fn build_layout(schema: &Schema, columns: &[ColumnTransform]) -> Layout {
        let mut spans = Vec::new();
        let mut pos = 0;
        let width_of = |t: &ColumnTransform| match t {
            ColumnTransform::MinMax { .. } | ColumnTransform::ZScore { .. } => 1,
            ColumnTransform::OneHot { vocab } => vocab.len(),
        };
        for (i, spec) in schema.modeled() {
            let w = width_of(&columns[i]);
            spans.push(Span {
                name: spec.name.clone(),
                lo: pos,
                hi: pos + w,
                continuous: spec.kind == ColumnKind::Continuous,
            });
            pos += w;
        }
        let feature_width = pos;
        let mut cond_width = 0;
        if let Some((i, spec)) = schema.condition() {
            let w = width_of(&columns[i]);
            spans.push(Span {
                name: spec.name.clone(),
                lo: pos,
                hi: pos + w,
                continuous: false,
            });
            cond_width = w;
        }
        Layout {
            spans,
            feature_width,
            cond_width,
        }
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn column_transform(&self, name: &str) -> Option<&ColumnTransform> {
        let (i, _) = self.schema.column(name)?;
        Some(&self.columns[i])
    }

    pub fn vocab(&self, name: &str) -> Option<&[String]> {
        match self.column_transform(name)? {
            ColumnTransform::OneHot { vocab } => Some(vocab),
            _ => None,
        }
    }

    /// Strict encoding: every category must be in its vocabulary.
    pub fn encode(&self, table: &RawTable) -> Result<Matrix> {
        self.encode_inner(table, false)
    }

    /// Lenient encoding for held-out data: unseen categories become all-zero
    /// one-hot blocks instead of errors.
    pub fn encode_lenient(&self, table: &RawTable) -> Result<Matrix> {
        self.encode_inner(table, true)
    }

    fn encode_inner(&self, table: &RawTable, lenient: bool) -> Result<Matrix> {
        if table.schema != self.schema {
            return Err(Error::State(
                "table schema differs from the schema the transforms were fitted on".into(),
            ));
        }
        let rows = table.n_rows();
        let mut out = Matrix::zeros(rows, self.layout.total_width());
        for span in &self.layout.spans {
            let (i, _) = self.schema.column(&span.name).expect("span names a schema column");
            match (&self.columns[i], &table.columns[i]) {
                (ColumnTransform::MinMax { lo, hi }, ColumnData::Continuous(values)) => {
                    for (r, &v) in values.iter().enumerate() {
                        out.set(r, span.lo, ((v - lo) / (hi - lo)).clamp(0.0, 1.0));
                    }
                }
                (ColumnTransform::ZScore { mean, sd }, ColumnData::Continuous(values)) => {
                    for (r, &v) in values.iter().enumerate() {
                        out.set(r, span.lo, (v - mean) / sd);
                    }
                }
                (ColumnTransform::OneHot { vocab }, ColumnData::Discrete(values)) => {
                    for (r, v) in values.iter().enumerate() {
                        match vocab.binary_search(v) {
                            Ok(k) => out.set(r, span.lo + k, 1.0),
                            Err(_) if lenient => {}
                            Err(_) => {
                                return Err(Error::Vocabulary {
                                    value: v.clone(),
                                    column: span.name.clone(),
                                })
                            }
                        }
                    }
                }
                _ => unreachable!("transform kind matches schema kind by construction"),
            }
        }
        Ok(out)
    }

    /// Inverse transform. Continuous channels are clipped into [0, 1] before
    /// inverse min-max scaling; one-hot blocks decode by argmax with ties
    /// resolved to the lowest index.
    pub fn decode(&self, m: &Matrix) -> Result<RawTable> {
        if m.cols() != self.layout.total_width() {
            return Err(Error::State(format!(
                "matrix has {} channels but the layout describes {}",
                m.cols(),
                self.layout.total_width()
            )));
        }
        let rows = m.rows();
        let mut columns: Vec<ColumnData> = self
            .schema
            .columns
            .iter()
            .map(|c| match c.kind {
                ColumnKind::Continuous => ColumnData::Continuous(Vec::with_capacity(rows)),
                ColumnKind::Discrete => ColumnData::Discrete(Vec::with_capacity(rows)),
            })
            .collect();
        for span in &self.layout.spans {
            let (i, _) = self.schema.column(&span.name).expect("span names a schema column");
            match (&self.columns[i], &mut columns[i]) {
                (ColumnTransform::MinMax { lo, hi }, ColumnData::Continuous(values)) => {
                    for r in 0..rows {
                        let z = m.get(r, span.lo).clamp(0.0, 1.0);
                        values.push(lo + z * (hi - lo));
                    }
                }
                (ColumnTransform::ZScore { mean, sd }, ColumnData::Continuous(values)) => {
                    for r in 0..rows {
                        values.push(mean + m.get(r, span.lo) * sd);
                    }
                }
                (ColumnTransform::OneHot { vocab }, ColumnData::Discrete(values)) => {
                    for r in 0..rows {
                        let block = &m.row(r)[span.lo..span.hi];
                        let mut best = 0;
                        for (k, &v) in block.iter().enumerate() {
                            if v > block[best] {
                                best = k;
                            }
                        }
                        values.push(vocab[best].clone());
                    }
                }
                _ => unreachable!("transform kind matches schema kind by construction"),
            }
        }
        RawTable::new(self.schema.clone(), columns)
    }
}
