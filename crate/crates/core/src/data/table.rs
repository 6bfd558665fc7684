//! Typed in-memory tables and CSV I/O.

use std::path::Path;

use crate::{Error, Result, SeededRng};
use rand::seq::SliceRandom;

use super::schema::{ColumnKind, Schema};

#[derive(Clone, Debug, PartialEq)]
pub enum ColumnData {
    Continuous(Vec<f64>),
    Discrete(Vec<String>),
}

impl ColumnData {
    pub fn len(&self) -> usize {
        match self {
            ColumnData::Continuous(v) => v.len(),
            ColumnData::Discrete(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_continuous(&self) -> Option<&[f64]> {
        match self {
            ColumnData::Continuous(v) => Some(v),
            ColumnData::Discrete(_) => None,
        }
    }

    pub fn as_discrete(&self) -> Option<&[String]> {
        match self {
            ColumnData::Discrete(v) => Some(v),
            ColumnData::Continuous(_) => None,
        }
    }
}

/// Column-major table whose columns align one-to-one with its schema.
#[derive(Clone, Debug, PartialEq)]
pub struct RawTable {
    pub schema: Schema,
    pub columns: Vec<ColumnData>,
}

impl RawTable {
    pub fn new(schema: Schema, columns: Vec<ColumnData>) -> Result<Self> {
        if columns.len() != schema.columns.len() {
            return Err(Error::Schema(format!(
                "table has {} columns but the schema declares {}",
                columns.len(),
                schema.columns.len()
            )));
        }
        let rows = columns.first().map_or(0, ColumnData::len);
        for (spec, data) in schema.columns.iter().zip(&columns) {
            if data.len() != rows {
                return Err(Error::Schema(format!(
                    "column `{}` has {} rows, expected {}",
                    spec.name,
                    data.len(),
                    rows
                )));
            }
            let kind_ok = match (spec.kind, data) {
                (ColumnKind::Continuous, ColumnData::Continuous(_)) => true,
                (ColumnKind::Discrete, ColumnData::Discrete(_)) => true,
                _ => false,
            };
            if !kind_ok {
                return Err(Error::Schema(format!(
                    "column `{}` does not match its declared kind",
                    spec.name
                )));
            }
        }
        Ok(Self { schema, columns })
    }

    pub fn n_rows(&self) -> usize {
        self.columns.first().map_or(0, ColumnData::len)
    }

    pub fn column(&self, name: &str) -> Option<&ColumnData> {
        let (i, _) = self.schema.column(name)?;
        Some(&self.columns[i])
    }

    /// Rows at `indices` (repetition allowed), preserving schema and order.
    pub fn subset(&self, indices: &[usize]) -> RawTable {
        let columns = self
            .columns
            .iter()
            .map(|c| match c {
                ColumnData::Continuous(v) => {
                    ColumnData::Continuous(indices.iter().map(|&i| v[i]).collect())
                }
                ColumnData::Discrete(v) => {
                    ColumnData::Discrete(indices.iter().map(|&i| v[i].clone()).collect())
                }
            })
            .collect();
        RawTable {
            schema: self.schema.clone(),
            columns,
        }
    }

    /// Seeded shuffle-and-cut into (train, test) partitions; both non-empty.
    pub fn split(&self, train_fraction: f64, rng: &mut SeededRng) -> Result<(RawTable, RawTable)> {
        if !(0.0..1.0).contains(&train_fraction) || train_fraction == 0.0 {
            return Err(Error::Argument(format!(
                "train fraction must lie in (0, 1), got {train_fraction}"
            )));
        }
        let n = self.n_rows();
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(rng);
        let cut = ((n as f64) * train_fraction).round() as usize;
        let cut = cut.clamp(1, n.saturating_sub(1).max(1));
        if n < 2 {
            return Err(Error::Argument(
                "need at least two rows to split into train and test".into(),
            ));
        }
        Ok((self.subset(&idx[..cut]), self.subset(&idx[cut..])))
    }
}

/// Loads a CSV whose header must cover every schema column; extra CSV columns
/// are ignored. Continuous cells must parse as finite reals; empty cells are
/// rejected (no imputation).
pub fn load_csv(path: &Path, schema: &Schema) -> Result<RawTable> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    let headers = reader.headers()?.clone();
    let mut positions = Vec::with_capacity(schema.columns.len());
    for spec in &schema.columns {
        let pos = headers
            .iter()
            .position(|h| h == spec.name)
            .ok_or_else(|| Error::Schema(format!("CSV is missing schema column `{}`", spec.name)))?;
        positions.push(pos);
    }
    let mut columns: Vec<ColumnData> = schema
        .columns
        .iter()
        .map(|c| match c.kind {
            ColumnKind::Continuous => ColumnData::Continuous(Vec::new()),
            ColumnKind::Discrete => ColumnData::Discrete(Vec::new()),
        })
        .collect();
    for (row_idx, record) in reader.records().enumerate() {
        let record = record?;
        for ((spec, &pos), column) in schema.columns.iter().zip(&positions).zip(&mut columns) {
            let cell = record.get(pos).unwrap_or("").trim();
            if cell.is_empty() {
                return Err(Error::Parse {
                    row: row_idx + 1,
                    column: spec.name.clone(),
                    detail: "empty cell (missing values are not supported)".into(),
                });
            }
            match column {
                ColumnData::Continuous(v) => {
                    let parsed: f64 = cell.parse().map_err(|_| Error::Parse {
                        row: row_idx + 1,
                        column: spec.name.clone(),
                        detail: format!("`{cell}` is not a number"),
                    })?;
                    if !parsed.is_finite() {
                        return Err(Error::Parse {
                            row: row_idx + 1,
                            column: spec.name.clone(),
                            detail: format!("`{cell}` is not finite"),
                        });
                    }
                    v.push(parsed);
                }
                ColumnData::Discrete(v) => v.push(cell.to_string()),
            }
        }
    }
    if columns.first().map_or(0, ColumnData::len) == 0 {
        return Err(Error::Argument(format!(
            "{} contains a header but no data rows",
            path.display()
        )));
    }
    RawTable::new(schema.clone(), columns)
}

/// Writes the table as CSV in schema column order. Continuous values use the
/// shortest round-trip decimal form, so save/load is lossless.
pub fn write_csv(table: &RawTable, path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(table.schema.columns.iter().map(|c| c.name.as_str()))?;
    let mut row = Vec::with_capacity(table.columns.len());
    for r in 0..table.n_rows() {
        row.clear();
        for column in &table.columns {
            match column {
                ColumnData::Continuous(v) => row.push(v[r].to_string()),
                ColumnData::Discrete(v) => row.push(v[r].clone()),
            }
        }
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::schema::{ColumnRole, ColumnSpec};
    use crate::rng;

    fn age_gender_schema() -> Schema {
        Schema::new(vec![
            ColumnSpec {
                name: "age".into(),
                kind: ColumnKind::Continuous,
                role: ColumnRole::Feature,
            },
            ColumnSpec {
                name: "gender".into(),
                kind: ColumnKind::Discrete,
                role: ColumnRole::Feature,
            },
        ])
        .unwrap()
    }

    fn write_tmp(content: &str) -> tempfile::NamedTempFile {
        use std::io::Write;
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_csv_and_ignores_extra_columns() {
        let f = write_tmp("id,age,gender\n1,50,Male\n2,61.5,Female\n3,70,Male\n");
        let t = load_csv(f.path(), &age_gender_schema()).unwrap();
        assert_eq!(t.n_rows(), 3);
        assert_eq!(t.column("age").unwrap().as_continuous().unwrap()[1], 61.5);
        assert_eq!(t.column("gender").unwrap().as_discrete().unwrap()[2], "Male");
    }

    #[test]
    fn reports_bad_cells_with_row_and_column() {
        let f = write_tmp("age,gender\n50,Male\nabc,Female\n");
        let err = load_csv(f.path(), &age_gender_schema()).unwrap_err();
        match err {
            Error::Parse { row, column, .. } => {
                assert_eq!(row, 2);
                assert_eq!(column, "age");
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn missing_column_and_empty_file_are_errors() {
        let f = write_tmp("age\n50\n");
        assert!(matches!(
            load_csv(f.path(), &age_gender_schema()),
            Err(Error::Schema(_))
        ));
        let f = write_tmp("age,gender\n");
        assert!(matches!(
            load_csv(f.path(), &age_gender_schema()),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn csv_roundtrip_preserves_values() {
        let schema = age_gender_schema();
        let t = RawTable::new(
            schema.clone(),
            vec![
                ColumnData::Continuous(vec![15.0, 52.5, 89.99999999]),
                ColumnData::Discrete(vec!["Male".into(), "Female".into(), "Male".into()]),
            ],
        )
        .unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        write_csv(&t, f.path()).unwrap();
        let back = load_csv(f.path(), &schema).unwrap();
        assert_eq!(t, back);
    }

    #[test]
    fn split_partitions_every_row_once() {
        let schema = age_gender_schema();
        let t = RawTable::new(
            schema,
            vec![
                ColumnData::Continuous((0..100).map(f64::from).collect()),
                ColumnData::Discrete((0..100).map(|i| format!("g{}", i % 2)).collect()),
            ],
        )
        .unwrap();
        let (train, test) = t.split(0.8, &mut rng::seeded(9)).unwrap();
        assert_eq!(train.n_rows(), 80);
        assert_eq!(test.n_rows(), 20);
        let mut seen: Vec<f64> = train
            .column("age")
            .unwrap()
            .as_continuous()
            .unwrap()
            .iter()
            .chain(test.column("age").unwrap().as_continuous().unwrap())
            .copied()
            .collect();
        seen.sort_by(f64::total_cmp);
        assert_eq!(seen, (0..100).map(f64::from).collect::<Vec<_>>());
        // same seed, same split
        let (train2, _) = t.split(0.8, &mut rng::seeded(9)).unwrap();
        assert_eq!(train, train2);
    }
}
