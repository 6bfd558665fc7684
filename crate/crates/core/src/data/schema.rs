//! Column schemas: names, kinds and roles.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Continuous,
    Discrete,
}

/// How a column participates in modeling. `Feature` and `Target` columns are
/// both generated; `Target` additionally marks the column as a default label
/// for efficacy evaluation. The `Condition` column (at most one, discrete) is
/// fed to conditional models as side input instead of being generated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnRole {
    Feature,
    Condition,
    Target,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub name: String,
    pub kind: ColumnKind,
    pub role: ColumnRole,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schema {
    pub columns: Vec<ColumnSpec>,
}

impl Schema {
    pub fn new(columns: Vec<ColumnSpec>) -> Result<Self> {
        let s = Self { columns };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.columns.is_empty() {
            return Err(Error::Schema("schema has no columns".into()));
        }
        for (i, a) in self.columns.iter().enumerate() {
            if a.name.is_empty() {
                return Err(Error::Schema(format!("column {i} has an empty name")));
            }
            if self.columns[..i].iter().any(|b| b.name == a.name) {
                return Err(Error::Schema(format!("duplicate column name `{}`", a.name)));
            }
        }
        if !self
            .columns
            .iter()
            .any(|c| matches!(c.role, ColumnRole::Feature | ColumnRole::Target))
        {
            return Err(Error::Schema("schema needs at least one modeled column".into()));
        }
        let conditions: Vec<_> = self
            .columns
            .iter()
            .filter(|c| c.role == ColumnRole::Condition)
            .collect();
        if conditions.len() > 1 {
            return Err(Error::Schema(format!(
                "at most one condition column is supported, found {}",
                conditions.len()
            )));
        }
        if let Some(c) = conditions.first() {
            if c.kind != ColumnKind::Discrete {
                return Err(Error::Schema(format!(
                    "condition column `{}` must be discrete",
                    c.name
                )));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: Schema = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    pub fn column(&self, name: &str) -> Option<(usize, &ColumnSpec)> {
        self.columns
            .iter()
            .enumerate()
            .find(|(_, c)| c.name == name)
    }

    /// Columns the generator must produce, in schema order.
    pub fn modeled(&self) -> impl Iterator<Item = (usize, &ColumnSpec)> {
        self.columns
            .iter()
            .enumerate()
            .filter(|(_, c)| matches!(c.role, ColumnRole::Feature | ColumnRole::Target))
    }

    pub fn condition(&self) -> Option<(usize, &ColumnSpec)> {
        self.columns
            .iter()
            .enumerate()
            .find(|(_, c)| c.role == ColumnRole::Condition)
    }

    pub fn continuous_modeled_count(&self) -> usize {
        self.modeled()
            .filter(|(_, c)| c.kind == ColumnKind::Continuous)
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(name: &str, kind: ColumnKind, role: ColumnRole) -> ColumnSpec {
        ColumnSpec {
            name: name.into(),
            kind,
            role,
        }
    }

    #[test]
    fn parses_the_documented_json_shape() {
        let s = Schema::from_json(
            r#"{"columns":[
                {"name":"age","kind":"continuous","role":"feature"},
                {"name":"ethnicity","kind":"discrete","role":"condition"}
            ]}"#,
        )
        .unwrap();
        assert_eq!(s.columns.len(), 2);
        assert_eq!(s.condition().unwrap().1.name, "ethnicity");
        assert_eq!(s.modeled().count(), 1);
    }

    #[test]
    fn rejects_duplicates_and_missing_features() {
        let err = Schema::new(vec![
            col("a", ColumnKind::Continuous, ColumnRole::Feature),
            col("a", ColumnKind::Discrete, ColumnRole::Feature),
        ])
        .unwrap_err();
        assert!(err.to_string().contains("duplicate"));

        let err = Schema::new(vec![col("c", ColumnKind::Discrete, ColumnRole::Condition)]).unwrap_err();
        assert!(err.to_string().contains("modeled"));
    }

    #[test]
    fn rejects_continuous_or_multiple_conditions() {
        let err = Schema::new(vec![
            col("age", ColumnKind::Continuous, ColumnRole::Feature),
            col("x", ColumnKind::Continuous, ColumnRole::Condition),
        ])
        .unwrap_err();
        assert!(err.to_string().contains("discrete"));

        let err = Schema::new(vec![
            col("age", ColumnKind::Continuous, ColumnRole::Feature),
            col("a", ColumnKind::Discrete, ColumnRole::Condition),
            col("b", ColumnKind::Discrete, ColumnRole::Condition),
        ])
        .unwrap_err();
        assert!(err.to_string().contains("one condition"));
    }
}
