//! The run-config file consumed by `tabgan train`.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use tabgan::data::{builtin, load_csv, make_standin_dataset, RawTable, Schema, StandinSpec};
use tabgan::gan::GanConfig;
use tabgan::{rng, Error, Result};

/// Everything a training run needs: where the data comes from (a CSV under a
/// schema, or a named stand-in draw), the model settings, where outputs go,
/// and which columns the optional post-training report should classify.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub schema: Option<PathBuf>,
    #[serde(default)]
    pub data: Option<PathBuf>,
    #[serde(default)]
    pub standin: Option<StandinSource>,
    pub gan: GanConfig,
    pub out: PathBuf,
    #[serde(default)]
    pub targets: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StandinSource {
    /// Built-in spec name or path to a spec JSON file.
    pub spec: String,
    pub rows: usize,
    #[serde(default)]
    pub seed: u64,
}

/// Reads user-supplied JSON; any failure (missing file, bad syntax, unknown
/// field) is an input error, exit code 2.
pub fn read_user_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T> {
    if !path.exists() {
        return Err(Error::Argument(format!(
            "{what} file `{}` does not exist",
            path.display()
        )));
    }
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Argument(format!("invalid {what} `{}`: {e}", path.display())))
}

pub fn load_schema(path: &Path) -> Result<Schema> {
    if !path.exists() {
        return Err(Error::Argument(format!(
            "schema file `{}` does not exist",
            path.display()
        )));
    }
    let text = std::fs::read_to_string(path)?;
    Schema::from_json(&text)
}

/// Resolves a spec argument: a built-in name first, else a JSON file path.
pub fn resolve_standin_spec(spec: &str) -> Result<StandinSpec> {
    if let Some(s) = builtin(spec) {
        return Ok(s);
    }
    let path = Path::new(spec);
    if path.exists() {
        return read_user_json(path, "stand-in spec");
    }
    Err(Error::Argument(format!(
        "`{spec}` is neither a built-in stand-in name nor an existing spec file"
    )))
}

impl RunConfig {
    pub fn load_table(&self) -> Result<RawTable> {
        match (&self.standin, &self.data, &self.schema) {
            (Some(source), None, None) => {
                let spec = resolve_standin_spec(&source.spec)?;
                make_standin_dataset(&spec, source.rows, &mut rng::seeded(source.seed))
            }
            (None, Some(data), Some(schema)) => {
                if !data.exists() {
                    return Err(Error::Argument(format!(
                        "data file `{}` does not exist",
                        data.display()
                    )));
                }
                let schema = load_schema(schema)?;
                load_csv(data, &schema)
            }
            (None, Some(_), None) => Err(Error::Argument(
                "`data` needs a `schema` alongside it".into(),
            )),
            (None, None, Some(_)) => Err(Error::Argument(
                "`schema` needs a `data` file alongside it".into(),
            )),
            (Some(_), _, _) => Err(Error::Argument(
                "give either `standin` or `data`+`schema`, not both".into(),
            )),
            (None, None, None) => Err(Error::Argument(
                "no data source: give `standin` or `data`+`schema`".into(),
            )),
        }
    }

    /// Every report target must be a discrete schema column.
    pub fn check_targets(&self, schema: &Schema) -> Result<()> {
        let bad: Vec<&str> = self
            .targets
            .iter()
            .filter(|t| {
                schema
                    .column(t)
                    .is_none_or(|(_, c)| c.kind != tabgan::data::ColumnKind::Discrete)
            })
            .map(String::as_str)
            .collect();
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Argument(format!(
                "targets must be discrete schema columns; offenders: {}",
                bad.join(", ")
            )))
        }
    }
}
