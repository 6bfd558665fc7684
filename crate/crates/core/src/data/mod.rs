//! Schemas, tables, transforms and sampling.

mod batch;
mod schema;
mod standin;
mod table;
mod transform;

pub use batch::{category_groups, sample_batch};
pub use schema::{ColumnKind, ColumnRole, ColumnSpec, Schema};
pub use standin::{
    builtin, icu_age, icu_age_by_ethnicity, icu_age_by_unit, icu_full, make_standin_dataset,
    ByCategory, GaussComponent, Level, StandinColumn, StandinSpec,
};
pub use table::{load_csv, write_csv, ColumnData, RawTable};
pub use transform::{ColumnTransform, ContinuousScaling, Layout, Span, TableTransform};
