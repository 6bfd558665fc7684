//! Two-sample Kolmogorov–Smirnov statistic.

use crate::data::{ColumnKind, RawTable};
use crate::{Error, Result};

/// Exact sup-distance between the two empirical CDFs, computed by a single
/// sweep over the merged sorted samples (ties advance both counters before
/// the gap is evaluated). Symmetric in its arguments.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Argument("KS statistic needs two non-empty samples".into()));
    }
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_by(f64::total_cmp);
    sb.sort_by(f64::total_cmp);
    let (n, m) = (sa.len() as f64, sb.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < sa.len() || j < sb.len() {
        let cur = match (sa.get(i), sb.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        while i < sa.len() && sa[i] == cur {
            i += 1;
        }
        while j < sb.len() && sb[j] == cur {
            j += 1;
        }
        let gap = (i as f64 / n - j as f64 / m).abs();
        if gap > d {
            d = gap;
        }
    }
    Ok(d)
}

/// Mean over continuous columns of `1 - D`; 1 means the empirical
/// distributions match exactly.
pub fn ks_test_value(real: &RawTable, gen: &RawTable) -> Result<f64> {
    if real.schema != gen.schema {
        return Err(Error::State("tables have different schemas".into()));
    }
    let mut sum = 0.0;
    let mut count = 0;
    for (i, spec) in real.schema.columns.iter().enumerate() {
        if spec.kind != ColumnKind::Continuous {
            continue;
        }
        let a = real.columns[i].as_continuous().expect("kind checked");
        let b = gen.columns[i].as_continuous().expect("kind checked");
        sum += 1.0 - ks_statistic(a, b)?;
        count += 1;
    }
    if count == 0 {
        return Err(Error::Argument(
            "KS test value needs at least one continuous column".into(),
        ));
    }
    Ok(sum / count as f64)
}
