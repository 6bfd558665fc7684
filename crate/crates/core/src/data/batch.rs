//! Minibatch sampling over encoded rows.

use rand::Rng as _;

use super::transform::Layout;
use crate::{Error, Matrix, Result, SeededRng};

/// Draws `batch_size` rows i.i.d. with replacement. With `balance_on` set to
/// a one-hot span, a category (among those actually present) is drawn
/// uniformly first and then a row uniformly within it, flattening skewed
/// marginals.
pub fn sample_batch(
    m: &Matrix,
    layout: &Layout,
    batch_size: usize,
    rng: &mut SeededRng,
    balance_on: Option<&str>,
) -> Result<Matrix> {
    if batch_size == 0 {
        return Err(Error::Argument("batch size must be at least 1".into()));
    }
    if m.rows() == 0 {
        return Err(Error::Argument("cannot sample from an empty matrix".into()));
    }
    let indices = match balance_on {
        None => (0..batch_size).map(|_| rng.random_range(0..m.rows())).collect::<Vec<_>>(),
        Some(name) => {
            let groups = category_groups(m, layout, name)?;
            (0..batch_size)
                .map(|_| {
                    let g = &groups[rng.random_range(0..groups.len())];
                    g[rng.random_range(0..g.len())]
                })
                .collect()
        }
    };
    Ok(m.gather_rows(&indices))
}

/// Row indices grouped by the argmax category of the named one-hot span;
/// only non-empty categories are returned, in category order.
pub fn category_groups(m: &Matrix, layout: &Layout, name: &str) -> Result<Vec<Vec<usize>>> {
    let span = layout
        .span(name)
        .ok_or_else(|| Error::Argument(format!("unknown column `{name}`")))?;
    if span.continuous {
        return Err(Error::Argument(format!(
            "cannot balance on continuous column `{name}`"
        )));
    }
    let k = span.hi - span.lo;
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); k];
    for r in 0..m.rows() {
        let block = &m.row(r)[span.lo..span.hi];
        let mut best = 0;
        for (i, &v) in block.iter().enumerate() {
            if v > block[best] {
                best = i;
            }
        }
        groups[best].push(r);
    }
    groups.retain(|g| !g.is_empty());
    Ok(groups)
}
