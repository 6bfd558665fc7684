//! CART-style decision tree classifier.

use crate::{Error, Matrix, Result};

#[derive(Clone, Debug)]
enum Node {
    Leaf {
        label: usize,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Clone, Debug)]
pub struct TreeModel {
    nodes: Vec<Node>,
    pub n_classes: usize,
}

fn gini(counts: &[usize], total: usize) -> f64 {
    let t = total as f64;
    1.0 - counts
        .iter()
        .map(|&c| {
            let p = c as f64 / t;
            p * p
        })
        .sum::<f64>()
}

fn majority(counts: &[usize]) -> usize {
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = i;
        }
    }
    best
}

/// Grows a binary tree by exhaustive threshold search: every midpoint of
/// adjacent distinct sorted values of every feature is scored by weighted
/// child Gini impurity; the first (lowest feature, then lowest threshold)
/// minimizer wins. Impure nodes keep splitting until purity, `max_depth`, or
/// fewer than 2 rows — zero-gain splits are allowed, which lets patterns
/// like XOR resolve at depth 2.
pub fn fit_decision_tree(
    x: &Matrix,
    y: &[usize],
    n_classes: usize,
    max_depth: usize,
) -> Result<TreeModel> {
    if x.rows() == 0 || y.is_empty() {
        return Err(Error::Argument("cannot fit a tree on an empty dataset".into()));
    }
    if x.rows() != y.len() {
        return Err(Error::Argument(format!(
            "{} rows but {} labels",
            x.rows(),
            y.len()
        )));
    }
    if n_classes == 0 || y.iter().any(|&l| l >= n_classes) {
        return Err(Error::Argument("labels out of range".into()));
    }
    let mut model = TreeModel {
        nodes: Vec::new(),
        n_classes,
    };
    let indices: Vec<usize> = (0..x.rows()).collect();
    build(&mut model, x, y, indices, max_depth);
    Ok(model)
}

fn build(model: &mut TreeModel, x: &Matrix, y: &[usize], indices: Vec<usize>, depth_left: usize) -> usize {
    let mut counts = vec![0usize; model.n_classes];
    for &i in &indices {
        counts[y[i]] += 1;
    }
    let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
    if pure || depth_left == 0 || indices.len() < 2 {
        let id = model.nodes.len();
        model.nodes.push(Node::Leaf {
            label: majority(&counts),
        });
        return id;
    }

    let mut best: Option<(f64, usize, f64)> = None; // (weighted impurity, feature, threshold)
    let n = indices.len();
    let mut values: Vec<f64> = Vec::with_capacity(n);
    for f in 0..x.cols() {
        values.clear();
        values.extend(indices.iter().map(|&i| x.get(i, f)));
        values.sort_by(f64::total_cmp);
        values.dedup();
        for pair in values.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let t = (a + b) / 2.0;
            if !(t > a) {
                // midpoint collapsed onto the lower value (adjacent floats)
                continue;
            }
            let mut left = vec![0usize; model.n_classes];
            let mut n_left = 0;
            for &i in &indices {
                if x.get(i, f) < t {
                    left[y[i]] += 1;
                    n_left += 1;
                }
            }
            let n_right = n - n_left;
            if n_left == 0 || n_right == 0 {
                continue;
            }
            let right: Vec<usize> = counts.iter().zip(&left).map(|(&c, &l)| c - l).collect();
            let weighted = (n_left as f64 * gini(&left, n_left)
                + n_right as f64 * gini(&right, n_right))
                / n as f64;
            if best.map_or(true, |(w, _, _)| weighted < w) {
                best = Some((weighted, f, t));
            }
        }
    }

    let Some((_, feature, threshold)) = best else {
        // all features constant on this node
        let id = model.nodes.len();
        model.nodes.push(Node::Leaf {
            label: majority(&counts),
        });
        return id;
    };

    let (left_idx, right_idx): (Vec<usize>, Vec<usize>) =
        indices.iter().partition(|&&i| x.get(i, feature) < threshold);
    let id = model.nodes.len();
    model.nodes.push(Node::Leaf { label: 0 }); // placeholder, patched below
    let left = build(model, x, y, left_idx, depth_left - 1);
    let right = build(model, x, y, right_idx, depth_left - 1);
    model.nodes[id] = Node::Split {
        feature,
        threshold,
        left,
        right,
    };
    id
}

pub fn predict_tree(model: &TreeModel, x: &Matrix) -> Vec<usize> {
    (0..x.rows())
        .map(|r| {
            let mut node = 0;
            loop {
                match &model.nodes[node] {
                    Node::Leaf { label } => return *label,
                    Node::Split {
                        feature,
                        threshold,
                        left,
                        right,
                    } => {
                        node = if x.get(r, *feature) < *threshold {
                            *left
                        } else {
                            *right
                        };
                    }
                }
            }
        })
        .collect()
}

impl TreeModel {
    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], id: usize) -> usize {
            match &nodes[id] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }
}
