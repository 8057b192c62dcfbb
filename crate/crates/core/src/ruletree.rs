//! Threshold rules extracted from two sets of rows.
//!
//! Each node tests one feature against a threshold and sends the row to its
//! high side when `x_v > q`. Rows that the node gets wrong are refined
//! recursively with the remaining features, so the result reads as a short
//! nested if/else rule.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::dataset::Matrix;
use crate::error::{Error, Result};
use crate::neurocore::Classifier;

/// Best split of one feature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub q: f64,
    /// `true` when values above `q` are predicted as class 1.
    pub high_is_one: bool,
    pub errors: usize,
}

/// Scans the midpoints between consecutive distinct pooled values.
///
/// Ties go to the smaller threshold, then to the "high side is class 1"
/// polarity. When every value is equal there is no midpoint and the common
/// value itself is used.
pub fn search_threshold(values0: &[f64], values1: &[f64]) -> Result<Threshold> {
    if values0.is_empty() || values1.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut pooled: Vec<(f64, bool)> = values0
        .iter()
        .map(|&v| (v, false))
        .chain(values1.iter().map(|&v| (v, true)))
        .collect();
    if pooled.iter().any(|(v, _)| !v.is_finite()) {
        return Err(Error::NonFinite("threshold search"));
    }
    pooled.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = pooled.len();
    let n1 = values1.len();

    let pick = |q: f64, ones_low: usize, zeros_low: usize, best: &mut Option<Threshold>| {
        // high side = class 1: errors are class-0 rows above plus class-1 rows below
        let zeros_high = values0.len() - zeros_low;
        let high = zeros_high + ones_low;
        let low = n - high;
        let cand = if high <= low {
            Threshold { q, high_is_one: true, errors: high }
        } else {
            Threshold { q, high_is_one: false, errors: low }
        };
        if best.map_or(true, |b| cand.errors < b.errors) {
            *best = Some(cand);
        }
    };

    let mut best = None;
    let (mut ones_low, mut zeros_low) = (0, 0);
    for k in 0..n {
        if pooled[k].1 {
            ones_low += 1;
        } else {
            zeros_low += 1;
        }
        if k + 1 < n && pooled[k + 1].0 > pooled[k].0 {
            let q = 0.5 * (pooled[k].0 + pooled[k + 1].0);
            pick(q, ones_low, zeros_low, &mut best);
        }
    }
    if best.is_none() {
        pick(pooled[0].0, n1, values0.len(), &mut best);
    }
    Ok(best.expect("at least one candidate"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleNode {
    Leaf {
        class: usize,
    },
    Split {
        feature: usize,
        threshold: f64,
        high_is_one: bool,
        low: Box<RuleNode>,
        high: Box<RuleNode>,
    },
}

impl RuleNode {
    pub fn depth(&self) -> usize {
        match self {
            RuleNode::Leaf { .. } => 0,
            RuleNode::Split { low, high, .. } => 1 + low.depth().max(high.depth()),
        }
    }

    pub fn split_count(&self) -> usize {
        match self {
            RuleNode::Leaf { .. } => 0,
            RuleNode::Split { low, high, .. } => 1 + low.split_count() + high.split_count(),
        }
    }

    fn classify(&self, x: &[f64]) -> Result<usize> {
        match self {
            RuleNode::Leaf { class } => Ok(*class),
            RuleNode::Split {
                feature,
                threshold,
                low,
                high,
                ..
            } => {
                let v = *x.get(*feature).ok_or(Error::MissingFeature(*feature))?;
                if v > *threshold {
                    high.classify(x)
                } else {
                    low.classify(x)
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleTree {
    pub root: RuleNode,
    pub feature_names: Vec<String>,
}

/// Majority label of a side, class 0 on ties.
fn majority(zeros: usize, ones: usize) -> usize {
    usize::from(ones > zeros)
}

fn find_node(x0: &[&[f64]], x1: &[&[f64]], pool: &[usize]) -> Result<RuleNode> {
    let mut best: Option<(usize, Threshold)> = None;
    for &v in pool {
        let a: Vec<f64> = x0.iter().map(|r| r[v]).collect();
        let b: Vec<f64> = x1.iter().map(|r| r[v]).collect();
        let t = search_threshold(&a, &b)?;
        if best.map_or(true, |(_, bt)| t.errors < bt.errors) {
            best = Some((v, t));
        }
    }
    let (feature, t) = best.ok_or_else(|| Error::InvalidConfig("empty feature pool".into()))?;
    let rest: Vec<usize> = pool.iter().copied().filter(|&v| v != feature).collect();

    // rows on the high side are predicted 1 when high_is_one
    let side_of = |r: &&[f64]| (r[feature] > t.q) == t.high_is_one;
    let (a01, a0): (Vec<&[f64]>, Vec<&[f64]>) = x0.iter().copied().partition(side_of);
    let (a1, a10): (Vec<&[f64]>, Vec<&[f64]>) = x1.iter().copied().partition(side_of);

    // predicted-0 side holds A_0 and A_10, predicted-1 side holds A_01 and A_1
    let zero_side = side(&a0, &a10, &rest, 0)?;
    let one_side = side(&a01, &a1, &rest, 1)?;
    let (low, high) = if t.high_is_one {
        (zero_side, one_side)
    } else {
        (one_side, zero_side)
    };
    Ok(RuleNode::Split {
        feature,
        threshold: t.q,
        high_is_one: t.high_is_one,
        low: Box::new(low),
        high: Box::new(high),
    })
}

fn side(zeros: &[&[f64]], ones: &[&[f64]], pool: &[usize], predicted: usize) -> Result<RuleNode> {
    let total = zeros.len() + ones.len();
    if pool.is_empty() || zeros.is_empty() || ones.is_empty() || total < 2 {
        let class = if total == 0 {
            predicted
        } else {
            majority(zeros.len(), ones.len())
        };
        return Ok(RuleNode::Leaf { class });
    }
    find_node(zeros, ones, pool)
}

/// Grows a rule tree separating `x0` (class 0) from `x1` (class 1).
///
/// Only the columns listed in `pool` are considered and each is used at most
/// once along any path.
pub fn extract_rules(x0: &Matrix, x1: &Matrix, pool: &[usize], feature_names: &[String]) -> Result<RuleTree> {
    if x0.rows() == 0 || x1.rows() == 0 {
        return Err(Error::SingleClassTargets);
    }
    if pool.is_empty() {
        return Err(Error::InvalidConfig("empty feature pool".into()));
    }
    if x0.cols() != x1.cols() || feature_names.len() != x0.cols() {
        return Err(Error::LengthMismatch {
            expected: x0.cols(),
            actual: x1.cols(),
        });
    }
    let mut seen = pool.to_vec();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != pool.len() || seen.last().is_some_and(|&v| v >= x0.cols()) {
        return Err(Error::InvalidConfig("feature pool has duplicates or out-of-range columns".into()));
    }
    let r0: Vec<&[f64]> = x0.iter_rows().collect();
    let r1: Vec<&[f64]> = x1.iter_rows().collect();
    Ok(RuleTree {
        root: find_node(&r0, &r1, pool)?,
        feature_names: feature_names.to_vec(),
    })
}

pub fn classify_rule(tree: &RuleTree, x: &[f64]) -> Result<usize> {
    tree.root.classify(x)
}

impl Classifier for RuleTree {
    fn classify(&self, x: &[f64]) -> Result<usize> {
        classify_rule(self, x)
    }
}

impl RuleTree {
    /// Nested if/else text. `class_names` labels the leaves (defaults to `class 0/1`).
    pub fn to_text(&self, class_names: Option<&[String]>) -> String {
        let label = |c: usize| match class_names {
            Some(names) if c < names.len() => names[c].clone(),
            _ => format!("class {c}"),
        };
        let mut out = String::new();
        self.render(&self.root, 0, &label, &mut out);
        out
    }

    fn render(&self, node: &RuleNode, depth: usize, label: &dyn Fn(usize) -> String, out: &mut String) {
        let pad = "  ".repeat(depth);
        match node {
            RuleNode::Leaf { class } => {
                let _ = writeln!(out, "{pad}{}", label(*class));
            }
            RuleNode::Split {
                feature,
                threshold,
                low,
                high,
                ..
            } => {
                let _ = write!(out, "{pad}if {} > {threshold:.4} then", self.feature_names[*feature]);
                self.branch(high, depth, label, out);
                let _ = write!(out, "{pad}else");
                self.branch(low, depth, label, out);
            }
        }
    }

    fn branch(&self, node: &RuleNode, depth: usize, label: &dyn Fn(usize) -> String, out: &mut String) {
        match node {
            RuleNode::Leaf { class } => {
                let _ = writeln!(out, " {}", label(*class));
            }
            _ => {
                out.push('\n');
                self.render(node, depth + 1, label, out);
            }
        }
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph rules {\n");
        let mut next = 0usize;
        self.dot_node(&self.root, &mut next, &mut out);
        out.push_str("}\n");
        out
    }

    fn dot_node(&self, node: &RuleNode, next: &mut usize, out: &mut String) -> usize {
        let id = *next;
        *next += 1;
        match node {
            RuleNode::Leaf { class } => {
                let _ = writeln!(out, "  n{id} [label=\"class {class}\", shape=ellipse];");
            }
            RuleNode::Split {
                feature,
                threshold,
                low,
                high,
                ..
            } => {
                let _ = writeln!(
                    out,
                    "  n{id} [label=\"{} > {threshold:.4}\", shape=box, style=filled, fillcolor=gray];",
                    self.feature_names[*feature]
                );
                let h = self.dot_node(high, next, out);
                let l = self.dot_node(low, next, out);
                let _ = writeln!(out, "  n{id} -> n{h} [label=\"yes\"];");
                let _ = writeln!(out, "  n{id} -> n{l} [label=\"no\"];");
            }
        }
        id
    }
}
