//! Evolving cascade neural networks.
//!
//! Training starts from single-input sigmoid neurons ranked by validation
//! error. The best one fixes the anchor feature. Each further feature in rank
//! order is offered to a candidate neuron wired to the anchor, that feature and
//! the outputs of every neuron accepted so far. A candidate joins the cascade
//! only if its validation error is strictly below the incumbent's, so the
//! network keeps just the features and neurons that pay for themselves.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Matrix};
use crate::error::{Error, Result};
use crate::neurocore::{
    fit_sigmoid_weights, output_error, sigmoid_out, sigmoid_outputs, Classifier, FitConfig,
    InputRef, SigmoidNeuron,
};
use crate::seeding;

/// Default step size for cascade neurons (per-row mean gradient).
pub const DEFAULT_LEARNING_RATE: f64 = 2.0;

/// Fit settings used for cascade neurons unless overridden.
pub fn default_fit_config() -> FitConfig {
    FitConfig {
        learning_rate: DEFAULT_LEARNING_RATE,
        ..FitConfig::default()
    }
}

/// Single-feature ranking: `order[0]` is the anchor feature.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRanking {
    pub order: Vec<usize>,
    /// Validation errors aligned with `order` (ascending).
    pub errors: Vec<f64>,
    /// Fitted single-input neurons aligned with `order`.
    pub neurons: Vec<SigmoidNeuron>,
}

impl FeatureRanking {
    pub fn best_error(&self) -> f64 {
        self.errors[0]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeNetwork {
    pub anchor_feature: usize,
    /// Best single-input neuron; the model output when no cascade neuron was accepted.
    pub anchor_neuron: SigmoidNeuron,
    /// Validation error of `anchor_neuron`.
    pub anchor_score: f64,
    /// Neuron `t` is bound to the anchor, one new feature and neurons `0..t`.
    pub neurons: Vec<SigmoidNeuron>,
    pub accepted_scores: Vec<f64>,
    pub feature_order: Vec<usize>,
    pub feature_names: Vec<String>,
    pub decision_threshold: f64,
}

pub fn relevance_check(candidate: f64, incumbent: f64) -> bool {
    candidate < incumbent
}

fn require_binary(ds: &Dataset) -> Result<()> {
    if ds.class_count() != 2 {
        return Err(Error::InvalidConfig(format!(
            "cascade networks are two-class models, data has {} classes",
            ds.class_count()
        )));
    }
    Ok(())
}

fn column_matrix(ds: &Dataset, cols: &[usize]) -> Matrix {
    ds.features().select_cols(cols)
}

/// Fits one single-input neuron per feature and sorts them by validation error,
/// ties broken by column index. Every feature uses the same seed so identical
/// columns rank identically.
pub fn rank_single_features(
    train: &Dataset,
    val: &Dataset,
    cfg: &FitConfig,
) -> Result<FeatureRanking> {
    let m = train.n_features();
    if m < 2 {
        return Err(Error::TooFewFeatures(m));
    }
    if val.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let t_train = train.binary_targets();
    let t_val = val.binary_targets();
    let fit_cfg = cfg.with_seed(seeding::derive_seed(cfg.seed, &[0]));
    let mut scored = Vec::with_capacity(m);
    for j in 0..m {
        let x_train = column_matrix(train, &[j]);
        let w = fit_sigmoid_weights(&x_train, &t_train, &fit_cfg)?;
        let out = sigmoid_outputs(&w, &column_matrix(val, &[j]));
        let err = output_error(&out, &t_val, cfg.decision_threshold)?;
        let neuron = SigmoidNeuron {
            weights: w,
            bindings: vec![InputRef::Feature(j)],
        };
        scored.push((err, j, neuron));
    }
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(FeatureRanking {
        order: scored.iter().map(|s| s.1).collect(),
        errors: scored.iter().map(|s| s.0).collect(),
        neurons: scored.into_iter().map(|s| s.2).collect(),
    })
}

/// Inputs of a candidate: anchor, new feature, then every accepted neuron output.
fn candidate_inputs(ds: &Dataset, anchor: usize, feature: usize, hidden: &[Vec<f64>]) -> Matrix {
    let cols = 2 + hidden.len();
    let mut x = Matrix::zeros(ds.len(), cols);
    for i in 0..ds.len() {
        let row = ds.row(i);
        let out = x.row_mut(i);
        out[0] = row[anchor];
        out[1] = row[feature];
        for (k, z) in hidden.iter().enumerate() {
            out[2 + k] = z[i];
        }
    }
    x
}

/// Grows a cascade network. `train` fits weights, `val` scores candidates.
pub fn train_ecnn(train: &Dataset, val: &Dataset, cfg: &FitConfig) -> Result<CascadeNetwork> {
    require_binary(train)?;
    require_binary(val)?;
    let ranking = rank_single_features(train, val, cfg)?;
    train_ecnn_ranked(train, val, cfg, &ranking)
}

/// Cascade growth from an existing ranking.
pub fn train_ecnn_ranked(
    train: &Dataset,
    val: &Dataset,
    cfg: &FitConfig,
    ranking: &FeatureRanking,
) -> Result<CascadeNetwork> {
    let anchor = ranking.order[0];
    let t_train = train.binary_targets();
    let t_val = val.binary_targets();
    let mut incumbent = ranking.best_error();
    let mut neurons: Vec<SigmoidNeuron> = Vec::new();
    let mut scores = Vec::new();
    let mut z_train: Vec<Vec<f64>> = Vec::new();
    let mut z_val: Vec<Vec<f64>> = Vec::new();

    for (h, &feature) in ranking.order.iter().enumerate().skip(1) {
        let x_train = candidate_inputs(train, anchor, feature, &z_train);
        let fit_cfg = cfg.with_seed(seeding::derive_seed(cfg.seed, &[1, h as u64]));
        let w = fit_sigmoid_weights(&x_train, &t_train, &fit_cfg)?;
        let x_val = candidate_inputs(val, anchor, feature, &z_val);
        let out_val = sigmoid_outputs(&w, &x_val);
        let err = output_error(&out_val, &t_val, cfg.decision_threshold)?;
        if relevance_check(err, incumbent) {
            let mut bindings = vec![InputRef::Feature(anchor), InputRef::Feature(feature)];
            bindings.extend((0..neurons.len()).map(InputRef::Neuron));
            z_train.push(sigmoid_outputs(&w, &x_train));
            z_val.push(out_val);
            neurons.push(SigmoidNeuron {
                weights: w,
                bindings,
            });
            scores.push(err);
            incumbent = err;
        }
    }

    Ok(CascadeNetwork {
        anchor_feature: anchor,
        anchor_neuron: ranking.neurons[0].clone(),
        anchor_score: ranking.best_error(),
        neurons,
        accepted_scores: scores,
        feature_order: ranking.order.clone(),
        feature_names: train.feature_names().to_vec(),
        decision_threshold: cfg.decision_threshold,
    })
}

impl CascadeNetwork {
    /// Neurons that make up the model, in evaluation order.
    pub fn model_neurons(&self) -> &[SigmoidNeuron] {
        if self.neurons.is_empty() {
            std::slice::from_ref(&self.anchor_neuron)
        } else {
            &self.neurons
        }
    }

    /// Validation errors of the model neurons, aligned with [`Self::model_neurons`].
    pub fn model_scores(&self) -> Vec<f64> {
        if self.neurons.is_empty() {
            vec![self.anchor_score]
        } else {
            self.accepted_scores.clone()
        }
    }

    /// Feature columns the model reads, in the order they were added.
    pub fn selected_features(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for neuron in self.model_neurons() {
            for b in &neuron.bindings {
                if let InputRef::Feature(j) = b {
                    if !out.contains(j) {
                        out.push(*j);
                    }
                }
            }
        }
        out
    }

    pub fn validation_error(&self) -> f64 {
        *self.model_scores().last().expect("non-empty model")
    }

    /// Output score in (0, 1).
    pub fn score(&self, x: &[f64]) -> Result<f64> {
        let mut outputs: Vec<f64> = Vec::with_capacity(self.model_neurons().len());
        let mut inputs = Vec::new();
        for neuron in self.model_neurons() {
            inputs.clear();
            for b in &neuron.bindings {
                inputs.push(match *b {
                    InputRef::Feature(j) => *x.get(j).ok_or(Error::MissingFeature(j))?,
                    InputRef::Neuron(q) => outputs[q],
                });
            }
            outputs.push(sigmoid_out(neuron, &inputs)?);
        }
        Ok(*outputs.last().expect("non-empty model"))
    }

    pub fn predict(&self, x: &[f64]) -> Result<(usize, f64)> {
        let s = self.score(x)?;
        Ok((usize::from(s >= self.decision_threshold), s))
    }

    fn input_name(&self, b: &InputRef) -> String {
        match *b {
            InputRef::Feature(j) => self
                .feature_names
                .get(j)
                .cloned()
                .unwrap_or_else(|| format!("x{}", j + 1)),
            InputRef::Neuron(q) => format!("z_{}", q + 1),
        }
    }

    /// One line per neuron: its inputs, validation accuracy and weight magnitudes.
    pub fn describe(&self) -> String {
        let mut out = String::new();
        for (t, (neuron, err)) in self.model_neurons().iter().zip(self.model_scores()).enumerate() {
            // hidden outputs first, most recent first, then the features
            let mut order: Vec<usize> = (0..neuron.bindings.len())
                .filter(|&k| matches!(neuron.bindings[k], InputRef::Neuron(_)))
                .rev()
                .collect();
            order.extend(
                (0..neuron.bindings.len())
                    .filter(|&k| matches!(neuron.bindings[k], InputRef::Feature(_))),
            );
            let names: Vec<String> = order.iter().map(|&k| self.input_name(&neuron.bindings[k])).collect();
            let strengths: Vec<String> = order
                .iter()
                .map(|&k| format!("{} {:.4}", self.input_name(&neuron.bindings[k]), neuron.weights[k + 1].abs()))
                .collect();
            let _ = writeln!(
                out,
                "z_{}: {} → p_{} = {:.4} | strengths: bias {:.4}, {}",
                t + 1,
                names.join(" & "),
                t + 1,
                1.0 - err,
                neuron.weights[0].abs(),
                strengths.join(", ")
            );
        }
        out
    }

    /// Graphviz rendering: input nodes plus one node per neuron.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph cascade {\n  rankdir=LR;\n");
        for j in self.selected_features() {
            let _ = writeln!(out, "  x{j} [shape=ellipse, label=\"{}\"];", self.input_name(&InputRef::Feature(j)));
        }
        let last = self.model_neurons().len() - 1;
        for (t, neuron) in self.model_neurons().iter().enumerate() {
            let label = if t == last { format!("z_{} = y", t + 1) } else { format!("z_{}", t + 1) };
            let _ = writeln!(out, "  z{t} [shape=box, style=filled, fillcolor=gray, label=\"{label}\"];");
            for (k, b) in neuron.bindings.iter().enumerate() {
                let src = match *b {
                    InputRef::Feature(j) => format!("x{j}"),
                    InputRef::Neuron(q) => format!("z{q}"),
                };
                let _ = writeln!(out, "  {src} -> z{t} [label=\"{:.4}\"];", neuron.weights[k + 1]);
            }
        }
        out.push_str("}\n");
        out
    }
}

impl Classifier for CascadeNetwork {
    fn classify(&self, x: &[f64]) -> Result<usize> {
        Ok(self.predict(x)?.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{gen_surrogate_eeg, split, SplitSpec};
    use crate::neurocore::classification_error;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn quick_cfg(seed: u64) -> FitConfig {
        FitConfig {
            restarts: 2,
            epochs: 150,
            seed,
            ..FitConfig::default()
        }
    }

    /// Column 0 separates the classes with a margin; the rest is noise.
    fn separable_with_noise(n: usize, noise_cols: usize, seed: u64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = noise_cols + 1;
        let mut x = Matrix::zeros(n, m);
        let mut labels = Vec::new();
        for i in 0..n {
            let c = i % 2;
            let mag: f64 = rng.gen_range(0.5..2.0);
            x.set(i, 0, if c == 1 { mag } else { -mag });
            for j in 1..m {
                x.set(i, j, rng.gen_range(-1.0..1.0));
            }
            labels.push(c);
        }
        Dataset::new(x, labels, Dataset::default_names(m), 2).unwrap()
    }

    #[test]
    fn separating_feature_ranks_first() {
        let mut ds = separable_with_noise(120, 5, 1);
        // move the informative column to position 3
        ds = ds.project(&[1, 2, 3, 0, 4, 5]);
        let parts = split(&ds, &SplitSpec::new(vec![0.5, 0.5], 2, true)).unwrap();
        let r = rank_single_features(&parts[0], &parts[1], &quick_cfg(1)).unwrap();
        assert_eq!(r.order[0], 3);
        assert_eq!(r.errors[0], 0.0);
        assert!(r.errors.windows(2).all(|w| w[0] <= w[1]));
        // brute force: the anchor is the argmin over all single-feature errors
        let min = r.errors.iter().cloned().fold(f64::INFINITY, f64::min);
        assert_eq!(r.errors[0], min);
    }

    #[test]
    fn single_feature_is_rejected() {
        let ds = separable_with_noise(20, 0, 1);
        assert!(matches!(
            rank_single_features(&ds, &ds, &quick_cfg(0)),
            Err(Error::TooFewFeatures(1))
        ));
    }

    #[test]
    fn equal_errors_rank_by_index() {
        let base = separable_with_noise(40, 0, 3);
        let col = base.column(0);
        let rows: Vec<Vec<f64>> = col.iter().map(|&v| vec![v, v, v]).collect();
        let ds = Dataset::new(Matrix::from_rows(&rows).unwrap(), base.labels().to_vec(), Dataset::default_names(3), 2).unwrap();
        let r = rank_single_features(&ds, &ds, &quick_cfg(0)).unwrap();
        assert_eq!(r.order, vec![0, 1, 2]);
    }

    #[test]
    fn relevance_is_strict() {
        assert!(relevance_check(0.3, 0.5));
        assert!(!relevance_check(0.5, 0.5));
        assert!(!relevance_check(0.6, 0.5));
    }

    #[test]
    fn perfect_anchor_admits_no_additions() {
        let ds = separable_with_noise(100, 4, 7);
        let parts = split(&ds, &SplitSpec::new(vec![0.5, 0.5], 3, true)).unwrap();
        let net = train_ecnn(&parts[0], &parts[1], &quick_cfg(2)).unwrap();
        assert_eq!(net.anchor_feature, 0);
        assert!(net.neurons.is_empty());
        assert_eq!(net.model_neurons().len(), 1);
        assert_eq!(net.selected_features(), vec![0]);
        assert_eq!(classification_error(&net, &parts[1]).unwrap(), 0.0);
    }

    fn surrogate_net(seed: u64) -> (CascadeNetwork, Dataset, Dataset) {
        let g = gen_surrogate_eeg(600, 4, 12, 2, seed).unwrap();
        let parts = split(&g.dataset, &SplitSpec::new(vec![2.0 / 3.0, 1.0 / 3.0], seed, true)).unwrap();
        let net = train_ecnn(&parts[0], &parts[1], &quick_cfg(seed)).unwrap();
        (net, parts[0].clone(), parts[1].clone())
    }

    #[test]
    fn growth_invariants_hold() {
        for seed in 0..3 {
            let (net, _, val) = surrogate_net(seed);
            let mut prev = net.anchor_score;
            for (t, (neuron, &s)) in net.neurons.iter().zip(&net.accepted_scores).enumerate() {
                assert!(s < prev, "scores must strictly decrease");
                prev = s;
                assert_eq!(neuron.bindings.len(), t + 2);
                assert_eq!(neuron.bindings[0], InputRef::Feature(net.anchor_feature));
            }
            assert!(net.validation_error() <= net.anchor_score);
            let recomputed = classification_error(&net, &val).unwrap();
            assert_abs_diff_eq!(recomputed, net.validation_error(), epsilon = 1e-12);
        }
    }

    #[test]
    fn training_is_deterministic() {
        let (a, _, _) = surrogate_net(11);
        let (b, _, _) = surrogate_net(11);
        assert_eq!(a, b);
        assert_eq!(a.describe(), b.describe());
    }

    fn hand_net(weights: Vec<Vec<f64>>) -> CascadeNetwork {
        let neurons: Vec<SigmoidNeuron> = weights
            .into_iter()
            .enumerate()
            .map(|(t, w)| {
                let mut bindings = vec![InputRef::Feature(0), InputRef::Feature(t + 1)];
                bindings.extend((0..t).map(InputRef::Neuron));
                assert_eq!(w.len(), bindings.len() + 1);
                SigmoidNeuron { weights: w, bindings }
            })
            .collect();
        let k = neurons.len();
        CascadeNetwork {
            anchor_feature: 0,
            anchor_neuron: SigmoidNeuron {
                weights: vec![0.0, 1.0],
                bindings: vec![InputRef::Feature(0)],
            },
            anchor_score: 0.5,
            accepted_scores: (0..k).map(|t| 0.4 - 0.1 * t as f64).collect(),
            neurons,
            feature_order: (0..=k).collect(),
            feature_names: (0..=k).map(|j| format!("feat{j}")).collect(),
            decision_threshold: 0.5,
        }
    }

    #[test]
    fn zero_weights_score_half() {
        let net = hand_net(vec![vec![0.0; 3], vec![0.0; 4]]);
        assert_eq!(net.score(&[1.0, -2.0, 3.0]).unwrap(), 0.5);
    }

    #[test]
    fn single_neuron_hand_value() {
        let mut net = hand_net(vec![]);
        net.anchor_neuron.weights = vec![0.0, 2.0];
        let expect = 1.0 / (1.0 + (-2.0f64).exp());
        assert_abs_diff_eq!(net.score(&[1.0]).unwrap(), expect, epsilon = 1e-15);
        assert_abs_diff_eq!(expect, 0.8807970779778823, epsilon = 1e-15);
        assert!(matches!(net.score(&[]), Err(Error::MissingFeature(0))));
    }

    /// Independent evaluation written out neuron by neuron.
    fn oracle(w: &[Vec<f64>], x: &[f64]) -> f64 {
        let z1 = 1.0 / (1.0 + (-(w[0][0] + w[0][1] * x[0] + w[0][2] * x[1])).exp());
        let z2 = 1.0 / (1.0 + (-(w[1][0] + w[1][1] * x[0] + w[1][2] * x[2] + w[1][3] * z1)).exp());
        1.0 / (1.0
            + (-(w[2][0] + w[2][1] * x[0] + w[2][2] * x[3] + w[2][3] * z1 + w[2][4] * z2)).exp())
    }

    #[test]
    fn evaluation_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let w: Vec<Vec<f64>> = (3..6).map(|len| (0..len).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect();
        let net = hand_net(w.clone());
        for _ in 0..50 {
            let x: Vec<f64> = (0..4).map(|_| rng.gen_range(-3.0..3.0)).collect();
            assert_abs_diff_eq!(net.score(&x).unwrap(), oracle(&w, &x), epsilon = 1e-12);
        }
    }

    #[test]
    fn description_lists_each_neuron() {
        let net = hand_net(vec![vec![0.1, 0.2, 0.3], vec![0.1, -0.5, 0.4, 1.5]]);
        let text = net.describe();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("z_1: feat0 & feat1 → p_1 = 0.6000"));
        assert!(lines[1].starts_with("z_2: z_1 & feat0 & feat2 → p_2"));
        assert!(lines[1].contains("feat0 0.5000"));
        let dot = net.to_dot();
        assert_eq!(dot.matches("shape=box").count(), 2);
        assert_eq!(dot.matches("shape=ellipse").count(), 3);
    }
}
