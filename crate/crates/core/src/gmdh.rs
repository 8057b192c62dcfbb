//! GMDH-type polynomial networks.
//!
//! Every neuron is a short polynomial of two inputs, either
//! `w0 + w1·v1 + w2·v2` or `w0 + w1·v1 + w2·v2 + w3·v1·v2`. Weights are fitted
//! on one half of the training data and candidates are ranked on the other half
//! by the exterior criterion (validation sum of squared residuals). The trained
//! network prints as a list of such polynomials.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Matrix};
use crate::error::{Error, Result};
use crate::neurocore::{exterior_criterion, fit_linear, linear_outputs, Classifier, FitConfig, InputRef};
use crate::seeding;

/// Maximum number of survivors per layer when the count is derived from `m`.
pub const MAX_DEFAULT_SURVIVORS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NeuronKind {
    /// `w0 + w1·v` — single-input neurons of the roulette pool.
    Unary,
    /// `w0 + w1·v1 + w2·v2`
    Linear,
    /// `w0 + w1·v1 + w2·v2 + w3·v1·v2`
    Bilinear,
}

impl NeuronKind {
    pub fn input_count(self) -> usize {
        match self {
            NeuronKind::Unary => 1,
            NeuronKind::Linear | NeuronKind::Bilinear => 2,
        }
    }

    pub fn weight_count(self) -> usize {
        match self {
            NeuronKind::Unary => 2,
            NeuronKind::Linear => 3,
            NeuronKind::Bilinear => 4,
        }
    }

    /// Basis terms `(1, v1, [v2, [v1·v2]])`.
    fn basis(self, v: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.push(1.0);
        match self {
            NeuronKind::Unary => out.push(v[0]),
            NeuronKind::Linear => out.extend_from_slice(&v[..2]),
            NeuronKind::Bilinear => {
                out.extend_from_slice(&v[..2]);
                out.push(v[0] * v[1]);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportingNeuron {
    pub kind: NeuronKind,
    pub weights: Vec<f64>,
    pub inputs: Vec<InputRef>,
}

impl SupportingNeuron {
    pub fn new(kind: NeuronKind, weights: Vec<f64>, inputs: Vec<InputRef>) -> Result<Self> {
        if weights.len() != kind.weight_count() {
            return Err(Error::LengthMismatch {
                expected: kind.weight_count(),
                actual: weights.len(),
            });
        }
        if inputs.len() != kind.input_count() {
            return Err(Error::LengthMismatch {
                expected: kind.input_count(),
                actual: inputs.len(),
            });
        }
        Ok(Self { kind, weights, inputs })
    }

    /// Exact polynomial value, no squashing.
    pub fn eval(&self, v1: f64, v2: f64) -> f64 {
        let w = &self.weights;
        match self.kind {
            NeuronKind::Unary => w[0] + w[1] * v1,
            NeuronKind::Linear => w[0] + w[1] * v1 + w[2] * v2,
            NeuronKind::Bilinear => w[0] + w[1] * v1 + w[2] * v2 + w[3] * v1 * v2,
        }
    }
}

pub fn count_candidates(m: usize) -> Result<usize> {
    if m < 2 {
        return Err(Error::TooFewFeatures(m));
    }
    Ok(m * (m - 1) / 2)
}

/// `round(0.4·L1)`, at least 1 and at most [`MAX_DEFAULT_SURVIVORS`].
pub fn default_survivors(m: usize) -> usize {
    let l1 = m * m.saturating_sub(1) / 2;
    ((0.4 * l1 as f64).round() as usize).clamp(1, MAX_DEFAULT_SURVIVORS)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GmdhConfig {
    /// Survivors per layer; `None` derives it from the feature count.
    pub survivors: Option<usize>,
    pub kind: NeuronKind,
    pub fit: FitConfig,
    pub max_layers: usize,
    /// Roulette attempts.
    pub attempts: usize,
}

impl Default for GmdhConfig {
    fn default() -> Self {
        Self {
            survivors: None,
            kind: NeuronKind::Bilinear,
            fit: FitConfig::default(),
            max_layers: 10,
            attempts: 500,
        }
    }
}

impl GmdhConfig {
    fn validate(&self) -> Result<()> {
        if self.survivors == Some(0) {
            return Err(Error::InvalidConfig("survivor count must be >= 1".into()));
        }
        if self.kind == NeuronKind::Unary {
            return Err(Error::InvalidConfig("network neurons need two inputs".into()));
        }
        if self.max_layers == 0 {
            return Err(Error::InvalidConfig("max_layers must be >= 1".into()));
        }
        self.fit.validate()
    }
}

/// Polynomial network stored in topological order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyNetwork {
    pub neurons: Vec<SupportingNeuron>,
    /// Index of the output neuron.
    pub output: usize,
    /// Minimal exterior criterion of each retained layer (layered growth only).
    pub layer_scores: Vec<f64>,
    pub feature_names: Vec<String>,
}

impl PolyNetwork {
    /// Checks that every neuron only reads features or earlier neurons.
    pub fn new(
        neurons: Vec<SupportingNeuron>,
        output: usize,
        feature_names: Vec<String>,
    ) -> Result<Self> {
        let net = Self {
            neurons,
            output,
            layer_scores: Vec::new(),
            feature_names,
        };
        net.validate()?;
        Ok(net)
    }

    fn validate(&self) -> Result<()> {
        if self.neurons.is_empty() {
            return Ok(());
        }
        if self.output >= self.neurons.len() {
            return Err(Error::ModelFormat("output index out of range".into()));
        }
        for (k, n) in self.neurons.iter().enumerate() {
            if n.weights.len() != n.kind.weight_count() || n.inputs.len() != n.kind.input_count() {
                return Err(Error::ModelFormat(format!("neuron {k} has the wrong shape")));
            }
            for input in &n.inputs {
                if let InputRef::Neuron(q) = input {
                    if *q >= k {
                        return Err(Error::ModelFormat(format!(
                            "neuron {k} reads neuron {q}, which is not earlier"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Layer of each neuron: features sit at layer 0.
    pub fn layers(&self) -> Vec<usize> {
        let mut layers: Vec<usize> = Vec::with_capacity(self.neurons.len());
        for n in &self.neurons {
            let depth = n
                .inputs
                .iter()
                .map(|i| match *i {
                    InputRef::Feature(_) => 0,
                    InputRef::Neuron(q) => layers[q],
                })
                .max()
                .unwrap_or(0);
            layers.push(depth + 1);
        }
        layers
    }

    /// Raw polynomial output of the output neuron.
    pub fn raw_output(&self, x: &[f64]) -> Result<f64> {
        if self.neurons.is_empty() {
            return Err(Error::Untrained);
        }
        let mut values = Vec::with_capacity(self.neurons.len());
        for n in &self.neurons {
            let mut v = [0.0; 2];
            for (slot, input) in v.iter_mut().zip(&n.inputs) {
                *slot = match *input {
                    InputRef::Feature(j) => *x.get(j).ok_or(Error::MissingFeature(j))?,
                    InputRef::Neuron(q) => values[q],
                };
            }
            values.push(n.eval(v[0], v[1]));
        }
        Ok(values[self.output])
    }

    pub fn predict(&self, x: &[f64]) -> Result<(usize, f64)> {
        let raw = self.raw_output(x)?;
        Ok((usize::from(raw >= 0.5), raw))
    }

    /// Drops neurons the output does not depend on.
    pub fn pruned(&self) -> Self {
        if self.neurons.is_empty() {
            return self.clone();
        }
        let mut keep = BTreeSet::new();
        let mut stack = vec![self.output];
        while let Some(k) = stack.pop() {
            if keep.insert(k) {
                for input in &self.neurons[k].inputs {
                    if let InputRef::Neuron(q) = input {
                        stack.push(*q);
                    }
                }
            }
        }
        let remap: Vec<Option<usize>> = {
            let mut next = 0;
            (0..self.neurons.len())
                .map(|k| {
                    keep.contains(&k).then(|| {
                        next += 1;
                        next - 1
                    })
                })
                .collect()
        };
        let neurons = keep
            .iter()
            .map(|&k| {
                let mut n = self.neurons[k].clone();
                for input in &mut n.inputs {
                    if let InputRef::Neuron(q) = input {
                        *q = remap[*q].expect("ancestor kept");
                    }
                }
                n
            })
            .collect();
        Self {
            neurons,
            output: remap[self.output].expect("output kept"),
            layer_scores: self.layer_scores.clone(),
            feature_names: self.feature_names.clone(),
        }
    }

    /// Feature columns read anywhere in the network, ascending.
    pub fn selected_features(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self
            .neurons
            .iter()
            .flat_map(|n| n.inputs.iter())
            .filter_map(|i| match *i {
                InputRef::Feature(j) => Some(j),
                InputRef::Neuron(_) => None,
            })
            .collect();
        set.into_iter().collect()
    }

    /// `y_i^(r)` names: `r` is the layer, `i` the position within it.
    pub fn neuron_names(&self) -> Vec<String> {
        let layers = self.layers();
        let mut seen = std::collections::HashMap::new();
        layers
            .iter()
            .map(|&r| {
                let i = seen.entry(r).or_insert(0usize);
                *i += 1;
                format!("y_{}^({})", i, r)
            })
            .collect()
    }

    fn input_label(&self, input: &InputRef, names: &[String]) -> String {
        match *input {
            InputRef::Feature(j) => self
                .feature_names
                .get(j)
                .cloned()
                .unwrap_or_else(|| format!("x{}", j + 1)),
            InputRef::Neuron(q) => names[q].clone(),
        }
    }

    /// One equation per neuron, coefficients to four decimals, in evaluation order.
    pub fn to_polynomial_text(&self) -> String {
        let names = self.neuron_names();
        let mut out = String::new();
        for (k, n) in self.neurons.iter().enumerate() {
            let a = self.input_label(&n.inputs[0], &names);
            let terms: Vec<String> = match n.kind {
                NeuronKind::Unary => vec![a],
                _ => {
                    let b = self.input_label(&n.inputs[1], &names);
                    let mut t = vec![a.clone(), b.clone()];
                    if n.kind == NeuronKind::Bilinear {
                        t.push(format!("{a}*{b}"));
                    }
                    t
                }
            };
            let mut line = format!("{} = {:.4}", names[k], n.weights[0]);
            for (w, term) in n.weights[1..].iter().zip(&terms) {
                let sign = if *w < 0.0 { '-' } else { '+' };
                let _ = write!(line, " {sign} {:.4}*{term}", w.abs());
            }
            if k == self.output {
                line.push_str("   (output)");
            }
            out.push_str(&line);
            out.push('\n');
        }
        out
    }

    pub fn to_dot(&self) -> String {
        let names = self.neuron_names();
        let mut out = String::from("digraph gmdh {\n  rankdir=LR;\n");
        for j in self.selected_features() {
            let _ = writeln!(
                out,
                "  x{j} [shape=ellipse, label=\"{}\"];",
                self.input_label(&InputRef::Feature(j), &names)
            );
        }
        for (k, n) in self.neurons.iter().enumerate() {
            let peripheries = if k == self.output { 2 } else { 1 };
            let _ = writeln!(
                out,
                "  n{k} [shape=box, style=filled, fillcolor=gray, peripheries={peripheries}, label=\"{}\"];",
                names[k]
            );
            for input in &n.inputs {
                let src = match *input {
                    InputRef::Feature(j) => format!("x{j}"),
                    InputRef::Neuron(q) => format!("n{q}"),
                };
                let _ = writeln!(out, "  {src} -> n{k};");
            }
        }
        out.push_str("}\n");
        out
    }
}

impl Classifier for PolyNetwork {
    fn classify(&self, x: &[f64]) -> Result<usize> {
        Ok(self.predict(x)?.0)
    }
}

/// Values of one pool member (a feature or a fitted neuron) on both data halves.
struct Signal {
    source: InputRef,
    train: Vec<f64>,
    val: Vec<f64>,
}

struct Fitted {
    neuron: SupportingNeuron,
    train: Vec<f64>,
    val: Vec<f64>,
    criterion: f64,
}

fn design(kind: NeuronKind, a: &[f64], b: Option<&[f64]>) -> Matrix {
    let n = a.len();
    let mut data = Vec::with_capacity(n * kind.weight_count());
    let mut buf = Vec::with_capacity(4);
    for i in 0..n {
        let v = [a[i], b.map_or(0.0, |b| b[i])];
        kind.basis(&v, &mut buf);
        data.extend_from_slice(&buf);
    }
    Matrix::from_vec(n, kind.weight_count(), data).expect("sized")
}

fn fit_candidate(
    kind: NeuronKind,
    a: &Signal,
    b: Option<&Signal>,
    targets: (&[f64], &[f64]),
    fit: &FitConfig,
) -> Result<Fitted> {
    let x_train = design(kind, &a.train, b.map(|s| s.train.as_slice()));
    let weights = fit_linear(&x_train, targets.0, fit)?;
    let x_val = design(kind, &a.val, b.map(|s| s.val.as_slice()));
    let train = linear_outputs(&weights, &x_train);
    let val = linear_outputs(&weights, &x_val);
    let criterion = exterior_criterion(&val, targets.1)?.value;
    let mut inputs = vec![a.source];
    inputs.extend(b.map(|s| s.source));
    Ok(Fitted {
        neuron: SupportingNeuron {
            kind,
            weights,
            inputs,
        },
        train,
        val,
        criterion,
    })
}

fn check_inputs(train: &Dataset, val: &Dataset) -> Result<()> {
    if train.class_count() != 2 {
        return Err(Error::InvalidConfig(format!(
            "polynomial networks are two-class models, data has {} classes",
            train.class_count()
        )));
    }
    if train.n_features() < 2 {
        return Err(Error::TooFewFeatures(train.n_features()));
    }
    if val.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if train.n_features() != val.n_features() {
        return Err(Error::LengthMismatch {
            expected: train.n_features(),
            actual: val.n_features(),
        });
    }
    Ok(())
}

fn feature_signals(train: &Dataset, val: &Dataset) -> Vec<Signal> {
    (0..train.n_features())
        .map(|j| Signal {
            source: InputRef::Feature(j),
            train: train.column(j),
            val: val.column(j),
        })
        .collect()
}

/// Per-layer record of layered growth.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerReport {
    pub candidates: usize,
    /// Exterior criterion of every candidate, in creation order.
    pub criteria: Vec<f64>,
    /// Creation indices of the survivors, best first.
    pub survivors: Vec<usize>,
    pub min_criterion: f64,
}

/// Layered GMDH growth.
///
/// Layer 1 pairs every two features. Later layers pair the survivors of the
/// previous layer; a lone survivor is paired with each feature instead. Growth
/// stops when a layer's minimal criterion does not improve on the previous one
/// (that layer is discarded) or when `max_layers` is reached.
pub fn train_gmdh_layered(train: &Dataset, val: &Dataset, cfg: &GmdhConfig) -> Result<PolyNetwork> {
    Ok(train_gmdh_layered_report(train, val, cfg)?.0)
}

pub fn train_gmdh_layered_report(
    train: &Dataset,
    val: &Dataset,
    cfg: &GmdhConfig,
) -> Result<(PolyNetwork, Vec<LayerReport>)> {
    cfg.validate()?;
    check_inputs(train, val)?;
    let m = train.n_features();
    let f = cfg.survivors.unwrap_or_else(|| default_survivors(m));
    let targets = (train.binary_targets(), val.binary_targets());
    let targets = (targets.0.as_slice(), targets.1.as_slice());
    let features = feature_signals(train, val);

    let mut network: Vec<SupportingNeuron> = Vec::new();
    let mut layer_scores: Vec<f64> = Vec::new();
    let mut reports = Vec::new();
    // signals of the previous layer's survivors; neuron sources index into `network`
    let mut previous: Vec<Signal> = Vec::new();
    let mut best_output = 0usize;

    for layer in 0..cfg.max_layers {
        let pairs: Vec<(&Signal, &Signal)> = if layer == 0 {
            pairs_of(&features)
        } else if previous.len() >= 2 {
            pairs_of(&previous)
        } else {
            features.iter().map(|x| (&previous[0], x)).collect()
        };
        if pairs.is_empty() {
            break;
        }
        let mut fitted = Vec::with_capacity(pairs.len());
        for (idx, (a, b)) in pairs.iter().enumerate() {
            let fit = cfg
                .fit
                .with_seed(seeding::derive_seed(cfg.fit.seed, &[layer as u64, idx as u64]));
            fitted.push(fit_candidate(cfg.kind, a, Some(b), targets, &fit)?);
        }
        let mut order: Vec<usize> = (0..fitted.len()).collect();
        order.sort_by(|&x, &y| {
            fitted[x]
                .criterion
                .total_cmp(&fitted[y].criterion)
                .then(x.cmp(&y))
        });
        let min = fitted[order[0]].criterion;
        let survivors: Vec<usize> = order.iter().copied().take(f).collect();
        reports.push(LayerReport {
            candidates: fitted.len(),
            criteria: fitted.iter().map(|c| c.criterion).collect(),
            survivors: survivors.clone(),
            min_criterion: min,
        });
        if let Some(&last) = layer_scores.last() {
            if !(min < last) {
                break;
            }
        }
        layer_scores.push(min);

        let mut next = Vec::with_capacity(survivors.len());
        let mut slots: Vec<Option<Fitted>> = fitted.into_iter().map(Some).collect();
        for (rank, &idx) in survivors.iter().enumerate() {
            let c = slots[idx].take().expect("survivor taken once");
            let pos = network.len();
            if rank == 0 {
                best_output = pos;
            }
            network.push(c.neuron);
            next.push(Signal {
                source: InputRef::Neuron(pos),
                train: c.train,
                val: c.val,
            });
        }
        previous = next;
    }

    let net = PolyNetwork {
        neurons: network,
        output: best_output,
        layer_scores,
        feature_names: train.feature_names().to_vec(),
    };
    Ok((net.pruned(), reports))
}

fn pairs_of(signals: &[Signal]) -> Vec<(&Signal, &Signal)> {
    let mut out = Vec::new();
    for i in 0..signals.len() {
        for j in i + 1..signals.len() {
            out.push((&signals[i], &signals[j]));
        }
    }
    out
}

fn accuracy(outputs: &[f64], targets: &[f64]) -> f64 {
    let hits = outputs
        .iter()
        .zip(targets)
        .filter(|(y, t)| (**y >= 0.5) == (**t >= 0.5))
        .count();
    hits as f64 / targets.len() as f64
}

/// Draws an index with probability proportional to `weights` (uniform if all zero).
fn spin(weights: &[f64], rng: &mut impl Rng) -> usize {
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return rng.gen_range(0..weights.len());
    }
    let mut u = rng.gen_range(0.0..total);
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            return i;
        }
        u -= w;
    }
    weights.len() - 1
}

/// Outcome of the roulette variant.
#[derive(Debug, Clone, PartialEq)]
pub struct RouletteReport {
    /// Validation accuracy of each single-feature neuron.
    pub feature_accuracy: Vec<f64>,
    /// Best pool accuracy after each attempt.
    pub best_accuracy: Vec<f64>,
    pub accepted: usize,
    pub skipped: usize,
}

/// Roulette GMDH growth.
///
/// The pool starts with every feature, weighted by the validation accuracy of
/// its single-input neuron. Each attempt spins the wheel for two distinct pool
/// members, fits a two-input neuron on them and keeps it only if it beats both
/// parents; a kept neuron joins the pool as a new selectable input. The output
/// is the most accurate pool member.
pub fn train_gmdh_roulette(train: &Dataset, val: &Dataset, cfg: &GmdhConfig) -> Result<PolyNetwork> {
    Ok(train_gmdh_roulette_report(train, val, cfg)?.0)
}

pub fn train_gmdh_roulette_report(
    train: &Dataset,
    val: &Dataset,
    cfg: &GmdhConfig,
) -> Result<(PolyNetwork, RouletteReport)> {
    cfg.validate()?;
    check_inputs(train, val)?;
    let targets = (train.binary_targets(), val.binary_targets());
    let targets = (targets.0.as_slice(), targets.1.as_slice());
    let mut pool = feature_signals(train, val);

    let mut unary = Vec::with_capacity(pool.len());
    let mut acc = Vec::with_capacity(pool.len());
    for (j, signal) in pool.iter().enumerate() {
        let fit = cfg.fit.with_seed(seeding::derive_seed(cfg.fit.seed, &[0, j as u64]));
        let c = fit_candidate(NeuronKind::Unary, signal, None, targets, &fit)?;
        acc.push(accuracy(&c.val, targets.1));
        unary.push(c.neuron);
    }
    let feature_accuracy = acc.clone();

    let mut rng = seeding::rng_for(cfg.fit.seed, &[1]);
    let mut network: Vec<SupportingNeuron> = Vec::new();
    let mut best_trace = Vec::with_capacity(cfg.attempts);
    let mut skipped = 0;
    let max_of = |a: &[f64]| a.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    for attempt in 0..cfg.attempts {
        let first = spin(&acc, &mut rng);
        let mut second = None;
        for _ in 0..=10 {
            let s = spin(&acc, &mut rng);
            if s != first {
                second = Some(s);
                break;
            }
        }
        let Some(second) = second else {
            skipped += 1;
            best_trace.push(max_of(&acc));
            continue;
        };
        let fit = cfg
            .fit
            .with_seed(seeding::derive_seed(cfg.fit.seed, &[2, attempt as u64]));
        let c = fit_candidate(cfg.kind, &pool[first], Some(&pool[second]), targets, &fit)?;
        let ac = accuracy(&c.val, targets.1);
        if ac > acc[first].max(acc[second]) {
            let pos = network.len();
            network.push(c.neuron);
            pool.push(Signal {
                source: InputRef::Neuron(pos),
                train: c.train,
                val: c.val,
            });
            acc.push(ac);
        }
        best_trace.push(max_of(&acc));
    }

    let m = train.n_features();
    let best = (0..acc.len())
        .fold(0, |b, i| if acc[i] > acc[b] { i } else { b });
    let output = if best < m {
        network.push(unary[best].clone());
        network.len() - 1
    } else {
        best - m
    };
    let net = PolyNetwork {
        neurons: network,
        output,
        layer_scores: Vec::new(),
        feature_names: train.feature_names().to_vec(),
    };
    let report = RouletteReport {
        feature_accuracy,
        best_accuracy: best_trace,
        accepted: acc.len() - m,
        skipped,
    };
    Ok((net.pruned(), report))
}
