//! Linear machines and pairwise neural decision trees.
//!
//! A linear machine keeps one weight vector per class and labels an input with
//! the class whose discriminant `g_j(x) = w^j·(1, x)` is largest. Weights are
//! learned by error correction wrapped in the pocket algorithm with ratchet.
//! Multi-class problems can also be split into one two-class threshold unit
//! per class pair whose ±1 votes are summed into per-class scores.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::neurocore::Classifier;
use crate::seeding;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearMachine {
    /// `weights[j][0]` multiplies the constant input `x_0 = 1`.
    pub weights: Vec<Vec<f64>>,
}

fn augmented_dot(w: &[f64], x: &[f64]) -> f64 {
    w[0] + w[1..].iter().zip(x).map(|(a, b)| a * b).sum::<f64>()
}

/// Index of the largest value, lowest index on ties.
fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

impl LinearMachine {
    pub fn zeros(classes: usize, m: usize) -> Result<Self> {
        Self::from_weights(vec![vec![0.0; m + 1]; classes])
    }

    pub fn from_weights(weights: Vec<Vec<f64>>) -> Result<Self> {
        if weights.len() < 2 {
            return Err(Error::TooFewClasses);
        }
        let len = weights[0].len();
        if len == 0 {
            return Err(Error::InvalidConfig("weight vectors need a bias term".into()));
        }
        if let Some(w) = weights.iter().find(|w| w.len() != len) {
            return Err(Error::LengthMismatch {
                expected: len,
                actual: w.len(),
            });
        }
        Ok(Self { weights })
    }

    pub fn class_count(&self) -> usize {
        self.weights.len()
    }

    pub fn n_features(&self) -> usize {
        self.weights[0].len() - 1
    }

    pub fn discriminants(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n_features() {
            return Err(Error::LengthMismatch {
                expected: self.n_features(),
                actual: x.len(),
            });
        }
        Ok(self.weights.iter().map(|w| augmented_dot(w, x)).collect())
    }

    /// Sum of absolute weights over all classes.
    pub fn magnitude(&self) -> f64 {
        self.weights.iter().flatten().map(|w| w.abs()).sum()
    }

    pub fn accuracy(&self, data: &Dataset) -> Result<f64> {
        if data.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut hits = 0;
        for i in 0..data.len() {
            if wta_classify(self, data.row(i))? == data.labels()[i] {
                hits += 1;
            }
        }
        Ok(hits as f64 / data.len() as f64)
    }
}

/// Winner-take-all decision.
pub fn wta_classify(lm: &LinearMachine, x: &[f64]) -> Result<usize> {
    Ok(argmax(&lm.discriminants(x)?))
}

impl Classifier for LinearMachine {
    fn classify(&self, x: &[f64]) -> Result<usize> {
        wta_classify(self, x)
    }
}

/// Moves the true class towards `x` and the wrongly predicted class away.
pub fn error_correct(
    lm: &mut LinearMachine,
    x: &[f64],
    true_class: usize,
    predicted: usize,
    c: f64,
) -> Result<()> {
    if true_class == predicted {
        return Err(Error::InvalidConfig(
            "error correction needs distinct true and predicted classes".into(),
        ));
    }
    let r = lm.class_count();
    if true_class >= r || predicted >= r {
        return Err(Error::InvalidConfig(format!("class index out of range for {r} classes")));
    }
    if x.len() != lm.n_features() {
        return Err(Error::LengthMismatch {
            expected: lm.n_features(),
            actual: x.len(),
        });
    }
    let step = |w: &mut Vec<f64>, sign: f64| {
        w[0] += sign * c;
        for (wi, xi) in w[1..].iter_mut().zip(x) {
            *wi += sign * c * xi;
        }
    };
    step(&mut lm.weights[true_class], 1.0);
    step(&mut lm.weights[predicted], -1.0);
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermalSchedule {
    pub beta: f64,
    pub epsilon: f64,
    pub a: f64,
    pub b: f64,
}

impl Default for ThermalSchedule {
    fn default() -> Self {
        Self {
            beta: 2.0,
            epsilon: 0.11,
            a: 0.99,
            b: 0.01,
        }
    }
}

impl ThermalSchedule {
    fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.epsilon > 0.1 && self.a > 0.0 && self.b > 0.0) {
            return Err(Error::InvalidConfig(
                "thermal schedule needs beta > 0, epsilon > 0.1, a > 0, b > 0".into(),
            ));
        }
        Ok(())
    }

    /// `β / (β + k²)`.
    pub fn step_size(&self, k: f64) -> f64 {
        self.beta / (self.beta + k * k)
    }

    /// `β := aβ − b`; returns whether β is still positive.
    pub fn anneal(&mut self) -> bool {
        self.beta = self.a * self.beta - self.b;
        self.beta > 0.0
    }
}

/// Correction size for a misclassified `x` of class `j` predicted as `i`.
pub fn thermal_correction(sched: &ThermalSchedule, w_j: &[f64], w_i: &[f64], x: &[f64]) -> Result<f64> {
    if w_j.len() != x.len() + 1 || w_i.len() != w_j.len() {
        return Err(Error::LengthMismatch {
            expected: x.len() + 1,
            actual: w_j.len().min(w_i.len()),
        });
    }
    let norm = 1.0 + x.iter().map(|v| v * v).sum::<f64>();
    let diff = augmented_dot(w_j, x) - augmented_dot(w_i, x);
    let k = diff / (2.0 * norm) + sched.epsilon;
    Ok(sched.step_size(k))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PocketConfig {
    /// Epoch budget; `None` uses one epoch per training example.
    pub epochs: Option<usize>,
    /// Fixed correction size, ignored when `thermal` is set.
    pub c: f64,
    pub use_ratchet: bool,
    pub thermal: Option<ThermalSchedule>,
    pub seed: u64,
}

impl Default for PocketConfig {
    fn default() -> Self {
        Self {
            epochs: None,
            c: 1.0,
            use_ratchet: true,
            thermal: None,
            seed: 0,
        }
    }
}

impl PocketConfig {
    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    fn validate(&self) -> Result<()> {
        if self.epochs == Some(0) {
            return Err(Error::InvalidConfig("epoch budget must be >= 1".into()));
        }
        if !(self.c > 0.0) || !self.c.is_finite() {
            return Err(Error::InvalidConfig("correction size must be positive".into()));
        }
        if let Some(t) = &self.thermal {
            t.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PocketState {
    pub pocket_weights: LinearMachine,
    /// Longest run of consecutive correct draws that earned a pocket update.
    pub pocket_run: usize,
    pub pocket_accuracy: f64,
    /// Length of the current run when training stopped.
    pub run: usize,
    pub epoch_budget: usize,
    pub epochs_run: usize,
    /// Pocket accuracy after initialisation and after every replacement.
    pub accuracy_trace: Vec<f64>,
    /// Pocket run length after initialisation and after every replacement.
    pub run_trace: Vec<usize>,
    /// Final temperature when the thermal rule is on.
    pub beta: Option<f64>,
}

/// Pocket training with optional ratchet.
///
/// Each epoch draws `n` random training rows. A misclassified row triggers an
/// error correction and resets the run counter. When a run of correct draws
/// grows past the pocket's run, the full training accuracy is computed and the
/// current weights go into the pocket (with the ratchet, only when that
/// accuracy is strictly higher). Training ends early once the pocket
/// classifies every training row correctly.
pub fn train_pocket_ratchet(
    init: &LinearMachine,
    train: &Dataset,
    cfg: &PocketConfig,
) -> Result<(LinearMachine, PocketState)> {
    cfg.validate()?;
    if train.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if train.n_features() != init.n_features() || train.class_count() > init.class_count() {
        return Err(Error::LengthMismatch {
            expected: init.n_features(),
            actual: train.n_features(),
        });
    }
    let n = train.len();
    let budget = cfg.epochs.unwrap_or(n);
    let mut rng = seeding::rng(cfg.seed);
    let mut thermal = cfg.thermal.clone();

    let mut w = init.clone();
    let mut pocket = w.clone();
    let mut a_p = w.accuracy(train)?;
    let mut l_p = 0usize;
    let mut run = 0usize;
    let mut accuracy_trace = vec![a_p];
    let mut run_trace = vec![0];
    // accuracy of `w` if computed since its last change
    let mut cached: Option<f64> = Some(a_p);

    let mut prev_mag = w.magnitude();
    let mut prev_rising = false;
    let mut epochs_run = 0;
    'epochs: for _ in 0..budget {
        if a_p >= 1.0 {
            break;
        }
        epochs_run += 1;
        for _ in 0..n {
            let i = rng.gen_range(0..n);
            let x = train.row(i);
            let truth = train.labels()[i];
            let predicted = wta_classify(&w, x)?;
            if predicted != truth {
                let c = match &thermal {
                    Some(t) => thermal_correction(t, &w.weights[truth], &w.weights[predicted], x)?,
                    None => cfg.c,
                };
                error_correct(&mut w, x, truth, predicted, c)?;
                cached = None;
                run = 0;
                continue;
            }
            run += 1;
            if run <= l_p {
                continue;
            }
            let a = match cached {
                Some(a) => a,
                None => {
                    let a = w.accuracy(train)?;
                    cached = Some(a);
                    a
                }
            };
            if !cfg.use_ratchet || a > a_p {
                pocket = w.clone();
                l_p = run;
                a_p = a;
                accuracy_trace.push(a_p);
                run_trace.push(l_p);
                if a_p >= 1.0 {
                    break 'epochs;
                }
            }
        }
        if let Some(t) = thermal.as_mut() {
            let mag = w.magnitude();
            let falling = mag < prev_mag;
            if falling && prev_rising && !t.anneal() {
                break;
            }
            prev_rising = mag > prev_mag;
            prev_mag = mag;
        }
    }

    let state = PocketState {
        pocket_weights: pocket.clone(),
        pocket_run: l_p,
        pocket_accuracy: a_p,
        run,
        epoch_budget: budget,
        epochs_run,
        accuracy_trace,
        run_trace,
        beta: thermal.map(|t| t.beta),
    };
    Ok((pocket, state))
}

/// Two-class threshold unit on a subset of the features.
///
/// The raw value `w·(1, x_S)` maps to +1 (class 0) when it is `>= 0` and to
/// −1 (class 1) otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearTest {
    pub features: Vec<usize>,
    pub weights: Vec<f64>,
    /// Validation accuracy measured when the test was built.
    pub accuracy: f64,
}

impl LinearTest {
    pub fn raw(&self, x: &[f64]) -> Result<f64> {
        let mut s = self.weights[0];
        for (w, &j) in self.weights[1..].iter().zip(&self.features) {
            s += w * x.get(j).ok_or(Error::MissingFeature(j))?;
        }
        Ok(s)
    }

    pub fn output(&self, x: &[f64]) -> Result<i32> {
        Ok(if self.raw(x)? >= 0.0 { 1 } else { -1 })
    }

    pub fn feature_count(&self) -> usize {
        self.features.len()
    }
}

impl Classifier for LinearTest {
    fn classify(&self, x: &[f64]) -> Result<usize> {
        Ok(usize::from(self.output(x)? < 0))
    }
}

fn test_accuracy(test: &LinearTest, data: &Dataset) -> Result<f64> {
    let mut hits = 0;
    for i in 0..data.len() {
        if test.classify(data.row(i))? == data.labels()[i] {
            hits += 1;
        }
    }
    Ok(hits as f64 / data.len() as f64)
}

fn require_binary(train: &Dataset, val: &Dataset) -> Result<()> {
    if train.class_count() != 2 || val.class_count() != 2 {
        return Err(Error::InvalidConfig("linear tests separate exactly two classes".into()));
    }
    if train.is_empty() || val.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if train.n_features() == 0 {
        return Err(Error::InvalidConfig("need at least one feature".into()));
    }
    Ok(())
}

/// Fits a threshold unit on `features` with pocket training and scores it on `val`.
pub fn fit_linear_test(
    train: &Dataset,
    val: &Dataset,
    features: &[usize],
    cfg: &PocketConfig,
) -> Result<LinearTest> {
    let projected = train.project(features);
    let init = LinearMachine::zeros(2, features.len())?;
    let (lm, _) = train_pocket_ratchet(&init, &projected, cfg)?;
    let weights = lm.weights[0]
        .iter()
        .zip(&lm.weights[1])
        .map(|(a, b)| a - b)
        .collect();
    let mut test = LinearTest {
        features: features.to_vec(),
        weights,
        accuracy: 0.0,
    };
    test.accuracy = test_accuracy(&test, val)?;
    Ok(test)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SfsResult {
    pub test: LinearTest,
    /// Best candidate accuracy at each step, with the feature it added.
    pub trace: Vec<(usize, f64)>,
}

/// Bottom-up sequential feature selection.
///
/// Starting from the empty set, each step adds the feature whose test has the
/// highest validation accuracy. The search stops when every feature is in or
/// when the step's best accuracy is more than 0.10 below the best seen. The
/// returned test is the most accurate one found; later steps must beat it
/// strictly, so ties keep the smaller subset.
pub fn sfs_select(train: &Dataset, val: &Dataset, cfg: &PocketConfig) -> Result<SfsResult> {
    require_binary(train, val)?;
    let m = train.n_features();
    let mut selected: Vec<usize> = Vec::new();
    let mut best: Option<LinearTest> = None;
    let mut trace = Vec::new();
    while selected.len() < m {
        let mut step_best: Option<LinearTest> = None;
        for f in (0..m).filter(|f| !selected.contains(f)) {
            let mut subset = selected.clone();
            subset.push(f);
            let fit = cfg.with_seed(seeding::derive_seed(cfg.seed, &[selected.len() as u64, f as u64]));
            let t = fit_linear_test(train, val, &subset, &fit)?;
            if step_best.as_ref().map_or(true, |b| t.accuracy > b.accuracy) {
                step_best = Some(t);
            }
        }
        let Some(step_best) = step_best else { break };
        let added = *step_best.features.last().expect("non-empty subset");
        trace.push((added, step_best.accuracy));
        let best_acc = best.as_ref().map_or(f64::NEG_INFINITY, |b| b.accuracy);
        if step_best.accuracy < best_acc - 0.10 {
            break;
        }
        selected = step_best.features.clone();
        if step_best.accuracy > best_acc {
            best = Some(step_best);
        }
    }
    Ok(SfsResult {
        test: best.expect("at least one feature"),
        trace,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DtConfig {
    /// Maximum features per test; `None` allows all of them.
    pub n_f: Option<usize>,
    /// Number of roulette scans.
    pub attempts: usize,
    pub pocket: PocketConfig,
}

impl Default for DtConfig {
    fn default() -> Self {
        Self {
            n_f: None,
            attempts: 10,
            pocket: PocketConfig::default(),
        }
    }
}

/// Roulette-guided search for a multivariate test.
///
/// Features are ranked by the accuracy of their single-feature tests, scaled so
/// the best has probability 1. Each attempt walks the ranked pool and offers
/// feature `i` with probability `P(i)`; an offered feature stays in the test
/// only if the retrained test is more accurate. A scan ends when the test holds
/// `min(N_f, m)` features or the pool runs out. The best test over all attempts
/// is returned.
pub fn induce_dt(train: &Dataset, val: &Dataset, cfg: &DtConfig) -> Result<LinearTest> {
    require_binary(train, val)?;
    if cfg.attempts == 0 {
        return Err(Error::InvalidConfig("need at least one attempt".into()));
    }
    if cfg.n_f == Some(0) {
        return Err(Error::InvalidConfig("N_f must be >= 1".into()));
    }
    let m = train.n_features();
    let limit = cfg.n_f.unwrap_or(m).min(m);
    let seed = cfg.pocket.seed;

    let mut singles = Vec::with_capacity(m);
    for j in 0..m {
        let fit = cfg.pocket.with_seed(seeding::derive_seed(seed, &[0, j as u64]));
        singles.push(fit_linear_test(train, val, &[j], &fit)?);
    }
    let top = singles.iter().map(|t| t.accuracy).fold(0.0, f64::max);
    let prob: Vec<f64> = singles
        .iter()
        .map(|t| if top > 0.0 { t.accuracy / top } else { 1.0 })
        .collect();
    let mut pool: Vec<usize> = (0..m).collect();
    pool.sort_by(|&a, &b| prob[b].total_cmp(&prob[a]).then(a.cmp(&b)));

    let mut rng = seeding::rng_for(seed, &[1]);
    let mut best: Option<LinearTest> = None;
    for attempt in 0..cfg.attempts {
        let mut current: Option<LinearTest> = None;
        for (step, &f) in pool.iter().enumerate() {
            if current.as_ref().map_or(0, |t| t.feature_count()) >= limit {
                break;
            }
            let u: f64 = rng.gen();
            if !(prob[f] > u) {
                continue;
            }
            let candidate = match &current {
                None => singles[f].clone(),
                Some(t) => {
                    let mut subset = t.features.clone();
                    subset.push(f);
                    let fit = cfg.pocket.with_seed(seeding::derive_seed(
                        seed,
                        &[2, attempt as u64, step as u64],
                    ));
                    fit_linear_test(train, val, &subset, &fit)?
                }
            };
            if current.as_ref().map_or(true, |t| candidate.accuracy > t.accuracy) {
                current = Some(candidate);
            }
        }
        if let Some(t) = current {
            if best.as_ref().map_or(true, |b| t.accuracy > b.accuracy) {
                best = Some(t);
            }
        }
    }
    // the top-ranked feature has probability 1, so every scan accepts something
    best.ok_or_else(|| Error::Degenerate("no feature was accepted".into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestSelector {
    InduceDt,
    Sfs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseConfig {
    pub selector: TestSelector,
    pub dt: DtConfig,
}

impl Default for PairwiseConfig {
    fn default() -> Self {
        Self {
            selector: TestSelector::InduceDt,
            dt: DtConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairTest {
    pub i: usize,
    pub j: usize,
    /// Outputs +1 for class `i` and −1 for class `j`.
    pub test: LinearTest,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseTree {
    pub class_count: usize,
    /// One entry per pair `i < j`, in lexicographic order.
    pub tests: Vec<PairTest>,
    pub feature_names: Vec<String>,
}

/// Per-pair training summary.
#[derive(Debug, Clone, PartialEq)]
pub struct PairReport {
    pub i: usize,
    pub j: usize,
    /// Validation error of the pair's test on its two classes.
    pub error: f64,
    pub feature_count: usize,
}

fn pair_subset(data: &Dataset, i: usize, j: usize) -> Result<Dataset> {
    let idx: Vec<usize> = (0..data.len())
        .filter(|&k| data.labels()[k] == i || data.labels()[k] == j)
        .collect();
    let labels = idx
        .iter()
        .map(|&k| usize::from(data.labels()[k] == j))
        .collect();
    let sub = data.subset(&idx);
    Dataset::new(sub.features().clone(), labels, data.feature_names().to_vec(), 2)
}

/// Trains one threshold unit per class pair on the rows of those two classes.
pub fn train_pairwise_tree(
    train: &Dataset,
    val: &Dataset,
    cfg: &PairwiseConfig,
) -> Result<(PairwiseTree, Vec<PairReport>)> {
    let r = train.class_count();
    if r < 2 {
        return Err(Error::TooFewClasses);
    }
    let (tc, vc) = (train.class_counts(), val.class_counts());
    let mut tests = Vec::with_capacity(r * (r - 1) / 2);
    let mut reports = Vec::with_capacity(r * (r - 1) / 2);
    for i in 0..r {
        for j in i + 1..r {
            if tc[i] == 0 || tc[j] == 0 || vc.get(i).copied().unwrap_or(0) == 0 || vc.get(j).copied().unwrap_or(0) == 0
            {
                return Err(Error::EmptyClassPair(i, j));
            }
            let (t, v) = (pair_subset(train, i, j)?, pair_subset(val, i, j)?);
            let pair_seed = seeding::derive_seed(cfg.dt.pocket.seed, &[i as u64, j as u64]);
            let dt = DtConfig {
                pocket: cfg.dt.pocket.with_seed(pair_seed),
                ..cfg.dt.clone()
            };
            let test = match cfg.selector {
                TestSelector::InduceDt => induce_dt(&t, &v, &dt)?,
                TestSelector::Sfs => sfs_select(&t, &v, &dt.pocket)?.test,
            };
            reports.push(PairReport {
                i,
                j,
                error: 1.0 - test.accuracy,
                feature_count: test.feature_count(),
            });
            tests.push(PairTest { i, j, test });
        }
    }
    Ok((
        PairwiseTree {
            class_count: r,
            tests,
            feature_names: train.feature_names().to_vec(),
        },
        reports,
    ))
}

/// Sums pairwise votes into class scores `g_i = Σ_{k>i} f_{i/k} − Σ_{k<i} f_{k/i}`.
///
/// Returns the scores and the winning class (lowest index on ties).
pub fn combine_pairwise(r: usize, outputs: &BTreeMap<(usize, usize), i32>) -> Result<(Vec<f64>, usize)> {
    if r < 2 {
        return Err(Error::TooFewClasses);
    }
    let mut g = vec![0.0; r];
    for i in 0..r {
        for k in i + 1..r {
            let f = *outputs.get(&(i, k)).ok_or(Error::IncompletePairs(i, k))?;
            g[i] += f as f64;
            g[k] -= f as f64;
        }
    }
    let class = argmax(&g);
    Ok((g, class))
}

impl PairwiseTree {
    pub fn pair_outputs(&self, x: &[f64]) -> Result<BTreeMap<(usize, usize), i32>> {
        self.tests
            .iter()
            .map(|p| Ok(((p.i, p.j), p.test.output(x)?)))
            .collect()
    }

    pub fn scores(&self, x: &[f64]) -> Result<(Vec<f64>, usize)> {
        combine_pairwise(self.class_count, &self.pair_outputs(x)?)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for p in &self.tests {
            let _ = write!(out, "f_{}/{}: {:.4}", p.i, p.j, p.test.weights[0]);
            for (w, &f) in p.test.weights[1..].iter().zip(&p.test.features) {
                let sign = if *w < 0.0 { '-' } else { '+' };
                let _ = write!(out, " {sign} {:.4}*{}", w.abs(), self.feature_names[f]);
            }
            let _ = writeln!(out, "   (accuracy {:.4})", p.test.accuracy);
        }
        out
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph pairwise {\n  rankdir=LR;\n");
        let used: std::collections::BTreeSet<usize> = self
            .tests
            .iter()
            .flat_map(|p| p.test.features.iter().copied())
            .collect();
        for &f in &used {
            let _ = writeln!(out, "  x{f} [label=\"{}\", shape=ellipse];", self.feature_names[f]);
        }
        for p in &self.tests {
            let _ = writeln!(
                out,
                "  t{}_{} [label=\"f_{}/{}\", shape=box, style=filled, fillcolor=gray];",
                p.i, p.j, p.i, p.j
            );
            for &f in &p.test.features {
                let _ = writeln!(out, "  x{f} -> t{}_{};", p.i, p.j);
            }
        }
        for c in 0..self.class_count {
            let _ = writeln!(out, "  g{c} [label=\"g_{c}\", shape=doublecircle];");
        }
        for p in &self.tests {
            let _ = writeln!(out, "  t{}_{} -> g{} [label=\"+1\"];", p.i, p.j, p.i);
            let _ = writeln!(out, "  t{}_{} -> g{} [label=\"-1\"];", p.i, p.j, p.j);
        }
        out.push_str("}\n");
        out
    }
}

impl Classifier for PairwiseTree {
    fn classify(&self, x: &[f64]) -> Result<usize> {
        Ok(self.scores(x)?.1)
    }
}

/// CSV with one row per class pair: `pair,error,feature_count`.
pub fn pair_report_csv(reports: &[PairReport]) -> String {
    let mut out = String::from("pair,error,feature_count\n");
    for r in reports {
        let _ = writeln!(out, "{}/{},{},{}", r.i, r.j, r.error, r.feature_count);
    }
    out
}

impl LinearMachine {
    pub fn to_text(&self, feature_names: &[String]) -> String {
        let mut out = String::new();
        for (c, w) in self.weights.iter().enumerate() {
            let _ = write!(out, "g_{c} = {:.4}", w[0]);
            for (wi, name) in w[1..].iter().zip(feature_names) {
                let sign = if *wi < 0.0 { '-' } else { '+' };
                let _ = write!(out, " {sign} {:.4}*{name}", wi.abs());
            }
            out.push('\n');
        }
        out
    }

    /// Bipartite graph from inputs to class discriminants.
    pub fn to_dot(&self, feature_names: &[String]) -> String {
        let mut out = String::from("digraph linear_machine {\n  rankdir=LR;\n");
        for (j, name) in feature_names.iter().enumerate() {
            let _ = writeln!(out, "  x{j} [label=\"{name}\", shape=ellipse];");
        }
        for (c, w) in self.weights.iter().enumerate() {
            let _ = writeln!(out, "  g{c} [label=\"g_{c}\", shape=box, style=filled, fillcolor=gray];");
            for (j, wi) in w[1..].iter().enumerate() {
                let _ = writeln!(out, "  x{j} -> g{c} [label=\"{wi:.4}\"];");
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Distribution of segment-level decisions over `r` classes.
pub fn aggregate_segments(predictions: &[usize], r: usize) -> Result<Vec<f64>> {
    if predictions.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut counts = vec![0usize; r];
    for &p in predictions {
        *counts
            .get_mut(p)
            .ok_or_else(|| Error::InvalidConfig(format!("class {p} out of range for {r} classes")))? += 1;
    }
    let n = predictions.len() as f64;
    Ok(counts.into_iter().map(|c| c as f64 / n).collect())
}

/// Most frequent class of a distribution and its share.
pub fn top_class(distribution: &[f64]) -> (usize, f64) {
    let c = argmax(distribution);
    (c, distribution[c])
}
