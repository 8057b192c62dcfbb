//! Single-neuron primitives shared by the constructive learners.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Matrix};
use crate::error::{Error, Result};
use crate::seeding;

/// Saturated sigmoid outputs are clamped to `[SIGMOID_FLOOR, 1 - SIGMOID_FLOOR]`.
pub const SIGMOID_FLOOR: f64 = 1e-12;

/// Ridge term added to the normal equations when they are singular.
pub const RIDGE_JITTER: f64 = 1e-10;

/// Where a neuron input comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InputRef {
    Feature(usize),
    Neuron(usize),
}

/// Sigmoid unit `1 / (1 + exp(-w0 - Σ wi ui))`; `weights[0]` is the bias.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmoidNeuron {
    pub weights: Vec<f64>,
    pub bindings: Vec<InputRef>,
}

impl SigmoidNeuron {
    pub fn new(bindings: Vec<InputRef>) -> Self {
        Self {
            weights: vec![0.0; bindings.len() + 1],
            bindings,
        }
    }

    pub fn input_count(&self) -> usize {
        self.bindings.len()
    }

    pub fn output(&self, inputs: &[f64]) -> Result<f64> {
        sigmoid_out(self, inputs)
    }
}

pub fn sigmoid(z: f64) -> f64 {
    let y = 1.0 / (1.0 + (-z).exp());
    y.clamp(SIGMOID_FLOOR, 1.0 - SIGMOID_FLOOR)
}

fn activation(weights: &[f64], inputs: &[f64]) -> f64 {
    weights[0]
        + weights[1..]
            .iter()
            .zip(inputs)
            .map(|(w, u)| w * u)
            .sum::<f64>()
}

pub fn sigmoid_out(neuron: &SigmoidNeuron, inputs: &[f64]) -> Result<f64> {
    if inputs.len() != neuron.input_count() || neuron.weights.len() != inputs.len() + 1 {
        return Err(Error::LengthMismatch {
            expected: neuron.input_count(),
            actual: inputs.len(),
        });
    }
    Ok(sigmoid(activation(&neuron.weights, inputs)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMethod {
    Gradient,
    LeastSquares,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub method: FitMethod,
    pub learning_rate: f64,
    pub epochs: usize,
    pub restarts: usize,
    pub seed: u64,
    pub decision_threshold: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            method: FitMethod::Gradient,
            learning_rate: 0.1,
            epochs: 200,
            restarts: 5,
            seed: 0,
            decision_threshold: 0.5,
        }
    }
}

impl FitConfig {
    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            seed,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 || self.restarts == 0 {
            return Err(Error::InvalidConfig("epochs and restarts must be >= 1".into()));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::InvalidConfig("learning rate must be positive".into()));
        }
        if !(self.decision_threshold > 0.0 && self.decision_threshold < 1.0) {
            return Err(Error::InvalidConfig("decision threshold must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreKind {
    ValidationErrorFraction,
    ExteriorCriterionSse,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CandidateScore {
    pub value: f64,
    pub kind: ScoreKind,
}

/// Anything that assigns a class index to a feature row.
pub trait Classifier {
    fn classify(&self, x: &[f64]) -> Result<usize>;
}

/// Fraction of rows whose predicted class differs from the label.
pub fn classification_error(model: &dyn Classifier, data: &Dataset) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut wrong = 0usize;
    for i in 0..data.len() {
        if model.classify(data.row(i))? != data.labels()[i] {
            wrong += 1;
        }
    }
    Ok(wrong as f64 / data.len() as f64)
}

/// Error fraction of sigmoid outputs against 0/1 targets.
pub fn output_error(outputs: &[f64], targets: &[f64], threshold: f64) -> Result<f64> {
    if outputs.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if outputs.len() != targets.len() {
        return Err(Error::LengthMismatch {
            expected: targets.len(),
            actual: outputs.len(),
        });
    }
    let wrong = outputs
        .iter()
        .zip(targets)
        .filter(|(y, t)| (**y >= threshold) != (**t >= 0.5))
        .count();
    Ok(wrong as f64 / outputs.len() as f64)
}

/// Sum-squared error of a sigmoid unit and its gradient with respect to the weights.
pub fn sigmoid_sse_gradient(weights: &[f64], inputs: &Matrix, targets: &[f64]) -> (f64, Vec<f64>) {
    let mut grad = vec![0.0; weights.len()];
    let mut sse = 0.0;
    for (row, &t) in inputs.iter_rows().zip(targets) {
        let y = sigmoid(activation(weights, row));
        let e = y - t;
        sse += e * e;
        let delta = 2.0 * e * y * (1.0 - y);
        grad[0] += delta;
        for (g, u) in grad[1..].iter_mut().zip(row) {
            *g += delta * u;
        }
    }
    (sse, grad)
}

fn check_targets(inputs: &Matrix, targets: &[f64]) -> Result<()> {
    if inputs.rows() != targets.len() {
        return Err(Error::LengthMismatch {
            expected: inputs.rows(),
            actual: targets.len(),
        });
    }
    if inputs.rows() < 2 {
        return Err(Error::InvalidDataset("need at least 2 rows to fit".into()));
    }
    let has0 = targets.iter().any(|&t| t < 0.5);
    let has1 = targets.iter().any(|&t| t >= 0.5);
    if !(has0 && has1) {
        return Err(Error::SingleClassTargets);
    }
    Ok(())
}

fn random_weights(len: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(-0.5..=0.5)).collect()
}

/// Batch gradient descent on the sigmoid sum-squared error.
///
/// Each step moves by `learning_rate` times the per-row mean gradient. The
/// restart with the lowest final training SSE wins; ties keep the earlier restart.
pub fn fit_sigmoid_weights(inputs: &Matrix, targets: &[f64], cfg: &FitConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    check_targets(inputs, targets)?;
    if cfg.method != FitMethod::Gradient {
        return Err(Error::InvalidConfig(
            "sigmoid neurons are fitted by gradient descent".into(),
        ));
    }
    let n = inputs.rows() as f64;
    let len = inputs.cols() + 1;
    let mut best: Option<(f64, Vec<f64>)> = None;
    for restart in 0..cfg.restarts {
        let mut rng = seeding::rng_for(cfg.seed, &[restart as u64]);
        let mut w = random_weights(len, &mut rng);
        for _ in 0..cfg.epochs {
            let (_, grad) = sigmoid_sse_gradient(&w, inputs, targets);
            for (wi, g) in w.iter_mut().zip(&grad) {
                *wi -= cfg.learning_rate * g / n;
            }
        }
        let (sse, _) = sigmoid_sse_gradient(&w, inputs, targets);
        if !sse.is_finite() || w.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("sigmoid fit"));
        }
        if best.as_ref().map_or(true, |(b, _)| sse < *b) {
            best = Some((sse, w));
        }
    }
    Ok(best.map(|(_, w)| w).expect("restarts >= 1"))
}

/// Fits `neuron` on its resolved input rows.
pub fn fit_neuron(
    neuron: &SigmoidNeuron,
    inputs: &Matrix,
    targets: &[f64],
    cfg: &FitConfig,
) -> Result<SigmoidNeuron> {
    if inputs.cols() != neuron.input_count() {
        return Err(Error::LengthMismatch {
            expected: neuron.input_count(),
            actual: inputs.cols(),
        });
    }
    Ok(SigmoidNeuron {
        weights: fit_sigmoid_weights(inputs, targets, cfg)?,
        bindings: neuron.bindings.clone(),
    })
}

pub fn sigmoid_outputs(weights: &[f64], inputs: &Matrix) -> Vec<f64> {
    inputs.iter_rows().map(|row| sigmoid(activation(weights, row))).collect()
}

/// Least squares weights for a design matrix whose columns are the basis terms
/// (including the constant column). Solves the normal equations, retrying with
/// ridge jitter when they are singular.
pub fn least_squares_fit(design: &Matrix, targets: &[f64]) -> Result<Vec<f64>> {
    let (n, p) = (design.rows(), design.cols());
    if targets.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: targets.len(),
        });
    }
    if n < p {
        return Err(Error::Underdetermined { rows: n, cols: p });
    }
    let x = DMatrix::from_row_slice(n, p, design.as_slice());
    let y = DVector::from_column_slice(targets);
    let xtx = x.transpose() * &x;
    let xty = x.transpose() * y;

    let solve = |a: DMatrix<f64>| -> Option<Vec<f64>> {
        let sol = a.cholesky()?.solve(&xty);
        sol.iter().all(|v| v.is_finite()).then(|| sol.iter().copied().collect())
    };
    if let Some(w) = solve(xtx.clone()) {
        // A numerically singular system can still factor; accept it only if it
        // actually satisfies the normal equations.
        let w_vec = DVector::from_column_slice(&w);
        let resid = (&xtx * &w_vec - &xty).norm();
        if resid <= 1e-8 * (1.0 + xty.norm()) {
            return Ok(w);
        }
    }
    let jittered = xtx + DMatrix::identity(p, p) * RIDGE_JITTER;
    solve(jittered).ok_or(Error::RankDeficient)
}

/// Sum of squared residuals on the validation rows.
pub fn exterior_criterion(predictions: &[f64], targets: &[f64]) -> Result<CandidateScore> {
    if predictions.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if predictions.len() != targets.len() {
        return Err(Error::LengthMismatch {
            expected: targets.len(),
            actual: predictions.len(),
        });
    }
    let value = predictions
        .iter()
        .zip(targets)
        .map(|(g, y)| (g - y) * (g - y))
        .sum();
    Ok(CandidateScore {
        value,
        kind: ScoreKind::ExteriorCriterionSse,
    })
}

/// Linear-in-weights prediction `w · row`.
pub fn linear_outputs(weights: &[f64], design: &Matrix) -> Vec<f64> {
    design
        .iter_rows()
        .map(|row| row.iter().zip(weights).map(|(a, b)| a * b).sum())
        .collect()
}

/// SSE of a linear-in-weights model and its gradient.
pub fn linear_sse_gradient(weights: &[f64], design: &Matrix, targets: &[f64]) -> (f64, Vec<f64>) {
    let mut grad = vec![0.0; weights.len()];
    let mut sse = 0.0;
    for (row, &t) in design.iter_rows().zip(targets) {
        let e = row.iter().zip(weights).map(|(a, b)| a * b).sum::<f64>() - t;
        sse += e * e;
        for (g, v) in grad.iter_mut().zip(row) {
            *g += 2.0 * e * v;
        }
    }
    (sse, grad)
}

/// Gradient descent for linear-in-weights neurons, same protocol as
/// [`fit_sigmoid_weights`]. `design` already contains the constant column.
///
/// The step is additionally divided by `max(1, mean ‖row‖²)`, which bounds the
/// curvature of the mean SSE and keeps the iteration stable on products of
/// large inputs.
pub fn fit_linear_gradient(design: &Matrix, targets: &[f64], cfg: &FitConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    if design.rows() != targets.len() {
        return Err(Error::LengthMismatch {
            expected: design.rows(),
            actual: targets.len(),
        });
    }
    if design.rows() == 0 {
        return Err(Error::EmptyDataset);
    }
    let n = design.rows() as f64;
    let scale = (design.as_slice().iter().map(|v| v * v).sum::<f64>() / n).max(1.0);
    let step = cfg.learning_rate / (n * scale);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for restart in 0..cfg.restarts {
        let mut rng = seeding::rng_for(cfg.seed, &[restart as u64]);
        let mut w = random_weights(design.cols(), &mut rng);
        for _ in 0..cfg.epochs {
            let (_, grad) = linear_sse_gradient(&w, design, targets);
            for (wi, g) in w.iter_mut().zip(&grad) {
                *wi -= step * g;
            }
        }
        let (sse, _) = linear_sse_gradient(&w, design, targets);
        if !sse.is_finite() {
            return Err(Error::NonFinite("polynomial fit"));
        }
        if best.as_ref().map_or(true, |(b, _)| sse < *b) {
            best = Some((sse, w));
        }
    }
    Ok(best.map(|(_, w)| w).expect("restarts >= 1"))
}

/// Fits a linear-in-weights neuron by the configured method.
pub fn fit_linear(design: &Matrix, targets: &[f64], cfg: &FitConfig) -> Result<Vec<f64>> {
    match cfg.method {
        FitMethod::LeastSquares => least_squares_fit(design, targets),
        FitMethod::Gradient => fit_linear_gradient(design, targets, cfg),
    }
}
