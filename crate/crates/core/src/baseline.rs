//! Comparison baselines: a one-hidden-layer sigmoid network and PCA.

use std::fmt::Write as _;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Matrix};
use crate::error::{Error, Result};
use crate::neurocore::{sigmoid, Classifier};
use crate::seeding;

/// Principal components of centred data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaTransform {
    pub mean: Vec<f64>,
    /// Retained unit-length components, largest variance first.
    pub components: Vec<Vec<f64>>,
    /// Explained-variance fraction of every component (retained or not).
    pub explained: Vec<f64>,
}

/// Keeps the fewest leading components whose cumulative explained variance
/// reaches `variance_level`.
pub fn pca_fit(x: &Matrix, variance_level: f64) -> Result<PcaTransform> {
    if !(variance_level > 0.0 && variance_level <= 1.0) {
        return Err(Error::InvalidConfig("variance level must lie in (0, 1]".into()));
    }
    let (n, m) = (x.rows(), x.cols());
    if n < 2 || m == 0 {
        return Err(Error::InvalidDataset("PCA needs at least 2 rows and 1 column".into()));
    }
    let mean: Vec<f64> = (0..m).map(|j| x.column(j).iter().sum::<f64>() / n as f64).collect();
    let centred = DMatrix::from_fn(n, m, |i, j| x.get(i, j) - mean[j]);
    let cov = (centred.transpose() * &centred) / (n as f64 - 1.0);
    let total: f64 = cov.diagonal().iter().sum();
    if !(total > f64::EPSILON) {
        return Err(Error::Degenerate("all columns are constant".into()));
    }
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let explained: Vec<f64> = order
        .iter()
        .map(|&k| eig.eigenvalues[k].max(0.0) / total)
        .collect();

    let mut keep = m;
    let mut cum = 0.0;
    for (k, e) in explained.iter().enumerate() {
        cum += e;
        if cum >= variance_level - 1e-12 {
            keep = k + 1;
            break;
        }
    }
    let components = order[..keep]
        .iter()
        .map(|&k| {
            let mut v: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
            // fix the sign so the largest entry is positive
            let lead = v.iter().copied().fold(0.0f64, |a, b| if b.abs() > a.abs() { b } else { a });
            if lead < 0.0 {
                v.iter_mut().for_each(|c| *c = -*c);
            }
            v
        })
        .collect();
    Ok(PcaTransform {
        mean,
        components,
        explained,
    })
}

impl PcaTransform {
    pub fn retained(&self) -> usize {
        self.components.len()
    }

    pub fn transform_row(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.mean.len() {
            return Err(Error::LengthMismatch {
                expected: self.mean.len(),
                actual: x.len(),
            });
        }
        Ok(self
            .components
            .iter()
            .map(|a| a.iter().zip(x).zip(&self.mean).map(|((a, v), mu)| a * (v - mu)).sum())
            .collect())
    }

    pub fn inverse_row(&self, z: &[f64]) -> Vec<f64> {
        let mut x = self.mean.clone();
        for (a, zk) in self.components.iter().zip(z) {
            for (xi, ai) in x.iter_mut().zip(a) {
                *xi += zk * ai;
            }
        }
        x
    }

    /// Projects a dataset onto the retained components, named `pc1..pck`.
    pub fn transform(&self, ds: &Dataset) -> Result<Dataset> {
        let mut data = Vec::with_capacity(ds.len() * self.retained());
        for i in 0..ds.len() {
            data.extend(self.transform_row(ds.row(i))?);
        }
        let names = (1..=self.retained()).map(|k| format!("pc{k}")).collect();
        ds.with_features(Matrix::from_vec(ds.len(), self.retained(), data)?, names)
    }
}

/// One hidden layer of sigmoid units feeding sigmoid outputs.
///
/// Row `k` of `hidden` holds `[bias, w_1..w_m]` of hidden unit `k`; row `o` of
/// `output` holds `[bias, v_1..v_h]` of output unit `o`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FnnModel {
    pub inputs: usize,
    pub hidden: Vec<Vec<f64>>,
    pub output: Vec<Vec<f64>>,
}

impl FnnModel {
    pub fn zeros(inputs: usize, hidden: usize, outputs: usize) -> Self {
        Self {
            inputs,
            hidden: vec![vec![0.0; inputs + 1]; hidden],
            output: vec![vec![0.0; hidden + 1]; outputs],
        }
    }

    fn random(inputs: usize, hidden: usize, outputs: usize, rng: &mut impl Rng) -> Self {
        let mut m = Self::zeros(inputs, hidden, outputs);
        for w in m.params_mut() {
            *w = rng.gen_range(-0.5..=0.5);
        }
        m
    }

    pub fn output_count(&self) -> usize {
        self.output.len()
    }

    pub fn param_count(&self) -> usize {
        self.hidden.iter().chain(&self.output).map(Vec::len).sum()
    }

    /// All weights, hidden layer first, row by row.
    pub fn params(&self) -> Vec<f64> {
        self.hidden.iter().chain(&self.output).flatten().copied().collect()
    }

    fn params_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.hidden.iter_mut().chain(self.output.iter_mut()).flatten()
    }

    pub fn set_params(&mut self, p: &[f64]) -> Result<()> {
        if p.len() != self.param_count() {
            return Err(Error::LengthMismatch {
                expected: self.param_count(),
                actual: p.len(),
            });
        }
        for (w, v) in self.params_mut().zip(p) {
            *w = *v;
        }
        Ok(())
    }

    /// Hidden activations and outputs for one row.
    fn forward(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let h: Vec<f64> = self
            .hidden
            .iter()
            .map(|w| sigmoid(w[0] + w[1..].iter().zip(x).map(|(a, b)| a * b).sum::<f64>()))
            .collect();
        let y = self
            .output
            .iter()
            .map(|v| sigmoid(v[0] + v[1..].iter().zip(&h).map(|(a, b)| a * b).sum::<f64>()))
            .collect();
        (h, y)
    }

    pub fn outputs(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.inputs {
            return Err(Error::LengthMismatch {
                expected: self.inputs,
                actual: x.len(),
            });
        }
        Ok(self.forward(x).1)
    }

    pub fn to_text(&self, feature_names: &[String]) -> String {
        let mut out = String::new();
        for (k, w) in self.hidden.iter().enumerate() {
            let _ = write!(out, "h{} = sigmoid({:.6}", k + 1, w[0]);
            for (wi, name) in w[1..].iter().zip(feature_names) {
                let _ = write!(out, " {:+.6}*{name}", wi);
            }
            out.push_str(")\n");
        }
        for (o, v) in self.output.iter().enumerate() {
            let _ = write!(out, "y{} = sigmoid({:.6}", o + 1, v[0]);
            for (k, vi) in v[1..].iter().enumerate() {
                let _ = write!(out, " {:+.6}*h{}", vi, k + 1);
            }
            out.push_str(")\n");
        }
        out
    }
}

/// Class and score: the 0.5 threshold for one output, argmax otherwise.
pub fn predict_fnn(model: &FnnModel, x: &[f64]) -> Result<(usize, f64)> {
    let y = model.outputs(x)?;
    if y.len() == 1 {
        return Ok((usize::from(y[0] >= 0.5), y[0]));
    }
    let mut best = 0;
    for (k, v) in y.iter().enumerate() {
        if *v > y[best] {
            best = k;
        }
    }
    Ok((best, y[best]))
}

impl Classifier for FnnModel {
    fn classify(&self, x: &[f64]) -> Result<usize> {
        Ok(predict_fnn(self, x)?.0)
    }
}

/// Target vectors: a single 0/1 output for two classes, one-hot otherwise.
pub fn fnn_targets(ds: &Dataset) -> Vec<Vec<f64>> {
    let r = ds.class_count();
    ds.labels()
        .iter()
        .map(|&l| {
            if r == 2 {
                vec![l as f64]
            } else {
                (0..r).map(|c| f64::from(u8::from(c == l))).collect()
            }
        })
        .collect()
}

/// Sum-squared error over all rows and outputs, with its gradient in
/// [`FnnModel::params`] order.
pub fn fnn_sse_gradient(model: &FnnModel, x: &Matrix, targets: &[Vec<f64>]) -> (f64, Vec<f64>) {
    let nh = model.hidden.len();
    let mut g_hidden = vec![vec![0.0; model.inputs + 1]; nh];
    let mut g_out = vec![vec![0.0; nh + 1]; model.output.len()];
    let mut sse = 0.0;
    let mut back = vec![0.0; nh];
    for (row, t) in x.iter_rows().zip(targets) {
        let (h, y) = model.forward(row);
        back.iter_mut().for_each(|b| *b = 0.0);
        for (o, (yo, to)) in y.iter().zip(t).enumerate() {
            let e = yo - to;
            sse += e * e;
            let delta = 2.0 * e * yo * (1.0 - yo);
            g_out[o][0] += delta;
            for k in 0..nh {
                g_out[o][k + 1] += delta * h[k];
                back[k] += delta * model.output[o][k + 1];
            }
        }
        for k in 0..nh {
            let dk = back[k] * h[k] * (1.0 - h[k]);
            g_hidden[k][0] += dk;
            for (g, u) in g_hidden[k][1..].iter_mut().zip(row) {
                *g += dk * u;
            }
        }
    }
    let grad = g_hidden.into_iter().chain(g_out).flatten().collect();
    (sse, grad)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FnnConfig {
    pub learning_rate: f64,
    pub max_epochs: usize,
    /// Epochs without a new validation minimum before stopping.
    pub patience: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for FnnConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.5,
            max_epochs: 2000,
            patience: 100,
            restarts: 10,
            seed: 0,
        }
    }
}

impl FnnConfig {
    fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) || self.max_epochs == 0 || self.restarts == 0 {
            return Err(Error::InvalidConfig(
                "network training needs a positive rate, epochs and restarts".into(),
            ));
        }
        Ok(())
    }
}

/// Per-epoch errors of one training run. Entry 0 is the initial weights.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainingCurve {
    /// Training classification error.
    pub train_error: Vec<f64>,
    /// Validation classification error.
    pub val_error: Vec<f64>,
    /// Validation mean squared error, used to break ties.
    pub val_mse: Vec<f64>,
    pub best_epoch: usize,
}

fn evaluate(model: &FnnModel, x: &Matrix, labels: &[usize], targets: &[Vec<f64>]) -> (f64, f64) {
    let mut wrong = 0;
    let mut sq = 0.0;
    for ((row, &l), t) in x.iter_rows().zip(labels).zip(targets) {
        let y = model.forward(row).1;
        let class = if y.len() == 1 {
            usize::from(y[0] >= 0.5)
        } else {
            (0..y.len()).fold(0, |b, k| if y[k] > y[b] { k } else { b })
        };
        if class != l {
            wrong += 1;
        }
        sq += y.iter().zip(t).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
    }
    let n = labels.len() as f64;
    (wrong as f64 / n, sq / (n * targets[0].len() as f64))
}

fn better(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0 < b.0 || (a.0 == b.0 && a.1 < b.1)
}

/// One early-stopped gradient descent run from the weights of `restart`.
///
/// Returns `None` when the loss became non-finite.
pub fn train_fnn_run(
    train: &Dataset,
    val: &Dataset,
    hidden: usize,
    cfg: &FnnConfig,
    restart: usize,
) -> Result<Option<(FnnModel, TrainingCurve)>> {
    cfg.validate()?;
    if hidden == 0 {
        return Err(Error::InvalidConfig("hidden layer needs at least one unit".into()));
    }
    if train.is_empty() || val.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let outputs = if train.class_count() == 2 { 1 } else { train.class_count() };
    let t_train = fnn_targets(train);
    let t_val = fnn_targets(val);
    let n = train.len() as f64;
    let mut rng = seeding::rng_for(cfg.seed, &[restart as u64]);
    let mut model = FnnModel::random(train.n_features(), hidden, outputs, &mut rng);

    let mut curve = TrainingCurve::default();
    let mut best = (f64::INFINITY, f64::INFINITY);
    let mut snapshot = model.clone();
    for epoch in 0..=cfg.max_epochs {
        let (tr, _) = evaluate(&model, train.features(), train.labels(), &t_train);
        let (ve, vm) = evaluate(&model, val.features(), val.labels(), &t_val);
        if !vm.is_finite() {
            return Ok(None);
        }
        curve.train_error.push(tr);
        curve.val_error.push(ve);
        curve.val_mse.push(vm);
        if better((ve, vm), best) {
            best = (ve, vm);
            curve.best_epoch = epoch;
            snapshot = model.clone();
        }
        if epoch == cfg.max_epochs || epoch - curve.best_epoch >= cfg.patience {
            break;
        }
        let (sse, grad) = fnn_sse_gradient(&model, train.features(), &t_train);
        if !sse.is_finite() {
            return Ok(None);
        }
        for (w, g) in model.params_mut().zip(&grad) {
            *w -= cfg.learning_rate * g / n;
        }
    }
    Ok(Some((snapshot, curve)))
}

/// Best of `restarts` early-stopped runs by validation error, then validation
/// MSE, then restart index.
pub fn train_fnn(train: &Dataset, val: &Dataset, hidden: usize, cfg: &FnnConfig) -> Result<(FnnModel, TrainingCurve)> {
    let mut best: Option<((f64, f64), FnnModel, TrainingCurve)> = None;
    for restart in 0..cfg.restarts {
        let Some((model, curve)) = train_fnn_run(train, val, hidden, cfg, restart)? else {
            continue;
        };
        let key = (curve.val_error[curve.best_epoch], curve.val_mse[curve.best_epoch]);
        if best.as_ref().map_or(true, |(b, _, _)| better(key, *b)) {
            best = Some((key, model, curve));
        }
    }
    best.map(|(_, m, c)| (m, c)).ok_or(Error::NonFinite("network training"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{gen_separable, gen_xor, split, SplitSpec};
    use crate::neurocore::classification_error;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn pca_rank_one() {
        let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64, 2.0 * i as f64]).collect();
        let p = pca_fit(&Matrix::from_rows(&rows).unwrap(), 0.99).unwrap();
        assert_eq!(p.retained(), 1);
        assert_abs_diff_eq!(p.explained[0], 1.0, epsilon = 1e-12);
        let s = 1.0 / 5f64.sqrt();
        assert_abs_diff_eq!(p.components[0][0], s, epsilon = 1e-12);
        assert_abs_diff_eq!(p.components[0][1], 2.0 * s, epsilon = 1e-12);
    }

    #[test]
    fn pca_isotropic() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let data: Vec<f64> = (0..20_000).map(|_| rng.sample(StandardNormal)).collect();
        let p = pca_fit(&Matrix::from_vec(10_000, 2, data).unwrap(), 0.99).unwrap();
        assert_eq!(p.retained(), 2);
        for e in &p.explained {
            assert!((e - 0.5).abs() < 0.05);
        }
    }

    #[test]
    fn pca_orthonormal_and_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 60;
        let mut x = Matrix::zeros(n, 4);
        for i in 0..n {
            let a: f64 = rng.sample(StandardNormal);
            let b: f64 = rng.sample(StandardNormal);
            x.set(i, 0, a);
            x.set(i, 1, a + 0.3 * rng.sample::<f64, _>(StandardNormal));
            x.set(i, 2, rng.sample(StandardNormal));
            x.set(i, 3, 3.0 * b);
        }
        let p = pca_fit(&x, 1.0).unwrap();
        assert_eq!(p.retained(), 4);
        assert!(p.explained.windows(2).all(|w| w[0] >= w[1]));
        for (i, a) in p.components.iter().enumerate() {
            for (j, b) in p.components.iter().enumerate() {
                let d: f64 = a.iter().zip(b).map(|(u, v)| u * v).sum();
                assert_abs_diff_eq!(d, if i == j { 1.0 } else { 0.0 }, epsilon = 1e-8);
            }
        }
        let z: Vec<Vec<f64>> = x.iter_rows().map(|r| p.transform_row(r).unwrap()).collect();
        for r in 0..4 {
            for s in 0..r {
                let cov: f64 = z.iter().map(|v| v[r] * v[s]).sum::<f64>() / (n as f64 - 1.0);
                assert!(cov.abs() < 1e-8);
            }
        }
        for (row, zr) in x.iter_rows().zip(&z) {
            for (a, b) in row.iter().zip(p.inverse_row(zr)) {
                assert_abs_diff_eq!(*a, b, epsilon = 1e-9);
            }
        }
        let constant = Matrix::from_rows(&[vec![1.0, 2.0], vec![1.0, 2.0]]).unwrap();
        assert!(matches!(pca_fit(&constant, 0.9), Err(Error::Degenerate(_))));
    }

    #[test]
    fn forward_values() {
        let m = FnnModel::zeros(3, 2, 1);
        assert_eq!(predict_fnn(&m, &[1.0, -2.0, 3.0]).unwrap(), (1, 0.5));
        // one hidden unit with output weight 1 and zero bias: y = σ(σ(x))
        let mut m = FnnModel::zeros(1, 1, 1);
        m.hidden[0] = vec![0.0, 1.0];
        m.output[0] = vec![0.0, 1.0];
        let h = 0.731_058_578_630_004_9;
        assert_abs_diff_eq!(m.forward(&[1.0]).0[0], h, epsilon = 1e-15);
        assert_abs_diff_eq!(m.outputs(&[1.0]).unwrap()[0], 1.0 / (1.0 + (-h).exp()), epsilon = 1e-15);
        assert!(m.outputs(&[1.0, 2.0]).is_err());
    }

    /// Step-by-step interpreter working from the flat parameter vector.
    fn oracle(p: &[f64], m: usize, h: usize, o: usize, x: &[f64]) -> Vec<f64> {
        let s = |z: f64| 1.0 / (1.0 + (-z).exp());
        let mut hidden = Vec::new();
        for k in 0..h {
            let base = k * (m + 1);
            let mut z = p[base];
            for j in 0..m {
                z += p[base + 1 + j] * x[j];
            }
            hidden.push(s(z));
        }
        let off = h * (m + 1);
        (0..o)
            .map(|q| {
                let base = off + q * (h + 1);
                let mut z = p[base];
                for k in 0..h {
                    z += p[base + 1 + k] * hidden[k];
                }
                s(z)
            })
            .collect()
    }

    #[test]
    fn forward_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let model = FnnModel::random(5, 3, 2, &mut rng);
        let p = model.params();
        for _ in 0..50 {
            let x: Vec<f64> = (0..5).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let a = model.outputs(&x).unwrap();
            let b = oracle(&p, 5, 3, 2, &x);
            for (u, v) in a.iter().zip(&b) {
                assert_abs_diff_eq!(u, v, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for point in 0..20 {
            let outputs = if point % 2 == 0 { 1 } else { 3 };
            let mut model = FnnModel::random(3, 2, outputs, &mut rng);
            let p: Vec<f64> = (0..model.param_count()).map(|_| rng.gen_range(-1.5..1.5)).collect();
            model.set_params(&p).unwrap();
            let x = Matrix::from_vec(6, 3, (0..18).map(|_| rng.gen_range(-2.0..2.0)).collect()).unwrap();
            let t: Vec<Vec<f64>> = (0..6).map(|_| (0..outputs).map(|_| rng.gen_range(0.0..1.0)).collect()).collect();
            let (_, grad) = fnn_sse_gradient(&model, &x, &t);
            for i in 0..p.len() {
                let eps = 1e-6;
                let mut plus = p.clone();
                plus[i] += eps;
                let mut minus = p.clone();
                minus[i] -= eps;
                model.set_params(&plus).unwrap();
                let fp = fnn_sse_gradient(&model, &x, &t).0;
                model.set_params(&minus).unwrap();
                let fm = fnn_sse_gradient(&model, &x, &t).0;
                let fd = (fp - fm) / (2.0 * eps);
                let rel = (fd - grad[i]).abs() / grad[i].abs().max(fd.abs()).max(1e-8);
                assert!(rel < 1e-5, "point {point} param {i}: {fd} vs {}", grad[i]);
            }
            model.set_params(&p).unwrap();
        }
    }

    #[test]
    fn snapshot_reproduces_best_validation_error() {
        let ds = gen_xor(300, 2).unwrap();
        let parts = split(&ds, &SplitSpec::new(vec![0.5, 0.5], 2, true)).unwrap();
        let cfg = FnnConfig { restarts: 2, max_epochs: 300, ..FnnConfig::default() };
        let (model, curve) = train_fnn(&parts[0], &parts[1], 3, &cfg).unwrap();
        let k = curve.best_epoch;
        assert_eq!(classification_error(&model, &parts[1]).unwrap(), curve.val_error[k]);
        assert!(curve.val_error[k] <= *curve.val_error.last().unwrap());
        let min = curve.val_error.iter().cloned().fold(f64::INFINITY, f64::min);
        assert_eq!(curve.val_error[k], min);
        assert_eq!(train_fnn(&parts[0], &parts[1], 3, &cfg).unwrap().0, model);
    }

    #[test]
    fn separable_data_reaches_zero_validation_error() {
        let mut hits = 0;
        for seed in 0..10 {
            let ds = gen_separable(200, 2, 2, 0.2, seed).unwrap();
            let parts = split(&ds, &SplitSpec::new(vec![0.5, 0.5], seed, true)).unwrap();
            let cfg = FnnConfig { restarts: 1, max_epochs: 500, patience: 500, seed, ..FnnConfig::default() };
            let (_, curve) = train_fnn(&parts[0], &parts[1], 2, &cfg).unwrap();
            if curve.val_error[curve.best_epoch] == 0.0 {
                hits += 1;
            }
        }
        assert!(hits >= 9, "{hits}/10");
    }

    /// Boolean XOR corners with a little jitter. Two sigmoid hidden units can
    /// only carve a band, which fits the four corners but not the full
    /// quadrant pattern of continuous XOR.
    fn jittered_corners(n: usize, seed: u64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut data = Vec::with_capacity(2 * n);
        let mut labels = Vec::with_capacity(n);
        for i in 0..n {
            let (a, b) = ((i % 2) as f64, ((i / 2) % 2) as f64);
            data.push(a + rng.gen_range(-0.1..0.1));
            data.push(b + rng.gen_range(-0.1..0.1));
            labels.push(usize::from(a != b));
        }
        Dataset::new(Matrix::from_vec(n, 2, data).unwrap(), labels, Dataset::default_names(2), 2).unwrap()
    }

    #[test]
    fn xor_with_two_hidden_units() {
        let ds = jittered_corners(200, 0);
        let parts = split(&ds, &SplitSpec::new(vec![0.5, 0.5], 0, true)).unwrap();
        let cfg = FnnConfig { max_epochs: 5000, patience: 5000, ..FnnConfig::default() };
        let mut best_train = 1.0f64;
        for restart in 0..10 {
            if let Some((model, _)) = train_fnn_run(&parts[0], &parts[1], 2, &cfg, restart).unwrap() {
                best_train = best_train.min(classification_error(&model, &parts[0]).unwrap());
            }
        }
        assert!(best_train <= 0.05, "best training error {best_train}");
    }
}
