//! Labeled datasets, normalization and deterministic splitting.

mod csv_io;
mod synth;

pub use csv_io::{load_csv, read_csv, write_csv, CsvData};
pub use synth::{gen_blobs, gen_separable, gen_surrogate_eeg, gen_xor, SurrogateEeg};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::seeding;

/// Dense row-major matrix of `f64`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::LengthMismatch {
                    expected: cols,
                    actual: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.cols.max(1)).take(self.rows)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// New matrix holding the given rows, in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Self {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    /// New matrix holding the given columns, in the given order.
    pub fn select_cols(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.rows * idx.len());
        for i in 0..self.rows {
            let row = self.row(i);
            data.extend(idx.iter().map(|&j| row[j]));
        }
        Self {
            rows: self.rows,
            cols: idx.len(),
            data,
        }
    }
}

/// Feature matrix with integer class labels in `0..class_count`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Matrix,
    labels: Vec<usize>,
    feature_names: Vec<String>,
    class_count: usize,
}

impl Dataset {
    pub fn new(
        features: Matrix,
        labels: Vec<usize>,
        feature_names: Vec<String>,
        class_count: usize,
    ) -> Result<Self> {
        if features.rows() != labels.len() {
            return Err(Error::InvalidDataset(format!(
                "{} feature rows but {} labels",
                features.rows(),
                labels.len()
            )));
        }
        if features.cols() == 0 {
            return Err(Error::InvalidDataset("no feature columns".into()));
        }
        if feature_names.len() != features.cols() {
            return Err(Error::InvalidDataset(format!(
                "{} feature names for {} columns",
                feature_names.len(),
                features.cols()
            )));
        }
        let mut sorted = feature_names.clone();
        sorted.sort();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidDataset(format!(
                "duplicate feature name `{}`",
                w[0]
            )));
        }
        if class_count < 2 {
            return Err(Error::TooFewClasses);
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= class_count) {
            return Err(Error::InvalidDataset(format!(
                "label {bad} out of range for {class_count} classes"
            )));
        }
        Ok(Self {
            features,
            labels,
            feature_names,
            class_count,
        })
    }

    /// Names `x1..xm`.
    pub fn default_names(m: usize) -> Vec<String> {
        (1..=m).map(|j| format!("x{j}")).collect()
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.features.cols()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.features.row(i)
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.features.column(j)
    }

    /// Labels as 0/1 reals; only meaningful for two-class data.
    pub fn binary_targets(&self) -> Vec<f64> {
        self.labels.iter().map(|&l| if l == 1 { 1.0 } else { 0.0 }).collect()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.class_count];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    pub fn subset(&self, idx: &[usize]) -> Self {
        Self {
            features: self.features.select_rows(idx),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
            feature_names: self.feature_names.clone(),
            class_count: self.class_count,
        }
    }

    pub fn project(&self, cols: &[usize]) -> Self {
        Self {
            features: self.features.select_cols(cols),
            labels: self.labels.clone(),
            feature_names: cols.iter().map(|&j| self.feature_names[j].clone()).collect(),
            class_count: self.class_count,
        }
    }

    /// Same rows and labels with a replacement feature matrix (e.g. after PCA).
    pub fn with_features(&self, features: Matrix, names: Vec<String>) -> Result<Self> {
        Self::new(features, self.labels.clone(), names, self.class_count)
    }

    /// SHA-256 over column names, feature bits and labels.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        for name in &self.feature_names {
            h.update(name.as_bytes());
            h.update([0u8]);
        }
        for v in self.features.as_slice() {
            h.update(v.to_bits().to_le_bytes());
        }
        for &l in &self.labels {
            h.update((l as u64).to_le_bytes());
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Per-column z-score parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormParams {
    pub mean: Vec<f64>,
    /// Population standard deviation; zero-variance columns hold 1.
    pub sd: Vec<f64>,
}

impl NormParams {
    pub fn fit(x: &Matrix) -> Result<Self> {
        let n = x.rows();
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        let m = x.cols();
        let mut mean = vec![0.0; m];
        for row in x.iter_rows() {
            for (acc, v) in mean.iter_mut().zip(row) {
                *acc += v;
            }
        }
        mean.iter_mut().for_each(|v| *v /= n as f64);
        let mut var = vec![0.0; m];
        for row in x.iter_rows() {
            for j in 0..m {
                let d = row[j] - mean[j];
                var[j] += d * d;
            }
        }
        let sd = var
            .into_iter()
            .map(|v| {
                let s = (v / n as f64).sqrt();
                if s > 0.0 {
                    s
                } else {
                    1.0
                }
            })
            .collect();
        Ok(Self { mean, sd })
    }

    pub fn identity(m: usize) -> Self {
        Self {
            mean: vec![0.0; m],
            sd: vec![1.0; m],
        }
    }

    pub fn apply_row(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.mean.len() {
            return Err(Error::LengthMismatch {
                expected: self.mean.len(),
                actual: row.len(),
            });
        }
        Ok(row
            .iter()
            .zip(self.mean.iter().zip(&self.sd))
            .map(|(v, (mu, sd))| (v - mu) / sd)
            .collect())
    }

    pub fn apply(&self, ds: &Dataset) -> Result<Dataset> {
        let mut x = ds.features().clone();
        for i in 0..x.rows() {
            let z = self.apply_row(x.row(i))?;
            x.row_mut(i).copy_from_slice(&z);
        }
        ds.with_features(x, ds.feature_names().to_vec())
    }
}

pub fn normalize_zscore(ds: &Dataset) -> Result<(Dataset, NormParams)> {
    if ds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let params = NormParams::fit(ds.features())?;
    Ok((params.apply(ds)?, params))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitSpec {
    pub fractions: Vec<f64>,
    pub seed: u64,
    pub stratified: bool,
}

impl SplitSpec {
    pub fn new(fractions: Vec<f64>, seed: u64, stratified: bool) -> Self {
        Self {
            fractions,
            seed,
            stratified,
        }
    }

    /// Parses `"2/3:1/3"` or `"0.7:0.3"`.
    pub fn parse_fractions(text: &str) -> Result<Vec<f64>> {
        text.split(':')
            .map(|part| {
                let part = part.trim();
                let value = match part.split_once('/') {
                    Some((a, b)) => {
                        let a: f64 = a.trim().parse().ok()?;
                        let b: f64 = b.trim().parse().ok()?;
                        a / b
                    }
                    None => part.parse().ok()?,
                };
                Some(value)
            })
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::InvalidSplit(format!("cannot parse `{text}`")))
    }

    fn validate(&self) -> Result<()> {
        if self.fractions.is_empty() {
            return Err(Error::InvalidSplit("no fractions".into()));
        }
        if self.fractions.iter().any(|&f| !(f > 0.0)) {
            return Err(Error::InvalidSplit("fractions must be positive".into()));
        }
        let total: f64 = self.fractions.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidSplit(format!(
                "fractions sum to {total}, not 1"
            )));
        }
        Ok(())
    }
}

/// Part sizes: `floor(n·f)` each, remainder to the first part.
fn part_sizes(n: usize, fractions: &[f64]) -> Vec<usize> {
    let mut sizes: Vec<usize> = fractions
        .iter()
        .map(|f| (n as f64 * f + 1e-9).floor() as usize)
        .collect();
    let assigned: usize = sizes.iter().sum();
    sizes[0] += n - assigned.min(n);
    sizes
}

/// Row indices of each part, after a seeded shuffle.
pub fn split_indices(ds: &Dataset, spec: &SplitSpec) -> Result<Vec<Vec<usize>>> {
    spec.validate()?;
    let mut rng = seeding::rng(spec.seed);
    let k = spec.fractions.len();
    let mut parts = vec![Vec::new(); k];
    if spec.stratified {
        for class in 0..ds.class_count() {
            let mut idx: Vec<usize> = (0..ds.len()).filter(|&i| ds.labels()[i] == class).collect();
            idx.shuffle(&mut rng);
            let sizes = part_sizes(idx.len(), &spec.fractions);
            let mut start = 0;
            for (part, size) in parts.iter_mut().zip(sizes) {
                part.extend_from_slice(&idx[start..start + size]);
                start += size;
            }
        }
        for part in &mut parts {
            part.shuffle(&mut rng);
        }
    } else {
        let mut idx: Vec<usize> = (0..ds.len()).collect();
        idx.shuffle(&mut rng);
        let sizes = part_sizes(idx.len(), &spec.fractions);
        let mut start = 0;
        for (part, size) in parts.iter_mut().zip(sizes) {
            part.extend_from_slice(&idx[start..start + size]);
            start += size;
        }
    }
    if let Some(p) = parts.iter().position(Vec::is_empty) {
        return Err(Error::InvalidSplit(format!("part {p} would be empty")));
    }
    Ok(parts)
}

pub fn split(ds: &Dataset, spec: &SplitSpec) -> Result<Vec<Dataset>> {
    Ok(split_indices(ds, spec)?
        .iter()
        .map(|idx| ds.subset(idx))
        .collect())
}
