//! Synthetic datasets with known structure.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{Dataset, Matrix};
use crate::error::{Error, Result};
use crate::seeding;

/// Continuous XOR: `x1, x2 ~ U[-1, 1]`, label 1 iff `x1·x2 > 0`.
pub fn gen_xor(n: usize, seed: u64) -> Result<Dataset> {
    if n < 4 {
        return Err(Error::InvalidConfig("xor needs n >= 4".into()));
    }
    let mut rng = seeding::rng(seed);
    let mut data = Vec::with_capacity(2 * n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let x1: f64 = rng.gen_range(-1.0..=1.0);
        let x2: f64 = rng.gen_range(-1.0..=1.0);
        data.push(x1);
        data.push(x2);
        labels.push(xor_label(x1, x2));
    }
    Dataset::new(Matrix::from_vec(n, 2, data)?, labels, Dataset::default_names(2), 2)
}

pub fn xor_label(x1: f64, x2: f64) -> usize {
    usize::from(x1 * x2 > 0.0)
}

/// Surrogate data with a few informative columns hidden among noise.
#[derive(Debug, Clone)]
pub struct SurrogateEeg {
    pub dataset: Dataset,
    /// Column indices of the informative features, in order of decreasing shift.
    pub informative: Vec<usize>,
}

/// Shift between adjacent class means of the `t`-th informative column.
pub fn informative_shift(t: usize) -> f64 {
    (1.2 - 0.1 * t as f64).max(0.5)
}

/// `k` informative columns plus `irrelevant` standard-normal noise columns.
///
/// Labels are uniform over `r` classes. Informative column `t` is drawn from
/// `N((c - (r-1)/2)·s_t, 1)` for class `c` with `s_t = max(1.2 - 0.1 t, 0.5)`.
/// Column positions are shuffled; [`SurrogateEeg::informative`] records them.
pub fn gen_surrogate_eeg(
    n: usize,
    k: usize,
    irrelevant: usize,
    r: usize,
    seed: u64,
) -> Result<SurrogateEeg> {
    if k == 0 {
        return Err(Error::InvalidConfig("need at least one informative column".into()));
    }
    if r < 2 {
        return Err(Error::InvalidConfig("need at least 2 classes".into()));
    }
    let m = k + irrelevant;
    let mut rng = seeding::rng(seed);
    let mut positions: Vec<usize> = (0..m).collect();
    positions.shuffle(&mut rng);
    let informative: Vec<usize> = positions[..k].to_vec();

    let centre = (r as f64 - 1.0) / 2.0;
    let mut x = Matrix::zeros(n, m);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let c = rng.gen_range(0..r);
        labels.push(c);
        for j in 0..m {
            let noise: f64 = rng.sample(StandardNormal);
            x.set(i, j, noise);
        }
        for (t, &col) in informative.iter().enumerate() {
            let v = x.get(i, col) + (c as f64 - centre) * informative_shift(t);
            x.set(i, col, v);
        }
    }
    let names = (1..=m).map(|j| format!("f{j}")).collect();
    Ok(SurrogateEeg {
        dataset: Dataset::new(x, labels, names, r)?,
        informative,
    })
}

/// Two-dimensional Gaussian blobs: `r` unit-variance clusters whose centres sit
/// on a circle of radius 3. Labels cycle through the classes.
pub fn gen_blobs(n: usize, r: usize, seed: u64) -> Result<Dataset> {
    if r < 2 || n < r {
        return Err(Error::InvalidConfig("blobs need r >= 2 and n >= r".into()));
    }
    let mut rng = seeding::rng(seed);
    let mut data = Vec::with_capacity(2 * n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let c = i % r;
        let angle = std::f64::consts::TAU * c as f64 / r as f64;
        let dx: f64 = rng.sample(StandardNormal);
        let dy: f64 = rng.sample(StandardNormal);
        data.push(3.0 * angle.cos() + dx);
        data.push(3.0 * angle.sin() + dy);
        labels.push(c);
    }
    Dataset::new(Matrix::from_vec(n, 2, data)?, labels, Dataset::default_names(2), r)
}

/// Points in `[-1, 1]^m` labeled by a random linear machine, keeping only points
/// whose winning discriminant leads the runner-up by at least `margin`.
///
/// The machine is a nearest-prototype rule, `w^c = (-|p_c|²/2, p_c)` for random
/// prototypes `p_c` in the cube, so every class owns a non-empty region.
pub fn gen_separable(n: usize, r: usize, m: usize, margin: f64, seed: u64) -> Result<Dataset> {
    if r < 2 || m == 0 {
        return Err(Error::InvalidConfig("separable data needs r >= 2 and m >= 1".into()));
    }
    let mut rng = seeding::rng(seed);
    let weights: Vec<Vec<f64>> = (0..r)
        .map(|_| {
            let p: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            let bias = -0.5 * p.iter().map(|v| v * v).sum::<f64>();
            std::iter::once(bias).chain(p).collect()
        })
        .collect();
    let mut data = Vec::with_capacity(n * m);
    let mut labels = Vec::with_capacity(n);
    let mut counts = vec![0usize; r];
    let per_class_cap = n.div_ceil(r);
    let mut tries = 0usize;
    while labels.len() < n {
        tries += 1;
        if tries > 10_000 * n.max(1) {
            return Err(Error::InvalidConfig("margin too large to fill the sample".into()));
        }
        let x: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let mut g: Vec<(f64, usize)> = weights
            .iter()
            .enumerate()
            .map(|(c, w)| (w[0] + w[1..].iter().zip(&x).map(|(a, b)| a * b).sum::<f64>(), c))
            .collect();
        g.sort_by(|a, b| b.0.total_cmp(&a.0));
        let class = g[0].1;
        if g[0].0 - g[1].0 < margin || counts[class] >= per_class_cap {
            continue;
        }
        counts[class] += 1;
        data.extend_from_slice(&x);
        labels.push(class);
    }
    Dataset::new(Matrix::from_vec(n, m, data)?, labels, Dataset::default_names(m), r)
}
