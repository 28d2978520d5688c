//! Datasets with a binary protected attribute, a synthetic biased-data
//! generator, stratified splitting and the pre-processing debiasing
//! transforms (over/undersampling, counterfactual augmentation).

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;
use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from_seed};

/// Row-major feature matrix plus binary labels and binary group membership.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    input_dim: usize,
    labels: Vec<u8>,
    groups: Vec<u8>,
}

/// The four `(group, label)` cells, in the order every transform visits them.
pub const CELLS: [(u8, u8); 4] = [(0, 0), (0, 1), (1, 0), (1, 1)];

impl Dataset {
    pub fn new(features: Vec<f64>, input_dim: usize, labels: Vec<u8>, groups: Vec<u8>) -> Result<Self> {
        if input_dim == 0 {
            return Err(Error::InvalidDataset("input_dim must be >= 1".into()));
        }
        if labels.len() != groups.len() || features.len() != labels.len() * input_dim {
            return Err(Error::InvalidDataset(format!(
                "{} feature values, {} labels and {} groups do not describe one table of width {}",
                features.len(),
                labels.len(),
                groups.len(),
                input_dim
            )));
        }
        if let Some(i) = labels.iter().position(|&y| y > 1) {
            return Err(Error::InvalidDataset(format!("row {i}: label must be 0 or 1")));
        }
        if let Some(i) = groups.iter().position(|&g| g > 1) {
            return Err(Error::InvalidDataset(format!("row {i}: group must be 0 or 1")));
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("features"));
        }
        Ok(Dataset {
            features,
            input_dim,
            labels,
            groups,
        })
    }

    pub fn empty(input_dim: usize) -> Self {
        Dataset {
            features: Vec::new(),
            input_dim,
            labels: Vec::new(),
            groups: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.input_dim..(i + 1) * self.input_dim]
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn groups(&self) -> &[u8] {
        &self.groups
    }

    /// Rows at `indices`, in the given order (duplicates allowed).
    pub fn select(&self, indices: &[usize]) -> Dataset {
        let mut features = Vec::with_capacity(indices.len() * self.input_dim);
        for &i in indices {
            features.extend_from_slice(self.row(i));
        }
        Dataset {
            features,
            input_dim: self.input_dim,
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            groups: indices.iter().map(|&i| self.groups[i]).collect(),
        }
    }

    /// Row indices of one `(group, label)` cell, ascending.
    pub fn cell_indices(&self, group: u8, label: u8) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.groups[i] == group && self.labels[i] == label)
            .collect()
    }

    /// Counts indexed `[group][label]`.
    pub fn cell_counts(&self) -> [[usize; 2]; 2] {
        let mut c = [[0; 2]; 2];
        for (&g, &y) in self.groups.iter().zip(&self.labels) {
            c[g as usize][y as usize] += 1;
        }
        c
    }

    /// Every group must have at least one positive row for ΔTPR to be defined.
    pub fn validate_fairness_cells(&self) -> Result<()> {
        let c = self.cell_counts();
        for group in 0..2u8 {
            if c[group as usize][1] == 0 {
                return Err(Error::EmptyCell { group, label: 1 });
            }
        }
        Ok(())
    }

    fn require_all_cells(&self) -> Result<[[usize; 2]; 2]> {
        let c = self.cell_counts();
        for (group, label) in CELLS {
            if c[group as usize][label as usize] == 0 {
                return Err(Error::EmptyCell { group, label });
            }
        }
        Ok(c)
    }

    /// Appends `other`'s rows.
    pub fn concat(&self, other: &Dataset) -> Result<Dataset> {
        if self.input_dim != other.input_dim {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim,
                actual: other.input_dim,
            });
        }
        let mut out = self.clone();
        out.features.extend_from_slice(&other.features);
        out.labels.extend_from_slice(&other.labels);
        out.groups.extend_from_slice(&other.groups);
        Ok(out)
    }

    /// Stratified split by `(group, label)` cell into train/validation/test.
    ///
    /// Each cell is shuffled independently; its first `round(train·m)` rows go
    /// to train and the next `round(val·m)` to validation. Every split keeps
    /// the parent's row order.
    pub fn split(&self, fractions: (f64, f64, f64), seed: u64) -> Result<(Dataset, Dataset, Dataset)> {
        let (ft, fv, fs) = fractions;
        if !(ft > 0.0 && fv > 0.0 && fs > 0.0) || libm::fabs(ft + fv + fs - 1.0) > 1e-9 {
            return Err(Error::InvalidConfig(format!(
                "split fractions {ft}, {fv}, {fs} must be positive and sum to 1"
            )));
        }
        let mut train = Vec::new();
        let mut val = Vec::new();
        let mut test = Vec::new();
        for (k, (group, label)) in CELLS.into_iter().enumerate() {
            let mut idx = self.cell_indices(group, label);
            let m = idx.len();
            if m == 0 {
                continue;
            }
            let n_train = (libm::round(ft * m as f64) as usize).min(m);
            let n_val = (libm::round(fv * m as f64) as usize).min(m - n_train);
            if n_train == 0 || n_val == 0 {
                return Err(Error::CellTooSmall {
                    group,
                    label,
                    count: m,
                });
            }
            let mut rng = rng_from_seed(derive_seed(seed, "split", k as u64, 0));
            idx.shuffle(&mut rng);
            train.extend_from_slice(&idx[..n_train]);
            val.extend_from_slice(&idx[n_train..n_train + n_val]);
            test.extend_from_slice(&idx[n_train + n_val..]);
        }
        train.sort_unstable();
        val.sort_unstable();
        test.sort_unstable();
        Ok((self.select(&train), self.select(&val), self.select(&test)))
    }

    /// Duplicates rows, sampled with replacement, until every `(group, label)`
    /// cell has the largest cell's count. Originals come first, in order.
    pub fn oversample(&self, seed: u64) -> Result<Dataset> {
        let counts = self.require_all_cells()?;
        let target = counts.iter().flatten().copied().max().unwrap_or(0);
        let mut rng = rng_from_seed(derive_seed(seed, "oversample", 0, 0));
        let mut rows: Vec<usize> = (0..self.len()).collect();
        for (group, label) in CELLS {
            let cell = self.cell_indices(group, label);
            for _ in cell.len()..target {
                rows.push(cell[rng.random_range(0..cell.len())]);
            }
        }
        Ok(self.select(&rows))
    }

    /// Keeps, per `(group, label)` cell, a sample without replacement of the
    /// smallest cell's size. Output keeps the parent's row order.
    pub fn undersample(&self, seed: u64) -> Result<Dataset> {
        let counts = self.require_all_cells()?;
        let target = counts.iter().flatten().copied().min().unwrap_or(0);
        let mut rng = rng_from_seed(derive_seed(seed, "undersample", 0, 0));
        let mut rows = Vec::with_capacity(4 * target);
        for (group, label) in CELLS {
            let cell = self.cell_indices(group, label);
            rows.extend(index::sample(&mut rng, cell.len(), target).into_iter().map(|k| cell[k]));
        }
        rows.sort_unstable();
        Ok(self.select(&rows))
    }

    /// Per-group feature means, `[group][feature]`.
    pub fn group_means(&self) -> Result<[Vec<f64>; 2]> {
        let mut sums = [vec![0.0; self.input_dim], vec![0.0; self.input_dim]];
        let mut counts = [0usize; 2];
        for i in 0..self.len() {
            let g = self.groups[i] as usize;
            counts[g] += 1;
            for (s, v) in sums[g].iter_mut().zip(self.row(i)) {
                *s += v;
            }
        }
        for (g, &c) in counts.iter().enumerate() {
            if c == 0 {
                return Err(Error::InvalidDataset(format!("group {g} has no rows")));
            }
            for s in &mut sums[g] {
                *s /= c as f64;
            }
        }
        Ok(sums)
    }

    /// Counterfactual augmentation: appends one copy of every row with its
    /// group flipped and its features shifted from its own group's mean to
    /// the other group's, `x' = x - μ(g) + μ(1-g)`.
    pub fn cda_augment(&self) -> Result<Dataset> {
        if self.is_empty() {
            return Err(Error::Empty);
        }
        let means = self.group_means()?;
        let mut out = self.clone();
        out.features.reserve(self.features.len());
        for i in 0..self.len() {
            let g = self.groups[i] as usize;
            let (own, other) = (&means[g], &means[1 - g]);
            for (j, &x) in self.row(i).iter().enumerate() {
                out.features.push(x - own[j] + other[j]);
            }
            out.labels.push(self.labels[i]);
            out.groups.push(1 - self.groups[i]);
        }
        Ok(out)
    }
}

/// Parameters of the synthetic biased-data generator.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct SynthConfig {
    pub n: usize,
    pub input_dim: usize,
    /// `P(G = 1)`.
    pub group_balance: f64,
    /// Probability that a row's label is forced to `1 - G`; equals `corr(G, Y)` for balanced groups.
    pub label_group_correlation: f64,
    /// Probability that a positive row of group 1 has its label flipped to 0.
    pub group_noise_gap: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n: 4000,
            input_dim: 8,
            group_balance: 0.5,
            label_group_correlation: 0.6,
            group_noise_gap: 0.2,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.into()));
        if self.n < 10 {
            return bad("synthetic n must be >= 10");
        }
        if self.input_dim == 0 {
            return bad("synthetic input_dim must be >= 1");
        }
        if !(self.group_balance > 0.0 && self.group_balance < 1.0) {
            return bad("group_balance must lie in (0, 1)");
        }
        if !(0.0..1.0).contains(&self.label_group_correlation) {
            return bad("label_group_correlation must lie in [0, 1)");
        }
        if !(0.0..0.5).contains(&self.group_noise_gap) {
            return bad("group_noise_gap must lie in [0, 0.5)");
        }
        Ok(())
    }

    /// Draws a dataset. The first `ceil(d/2)` features carry the label
    /// (mean ±1), the rest carry the group (offset `0.5·G`); all have unit
    /// Gaussian noise.
    pub fn generate(&self) -> Result<Dataset> {
        self.validate()?;
        let mut rng = rng_from_seed(derive_seed(self.seed, "synthetic", 0, 0));
        let class_dims = self.input_dim.div_ceil(2);
        let mut features = Vec::with_capacity(self.n * self.input_dim);
        let mut labels = Vec::with_capacity(self.n);
        let mut groups = Vec::with_capacity(self.n);
        for _ in 0..self.n {
            let g = u8::from(rng.random::<f64>() < self.group_balance);
            let mut y = if rng.random::<f64>() < self.label_group_correlation {
                1 - g
            } else {
                u8::from(rng.random::<f64>() < 0.5)
            };
            let class_mean = if y == 1 { 1.0 } else { -1.0 };
            for j in 0..self.input_dim {
                let noise: f64 = StandardNormal.sample(&mut rng);
                let mean = if j < class_dims {
                    class_mean
                } else {
                    0.5 * f64::from(g)
                };
                features.push(mean + noise);
            }
            let flip = rng.random::<f64>();
            if g == 1 && y == 1 && flip < self.group_noise_gap {
                y = 0;
            }
            labels.push(y);
            groups.push(g);
        }
        Dataset::new(features, self.input_dim, labels, groups)
    }
}
