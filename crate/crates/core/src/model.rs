//! Classifier parameter space and its trainer.
//!
//! A classifier is a fully connected network with a single logistic output.
//! Its parameters live in one flat `Vec<f64>`; [`TensorSpec`] entries slice
//! that vector into per-layer weight matrices (row-major, `out × in`) and
//! bias vectors, in layer order.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand_distr::{Distribution, Normal};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from_seed};

/// Probability clamp used by the cross-entropy loss.
pub const PROB_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Activation {
    #[default]
    Relu,
    Tanh,
}

impl Activation {
    pub fn name(self) -> &'static str {
        match self {
            Activation::Relu => "relu",
            Activation::Tanh => "tanh",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "relu" => Some(Activation::Relu),
            "tanh" => Some(Activation::Tanh),
            _ => None,
        }
    }

    #[inline]
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    z
                } else {
                    0.0
                }
            }
            Activation::Tanh => libm::tanh(z),
        }
    }

    /// Derivative expressed through the pre-activation `z` and output `a`.
    #[inline]
    fn derivative(self, z: f64, a: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => 1.0 - a * a,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Architecture {
    pub input_dim: usize,
    pub hidden_dims: Vec<usize>,
    pub activation: Activation,
}

impl Architecture {
    pub fn new(input_dim: usize, hidden_dims: Vec<usize>, activation: Activation) -> Result<Self> {
        let arch = Architecture {
            input_dim,
            hidden_dims,
            activation,
        };
        arch.validate()?;
        Ok(arch)
    }

    /// Default hidden layout `[16]` with ReLU.
    pub fn with_input_dim(input_dim: usize) -> Result<Self> {
        Self::new(input_dim, vec![16], Activation::Relu)
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 {
            return Err(Error::InvalidArchitecture("input_dim must be >= 1".into()));
        }
        if self.hidden_dims.contains(&0) {
            return Err(Error::InvalidArchitecture(
                "hidden layer widths must be >= 1".into(),
            ));
        }
        Ok(())
    }

    /// `(fan_in, fan_out)` of each affine layer, output layer last.
    pub fn layer_dims(&self) -> Vec<(usize, usize)> {
        let mut dims = Vec::with_capacity(self.hidden_dims.len() + 1);
        let mut fan_in = self.input_dim;
        for &h in &self.hidden_dims {
            dims.push((fan_in, h));
            fan_in = h;
        }
        dims.push((fan_in, 1));
        dims
    }

    pub fn param_count(&self) -> usize {
        self.layer_dims().iter().map(|&(i, o)| i * o + o).sum()
    }

    pub fn layout(&self) -> Vec<TensorSpec> {
        let mut out = Vec::new();
        let mut offset = 0;
        for (l, (fan_in, fan_out)) in self.layer_dims().into_iter().enumerate() {
            out.push(TensorSpec {
                name: format!("layer{l}.weight"),
                rows: fan_out,
                cols: fan_in,
                offset,
            });
            offset += fan_in * fan_out;
            out.push(TensorSpec {
                name: format!("layer{l}.bias"),
                rows: fan_out,
                cols: 1,
                offset,
            });
            offset += fan_out;
        }
        out
    }

    /// Compact text form, e.g. `8:16,16:relu`; round-trips through [`Architecture::parse_descriptor`].
    pub fn descriptor(&self) -> String {
        let hidden: Vec<String> = self.hidden_dims.iter().map(|h| format!("{h}")).collect();
        format!(
            "{}:{}:{}",
            self.input_dim,
            hidden.join(","),
            self.activation.name()
        )
    }

    pub fn parse_descriptor(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArchitecture(format!("bad descriptor {s:?}"));
        let mut parts = s.split(':');
        let input_dim = parts
            .next()
            .and_then(|p| p.parse().ok())
            .ok_or_else(bad)?;
        let hidden_part = parts.next().ok_or_else(bad)?;
        let hidden_dims = if hidden_part.is_empty() {
            Vec::new()
        } else {
            hidden_part
                .split(',')
                .map(|h| h.parse().map_err(|_| bad()))
                .collect::<Result<Vec<usize>>>()?
        };
        let activation = parts.next().and_then(Activation::parse).ok_or_else(bad)?;
        if parts.next().is_some() {
            return Err(bad());
        }
        Self::new(input_dim, hidden_dims, activation)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorSpec {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub offset: usize,
}

impl TensorSpec {
    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn range(&self) -> core::ops::Range<usize> {
        self.offset..self.offset + self.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs_per_tune: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.05,
            batch_size: 32,
            epochs_per_tune: 1,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate.is_finite() && self.learning_rate >= 0.0) {
            return Err(Error::InvalidConfig("learning_rate must be finite and >= 0".into()));
        }
        if self.batch_size == 0 || self.epochs_per_tune == 0 {
            return Err(Error::InvalidConfig(
                "batch_size and epochs_per_tune must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn with_seed(self, seed: u64) -> Self {
        TrainConfig { seed, ..self }
    }
}

/// Flat parameter vector of one classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector {
    arch: Architecture,
    values: Vec<f64>,
    layout: Vec<TensorSpec>,
}

impl ParamVector {
    pub fn zeros(arch: &Architecture) -> Self {
        ParamVector {
            values: vec![0.0; arch.param_count()],
            layout: arch.layout(),
            arch: arch.clone(),
        }
    }

    pub fn from_values(arch: &Architecture, values: Vec<f64>) -> Result<Self> {
        arch.validate()?;
        let expected = arch.param_count();
        if values.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("parameter vector"));
        }
        Ok(ParamVector {
            values,
            layout: arch.layout(),
            arch: arch.clone(),
        })
    }

    /// Weights drawn from `Normal(0, 1/sqrt(fan_in))`, biases zero.
    pub fn init(arch: &Architecture, seed: u64) -> Self {
        let mut p = Self::zeros(arch);
        let mut rng = rng_from_seed(derive_seed(seed, "init", 0, 0));
        for (l, (fan_in, _)) in arch.layer_dims().into_iter().enumerate() {
            let spec = &p.layout[2 * l];
            let scale = 1.0 / libm::sqrt(fan_in as f64);
            let normal = Normal::new(0.0, scale).expect("positive scale");
            let range = spec.range();
            for v in &mut p.values[range] {
                *v = normal.sample(&mut rng);
            }
        }
        p
    }

    pub fn arch(&self) -> &Architecture {
        &self.arch
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn layout(&self) -> &[TensorSpec] {
        &self.layout
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn tensor(&self, index: usize) -> &[f64] {
        &self.values[self.layout[index].range()]
    }

    pub fn same_arch(&self, other: &ParamVector) -> bool {
        self.arch == other.arch
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Output logit for one feature row.
    pub fn logit(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x.len())?;
        let mut scratch = Scratch::new(&self.arch);
        Ok(self.forward_into(x, &mut scratch))
    }

    /// `P(Y = 1 | x)`.
    pub fn forward(&self, x: &[f64]) -> Result<f64> {
        self.logit(x).map(sigmoid)
    }

    /// Label 1 iff the probability is at least 0.5.
    pub fn predict(&self, x: &[f64]) -> Result<u8> {
        // sigmoid(z) >= 0.5 exactly when z >= 0
        Ok(u8::from(self.logit(x)? >= 0.0))
    }

    pub fn predict_all(&self, d: &Dataset) -> Result<Vec<u8>> {
        self.check_dim(d.input_dim())?;
        let mut scratch = Scratch::new(&self.arch);
        Ok((0..d.len())
            .map(|i| u8::from(self.forward_into(d.row(i), &mut scratch) >= 0.0))
            .collect())
    }

    /// Mean binary cross-entropy over `batch`, probabilities clamped to `[ε, 1-ε]`.
    pub fn loss(&self, batch: &Dataset) -> Result<f64> {
        if batch.is_empty() {
            return Err(Error::Empty);
        }
        self.check_dim(batch.input_dim())?;
        let mut scratch = Scratch::new(&self.arch);
        let mut total = 0.0;
        for i in 0..batch.len() {
            let p = clamp_prob(sigmoid(self.forward_into(batch.row(i), &mut scratch)));
            total += if batch.labels()[i] == 1 {
                -libm::log(p)
            } else {
                -libm::log(1.0 - p)
            };
        }
        Ok(total / batch.len() as f64)
    }

    /// Exact gradient of [`ParamVector::loss`], in the same layout as `self`.
    pub fn gradient(&self, batch: &Dataset) -> Result<ParamVector> {
        if batch.is_empty() {
            return Err(Error::Empty);
        }
        self.check_dim(batch.input_dim())?;
        let rows: Vec<usize> = (0..batch.len()).collect();
        let values = self.gradient_rows(batch, &rows);
        Ok(ParamVector {
            arch: self.arch.clone(),
            values,
            layout: self.layout.clone(),
        })
    }

    /// Runs `epochs_per_tune` epochs of mini-batch SGD and returns the result.
    ///
    /// Each epoch shuffles row indices with a stream derived from `cfg.seed`
    /// and the epoch number; rows inside a mini-batch are visited in
    /// ascending index order.
    pub fn tune(&self, train: &Dataset, cfg: &TrainConfig) -> Result<ParamVector> {
        cfg.validate()?;
        if train.is_empty() {
            return Err(Error::Empty);
        }
        self.check_dim(train.input_dim())?;
        let mut out = self.clone();
        let mut order: Vec<usize> = (0..train.len()).collect();
        for epoch in 0..cfg.epochs_per_tune {
            let mut rng = rng_from_seed(derive_seed(cfg.seed, "shuffle", epoch as u64, 0));
            order.sort_unstable();
            order.shuffle(&mut rng);
            for chunk in order.chunks(cfg.batch_size) {
                let mut batch = chunk.to_vec();
                batch.sort_unstable();
                let grad = out.gradient_rows(train, &batch);
                for (v, g) in out.values.iter_mut().zip(&grad) {
                    *v -= cfg.learning_rate * g;
                }
            }
        }
        if !out.is_finite() {
            return Err(Error::NonFinite("tuned parameters"));
        }
        Ok(out)
    }

    fn check_dim(&self, actual: usize) -> Result<()> {
        if actual != self.arch.input_dim {
            return Err(Error::DimensionMismatch {
                expected: self.arch.input_dim,
                actual,
            });
        }
        Ok(())
    }

    /// Forward pass storing pre-activations and activations in `s`; returns the logit.
    fn forward_into(&self, x: &[f64], s: &mut Scratch) -> f64 {
        s.acts[0].copy_from_slice(x);
        let n_layers = s.pre.len();
        for l in 0..n_layers {
            let w = &self.layout[2 * l];
            let b = &self.layout[2 * l + 1];
            let (before, after) = s.acts.split_at_mut(l + 1);
            let input = &before[l];
            let weights = &self.values[w.range()];
            let biases = &self.values[b.range()];
            for o in 0..w.rows {
                let row = &weights[o * w.cols..(o + 1) * w.cols];
                let z = row.iter().zip(input.iter()).map(|(a, b)| a * b).sum::<f64>() + biases[o];
                s.pre[l][o] = z;
                if l + 1 < n_layers {
                    after[0][o] = self.arch.activation.apply(z);
                }
            }
        }
        s.pre[n_layers - 1][0]
    }

    fn gradient_rows(&self, d: &Dataset, rows: &[usize]) -> Vec<f64> {
        let mut grad = vec![0.0; self.values.len()];
        let mut s = Scratch::new(&self.arch);
        let n_layers = s.pre.len();
        let inv_n = 1.0 / rows.len() as f64;
        for &i in rows {
            let z = self.forward_into(d.row(i), &mut s);
            let p = sigmoid(z);
            let y = f64::from(d.labels()[i]);
            // derivative of the clamped loss is zero where the clamp is active
            let dz = if (PROB_EPS..=1.0 - PROB_EPS).contains(&p) {
                (p - y) * inv_n
            } else {
                0.0
            };
            s.delta[n_layers - 1][0] = dz;
            for l in (0..n_layers).rev() {
                let w = &self.layout[2 * l];
                let b = &self.layout[2 * l + 1];
                let input = &s.acts[l];
                for o in 0..w.rows {
                    let dlt = s.delta[l][o];
                    if dlt == 0.0 {
                        continue;
                    }
                    let base = w.offset + o * w.cols;
                    for (g, a) in grad[base..base + w.cols].iter_mut().zip(input.iter()) {
                        *g += dlt * a;
                    }
                    grad[b.offset + o] += dlt;
                }
                if l > 0 {
                    let weights = &self.values[w.range()];
                    let (lower, upper) = s.delta.split_at_mut(l);
                    let prev = &mut lower[l - 1];
                    let cur = &upper[0];
                    for (k, pd) in prev.iter_mut().enumerate() {
                        let back: f64 = (0..w.rows).map(|o| weights[o * w.cols + k] * cur[o]).sum();
                        *pd = back
                            * self
                                .arch
                                .activation
                                .derivative(s.pre[l - 1][k], s.acts[l][k]);
                    }
                }
            }
        }
        grad
    }
}

struct Scratch {
    /// `acts[0]` is the input; `acts[l]` the activation feeding layer `l`.
    acts: Vec<Vec<f64>>,
    pre: Vec<Vec<f64>>,
    delta: Vec<Vec<f64>>,
}

impl Scratch {
    fn new(arch: &Architecture) -> Self {
        let dims = arch.layer_dims();
        let mut acts = vec![vec![0.0; arch.input_dim]];
        acts.extend(arch.hidden_dims.iter().map(|&h| vec![0.0; h]));
        let pre: Vec<Vec<f64>> = dims.iter().map(|&(_, o)| vec![0.0; o]).collect();
        let delta = pre.clone();
        Scratch { acts, pre, delta }
    }
}

#[inline]
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + libm::exp(-z))
    } else {
        let e = libm::exp(z);
        e / (1.0 + e)
    }
}

#[inline]
fn clamp_prob(p: f64) -> f64 {
    p.clamp(PROB_EPS, 1.0 - PROB_EPS)
}
