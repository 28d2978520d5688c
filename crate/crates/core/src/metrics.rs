//! Classification error and the true-positive-rate group gap.

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::model::ParamVector;

/// Objective vector `(error, ΔTPR)`, both minimized.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ObjectivePoint {
    pub error: f64,
    pub delta_tpr: f64,
}

impl ObjectivePoint {
    pub const fn new(error: f64, delta_tpr: f64) -> Self {
        ObjectivePoint { error, delta_tpr }
    }

    pub fn as_array(&self) -> [f64; 2] {
        [self.error, self.delta_tpr]
    }

    pub fn is_finite(&self) -> bool {
        self.error.is_finite() && self.delta_tpr.is_finite()
    }
}

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::LengthMismatch { left: a, right: b });
    }
    if a == 0 {
        return Err(Error::Empty);
    }
    Ok(())
}

pub fn accuracy(preds: &[u8], truth: &[u8]) -> Result<f64> {
    check_lengths(preds.len(), truth.len())?;
    let hits = preds.iter().zip(truth).filter(|(p, t)| p == t).count();
    Ok(hits as f64 / preds.len() as f64)
}

/// `P[Ŷ = y | G = g, Y = y]`.
pub fn group_tpr(preds: &[u8], truth: &[u8], groups: &[u8], group: u8, label: u8) -> Result<f64> {
    check_lengths(preds.len(), truth.len())?;
    check_lengths(preds.len(), groups.len())?;
    let mut total = 0usize;
    let mut hits = 0usize;
    for ((&p, &t), &g) in preds.iter().zip(truth).zip(groups) {
        if g == group && t == label {
            total += 1;
            hits += usize::from(p == label);
        }
    }
    if total == 0 {
        return Err(Error::UndefinedTpr { group, label });
    }
    Ok(hits as f64 / total as f64)
}

/// `|TPR(g=1, y=1) - TPR(g=0, y=1)|`.
pub fn delta_tpr(preds: &[u8], truth: &[u8], groups: &[u8]) -> Result<f64> {
    let t0 = group_tpr(preds, truth, groups, 0, 1)?;
    let t1 = group_tpr(preds, truth, groups, 1, 1)?;
    Ok((t1 - t0).abs())
}

/// `(1 - accuracy, ΔTPR)` of `p`'s predictions on `d`.
pub fn evaluate_objectives(p: &ParamVector, d: &Dataset) -> Result<ObjectivePoint> {
    d.validate_fairness_cells()?;
    let preds = p.predict_all(d)?;
    objectives_from_predictions(&preds, d)
}

pub fn objectives_from_predictions(preds: &[u8], d: &Dataset) -> Result<ObjectivePoint> {
    let acc = accuracy(preds, d.labels())?;
    let gap = delta_tpr(preds, d.labels(), d.groups())?;
    Ok(ObjectivePoint::new(1.0 - acc, gap))
}

/// Sample Pearson correlation coefficient, clamped to `[-1, 1]`.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    if xs.len() < 2 {
        return Err(Error::UndefinedCorrelation("fewer than two points"));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation("zero variance"));
    }
    Ok((sxy / libm::sqrt(sxx * syy)).clamp(-1.0, 1.0))
}
