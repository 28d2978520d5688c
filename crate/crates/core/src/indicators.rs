//! Exact two-objective hypervolume.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::metrics::ObjectivePoint;

pub const DEFAULT_REFERENCE: ObjectivePoint = ObjectivePoint::new(1.0, 1.0);

/// Area dominated by `points` inside the box bounded by `reference`.
///
/// Points on or beyond the reference boundary contribute nothing.
pub fn hypervolume_2d(points: &[ObjectivePoint], reference: ObjectivePoint) -> Result<f64> {
    if !reference.is_finite() || points.iter().any(|p| !p.is_finite()) {
        return Err(Error::NonFinite("hypervolume input"));
    }
    let mut inside: Vec<ObjectivePoint> = points
        .iter()
        .copied()
        .filter(|p| p.error < reference.error && p.delta_tpr < reference.delta_tpr)
        .collect();
    inside.sort_by(|a, b| {
        a.error
            .total_cmp(&b.error)
            .then(a.delta_tpr.total_cmp(&b.delta_tpr))
    });
    // sweep by ascending error keeping the running minimum of ΔTPR;
    // each strict improvement starts a new staircase step
    let mut steps: Vec<ObjectivePoint> = Vec::with_capacity(inside.len());
    for p in inside {
        match steps.last() {
            Some(last) if p.delta_tpr >= last.delta_tpr => {}
            _ => steps.push(p),
        }
    }
    let mut area = 0.0;
    for (k, p) in steps.iter().enumerate() {
        let next_error = steps.get(k + 1).map_or(reference.error, |q| q.error);
        area += (next_error - p.error) * (reference.delta_tpr - p.delta_tpr);
    }
    Ok(area)
}

/// Hypervolume of each snapshot, in order.
pub fn hv_curve<S: AsRef<[ObjectivePoint]>>(snapshots: &[S], reference: ObjectivePoint) -> Result<Vec<f64>> {
    if snapshots.is_empty() {
        return Err(Error::Empty);
    }
    snapshots
        .iter()
        .map(|s| hypervolume_2d(s.as_ref(), reference))
        .collect()
}
