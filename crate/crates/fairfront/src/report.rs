//! Report tables derived from a run directory.
//!
//! Everything here is a pure function of the artifacts on disk.

use std::fs;
use std::path::Path;

use fairfront_core::metrics::pearson;
use fairfront_core::moea::dominates;
use fairfront_core::ObjectivePoint;

use crate::artifacts::{read_baselines, read_manifest, read_trial, TrialArtifacts};
use crate::error::{Error, Result};
use crate::fmt_f64;

/// One labelled point of the combined report.
#[derive(Debug, Clone, PartialEq)]
pub struct TaggedPoint {
    pub trial: usize,
    pub id: u64,
    pub point: ObjectivePoint,
}

#[derive(Debug, Clone)]
pub struct Report {
    /// `(generation, mean HV, population std HV)` over trials.
    pub hv_curve: Vec<(usize, f64, f64)>,
    pub all_points: Vec<TaggedPoint>,
    pub front: Vec<TaggedPoint>,
    pub fronts_by_trial: Vec<TaggedPoint>,
    pub baselines: Vec<(String, ObjectivePoint)>,
    pub pearson: Option<f64>,
    /// Baselines dominated by at least one front point.
    pub baselines_dominated: usize,
    /// Front points dominated by at least one baseline.
    pub front_dominated_by_baselines: usize,
}

/// Non-dominated subset in input order; of identical points only the first is kept.
pub fn nondominated(points: &[TaggedPoint]) -> Vec<TaggedPoint> {
    points
        .iter()
        .enumerate()
        .filter(|(i, p)| {
            !points.iter().enumerate().any(|(j, q)| {
                dominates(&q.point, &p.point) || (j < *i && q.point == p.point)
            })
        })
        .map(|(_, p)| p.clone())
        .collect()
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

pub fn build(trials: &[TrialArtifacts], baselines: Vec<(String, ObjectivePoint)>) -> Result<Report> {
    let Some(first) = trials.first() else {
        return Err(Error::artifact("", "no trials"));
    };
    let len = first.hv_curve.len();
    if trials.iter().any(|t| t.hv_curve.len() != len) {
        return Err(Error::artifact("", "trials have different curve lengths"));
    }
    let hv_curve = (0..len)
        .map(|g| {
            let col: Vec<f64> = trials.iter().map(|t| t.hv_curve[g]).collect();
            let (m, s) = mean_std(&col);
            (g, m, s)
        })
        .collect();

    let all_points: Vec<TaggedPoint> = trials
        .iter()
        .flat_map(|t| {
            t.points.iter().map(|p| TaggedPoint {
                trial: t.trial,
                id: p.id,
                point: p.val,
            })
        })
        .collect();
    let front = nondominated(&all_points);
    let fronts_by_trial = trials
        .iter()
        .flat_map(|t| {
            t.archive.iter().map(|e| TaggedPoint {
                trial: t.trial,
                id: e.id,
                point: e.objectives,
            })
        })
        .collect();

    let xs: Vec<f64> = front.iter().map(|p| p.point.error).collect();
    let ys: Vec<f64> = front.iter().map(|p| p.point.delta_tpr).collect();
    let pearson = pearson(&xs, &ys).ok();
    let baselines_dominated = baselines
        .iter()
        .filter(|(_, b)| front.iter().any(|f| dominates(&f.point, b)))
        .count();
    let front_dominated_by_baselines = front
        .iter()
        .filter(|f| baselines.iter().any(|(_, b)| dominates(b, &f.point)))
        .count();

    Ok(Report {
        hv_curve,
        all_points,
        front,
        fronts_by_trial,
        baselines,
        pearson,
        baselines_dominated,
        front_dominated_by_baselines,
    })
}

/// Reads every trial listed in the run manifest.
pub fn load(run_dir: &Path) -> Result<Report> {
    let manifest = read_manifest(run_dir)?;
    let trials = (0..manifest.config.trials)
        .map(|t| read_trial(run_dir, t))
        .collect::<Result<Vec<_>>>()?;
    let baselines = read_baselines(run_dir)?.unwrap_or_default();
    build(&trials, baselines)
}

fn tagged_csv(points: &[TaggedPoint]) -> String {
    let mut s = String::from("error,delta_tpr,trial,id\n");
    for p in points {
        s.push_str(&format!(
            "{},{},{},{}\n",
            fmt_f64(p.point.error),
            fmt_f64(p.point.delta_tpr),
            p.trial,
            p.id
        ));
    }
    s
}

impl Report {
    pub fn stats_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("front_points: {}\n", self.front.len()));
        s.push_str(&format!(
            "pearson_r: {}\n",
            self.pearson.map_or("undefined".to_string(), fmt_f64)
        ));
        s.push_str(&format!("baseline_points: {}\n", self.baselines.len()));
        s.push_str(&format!("baselines_dominated_by_front: {}\n", self.baselines_dominated));
        s.push_str(&format!(
            "front_points_dominated_by_baselines: {}\n",
            self.front_dominated_by_baselines
        ));
        for (name, b) in &self.baselines {
            let weakly = self
                .front
                .iter()
                .any(|f| f.point.error <= b.error && f.point.delta_tpr <= b.delta_tpr);
            s.push_str(&format!("weakly_dominated.{name}: {weakly}\n"));
        }
        if let (Some(first), Some(last)) = (self.hv_curve.first(), self.hv_curve.last()) {
            s.push_str(&format!("mean_hv_initial: {}\n", fmt_f64(first.1)));
            s.push_str(&format!("mean_hv_final: {}\n", fmt_f64(last.1)));
        }
        s
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let put = |name: &str, body: String| {
            let p = dir.join(name);
            fs::write(&p, body).map_err(|e| Error::io(&p, e))
        };
        let mut hv = String::from("generation,mean_hv,std_hv\n");
        for (g, m, s) in &self.hv_curve {
            hv.push_str(&format!("{g},{},{}\n", fmt_f64(*m), fmt_f64(*s)));
        }
        put("hv_curve.csv", hv)?;
        put("all_points.csv", tagged_csv(&self.all_points))?;
        put("front.csv", tagged_csv(&self.front))?;
        put("fronts_by_trial.csv", {
            let mut s = String::from("trial,id,error,delta_tpr\n");
            for p in &self.fronts_by_trial {
                s.push_str(&format!(
                    "{},{},{},{}\n",
                    p.trial,
                    p.id,
                    fmt_f64(p.point.error),
                    fmt_f64(p.point.delta_tpr)
                ));
            }
            s
        })?;
        put("comparison.csv", {
            let mut s = String::from("source,error,delta_tpr\n");
            for p in &self.front {
                s.push_str(&format!("front,{},{}\n", fmt_f64(p.point.error), fmt_f64(p.point.delta_tpr)));
            }
            for (name, b) in &self.baselines {
                s.push_str(&format!("{name},{},{}\n", fmt_f64(b.error), fmt_f64(b.delta_tpr)));
            }
            s
        })?;
        put("stats.txt", self.stats_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tp(trial: usize, id: u64, e: f64, d: f64) -> TaggedPoint {
        TaggedPoint {
            trial,
            id,
            point: ObjectivePoint::new(e, d),
        }
    }

    #[test]
    fn nondominated_keeps_first_duplicate() {
        let pts = [tp(0, 1, 0.2, 0.2), tp(0, 2, 0.3, 0.3), tp(1, 1, 0.2, 0.2), tp(1, 3, 0.1, 0.5)];
        let front = nondominated(&pts);
        assert_eq!(front, vec![tp(0, 1, 0.2, 0.2), tp(1, 3, 0.1, 0.5)]);
    }

    #[test]
    fn population_std_of_single_value_is_zero() {
        assert_eq!(mean_std(&[0.4]), (0.4, 0.0));
    }
}
