//! On-disk layout of a run directory.
//!
//! ```text
//! <out>/manifest.toml              config echo, seeds, split sizes
//! <out>/trial_000/hv_curve.csv     generation,hv
//! <out>/trial_000/snapshots.csv    generation,id,error,delta_tpr
//! <out>/trial_000/points.csv       id,generation,error,delta_tpr,test_error,test_delta_tpr
//! <out>/trial_000/archive/*.ckpt   final archive, one checkpoint per entry
//! <out>/baselines.csv              method,error,delta_tpr,test_error,test_delta_tpr
//! <out>/baselines/<method>.ckpt
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use fairfront_core::moea::ArchiveEntry;
use fairfront_core::ObjectivePoint;
use serde::{Deserialize, Serialize};

use crate::checkpoint;
use crate::config::RunConfig;
use crate::engine::{baseline_seed, split_seed, trial_seed, BaselineResult, Splits, TrialResult};
use crate::error::{Error, Result};
use crate::fmt_f64;

pub const MANIFEST: &str = "manifest.toml";
pub const BASELINES: &str = "baselines.csv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitRows {
    pub train: usize,
    pub val: usize,
    pub test: usize,
}

/// Seeds are written as hex strings since TOML integers are signed 64-bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: u32,
    pub input_dim: usize,
    pub split_seed: String,
    pub baseline_seed: String,
    pub trial_seeds: Vec<String>,
    pub rows: SplitRows,
    pub config: RunConfig,
}

impl Manifest {
    pub fn new(cfg: &RunConfig, splits: &Splits) -> Self {
        Manifest {
            format: 1,
            input_dim: splits.input_dim(),
            split_seed: hex(split_seed(cfg)),
            baseline_seed: hex(baseline_seed(cfg)),
            trial_seeds: (0..cfg.trials).map(|t| hex(trial_seed(cfg, t))).collect(),
            rows: SplitRows {
                train: splits.train.len(),
                val: splits.val.len(),
                test: splits.test.len(),
            },
            config: cfg.clone(),
        }
    }
}

fn hex(v: u64) -> String {
    format!("{v:#018x}")
}

pub fn trial_dir(out: &Path, trial: usize) -> PathBuf {
    out.join(format!("trial_{trial:03}"))
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

fn write_file(path: &Path, body: &str) -> Result<()> {
    fs::write(path, body).map_err(|e| Error::io(path, e))
}

fn opt(p: Option<f64>) -> String {
    p.map(fmt_f64).unwrap_or_default()
}

pub fn write_manifest(out: &Path, manifest: &Manifest) -> Result<()> {
    create_dir(out)?;
    let text = toml::to_string(manifest).map_err(|e| Error::Config(format!("manifest: {e}")))?;
    write_file(&out.join(MANIFEST), &text)
}

pub fn write_trial(out: &Path, result: &TrialResult) -> Result<()> {
    let dir = trial_dir(out, result.trial);
    if dir.exists() {
        fs::remove_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    }
    create_dir(&dir.join("archive"))?;

    let mut hv = String::from("generation,hv\n");
    for (g, v) in result.hv_curve.iter().enumerate() {
        hv.push_str(&format!("{g},{}\n", fmt_f64(*v)));
    }
    write_file(&dir.join("hv_curve.csv"), &hv)?;

    let mut snaps = String::from("generation,id,error,delta_tpr\n");
    for (g, snap) in result.snapshots.iter().enumerate() {
        for (id, p) in snap {
            snaps.push_str(&format!("{g},{id},{},{}\n", fmt_f64(p.error), fmt_f64(p.delta_tpr)));
        }
    }
    write_file(&dir.join("snapshots.csv"), &snaps)?;

    let mut points = String::from("id,generation,error,delta_tpr,test_error,test_delta_tpr\n");
    for p in &result.evaluated {
        points.push_str(&format!(
            "{},{},{},{},{},{}\n",
            p.id,
            p.generation,
            fmt_f64(p.val.error),
            fmt_f64(p.val.delta_tpr),
            opt(p.test.map(|t| t.error)),
            opt(p.test.map(|t| t.delta_tpr)),
        ));
    }
    write_file(&dir.join("points.csv"), &points)?;

    for entry in result.archive.entries() {
        checkpoint::write(entry, &dir.join("archive").join(format!("{:08}.ckpt", entry.id)))?;
    }
    Ok(())
}

pub fn write_baselines(out: &Path, results: &[BaselineResult]) -> Result<()> {
    let dir = out.join("baselines");
    create_dir(&dir)?;
    let mut csv = String::from("method,error,delta_tpr,test_error,test_delta_tpr\n");
    for (k, r) in results.iter().enumerate() {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            r.method.name(),
            fmt_f64(r.val.error),
            fmt_f64(r.val.delta_tpr),
            opt(r.test.map(|t| t.error)),
            opt(r.test.map(|t| t.delta_tpr)),
        ));
        let entry = ArchiveEntry {
            id: k as u64,
            objectives: r.val,
            params: r.params.clone(),
        };
        checkpoint::write(&entry, &dir.join(format!("{}.ckpt", r.method.name())))?;
    }
    write_file(&out.join(BASELINES), &csv)
}

// ---------------------------------------------------------------------------
// Reading
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct PointRow {
    pub id: u64,
    pub generation: usize,
    pub val: ObjectivePoint,
}

#[derive(Debug, Clone)]
pub struct TrialArtifacts {
    pub trial: usize,
    pub hv_curve: Vec<f64>,
    pub points: Vec<PointRow>,
    pub archive: Vec<ArchiveEntry>,
}

pub fn read_manifest(out: &Path) -> Result<Manifest> {
    let path = out.join(MANIFEST);
    let text = fs::read_to_string(&path).map_err(|e| Error::artifact(&path, e.to_string()))?;
    toml::from_str(&text).map_err(|e| Error::artifact(&path, e.to_string()))
}

fn read_records(path: &Path, header: &[&str]) -> Result<Vec<csv::StringRecord>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::artifact(path, e.to_string()))?;
    let found = reader
        .headers()
        .map_err(|e| Error::artifact(path, e.to_string()))?
        .clone();
    if found.iter().collect::<Vec<_>>() != header {
        return Err(Error::artifact(path, format!("unexpected header {found:?}")));
    }
    reader
        .records()
        .map(|r| r.map_err(|e| Error::artifact(path, e.to_string())))
        .collect()
}

fn field<T: std::str::FromStr>(path: &Path, rec: &csv::StringRecord, i: usize) -> Result<T> {
    rec.get(i)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::artifact(path, format!("bad value in column {i} of {rec:?}")))
}

pub fn read_trial(out: &Path, trial: usize) -> Result<TrialArtifacts> {
    let dir = trial_dir(out, trial);

    let path = dir.join("hv_curve.csv");
    let hv_curve = read_records(&path, &["generation", "hv"])?
        .iter()
        .enumerate()
        .map(|(g, rec)| {
            if field::<usize>(&path, rec, 0)? != g {
                return Err(Error::artifact(&path, "generations out of order"));
            }
            field(&path, rec, 1)
        })
        .collect::<Result<Vec<f64>>>()?;
    if hv_curve.is_empty() {
        return Err(Error::artifact(&path, "empty curve"));
    }

    let path = dir.join("points.csv");
    let points = read_records(
        &path,
        &["id", "generation", "error", "delta_tpr", "test_error", "test_delta_tpr"],
    )?
    .iter()
    .map(|rec| {
        Ok(PointRow {
            id: field(&path, rec, 0)?,
            generation: field(&path, rec, 1)?,
            val: ObjectivePoint::new(field(&path, rec, 2)?, field(&path, rec, 3)?),
        })
    })
    .collect::<Result<Vec<_>>>()?;

    let adir = dir.join("archive");
    let mut files: Vec<PathBuf> = fs::read_dir(&adir)
        .map_err(|e| Error::artifact(&adir, e.to_string()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "ckpt"))
        .collect();
    files.sort();
    let archive = files
        .iter()
        .map(|p| checkpoint::read(p))
        .collect::<Result<Vec<_>>>()?;
    if archive.is_empty() {
        return Err(Error::artifact(&adir, "no checkpoints"));
    }

    Ok(TrialArtifacts {
        trial,
        hv_curve,
        points,
        archive,
    })
}

/// `(method, validation objectives)` rows, or `None` if baselines were never run.
pub fn read_baselines(out: &Path) -> Result<Option<Vec<(String, ObjectivePoint)>>> {
    let path = out.join(BASELINES);
    if !path.exists() {
        return Ok(None);
    }
    let rows = read_records(
        &path,
        &["method", "error", "delta_tpr", "test_error", "test_delta_tpr"],
    )?
    .iter()
    .map(|rec| {
        Ok((
            rec.get(0).unwrap_or_default().to_string(),
            ObjectivePoint::new(field(&path, rec, 1)?, field(&path, rec, 2)?),
        ))
    })
    .collect::<Result<Vec<_>>>()?;
    Ok(Some(rows))
}
