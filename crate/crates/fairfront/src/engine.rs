//! The evolutionary loop and the single-model baselines.
//!
//! Per-individual tuning and evaluation fan out over a rayon pool; results
//! are gathered in index order and every random stream is derived from
//! `(master_seed, tag, generation, index)`, so outputs do not depend on the
//! worker count.

use std::time::{Duration, Instant};

use fairfront_core::data::Dataset;
use fairfront_core::indicators::hv_curve;
use fairfront_core::metrics::evaluate_objectives;
use fairfront_core::model::{Architecture, ParamVector, TrainConfig};
use fairfront_core::moea::{assign_fitness, mating_pool, pareto_selection, Archive, Individual};
use fairfront_core::rng::derive_seed;
use fairfront_core::variation::offspring;
use fairfront_core::ObjectivePoint;
use rayon::prelude::*;

use crate::config::{DataSource, RunConfig};
use crate::csv_io::load_csv;
use crate::error::{Error, Result};

/// Train/validation/test partitions of the configured data source.
#[derive(Debug, Clone)]
pub struct Splits {
    pub train: Dataset,
    pub val: Dataset,
    pub test: Dataset,
}

impl Splits {
    pub fn input_dim(&self) -> usize {
        self.train.input_dim()
    }
}

pub fn split_seed(cfg: &RunConfig) -> u64 {
    derive_seed(cfg.master_seed, "split", 0, 0)
}

pub fn trial_seed(cfg: &RunConfig, trial: usize) -> u64 {
    derive_seed(cfg.master_seed, "trial", trial as u64, 0)
}

pub fn baseline_seed(cfg: &RunConfig) -> u64 {
    derive_seed(cfg.master_seed, "baseline", 0, 0)
}

pub fn load_data(source: &DataSource) -> Result<Dataset> {
    match source {
        DataSource::Synthetic(s) => Ok(s.generate()?),
        DataSource::Csv { path } => load_csv(path),
    }
}

/// Loads and splits the data, then checks both groups have positives in the
/// training and validation partitions.
pub fn prepare_data(cfg: &RunConfig) -> Result<Splits> {
    let data = load_data(&cfg.data)?;
    let (train, val, test) = data
        .split(cfg.split_fractions(), split_seed(cfg))
        .map_err(|e| Error::Dataset(format!("split: {e}")))?;
    train
        .validate_fairness_cells()
        .map_err(|e| Error::Dataset(format!("training split: {e}")))?;
    val.validate_fairness_cells()
        .map_err(|e| Error::Dataset(format!("validation split: {e}")))?;
    Ok(Splits { train, val, test })
}

/// One evaluated individual.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluatedPoint {
    pub id: u64,
    pub generation: usize,
    pub val: ObjectivePoint,
    /// `None` when the test split lacks positives in some group.
    pub test: Option<ObjectivePoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub trial: usize,
    pub seed: u64,
    /// Archive `(id, objectives)` after initialization and after each generation.
    pub snapshots: Vec<Vec<(u64, ObjectivePoint)>>,
    pub archive: Archive,
    pub hv_curve: Vec<f64>,
    /// Every individual ever evaluated, in id order.
    pub evaluated: Vec<EvaluatedPoint>,
}

impl TrialResult {
    pub fn initial_hv(&self) -> f64 {
        self.hv_curve[0]
    }

    pub fn final_hv(&self) -> f64 {
        *self.hv_curve.last().expect("curve is never empty")
    }

    pub fn test_objectives(&self, id: u64) -> Option<ObjectivePoint> {
        self.evaluated
            .binary_search_by_key(&id, |p| p.id)
            .ok()
            .and_then(|i| self.evaluated[i].test)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaselineMethod {
    Vanilla,
    Cda,
    Oversample,
    Undersample,
    OversampleCda,
    UndersampleCda,
}

impl BaselineMethod {
    pub const ALL: [BaselineMethod; 6] = [
        BaselineMethod::Vanilla,
        BaselineMethod::Cda,
        BaselineMethod::Oversample,
        BaselineMethod::Undersample,
        BaselineMethod::OversampleCda,
        BaselineMethod::UndersampleCda,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BaselineMethod::Vanilla => "vanilla",
            BaselineMethod::Cda => "cda",
            BaselineMethod::Oversample => "oversample",
            BaselineMethod::Undersample => "undersample",
            BaselineMethod::OversampleCda => "oversample_cda",
            BaselineMethod::UndersampleCda => "undersample_cda",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == s)
    }

    /// Applies the pre-processing step to the training data.
    pub fn transform(self, train: &Dataset, seed: u64) -> Result<Dataset> {
        let sample_seed = derive_seed(seed, "baseline-sample", 0, 0);
        Ok(match self {
            BaselineMethod::Vanilla => train.clone(),
            BaselineMethod::Cda => train.cda_augment()?,
            BaselineMethod::Oversample => train.oversample(sample_seed)?,
            BaselineMethod::Undersample => train.undersample(sample_seed)?,
            BaselineMethod::OversampleCda => train.oversample(sample_seed)?.cda_augment()?,
            BaselineMethod::UndersampleCda => train.undersample(sample_seed)?.cda_augment()?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineResult {
    pub method: BaselineMethod,
    pub params: ParamVector,
    pub val: ObjectivePoint,
    pub test: Option<ObjectivePoint>,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub trials: Vec<TrialResult>,
    pub baselines: Option<Vec<BaselineResult>>,
    /// Wall-clock time; never written to artifacts.
    pub elapsed: Duration,
}

/// Trains one model on transformed training data for `epochs` epochs and
/// evaluates it on the untouched validation and test splits.
pub fn run_baseline(
    method: BaselineMethod,
    splits: &Splits,
    arch: &Architecture,
    train: &TrainConfig,
    seed: u64,
) -> Result<BaselineResult> {
    let data = method.transform(&splits.train, seed)?;
    let init = ParamVector::init(arch, derive_seed(seed, "baseline-init", 0, 0));
    let cfg = train.with_seed(derive_seed(seed, "baseline-tune", 0, 0));
    let params = init.tune(&data, &cfg)?;
    let val = evaluate_objectives(&params, &splits.val)?;
    let test = evaluate_objectives(&params, &splits.test).ok();
    Ok(BaselineResult {
        method,
        params,
        val,
        test,
    })
}

pub fn run_baselines(cfg: &RunConfig, splits: &Splits) -> Result<Vec<BaselineResult>> {
    let arch = cfg.model.architecture(splits.input_dim())?;
    let mut train = cfg.train.with_seed(0);
    train.epochs_per_tune = cfg.baseline_epochs();
    let seed = baseline_seed(cfg);
    with_pool(cfg.workers, || {
        BaselineMethod::ALL
            .par_iter()
            .map(|&m| run_baseline(m, splits, &arch, &train, seed))
            .collect::<Result<Vec<_>>>()
    })?
}

fn with_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

struct Evaluated {
    params: ParamVector,
    val: ObjectivePoint,
    test: Option<ObjectivePoint>,
}

fn tune_and_evaluate(start: ParamVector, splits: &Splits, train: &TrainConfig) -> Result<Evaluated> {
    let params = start.tune(&splits.train, train)?;
    let val = evaluate_objectives(&params, &splits.val)?;
    let test = evaluate_objectives(&params, &splits.test).ok();
    Ok(Evaluated { params, val, test })
}

/// Runs the evolutionary loop for one trial.
pub fn run_trial(cfg: &RunConfig, splits: &Splits, trial: usize) -> Result<TrialResult> {
    cfg.validate()?;
    with_pool(cfg.workers, || run_trial_in_pool(cfg, splits, trial))?
}

fn run_trial_in_pool(cfg: &RunConfig, splits: &Splits, trial: usize) -> Result<TrialResult> {
    let seed = trial_seed(cfg, trial);
    let arch = cfg.model.architecture(splits.input_dim())?;
    let lambda = cfg.population_size;
    let mut evaluated = Vec::new();
    let mut snapshots = Vec::with_capacity(cfg.generations + 1);

    let record = |evaluated: &mut Vec<EvaluatedPoint>, gen: usize, inds: &[Individual], tests: &[Option<ObjectivePoint>]| {
        for (ind, test) in inds.iter().zip(tests) {
            evaluated.push(EvaluatedPoint {
                id: ind.id,
                generation: gen,
                val: ind.objectives.expect("evaluated"),
                test: *test,
            });
        }
    };
    let snapshot = |archive: &Archive| -> Vec<(u64, ObjectivePoint)> {
        archive.entries().iter().map(|e| (e.id, e.objectives)).collect()
    };

    // initial population: tune, archive, evaluate, rank
    let results: Vec<Evaluated> = (0..lambda)
        .into_par_iter()
        .map(|i| {
            let start = ParamVector::init(&arch, derive_seed(seed, "init", i as u64, 0));
            tune_and_evaluate(start, splits, &cfg.train.with_seed(derive_seed(seed, "tune", 0, i as u64)))
        })
        .collect::<Result<_>>()?;
    let (mut population, tests) = into_individuals(results, 0);
    let mut next_id = lambda as u64;
    record(&mut evaluated, 0, &population, &tests);
    let mut archive = Archive::new();
    archive.update(&population)?;
    snapshots.push(snapshot(&archive));
    assign_fitness(&mut population)?;

    for gen in 1..=cfg.generations {
        let pool_idx = mating_pool(&population, lambda, derive_seed(seed, "mating", gen as u64, 0))?;
        let pool: Vec<&ParamVector> = pool_idx.iter().map(|&i| &population[i].params).collect();
        let variation_seed = derive_seed(seed, "variation", gen as u64, 0);
        let results: Vec<Evaluated> = (0..lambda as u64)
            .into_par_iter()
            .map(|i| {
                let child = offspring(&pool, i, cfg.mutation_lambda, cfg.merge_alpha, variation_seed)?;
                tune_and_evaluate(child, splits, &cfg.train.with_seed(derive_seed(seed, "tune", gen as u64, i)))
            })
            .collect::<Result<_>>()?;
        let (children, tests) = into_individuals(results, next_id);
        next_id += lambda as u64;
        record(&mut evaluated, gen, &children, &tests);
        archive.update(&children)?;
        snapshots.push(snapshot(&archive));

        let mut union = population;
        union.extend(children);
        assign_fitness(&mut union)?;
        population = pareto_selection(union, lambda)?;
    }

    let points: Vec<Vec<ObjectivePoint>> = snapshots
        .iter()
        .map(|s| s.iter().map(|&(_, p)| p).collect())
        .collect();
    let hv_curve = hv_curve(&points, cfg.hv_reference())?;
    Ok(TrialResult {
        trial,
        seed,
        snapshots,
        archive,
        hv_curve,
        evaluated,
    })
}

fn into_individuals(results: Vec<Evaluated>, first_id: u64) -> (Vec<Individual>, Vec<Option<ObjectivePoint>>) {
    results
        .into_iter()
        .enumerate()
        .map(|(k, r)| {
            let mut ind = Individual::new(first_id + k as u64, r.params);
            ind.objectives = Some(r.val);
            (ind, r.test)
        })
        .unzip()
}

/// Runs every trial and, when `with_baselines`, the six baselines.
pub fn run_moel(cfg: &RunConfig, with_baselines: bool) -> Result<RunResult> {
    cfg.validate()?;
    let started = Instant::now();
    let splits = prepare_data(cfg)?;
    run_prepared(cfg, &splits, with_baselines, started)
}

pub fn run_prepared(cfg: &RunConfig, splits: &Splits, with_baselines: bool, started: Instant) -> Result<RunResult> {
    let trials = (0..cfg.trials)
        .map(|t| {
            let r = run_trial(cfg, splits, t)?;
            log::info!(
                "trial {t}: archive {} points, HV {:.4} -> {:.4}",
                r.archive.len(),
                r.initial_hv(),
                r.final_hv()
            );
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;
    let baselines = if with_baselines {
        Some(run_baselines(cfg, splits)?)
    } else {
        None
    };
    Ok(RunResult {
        trials,
        baselines,
        elapsed: started.elapsed(),
    })
}
