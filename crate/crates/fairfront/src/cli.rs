//! Command-line front end: `run`, `baselines`, `report`.

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::artifacts::{write_baselines, write_manifest, write_trial, Manifest};
use crate::config::{DataSource, RunConfig};
use crate::engine::{prepare_data, run_baselines, run_trial};
use crate::error::Result;
use crate::report;

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "FAIRFRONT_OUT";

#[derive(Debug, Parser)]
#[command(name = "fairfront", version, about = "Evolve classifiers towards the accuracy/fairness Pareto front")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the evolutionary search for every trial and write its artifacts.
    Run(RunArgs),
    /// Train the six single-model baselines on the same splits.
    Baselines(BaselineArgs),
    /// Summarize a run directory into CSV tables and statistics.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// TOML config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Path of a CSV dataset, or `synthetic`.
    #[arg(long)]
    pub data: Option<String>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long, env = OUT_ENV, default_value = "fairfront-out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub generations: Option<usize>,
    #[arg(long)]
    pub population: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Also train and record the baselines.
    #[arg(long)]
    pub with_baselines: bool,
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Training epochs per baseline model.
    #[arg(long)]
    pub epochs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Run directory to summarize.
    #[arg(long, env = OUT_ENV, default_value = "fairfront-out")]
    pub out: PathBuf,
    /// Where to write the report; defaults to `<out>/report`.
    #[arg(long)]
    pub report_dir: Option<PathBuf>,
}

fn base_config(common: &CommonArgs) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.master_seed = seed;
    }
    if let Some(w) = common.workers {
        cfg.workers = w;
    }
    match common.data.as_deref() {
        None => {}
        Some("synthetic") => {
            if !matches!(cfg.data, DataSource::Synthetic(_)) {
                cfg.data = DataSource::default();
            }
        }
        Some(path) => {
            cfg.data = DataSource::Csv {
                path: PathBuf::from(path),
            }
        }
    }
    Ok(cfg)
}

pub fn run_config(args: &RunArgs) -> Result<RunConfig> {
    let mut cfg = base_config(&args.common)?;
    if let Some(g) = args.generations {
        cfg.generations = g;
    }
    if let Some(p) = args.population {
        cfg.population_size = p;
    }
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn cmd_run(args: &RunArgs) -> Result<()> {
    let started = Instant::now();
    let cfg = run_config(args)?;
    let splits = prepare_data(&cfg)?;
    let out = &args.common.out;
    write_manifest(out, &Manifest::new(&cfg, &splits))?;
    for t in 0..cfg.trials {
        let r = run_trial(&cfg, &splits, t)?;
        println!(
            "trial {t}: archive {} points, hv {} -> {}",
            r.archive.len(),
            r.initial_hv(),
            r.final_hv()
        );
        write_trial(out, &r)?;
    }
    if args.with_baselines {
        let results = run_baselines(&cfg, &splits)?;
        write_baselines(out, &results)?;
    }
    eprintln!("finished in {:.1?}", started.elapsed());
    Ok(())
}

pub fn cmd_baselines(args: &BaselineArgs) -> Result<()> {
    let mut cfg = base_config(&args.common)?;
    if args.epochs.is_some() {
        cfg.baseline_epochs = args.epochs;
    }
    cfg.validate()?;
    let splits = prepare_data(&cfg)?;
    let results = run_baselines(&cfg, &splits)?;
    let out = &args.common.out;
    // the report needs the manifest to locate trials; keep an existing one
    if !out.join(crate::artifacts::MANIFEST).exists() {
        write_manifest(out, &Manifest::new(&cfg, &splits))?;
    }
    write_baselines(out, &results)?;
    for r in &results {
        println!("{},{},{}", r.method.name(), r.val.error, r.val.delta_tpr);
    }
    Ok(())
}

pub fn cmd_report(args: &ReportArgs) -> Result<()> {
    let rep = report::load(&args.out)?;
    let dir = args
        .report_dir
        .clone()
        .unwrap_or_else(|| args.out.join("report"));
    rep.write(&dir)?;
    print!("{}", rep.stats_text());
    Ok(())
}

pub fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Baselines(a) => cmd_baselines(a),
        Command::Report(a) => cmd_report(a),
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

