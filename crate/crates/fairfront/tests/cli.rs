use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use fairfront_core::metrics::pearson;

fn fairfront(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fairfront"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("FAIRFRONT_OUT")
        .output()
        .expect("spawn fairfront")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

const TINY: &[&str] = &["run", "--generations", "1", "--population", "2", "--trials", "1"];

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    read(path)
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn tiny_run_then_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = fairfront(TINY, &out);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["manifest.toml", "trial_000/hv_curve.csv", "trial_000/points.csv", "trial_000/snapshots.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
    assert_eq!(rows(&out.join("trial_000/hv_curve.csv")).len(), 2);

    let o = fairfront(&["report"], &out);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report = out.join("report");
    for f in ["hv_curve.csv", "all_points.csv", "front.csv", "comparison.csv", "fronts_by_trial.csv", "stats.txt"] {
        assert!(report.join(f).exists(), "{f}");
    }
    // one trial: no spread
    for r in rows(&report.join("hv_curve.csv")) {
        assert_eq!(r[2], "0");
    }
}

#[test]
fn report_front_is_nondominated_and_stats_match_it() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = fairfront(&["run", "--generations", "3", "--population", "6", "--trials", "2", "--with-baselines"], &out);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = fairfront(&["report"], &out);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report = out.join("report");

    let parse = |r: &[String]| (r[0].parse::<f64>().unwrap(), r[1].parse::<f64>().unwrap());
    let front: Vec<(f64, f64)> = rows(&report.join("front.csv")).iter().map(|r| parse(r)).collect();
    let all: Vec<(f64, f64)> = rows(&report.join("all_points.csv")).iter().map(|r| parse(r)).collect();
    let dom = |a: (f64, f64), b: (f64, f64)| a.0 <= b.0 && a.1 <= b.1 && (a.0 < b.0 || a.1 < b.1);
    assert!(!front.is_empty());
    for f in &front {
        assert!(all.contains(f));
        assert!(!all.iter().any(|a| dom(*a, *f)));
    }
    for a in &all {
        assert!(front.iter().any(|f| f == a || dom(*f, *a)));
    }

    let stats = read(&report.join("stats.txt"));
    let line = |key: &str| {
        stats
            .lines()
            .find_map(|l| l.strip_prefix(&format!("{key}: ")))
            .unwrap_or_else(|| panic!("no {key} in {stats}"))
            .to_string()
    };
    assert_eq!(line("front_points"), front.len().to_string());
    let xs: Vec<f64> = front.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = front.iter().map(|p| p.1).collect();
    match pearson(&xs, &ys) {
        Ok(r) => assert_eq!(line("pearson_r").parse::<f64>().unwrap(), r),
        Err(_) => assert_eq!(line("pearson_r"), "undefined"),
    }
    assert_eq!(line("baseline_points"), "6");
    let comparison = rows(&report.join("comparison.csv"));
    assert_eq!(comparison.len(), front.len() + 6);
}

#[test]
fn same_seed_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["run", "--generations", "2", "--population", "4", "--trials", "2", "--seed", "7"];
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert_eq!(code(&fairfront(&args, &a)), 0);
    let mut with_workers = args.to_vec();
    with_workers.extend(["--workers", "2"]);
    assert_eq!(code(&fairfront(&with_workers, &b)), 0);
    for f in [
        "manifest.toml",
        "trial_000/hv_curve.csv",
        "trial_000/points.csv",
        "trial_001/snapshots.csv",
    ] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let c = dir.path().join("c");
    let mut other = args.to_vec();
    *other.last_mut().unwrap() = "8";
    assert_eq!(code(&fairfront(&other, &c)), 0);
    assert_ne!(
        fs::read(a.join("trial_000/points.csv")).unwrap(),
        fs::read(c.join("trial_000/points.csv")).unwrap()
    );
}

#[test]
fn baselines_emit_six_rows_reproducibly() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b");
    let first = fairfront(&["baselines", "--epochs", "2"], &out);
    assert_eq!(code(&first), 0, "{}", String::from_utf8_lossy(&first.stderr));
    let stdout = String::from_utf8(first.stdout.clone()).unwrap();
    let names: Vec<&str> = stdout.lines().map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(
        names,
        ["vanilla", "cda", "oversample", "undersample", "oversample_cda", "undersample_cda"]
    );
    let csv = fs::read(out.join("baselines.csv")).unwrap();
    let second = fairfront(&["baselines", "--epochs", "2"], &out);
    assert_eq!(code(&second), 0);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(csv, fs::read(out.join("baselines.csv")).unwrap());
}

#[test]
fn missing_data_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = TINY.to_vec();
    args.extend(["--data", "/definitely/not/here.csv"]);
    let o = fairfront(&args, &dir.path().join("out"));
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn malformed_csv_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("bad.csv");
    fs::write(&data, "label,group,f0\n1,0,0.5\n2,1,0.1\n").unwrap();
    let mut args = TINY.to_vec();
    args.extend(["--data", data.to_str().unwrap()]);
    let o = fairfront(&args, &dir.path().join("out"));
    assert_eq!(code(&o), 2);
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.contains("label"), "{stderr}");
}

#[test]
fn bad_config_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    fs::write(&cfg, "population_size = 1\n").unwrap();
    let mut args = TINY[..1].to_vec();
    args.extend(["--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&fairfront(&args, &dir.path().join("out"))), 1);

    fs::write(&cfg, "no_such_key = 3\n").unwrap();
    assert_eq!(code(&fairfront(&args, &dir.path().join("out"))), 1);

    let o = fairfront(&["run", "--generations", "many"], &dir.path().join("out"));
    assert_eq!(code(&o), 1);

    // the manifest stores seeds in signed 64-bit TOML integers
    let o = fairfront(&["run", "--seed", "18446744073709551615"], &dir.path().join("out"));
    assert_eq!(code(&o), 1);
}

#[test]
fn config_file_is_honoured_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    fs::write(
        &cfg,
        "population_size = 3\ngenerations = 5\ntrials = 1\n\n[data]\nsource = \"synthetic\"\nn = 900\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = fairfront(&["run", "--config", cfg.to_str().unwrap(), "--generations", "1"], &out);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(rows(&out.join("trial_000/hv_curve.csv")).len(), 2);
    assert_eq!(rows(&out.join("trial_000/points.csv")).len(), 6);
    let manifest = read(&out.join("manifest.toml"));
    assert!(manifest.contains("n = 900"), "{manifest}");
}

#[test]
fn report_on_missing_or_corrupt_run_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&fairfront(&["report"], &dir.path().join("nothing"))), 3);

    let out = dir.path().join("run");
    assert_eq!(code(&fairfront(TINY, &out)), 0);
    let ckpt = fs::read_dir(out.join("trial_000/archive")).unwrap().next().unwrap().unwrap().path();
    let bytes = fs::read(&ckpt).unwrap();
    fs::write(&ckpt, &bytes[..bytes.len() - 5]).unwrap();
    assert_eq!(code(&fairfront(&["report"], &out)), 3);

    assert_eq!(code(&fairfront(TINY, &out)), 0);
    fs::write(out.join("trial_000/hv_curve.csv"), "generation,hv\n0,abc\n").unwrap();
    assert_eq!(code(&fairfront(&["report"], &out)), 3);
}
