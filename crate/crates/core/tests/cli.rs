use std::path::Path;
use std::process::{Command, Output};

use pdla::harness::ExperimentConfig;

fn pdla(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pdla"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn exp1_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e1");
    let o = pdla(&["exp1", "--out", path(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["report.txt", "dla_rows.csv", "lstm_rows.csv", "config.txt"] {
        assert!(out.join(f).is_file(), "missing {f}");
    }
    let text = stdout(&o);
    assert!(text.contains("DLA:") && text.contains("LSTM:"));
}

#[test]
fn exp2_writes_sweep_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e2");
    let o = pdla(&["exp2", "--out", path(&out), "--svg"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("sweep.csv").is_file());
    for v in [1, 5, 10] {
        assert!(out.join(format!("trend_sks_{v}.csv")).is_file());
        let svg = std::fs::read_to_string(out.join(format!("trend_sks_{v}.svg"))).unwrap();
        assert!(svg.starts_with("<svg"));
    }
}

#[test]
fn exp3_without_svg_writes_only_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e3");
    let o = pdla(&["exp3", "--out", path(&out)]);
    assert!(o.status.success());
    assert!(out.join("trend_l_ext_60.csv").is_file());
    assert!(!out.join("trend_l_ext_60.svg").exists());
}

#[test]
fn sweep_header_hash_matches_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.cfg");
    std::fs::write(&cfg_path, "# small run\nsks_sweep = 1, 2\nseed = 11\n").unwrap();
    let out = dir.path().join("e2");
    let o = pdla(&["exp2", "--config", path(&cfg_path), "--out", path(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let sweep = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    let hash = sweep
        .lines()
        .find_map(|l| l.strip_prefix("# config_hash = "))
        .unwrap();
    let mut cfg = ExperimentConfig::from_file(&cfg_path).unwrap();
    cfg.out = Some(out.clone());
    assert_eq!(hash, cfg.hash());
    assert!(sweep.contains("# seed = 11"));

    let saved = std::fs::read_to_string(out.join("config.txt")).unwrap();
    assert_eq!(ExperimentConfig::parse(&saved).unwrap().hash(), hash);
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e2");
    let o = pdla(&["exp2", "--seed", "3", "--out", path(&out)]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("# seed = 3"));
}

#[test]
fn mapca_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let y = dir.path().join("y.csv");
    let yhat = dir.path().join("yhat.csv");
    std::fs::write(&y, "1,2\n3,4\n").unwrap();
    std::fs::write(&yhat, "1,2\n3,5\n").unwrap();
    let o = pdla(&[
        "mapca",
        "--y",
        path(&y),
        "--yhat",
        path(&yhat),
        "--tol",
        "0.5",
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("MAPCA 75.0000% (3/4"), "{}", stdout(&o));
}

#[test]
fn missing_files_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.cfg");
    let o = pdla(&[
        "exp2",
        "--config",
        path(&missing),
        "--out",
        path(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(2));

    let y = dir.path().join("y.csv");
    std::fs::write(&y, "1\n").unwrap();
    let o = pdla(&[
        "mapca",
        "--y",
        path(&missing),
        "--yhat",
        path(&y),
        "--tol",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn invalid_config_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "no_such_key = 1\n").unwrap();
    let o = pdla(&[
        "exp3",
        "--config",
        path(&cfg),
        "--out",
        path(&dir.path().join("o")),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!dir.path().join("o").exists());

    std::fs::write(&cfg, "tolerance = -1\n").unwrap();
    let o = pdla(&[
        "exp3",
        "--config",
        path(&cfg),
        "--out",
        path(&dir.path().join("o")),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bad_tolerance_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let y = dir.path().join("y.csv");
    std::fs::write(&y, "1\n").unwrap();
    let o = pdla(&["mapca", "--y", path(&y), "--yhat", path(&y), "--tol", "0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn empty_dataset_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("empty.csv");
    std::fs::write(&data, "").unwrap();
    let out = dir.path().join("o");
    let o = pdla(&["exp1", "--dataset", path(&data), "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!out.join("report.txt").exists());
}

#[test]
fn csv_dataset_runs_exp1() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("set.csv");
    std::fs::write(
        &data,
        "label,a,b,c\nA,1,2,3\nB,10,20,30\nA,1.1,2,3\nB,10,21,30\nC,50,50,50\n",
    )
    .unwrap();
    let out = dir.path().join("o");
    let cfg = dir.path().join("c.cfg");
    std::fs::write(
        &cfg,
        format!(
            "dataset = {}\nhas_header = true\nepochs = 20\n",
            path(&data)
        ),
    )
    .unwrap();
    let o = pdla(&["exp1", "--config", path(&cfg), "--out", path(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("report.txt").is_file());
}
