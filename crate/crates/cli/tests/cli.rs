use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn geostein(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geostein"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env_remove("GEOSTEIN_OUT_DIR")
        .env_remove("GEOSTEIN_SHARDS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn ua_grid_passes_and_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let o = geostein(dir.path(), &["ua", "--n-grid", "2,5,10,50,100"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("ua.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r.ends_with(",PASS")));
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("ua.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["experiment"], "ua");
    assert_eq!(manifest["seed"], 1);
    assert_eq!(manifest["rows"], 5);
    let summary = fs::read_to_string(dir.path().join("ua.summary.txt")).unwrap();
    assert_eq!(summary, stdout(&o));
}

#[test]
fn monte_carlo_output_is_reproducible_across_modes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["--seed", "7", "--reps", "5000", "gsum", "--law", "1:0.5,3:0.5", "--law", "point:2", "--a-grid", "0.2,0.6"];
    let oa = geostein(a.path(), &args);
    let mut seq = vec!["--sequential"];
    seq.extend(args);
    let ob = geostein(b.path(), &seq);
    assert_eq!(oa.status.code(), Some(0), "{}", stderr(&oa));
    assert_eq!(ob.status.code(), Some(0), "{}", stderr(&ob));
    for f in ["gsum.csv", "gsum.manifest.json", "gsum.summary.txt"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn json_format() {
    let dir = tempfile::tempdir().unwrap();
    let o = geostein(dir.path(), &["--format", "json", "dist", "--p", "geo:0.5", "--q", "1:1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("dist.json")).unwrap()).unwrap();
    assert!((v[0]["tv"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn yule_check_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = geostein(dir.path(), &["yule-check", "--kmax", "100"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("PASS"));
}

#[test]
fn pa_mixture_rows_are_soft_or_pass() {
    let dir = tempfile::tempdir().unwrap();
    let o = geostein(dir.path(), &["pa-mixture", "--n-grid", "20,40"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("pa-mixture.csv")).unwrap();
    let soft = csv.lines().filter(|l| l.starts_with("pa_mixture,") && l.ends_with(",SOFT")).count();
    assert_eq!(soft, 2);
}

#[test]
fn stein_check_reports_identities() {
    let dir = tempfile::tempdir().unwrap();
    let o = geostein(dir.path(), &["stein-check", "--target", "4", "--p", "0.2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn check_mode_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("nested");
    let o = geostein(&out, &["--check", "--seed", "3", "ua"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["manifest"]["seed"], 3);
    assert!(!out.exists());
}

#[test]
fn invalid_inputs_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&[&str], &str); 5] = [
        (&["gw", "--offspring", "0:0.2,1:0.5,2:0.3"], "offspring not critical"),
        (&["pa-fixed", "--n", "10", "--i-grid", "11"], "outside"),
        (&["gsum", "--law", "point:2", "--a-grid", "0"], "a must lie"),
        (&["dist", "--p", "0:0.5,1:0.4", "--q", "point:0"], "total mass"),
        (&["transform", "--law", "point:0", "--kind", "size-bias"], "zero mean"),
    ];
    for (args, msg) in cases {
        let o = geostein(dir.path(), args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(stderr(&o).contains(msg), "{args:?}: {}", stderr(&o));
    }
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}
