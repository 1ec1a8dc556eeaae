use std::fs;
use std::process::{Command, Output};

fn usol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_usol"))
        .args(args)
        .env_remove("USOL_WORKERS")
        .output()
        .expect("run usol")
}

fn records(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn region_writes_twelve_points() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("region.csv");
    let o = usol(&["region", "--dim", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    let header = text.lines().next().unwrap();
    assert!(header.starts_with("series,point,resolvent,"));
    assert!(header.ends_with("check,fitted,predicted,tolerance,verdict"));
    let rows = records(&text);
    // one record per point and per check
    let points: std::collections::BTreeSet<_> = rows.iter().map(|r| r[1].clone()).collect();
    assert_eq!(points.len(), 12);
    let b = rows.iter().find(|r| r[1] == "B").unwrap();
    assert_eq!(b[6].parse::<f64>().unwrap(), 0.75);
    assert!((b[7].parse::<f64>().unwrap() - 1.0 / 12.0).abs() < 1e-15);
    assert!(text.lines().any(|l| l.starts_with("# resolvent_mismatches:") && l.ends_with("pass")));
}

#[test]
fn invalid_config_exits_with_two() {
    assert_eq!(usol(&["region", "--dim", "2"]).status.code(), Some(2));
    assert_eq!(usol(&["region", "--signature-k", "3"]).status.code(), Some(2));
    assert_eq!(usol(&["normest", "--grid", "30"]).status.code(), Some(2));
    assert_eq!(usol(&["sweep", "--z-sweep", "circle:0"]).status.code(), Some(2));
    assert_eq!(usol(&["normest", "--tol", "identity"]).status.code(), Some(2));
}

#[test]
fn config_file_is_read_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# bad dimension\ndim = 2\n").unwrap();
    let path = cfg.to_str().unwrap();
    assert_eq!(usol(&["region", "--config", path]).status.code(), Some(2));
    assert_eq!(usol(&["region", "--config", path, "--dim", "4"]).status.code(), Some(0));
    fs::write(&cfg, "dim = 3\nunknown_key = 1\n").unwrap();
    assert_eq!(usol(&["region", "--config", path]).status.code(), Some(2));
}

#[test]
fn failing_verdict_exits_nonzero() {
    let o = usol(&["normest", "--tol", "identity=-1"]);
    // negative tolerances are rejected as configuration
    assert_eq!(o.status.code(), Some(2));
    let o = usol(&["dyadic-check", "--tol", "identity=1e-15"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("fail dyadic/delta_identity"), "{err}");
}

#[test]
fn output_is_deterministic() {
    let a = usol(&["normest", "--seed", "7"]);
    let b = usol(&["normest", "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0));
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn several_reports_go_to_a_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pv");
    let svg = dir.path().join("plots");
    let o = usol(&["pv-check", "--out", out.to_str().unwrap(), "--svg", svg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("pv.csv").is_file());
    assert!(out.join("abc.csv").is_file());
    let plot = fs::read_to_string(svg.join("abc.svg")).unwrap();
    assert!(plot.starts_with("<svg"));
}

#[test]
fn help_documents_csv_columns() {
    for sub in ["region", "sweep", "sharpness-cone", "restrict-extend", "kernel"] {
        let o = usol(&[sub, "--help"]);
        assert_eq!(o.status.code(), Some(0));
        let text = String::from_utf8_lossy(&o.stdout);
        assert!(text.contains("series"), "{sub}: {text}");
    }
    let o = usol(&["--help"]);
    assert!(String::from_utf8_lossy(&o.stdout).contains("check,fitted,predicted,tolerance,verdict"));
}
