use std::process::Command;

fn hooley(args: &[&str]) -> (bool, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_hooley")).args(args).output().unwrap();
    (
        out.status.success(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn reports_are_reproducible() {
    let args = ["cross-check", "--q", "3", "--delta", "1/2", "--height", "60", "--y-grid", "4,6"];
    let (ok, a, err) = hooley(&args);
    assert!(ok, "{err}");
    let (_, b, _) = hooley(&args);
    assert_eq!(a, b);
    assert!(a.contains("\"sieve_version\""));
    assert!(a.contains("sha256"));
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "q = 3\nx_ceiling = 1000.0\n").unwrap();
    let out = dir.path().join("r.json");
    let traj = dir.path().join("t.csv");
    let (ok, _, err) = hooley(&[
        "littlewood-demo",
        "--config",
        cfg.to_str().unwrap(),
        "--q",
        "4",
        "--out",
        out.to_str().unwrap(),
        "--trajectory",
        traj.to_str().unwrap(),
    ]);
    assert!(ok, "{err}");
    let report = std::fs::read_to_string(&out).unwrap();
    assert!(report.contains("\"label\": \"4:1\""));
    assert!(std::fs::read_to_string(&traj).unwrap().starts_with("# littlewood trajectory"));
}

#[test]
fn errors_are_reported() {
    let (ok, _, err) = hooley(&["mechanism-demo", "--q", "4"]);
    assert!(!ok);
    assert!(err.contains("q = 5"));
    let (ok, _, err) = hooley(&["explicit-formula", "--q", "3", "--delta", "1/3", "--height", "20", "--y", "1/2"]);
    assert!(!ok);
    assert!(err.contains("multiple of delta"));
}

#[test]
fn zeros_and_synchronize() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.txt");
    std::fs::write(&f, "# halves\n0.5\n").unwrap();
    let (ok, out, err) = hooley(&["synchronize", "--frequencies", f.to_str().unwrap(), "--M", "3", "--N", "10", "--method", "brute"]);
    assert!(ok, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["hits"], serde_json::json!([2, 4, 6, 8, 10]));
    let (ok, out, _) = hooley(&["zeros", "--q", "4", "--height", "11", "--digits", "15", "--verify"]);
    assert!(ok);
    assert!(out.contains("4,1,6.020948904697597"));
}
