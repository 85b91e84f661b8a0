use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn maxreg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maxreg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("run.toml");
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn empty_config_exits_zero_with_empty_report() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "");
    let out = tmp.path().join("out");
    let o = maxreg(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["experiments"].as_array().unwrap().len(), 0);
    assert_eq!(r["passed"], true);
    assert_eq!(r["schema_version"], 1);
}

#[test]
fn negative_alpha_is_a_validation_error_naming_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "[[experiment]]\nkind = \"oracle-compare\"\nsetting = \"laguerre\"\nalpha = -1.0\n",
    );
    let o = maxreg(&["run", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.contains("experiment[0].alpha"), "{stderr}");
}

#[test]
fn unknown_subcommand_flag_value_is_rejected() {
    let o = maxreg(&[
        "kernel",
        "eval",
        "--setting",
        "nowhere",
        "--t",
        "1",
        "--x",
        "0",
        "--y",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn hermite_oracle_compare_meets_tolerance() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "[[experiment]]\nkind = \"oracle-compare\"\nsetting = \"hermite\"\n",
    );
    let out = tmp.path().join("out");
    let o = maxreg(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let r = report(&out);
    let e = &r["experiments"][0];
    let worst = e["constants"]["max_rel_error"].as_f64().unwrap();
    assert!(worst <= 1e-7, "{worst}");
    assert_eq!(e["checks"][0]["pass"], true);
    let csv = std::fs::read_to_string(out.join("00-oracle-compare.csv")).unwrap();
    assert!(csv.starts_with("kernel,t,x,y,value,oracle,rel_error,truncation_bound\n"));
}

#[test]
fn unconverged_series_exits_three() {
    let o = maxreg(&[
        "oracle",
        "compare",
        "--setting",
        "hermite",
        "--t-range",
        "0.01,0.02",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn same_seed_gives_identical_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "seed = 7\n\n[[experiment]]\nkind = \"regularity-sweep\"\nsetting = \"classical\"\nx_max = 4.0\nh0 = 0.25\nlevels = 2\nrandom_fields = 2\n\n[[experiment]]\nkind = \"covering-build\"\nwindow = 5.0\n",
    );
    let strip = |dir: &Path| {
        let mut r = report(dir);
        r.as_object_mut().unwrap().remove("timestamp");
        serde_json::to_string(&r).unwrap()
    };
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for d in [&a, &b] {
        let o = maxreg(&["run", "--config", &cfg, "--out", d.to_str().unwrap()]);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
    assert_eq!(strip(&a), strip(&b));
    assert_eq!(report(&a)["seed"], 7);
    let c = tmp.path().join("c");
    maxreg(&[
        "run",
        "--config",
        &cfg,
        "--seed",
        "8",
        "--out",
        c.to_str().unwrap(),
    ]);
    assert_ne!(strip(&a), strip(&c));
}

#[test]
fn covering_build_writes_json_artifact() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("covering.json");
    let o = maxreg(&[
        "covering",
        "build",
        "--window",
        "50",
        "--dilation",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(!v["centers"].as_array().unwrap().is_empty());
}

#[test]
fn regularity_sweep_csv_columns() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("sweep.csv");
    let o = maxreg(&[
        "regularity",
        "sweep",
        "--setting",
        "classical",
        "--levels",
        "2",
        "--x-max",
        "4",
        "--h0",
        "0.25",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let csv = std::fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("level,h_t,h_x,ratio_K,ratio_regularity,residual_ode")
    );
    assert_eq!(lines.count(), 2);
}
