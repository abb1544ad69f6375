use std::process::Command;

fn csmimo(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_csmimo"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn small_config(dir: &std::path::Path) -> std::path::PathBuf {
    let mut c = csmimo::harness::preset("fig2").unwrap();
    c.trials = 3;
    let path = dir.join("config.json");
    std::fs::write(&path, c.to_json().unwrap()).unwrap();
    path
}

#[test]
fn run_writes_outputs_and_is_repeatable() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_config(dir.path());
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    let a = csmimo(&[
        "run",
        config.to_str().unwrap(),
        "--out",
        out_a.to_str().unwrap(),
    ]);
    let b = csmimo(&[
        "run",
        config.to_str().unwrap(),
        "--out",
        out_b.to_str().unwrap(),
    ]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert!(b.status.success());
    assert_eq!(a.stdout, b.stdout);
    for f in [
        "summary.json",
        "config.json",
        "trials.csv",
        "trials_capon.csv",
        "cdf_prr_cs.csv",
        "cdf_pjr_cs.csv",
    ] {
        assert!(out_a.join(f).exists(), "missing {f}");
    }
    assert_eq!(
        std::fs::read(out_a.join("summary.json")).unwrap(),
        std::fs::read(out_b.join("summary.json")).unwrap()
    );
    let summary: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(summary["trials"], 3);
    assert_eq!(
        summary["excluded_baselines"],
        serde_json::json!(["apes", "glrt"])
    );
}

#[test]
fn worker_count_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_config(dir.path());
    let run = |workers: &str| {
        Command::new(env!("CARGO_BIN_EXE_csmimo"))
            .args(["run", config.to_str().unwrap()])
            .env(csmimo::harness::WORKERS_ENV, workers)
            .output()
            .unwrap()
    };
    let one = run("1");
    let three = run("3");
    assert!(one.status.success());
    assert_eq!(one.stdout, three.stdout);
}

#[test]
fn flags_override_the_preset() {
    let out = csmimo(&[
        "run",
        "--preset",
        "fig4",
        "--trials",
        "2",
        "--seed",
        "9",
        "--baselines",
        "music",
        "--dump-config",
    ]);
    assert!(out.status.success());
    let c: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(
        (c["trials"].as_u64(), c["seed"].as_u64()),
        (Some(2), Some(9))
    );
    assert_eq!(c["baselines"], serde_json::json!(["music"]));
    assert_eq!(c["num_receive"], 10);

    let out = csmimo(&[
        "run",
        "--preset",
        "fig4",
        "--measurement",
        "gaussian",
        "--dump-config",
    ]);
    let c: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(c["measurement_kind"], "gaussian");
}

#[test]
fn errors_are_structured() {
    let out = csmimo(&["run", "--preset", "fig99"]);
    assert_eq!(out.status.code(), Some(2));
    let e: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(e["error"], "config");
    assert!(e["message"].as_str().unwrap().contains("fig99"));

    let out = csmimo(&["run", "--preset", "fig2", "--baselines", "capon,bogus"]);
    assert_eq!(out.status.code(), Some(2));

    let out = csmimo(&["run", "/nonexistent/config.json"]);
    assert_eq!(out.status.code(), Some(1));
    let e: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(e["error"], "io");

    let out = csmimo(&["gridsel", "--angle-steps", "0.5,1.0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn analysis_subcommands() {
    let out = csmimo(&["sjr", "--trials", "20"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let std = v["report"]["analytic_standard"].as_f64().unwrap();
    let modified = v["report"]["analytic_modified"].as_f64().unwrap();
    assert!((modified / std - 512.0 / 30.0).abs() < 1e-9);

    let out = csmimo(&[
        "correlate",
        "--study",
        "transmit",
        "--values",
        "5,45",
        "--trials",
        "10",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);

    let out = csmimo(&["run", "--list-presets"]);
    let names: Vec<String> = serde_json::from_slice(&out.stdout).unwrap();
    assert!(names.contains(&"fig12".to_string()));
}
