use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn multiform(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_multiform"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn small_batch(out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        "--function",
        "ackley,rastrigin",
        "--D",
        "30",
        "--de",
        "3",
        "--dims",
        "5,5",
        "--variant",
        "de+m,de+mf",
        "--pop",
        "30",
        "--fes",
        "600",
        "--seeds",
        "0..5",
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    multiform(&args)
}

#[test]
fn lists_the_six_functions() {
    let out = multiform(&["--list-functions"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "ackley",
        "rastrigin",
        "weierstrass",
        "rosenbrock",
        "griewank",
        "elliptic",
    ] {
        assert!(text.contains(name), "{text}");
    }
}

#[test]
fn missing_required_flag_is_a_usage_error() {
    let out = multiform(&["--function", "ackley", "--D", "20", "--de", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("Usage"), "{err}");
    assert!(err.contains("--variant"), "{err}");
}

#[test]
fn unknown_flag_and_bad_values_exit_2() {
    assert_eq!(multiform(&["--nope"]).status.code(), Some(2));
    let tmp = tempfile::tempdir().unwrap();
    let out = small_batch(tmp.path(), &["--cr", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
    let out = multiform(&["--config", "/definitely/not/here.txt"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn batch_writes_summary_runs_and_curves() {
    let tmp = tempfile::tempdir().unwrap();
    let out = small_batch(tmp.path(), &[]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let summary = fs::read_to_string(tmp.path().join("summary.csv")).unwrap();
    let lines: Vec<&str> = summary.lines().collect();
    assert_eq!(
        lines[0],
        "function,variant,runs,mean,std,median,reference,mark"
    );
    assert_eq!(lines.len(), 1 + 2 * 2);

    let runs = fs::read_to_string(tmp.path().join("runs.csv")).unwrap();
    assert_eq!(runs.lines().count(), 1 + 2 * 2 * 6);

    let curve = fs::read_to_string(tmp.path().join("curves/ackley_de_mf_s0.csv")).unwrap();
    assert!(curve.starts_with(
        "run_id,generation,fes,best_fitness,formulation_best_0,formulation_best_1,formulation_best_2,alloc_p_0"
    ));
    assert_eq!(fs::read_dir(tmp.path().join("curves")).unwrap().count(), 24);
}

#[test]
fn manifest_as_config_reproduces_every_file() {
    let first = tempfile::tempdir().unwrap();
    assert!(small_batch(first.path(), &[]).status.success());
    let second = tempfile::tempdir().unwrap();
    let manifest = first.path().join("manifest.txt");
    let out = multiform(&[
        "--config",
        manifest.to_str().unwrap(),
        "--out",
        second.path().to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for name in [
        "manifest.txt",
        "summary.csv",
        "runs.csv",
        "curves/rastrigin_de_m_s3.csv",
    ] {
        assert_eq!(
            fs::read(first.path().join(name)).unwrap(),
            fs::read(second.path().join(name)).unwrap(),
            "{name} differs"
        );
    }
}

#[test]
fn config_entries_override_flags() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("override.txt");
    fs::write(&config, "# smaller budget\nfes=300\ncurves=false\n").unwrap();
    let out_dir = tmp.path().join("out");
    let out = small_batch(&out_dir, &["--config", config.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let manifest = fs::read_to_string(out_dir.join("manifest.txt")).unwrap();
    assert!(manifest.lines().any(|l| l == "fes=300"), "{manifest}");
    assert!(!out_dir.join("curves").exists());
}
