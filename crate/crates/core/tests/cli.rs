use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rigidlab"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli").join(name);
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn fixtures(dir: &Path) -> PathBuf {
    let fx = dir.join("fixtures");
    let out = run(&["fixtures", "--write", fx.to_str().unwrap()]);
    assert!(out.status.success());
    fx
}

#[test]
fn catalog_lists_fixtures() {
    let out = run(&["fixtures"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let names: Vec<&str> = text.lines().filter(|l| !l.starts_with(' ')).collect();
    assert!(names.len() >= 5, "{text}");
    assert!(text.contains("target:"));
}

#[test]
fn cat_map_run_writes_csv_and_sidecar() {
    let dir = scratch("cat");
    let fx = fixtures(&dir);
    let csv = dir.join("out/cat.csv");
    let out = run(&["run", fx.join("cat_map_lyapunov.json").to_str().unwrap(), "--out", csv.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let l1: f64 = row[2].parse().unwrap();
    assert!((l1 - 0.962424).abs() < 1e-3);
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("out/cat.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["config_sha256"].as_str().unwrap().len(), 64);
    assert_eq!(meta["kind"], "lyapunov");
    assert!(meta["wall_time_s"].as_f64().unwrap() >= 0.0);
    assert!(meta["version"].is_string());
}

#[test]
fn subres_check_message() {
    let dir = scratch("check");
    let fx = fixtures(&dir);
    let out = run(&["run", fx.join("example_map_check.json").to_str().unwrap()]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("validated, strict=false"));
}

#[test]
fn malformed_config_exits_2_without_output() {
    let dir = scratch("malformed");
    let cfg = dir.join("bad.json");
    std::fs::write(&cfg, "{\"kind\": \"lyapunov\",\n \"payload\": {\"n\": 10,").unwrap();
    let csv = dir.join("out.csv");
    let out = run(&["run", cfg.to_str().unwrap(), "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("bad.json:2:"), "{err}");
    assert_eq!(std::fs::read_dir(&dir).unwrap().count(), 1);

    std::fs::write(&cfg, "{\"kind\":\"lyapunov\",\"payload\":{\"q0\":[0.1,0.2],\"n\":\"ten\"}}").unwrap();
    let out = run(&["run", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("payload.n"));
}

#[test]
fn budget_exceeded_exits_3_without_output() {
    let dir = scratch("budget");
    let fx = fixtures(&dir);
    let csv = dir.join("out.csv");
    let out = run(&[
        "run",
        fx.join("ab_expansion.json").to_str().unwrap(),
        "--budget-words",
        "100",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!csv.exists());
    let out = run(&["walk", "simulate", "--config", fx.join("cantor_walk.json").to_str().unwrap(), "--budget-samples", "10"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn numeric_failure_names_the_error() {
    let dir = scratch("numeric");
    let fx = fixtures(&dir);
    let out = run(&["subres", "check", "--config", fx.join("example_map_check.json").to_str().unwrap(), "--strict"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("SubresError::NotStrict"));
}

#[test]
fn stochastic_runs_need_a_seed() {
    let dir = scratch("seed");
    let walk = dir.join("walk.json");
    std::fs::write(
        &walk,
        r#"{"walk":{"atoms":[{"system":{"kind":"affine","slope":"1/3","offset":"0"},"p":"1/2"},
                     {"system":{"kind":"affine","slope":"1/3","offset":"2/3"},"p":"1/2"}]},"q":[0.0]}"#,
    )
    .unwrap();
    let out = run(&["walk", "simulate", "--config", walk.to_str().unwrap(), "--N", "100", "--M", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_then_residuals_from_file() {
    let dir = scratch("walk");
    let walk = dir.join("walk.json");
    std::fs::write(
        &walk,
        r#"{"walk":{"atoms":[{"system":{"kind":"affine","slope":"1/3","offset":"0"},"p":"1/2"},
                     {"system":{"kind":"affine","slope":"1/3","offset":"2/3"},"p":"1/2"}]},"q":[0.0]}"#,
    )
    .unwrap();
    let w = walk.to_str().unwrap();
    let measure = dir.join("measure.csv");
    let m = measure.to_str().unwrap();
    let out = run(&["walk", "simulate", "--config", w, "--N", "2000", "--M", "8", "--seed", "7", "--out", m]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let first = std::fs::read(&measure).unwrap();
    assert!(first.starts_with(b"x1,weight\n"));

    let out = run(&["walk", "residuals", "--measure", m, "--config", w]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("quantity,generator,metric,value,samples\nstationarity,,ks,"));

    // same seed, byte-identical payload
    let again = dir.join("again.csv");
    run(&["walk", "simulate", "--config", w, "--N", "2000", "--M", "8", "--seed", "7", "--out", again.to_str().unwrap()]);
    assert_eq!(std::fs::read(&again).unwrap(), first);
}

#[test]
fn entropy_from_spectrum_file() {
    let dir = scratch("entropy");
    let spec = dir.join("spec.json");
    std::fs::write(&spec, r#"{"exponents":[0.5,-0.5],"multiplicities":[1,1],"e1_dims":[1,0],"e2_dims":[1,0]}"#).unwrap();
    let out = run(&["entropy", "bounds", "--spectrum", spec.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("ly_lower,5.000000000000000e-1\nly_upper,5.000000000000000e-1"), "{text}");
}

#[test]
fn expansion_scan_flags() {
    let dir = scratch("expansion");
    let fx = fixtures(&dir);
    let cfg = fx.join("ab_expansion.json");
    let out = run(&["expansion", "scan", "--config", cfg.to_str().unwrap(), "--mode", "mc", "--samples", "500", "--seed", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 721);
    assert!(text.starts_with("plane_id,angle_or_basis,sigma,stderr\n"));
}
