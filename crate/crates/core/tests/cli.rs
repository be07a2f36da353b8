use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_neyman-bai"));
    c.env_remove("NEYMAN_BAI_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

const GAUSS: &str = r#"{
  "instance": {"family": "gaussian", "means": [0.1, 0.0], "variances": [1.0, 1.0]},
  "T": 400,
  "policy": {"kind": "adaptive_neyman", "eta": 0.001},
  "estimator": "aipw",
  "R": 200,
  "budgets": [50, 200]
}"#;

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn bad_eta_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", &GAUSS.replace("0.001", "1.5"));
    let o = run(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("policy.eta"));
}

#[test]
fn missing_budget_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", &GAUSS.replace("\"T\": 400,", ""));
    let o = run(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("`T`"));
}

#[test]
fn unknown_flag_is_config_error() {
    assert_eq!(run(&["run", "--bogus"]).status.code(), Some(2));
}

#[test]
fn sweep_emits_default_grid_and_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", GAUSS);
    let args = ["sweep", "--config", cfg.to_str().unwrap(), "--reps", "100"];
    let a = run(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    let text = stdout(&a);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 9);
    assert!(lines[0].starts_with("kind,T,R,policy,estimator,sigma1,sigma2,mu1,mu2,gap,x,"));
    assert!(lines[1..].iter().all(|l| l.starts_with("sweep,400,100,adaptive_neyman,aipw,")));

    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let mut threaded = args.to_vec();
    threaded.extend(["--threads", "3"]);
    assert_eq!(a.stdout, run(&threaded).stdout);
}

#[test]
fn seed_sources_in_order() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", GAUSS);
    let c = cfg.to_str().unwrap();
    let plain = run(&["run", "--config", c]);
    assert!(stdout(&plain).lines().nth(1).unwrap().contains(",42,"));

    let env = bin().args(["run", "--config", c]).env("NEYMAN_BAI_SEED", "5").output().unwrap();
    assert_ne!(plain.stdout, env.stdout);
    let flag = run(&["run", "--config", c, "--seed", "5"]);
    assert_eq!(env.stdout, flag.stdout);

    let seeded = write_config(dir.path(), "s.json", &GAUSS.replace("\"R\": 200", "\"R\": 200, \"seed\": 5"));
    let from_file = bin()
        .args(["run", "--config", seeded.to_str().unwrap()])
        .env("NEYMAN_BAI_SEED", "9")
        .output()
        .unwrap();
    assert_eq!(from_file.stdout, flag.stdout);
}

#[test]
fn bounds_rows_carry_name_and_value() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", GAUSS);
    let o = run(&["bounds", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    let name = header.iter().position(|h| *h == "name").unwrap();
    let value = header.iter().position(|h| *h == "value").unwrap();
    let minimax = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect::<Vec<_>>())
        .find(|f| f[name] == "minimax_lower_bound_constant")
        .expect("minimax row");
    let v: f64 = minimax[value].parse().unwrap();
    assert!((v - 2.0 / std::f64::consts::E.sqrt()).abs() < 1e-15);
    assert_eq!(text.lines().count(), 8);
}

#[test]
fn consistency_rows_follow_budgets() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", GAUSS);
    let o = run(&["consistency", "--config", cfg.to_str().unwrap()]);
    let text = stdout(&o);
    let t: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(t, ["50", "200"]);
}

#[test]
fn json_output_matches_schema() {
    let schema: serde_json::Value =
        serde_json::from_str(include_str!("../schema/report.schema.json")).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", GAUSS);
    for cmd in ["run", "sweep", "consistency", "bounds"] {
        let out = dir.path().join(format!("{cmd}.json"));
        let o = run(&[cmd, "--config", cfg.to_str().unwrap(), "--reps", "50", "--format", "json", "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        let doc: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
        let errors: Vec<String> = validator.iter_errors(&doc).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{cmd}: {errors:?}");
        assert!(!doc.as_array().unwrap().is_empty());
    }
}

#[test]
fn verify_subset_exit_codes() {
    let ok = run(&["verify", "--only", "8"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).contains("[PASS] 8."));

    let bad = run(&["verify", "--only", "5", "--reps", "20", "--corrupt-bound"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("[FAIL] 5."));
}

#[test]
fn unwritable_output_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", GAUSS);
    let target = dir.path().join("missing").join("out.csv");
    let o = run(&["bounds", "--config", cfg.to_str().unwrap(), "--out", target.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn missing_config_file_is_io_error() {
    assert_eq!(run(&["run", "--config", "/nonexistent/neyman.json"]).status.code(), Some(3));
}

#[test]
fn sample_mean_with_unobserved_arm_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"{"instance": {"family": "bernoulli", "means": [0.5, 0.4]},
        "T": 2, "policy": {"kind": "uniform"}, "estimator": "sample_mean", "R": 3}"#;
    let cfg = write_config(dir.path(), "b.json", body);
    let o = run(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().nth(1).unwrap().starts_with("mc,2,3,uniform,sample_mean,0.5,"));
}
