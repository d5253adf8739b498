use serde_json::Value;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn bnf(out_dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bnf"))
        .args(args)
        .arg("--out-dir")
        .arg(out_dir)
        .output()
        .expect("binary runs")
}

fn demo(sub: &str, out_dir: &Path, extra: &[&str]) -> Output {
    let cfg = configs().join("two_mode_demo.toml");
    let mut args = vec![sub, "-c", cfg.to_str().unwrap()];
    args.extend_from_slice(extra);
    bnf(out_dir, &args)
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))).unwrap()
}

fn sha(path: PathBuf) -> String {
    Sha256::digest(std::fs::read(path).unwrap()).iter().map(|b| format!("{b:02x}")).collect()
}

#[test]
fn missing_gamma_exits_2_and_names_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bnf(tmp.path(), &["normalize", "--model", "nls1d_dirichlet", "--jmax", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(String::from_utf8_lossy(&out.stderr).trim(), "gamma: required");
    // validation happens before anything is written
    assert!(!tmp.path().exists() || std::fs::read_dir(tmp.path()).unwrap().next().is_none());

    let out = demo("simulate", tmp.path(), &["--set", "colour=blue"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("colour: unknown key"));
}

#[test]
fn normalize_two_mode_demo_passes_every_membership_check() {
    let tmp = tempfile::tempdir().unwrap();
    let out = demo("normalize", tmp.path(), &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = tmp.path().join("normalize-0001");
    let nf = json(run.join("nf.json"));
    let verdicts = nf["verdicts"].as_array().unwrap();
    assert!(!verdicts.is_empty());
    assert!(verdicts.iter().all(|v| v["member"] == Value::Bool(true)));
    assert_eq!(nf["all_members"], Value::Bool(true));
    assert_eq!(nf["generators"].as_array().unwrap().len(), 2);

    let m = json(run.join("manifest.json"));
    assert_eq!(m["status"], "ok");
    assert_eq!(m["config"]["gamma"], 0.1);
    assert_eq!(m["artifacts"][0]["file"], "nf.json");
    assert_eq!(m["artifacts"][0]["sha256"].as_str().unwrap(), sha(run.join("nf.json")));
    assert_eq!(m["config_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn drift_rerun_is_byte_identical_in_a_new_run_directory() {
    let tmp = tempfile::tempdir().unwrap();
    for _ in 0..2 {
        let out = demo("drift-experiment", tmp.path(), &["--set", "torus_every=10"]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let (a, b) = (tmp.path().join("drift-experiment-0001"), tmp.path().join("drift-experiment-0002"));
    assert_eq!(sha(a.join("drift.csv")), sha(b.join("drift.csv")));
    assert_eq!(json(a.join("manifest.json"))["config_sha256"], json(b.join("manifest.json"))["config_sha256"]);

    let text = std::fs::read_to_string(a.join("drift.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "model,eps,seed,t,H,norm_s,max_weighted_action_drift,max_weighted_J_drift,torus_dist,escaped");
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 4);
    for r in &rows {
        assert_eq!(r[9], "false");
        let torus: f64 = r[8].parse().unwrap();
        assert!(torus > 0.0 && torus < 1e-3);
    }
    // a different seed list changes the numbers
    let out = demo("drift-experiment", tmp.path(), &["--set", "seeds=[3]"]);
    assert!(out.status.success());
    assert_ne!(sha(a.join("drift.csv")), sha(tmp.path().join("drift-experiment-0003/drift.csv")));
}

#[test]
fn scan_simulate_and_report() {
    let tmp = tempfile::tempdir().unwrap();
    let out = demo("scan-resonances", tmp.path(), &["--r", "3", "--gamma", "0.5", "--out", "near.csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let hits = std::fs::read_to_string(tmp.path().join("scan-resonances-0001/near.csv")).unwrap();
    assert!(hits.starts_with("k_serialized,divisor,pattern\n"));
    assert!(hits.lines().count() > 1);

    let out = demo("simulate", tmp.path(), &["--set", "t_final=2.0"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let frames = std::fs::read_to_string(tmp.path().join("simulate-0001/frames.csv")).unwrap();
    assert!(frames.starts_with("t,H,norm_s,I_1,I_2\n"));
    // 200 steps at stride 10 plus the initial frame
    assert_eq!(frames.lines().count(), 1 + 21);

    let out = demo("report", tmp.path(), &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("near resonances"), "{text}");
    assert!(text.contains("max energy error"), "{text}");
    assert_eq!(std::fs::read_to_string(tmp.path().join("report-0001/report.txt")).unwrap(), text);
}

#[test]
fn compute_failure_exits_1_and_flags_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    // far outside the perturbative regime the midpoint iteration diverges
    let out = demo("simulate", tmp.path(), &["--set", "eps=100.0", "--set", "dt=0.5", "--set", "t_final=10.0"]);
    assert_eq!(out.status.code(), Some(1));
    let m = json(tmp.path().join("simulate-0001/manifest.json"));
    assert!(m["status"].as_str().unwrap().starts_with("failed"));
    assert!(m["error"].as_str().unwrap().contains("did not converge"));
}
