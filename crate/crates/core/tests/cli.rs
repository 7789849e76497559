//! End-to-end checks of the command-line interface against the sample spec.

use std::path::PathBuf;
use std::process::Command;

fn sample() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../samples/pipeline.pspec")
}

fn pspec() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pspec"))
}

#[test]
fn check_accepts_the_sample() {
    let out = pspec().arg("check").arg(sample()).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("3 process(es)"), "{stdout}");
}

#[test]
fn check_rejects_broken_input_with_exit_1() {
    let dir = std::env::temp_dir().join("pspec-cli-broken");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("broken.pspec");
    std::fs::write(&path, "process P() { in a: Int; calc { } }").unwrap();
    let out = pspec().arg("check").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("expected"), "{stderr}");
}

#[test]
fn unknown_subcommand_exits_2() {
    let out = pspec().arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.to_lowercase().contains("usage"), "{stderr}");
}

#[test]
fn simulate_writes_identical_traces_across_runs() {
    let dir = std::env::temp_dir().join("pspec-cli-sim");
    std::fs::create_dir_all(&dir).unwrap();
    let run_once = |name: &str| -> String {
        let path = dir.join(name);
        let out = pspec()
            .arg("simulate")
            .arg(sample())
            .args(["--compose", "Pipeline", "--env", "Burst", "--horizon", "12"])
            .args(["--format", "structured"])
            .arg("--trace-out")
            .arg(&path)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        std::fs::read_to_string(&path).unwrap()
    };
    let a = run_once("a.json");
    let b = run_once("b.json");
    assert_eq!(a, b);
    let parsed: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(parsed["horizon"], 12);
    assert_eq!(parsed["channels"]["Check.stop"][5][0], "ev");
}

#[test]
fn wcet_reports_the_seq_sum() {
    let out = pspec()
        .arg("wcet")
        .arg(sample())
        .args(["--compose", "Pipeline"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("wcet(Pipeline) = 5 tick(s)"), "{stdout}");
    assert!(stdout.contains("seq = 5"), "{stdout}");

    // Measured elementary bounds agree with the declared ones here.
    let out = pspec()
        .arg("wcet")
        .arg(sample())
        .args(["--compose", "Pipeline", "--bounds", "measured"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("wcet(Pipeline) = 5 tick(s)"), "{stdout}");
}

#[test]
fn export_files_are_deterministic() {
    let dir = std::env::temp_dir().join("pspec-cli-export");
    std::fs::create_dir_all(&dir).unwrap();
    for kind in ["dot", "pnml"] {
        let render = |name: &str| -> String {
            let path = dir.join(name);
            let out = pspec()
                .arg("export")
                .arg(sample())
                .args(["--compose", "Fanout", "--to", kind])
                .arg("--out")
                .arg(&path)
                .output()
                .unwrap();
            assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
            std::fs::read_to_string(&path).unwrap()
        };
        let a = render(&format!("a.{kind}"));
        let b = render(&format!("b.{kind}"));
        assert_eq!(a, b, "{kind} export must be deterministic");
    }
}

#[test]
fn activity_query_evaluates() {
    let out = pspec()
        .arg("activity")
        .arg(sample())
        .args(["--compose", "Pipeline", "--env", "Burst"])
        .args(["--query", "active(Scale, 1, on=Scale.scaled)"])
        .args(["--horizon", "10"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.trim().ends_with("= true"), "{stdout}");
}
