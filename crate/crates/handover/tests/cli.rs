use std::path::Path;
use std::process::{Command, Output};

fn handover(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_handover")).args(args).output().unwrap()
}

fn scenario(name: &str) -> String {
    format!("{}/scenarios/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn run_prints_summary_and_writes_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.jsonl");
    let o = handover(&["run", "--scenario", &scenario("static_cylinder.toml"), "--seed", "4", "--trace", trace.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["scenario"], "static_cylinder");
    assert_eq!(v["seed"], 4);
    assert_eq!(v["mode"], "temporal_plus");
    assert_eq!(v["success"], true);
    assert_eq!(v["digest"].as_str().unwrap().len(), 64);

    let o = handover(&["verify", "--trace", trace.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("ok: "));
}

#[test]
fn tampered_trace_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.jsonl");
    let o = handover(&["run", "--scenario", &scenario("static_cylinder.toml"), "--trace", trace.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&trace).unwrap();
    let mut lines: Vec<String> = text.lines().map(str::to_owned).collect();
    let mut rec: serde_json::Value = serde_json::from_str(&lines[51]).unwrap();
    let x = rec["ee_pose"][0].as_f64().unwrap();
    rec["ee_pose"][0] = serde_json::json!(x + 0.1);
    lines[51] = rec.to_string();
    std::fs::write(&trace, lines.join("\n")).unwrap();
    let o = handover(&["verify", "--trace", trace.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("tick 50"));
}

#[test]
fn bad_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "seed = [").unwrap();
    assert_eq!(code(&handover(&["run", "--scenario", bad.to_str().unwrap()])), 2);
    assert_eq!(code(&handover(&["run", "--scenario", "/nonexistent/x.toml"])), 2);
    assert_eq!(code(&handover(&["run", "--scenario", &scenario("static_cylinder.toml"), "--mode", "fast"])), 2);

    let junk = dir.path().join("junk.jsonl");
    std::fs::write(&junk, "not json\n").unwrap();
    assert_eq!(code(&handover(&["verify", "--trace", junk.to_str().unwrap()])), 2);
    assert_eq!(code(&handover(&["verify", "--trace", "/nonexistent/t.jsonl"])), 2);

    let empty = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = handover(&["batch", "--dir", empty.path().to_str().unwrap(), "--seeds", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(!Path::new(&out).exists());
}

#[test]
fn batch_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("summary.csv");
    let o = handover(&[
        "batch",
        "--dir",
        &scenario("orientations"),
        "--seeds",
        "1,2",
        "--out",
        out.to_str().unwrap(),
        "--mode",
        "temporal",
        "--threads",
        "2",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[1..].iter().all(|l| l.contains(",temporal,2,")));
}
