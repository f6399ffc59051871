use std::path::PathBuf;
use std::process::{Command, Output};

fn problem(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/problems").join(name)
}

fn voi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_voi")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn temp_doc(text: &str) -> tempfile::NamedTempFile {
    let f = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(f.path(), text).unwrap();
    f
}

#[test]
fn solve_hamming_point() {
    let p = problem("hamming_shannon.json");
    let o = voi(&["solve", "--problem", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(
        lines.next().unwrap(),
        "beta,r_nats,u,v,f_final,iterations,kkt_p,kkt_q,certified,identity_gap"
    );
    let fields: Vec<f64> = lines.next().unwrap().split(',').take(5).map(|v| v.parse().unwrap()).collect();
    assert!((fields[2] - 0.268_941_421_369_995_1).abs() < 1e-10);
    assert!((fields[1] - 0.110_944_071_671_727_37).abs() < 1e-10);
}

#[test]
fn bits_flag_rescales_leakage() {
    let p = problem("hamming_shannon.json");
    let nats = stdout(&voi(&["solve", "--problem", p.to_str().unwrap()]));
    let bits = stdout(&voi(&["solve", "--problem", p.to_str().unwrap(), "--bits"]));
    assert!(bits.starts_with("beta,r_bits,"));
    let r = |s: &str| -> f64 { s.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap() };
    assert!((r(&bits) - r(&nats) / std::f64::consts::LN_2).abs() < 1e-10);
}

#[test]
fn curve_output_is_reproducible() {
    let p = problem("sibson_grid.json");
    let path = p.to_str().unwrap();
    let a = voi(&["curve", "--problem", path]);
    let b = voi(&["curve", "--problem", path]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 13);
    let cold = voi(&["curve", "--problem", path, "--no-warm-start"]);
    assert_eq!(cold.stdout, voi(&["curve", "--problem", path, "--no-warm-start"]).stdout);
}

#[test]
fn seeded_start_is_reproducible() {
    let p = problem("hamming_shannon.json");
    let path = p.to_str().unwrap();
    let a = voi(&["solve", "--problem", path, "--seed", "7", "--format", "json"]);
    let b = voi(&["solve", "--problem", path, "--seed", "7", "--format", "json"]);
    assert_eq!(a.status.code(), Some(0));
    let strip = |o: &Output| {
        let mut v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        v.as_object_mut().unwrap().remove("wall_time_s").expect("timing field");
        v
    };
    let doc = strip(&a);
    assert_eq!(doc, strip(&b));
    assert_eq!(doc["config"]["seed"], 7);
    assert_eq!(doc["points"].as_array().unwrap().len(), 1);
}

#[test]
fn json_record_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.json");
    let p = problem("hellinger_binary.json");
    let o =
        voi(&["solve", "--problem", p.to_str().unwrap(), "--format", "json", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(doc["spec"], "f:squared_hellinger");
    assert_eq!(doc["problem_hash"].as_str().unwrap().len(), 64);
    assert_eq!(doc["points"][0]["converged"], true);
}

#[test]
fn iteration_cap_exits_with_two() {
    let p = problem("capped_iterations.json");
    let o = voi(&["solve", "--problem", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    // the partial point is still reported
    assert_eq!(stdout(&o).lines().count(), 2);
}

#[test]
fn missing_order_is_an_input_error() {
    let p = problem("missing_alpha.json");
    let o = voi(&["solve", "--problem", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("leakage.alpha required for type \"csiszar\""));
}

#[test]
fn malformed_documents_exit_with_one() {
    let cases = [
        r#"{"prior":[0.5,0.5],"loss":[[0,1],[1,0]],"leakage":{"type":"shannon"},"colour":1}"#,
        r#"{"prior":[0.6,0.6],"loss":[[0,1],[1,0]],"leakage":{"type":"shannon"}}"#,
        r#"{"prior":[0.5,0.5],"loss":[[0,-1],[1,0]],"leakage":{"type":"shannon"}}"#,
        r#"{"prior":[0.5,0.5],"loss":[[0,1],[1,0]],"leakage":{"type":"sibson","alpha":1.0}}"#,
        r#"{"prior":[0.5,0.5],"loss":[[0,1],[1,0]],"leakage":{"type":"f","f_kind":"tv"}}"#,
        "not json",
    ];
    for text in cases {
        let doc = temp_doc(text);
        let o = voi(&["solve", "--problem", doc.path().to_str().unwrap(), "--beta", "1"]);
        assert_eq!(o.status.code(), Some(1), "{text}: {}", stderr(&o));
    }
    let o = voi(&["solve", "--problem", "/nonexistent/problem.json"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn oracle_refuses_large_instances() {
    let doc = temp_doc(
        r#"{"prior":[0.25,0.25,0.25,0.25],
            "loss":[[0,1,1,1],[1,0,1,1],[1,1,0,1],[1,1,1,0]],
            "leakage":{"type":"shannon"},"beta":1.0}"#,
    );
    let o = voi(&["oracle", "--problem", doc.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("grid too large"));
}

#[test]
fn oracle_agrees_with_solver() {
    let p = problem("hellinger_binary.json");
    let o = voi(&["oracle", "--problem", p.to_str().unwrap(), "--resolution", "0.01"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let gap: f64 = out.lines().nth(1).unwrap().rsplit(',').next().unwrap().parse().unwrap();
    assert!(gap.abs() <= 1e-2);
}

#[test]
fn leakage_and_gain_of_a_given_channel() {
    let p = problem("hellinger_binary.json");
    let o = voi(&["gain", "--problem", p.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    // U(0) = min(0.59, 0.41); output 0 picks action 0 (0.027 + 0.112),
    // output 1 picks action 1 (0.027 + 0.112)
    let expected = 0.41 - 2.0 * (0.027 + 0.112);
    assert!((doc["gain"].as_f64().unwrap() - expected).abs() < 1e-12);
    let o = voi(&["leakage", "--problem", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("measure,leakage_nats\nf:squared_hellinger,"));
}

#[test]
fn leakage_needs_a_channel() {
    let p = problem("hamming_shannon.json");
    let o = voi(&["leakage", "--problem", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}
