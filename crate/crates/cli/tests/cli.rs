use std::path::Path;
use std::process::{Command, Output};

fn spanlab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spanlab"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json_stdout(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn schedule_prints_fractions_and_decimals() {
    let dir = tempfile::tempdir().unwrap();
    let o = spanlab(dir.path(), &["schedule", "--kind", "emulator", "--iters", "3"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "a_0 = 1/4 = 0.250000");
    assert_eq!(lines[1], "a_1 = 1/5 = 0.200000");
    assert_eq!(lines[2], "a_2 = 5/26 = 0.192308");
    assert_eq!(lines[3], "a_3 = 13/68 = 0.191176");
    let o = spanlab(dir.path(), &["schedule", "--kind", "spanner", "--iters", "1", "--n", "131072"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("a_1 = 7/17"));
    assert!(text.contains("r = "));
}

#[test]
fn cycle_against_itself_has_zero_distortion() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&spanlab(dir.path(), &["gen", "--kind", "cycle", "--n", "6", "--out", "c6.txt"])), 0);
    let o = spanlab(dir.path(), &["audit", "--g", "c6.txt", "--h", "c6.txt"]);
    assert_eq!(code(&o), 0);
    let v = json_stdout(&o);
    assert_eq!(v["result"]["report"]["max_additive"], 0);
    assert_eq!(v["manifest"]["command"], "audit");
}

#[test]
fn distortion_audit_failure_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    spanlab(dir.path(), &["gen", "--kind", "cycle", "--n", "6", "--out", "c6.txt"]);
    spanlab(dir.path(), &["gen", "--kind", "complete", "--n", "6", "--out", "k6.txt"]);
    let o = spanlab(dir.path(), &["audit", "--g", "c6.txt", "--h", "k6.txt", "--require-subgraph"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn tiny_preset_passes_composed_audit() {
    let dir = tempfile::tempdir().unwrap();
    let o = spanlab(dir.path(), &["lb-gen", "--preset", "tiny"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json_stdout(&o)["result"]["z"], 13);
    assert!(dir.path().join("instance.edges").exists());
    let o = spanlab(dir.path(), &["audit", "--mode", "composed"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json_stdout(&o)["result"]["passed"], true);
}

#[test]
fn corrupted_sidecar_fails_audit() {
    let dir = tempfile::tempdir().unwrap();
    spanlab(dir.path(), &["lb-gen", "--preset", "tiny"]);
    let path = dir.path().join("instance.json");
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    v["z"] = serde_json::json!(14);
    std::fs::write(&path, serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(code(&spanlab(dir.path(), &["audit", "--mode", "composed"])), 3);
}

#[test]
fn usage_and_operation_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&spanlab(dir.path(), &["frobnicate"])), 2);
    assert_eq!(code(&spanlab(dir.path(), &["gen", "--kind", "nope"])), 2);
    assert_eq!(code(&spanlab(dir.path(), &["gen", "--kind", "gnm", "--n", "5"])), 1);
    assert_eq!(code(&spanlab(dir.path(), &["audit", "--mode", "base", "--bundle", "missing"])), 1);
    assert_eq!(code(&spanlab(dir.path(), &["--help"])), 0);
}

#[test]
fn inner_graph_and_distance_property() {
    let dir = tempfile::tempdir().unwrap();
    let o = spanlab(dir.path(), &["lb-gen", "--kind", "inner", "--c", "2", "--r-i", "4", "--out", "inner"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json_stdout(&o)["result"]["vertices"], 1352);
    assert_eq!(code(&spanlab(dir.path(), &["audit", "--mode", "base", "--bundle", "inner"])), 0);
    let o = spanlab(dir.path(), &["audit", "--mode", "distance-property", "--bundle", "inner"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json_stdout(&o)["result"]["report"]["failures"], 0);
    let o = spanlab(dir.path(), &["lb-gen", "--kind", "inner", "--c", "2", "--r-i", "4", "--x-i", "27", "--y-i", "52"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn compose_from_saved_bundles() {
    let dir = tempfile::tempdir().unwrap();
    spanlab(dir.path(), &["lb-gen", "--preset", "c2", "--out", "inner"]);
    // a standalone outer graph from a striped set, composed over c2
    let o = spanlab(
        dir.path(),
        &["lb-gen", "--kind", "outer", "--r-o", "8", "--c", "2", "--psi1", "0.6", "--x-o", "32", "--y-o", "64", "--out", "outer"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = spanlab(dir.path(), &["lb-compose", "--outer", "outer", "--inner", "inner", "--out", "comp"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(code(&spanlab(dir.path(), &["audit", "--mode", "composed", "--bundle", "comp"])), 0);
}

#[test]
fn artifacts_are_deterministic_and_round_trip() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [a.path(), b.path()] {
        spanlab(dir, &["gen", "--kind", "gnm", "--n", "80", "--m", "300", "--seed", "4", "--out", "g.txt"]);
        let o = spanlab(dir, &["build-emulator", "--input", "g.txt", "--seed", "9", "--out", "h.txt", "--report", "rep.json"]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        spanlab(dir, &["lb-gen", "--preset", "tiny"]);
    }
    for f in ["g.txt", "h.txt", "instance.edges", "instance.json"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    // save -> load -> save
    let dir = a.path();
    let bundle = spanlab::lower_bound::load_bundle(dir.join("instance")).unwrap();
    spanlab::lower_bound::save_bundle(&bundle, dir.join("again")).unwrap();
    assert_eq!(std::fs::read(dir.join("instance.json")).unwrap(), std::fs::read(dir.join("again.json")).unwrap());
    assert_eq!(std::fs::read(dir.join("instance.edges")).unwrap(), std::fs::read(dir.join("again.edges")).unwrap());
    let g = spanlab::io::load_edge_list(dir.join("h.txt")).unwrap();
    spanlab::io::save_edge_list(&g, dir.join("h2.txt")).unwrap();
    assert_eq!(std::fs::read(dir.join("h.txt")).unwrap(), std::fs::read(dir.join("h2.txt")).unwrap());
}

#[test]
fn spanner_paths_feed_consistency_audit() {
    let dir = tempfile::tempdir().unwrap();
    spanlab(dir.path(), &["gen", "--kind", "gnm", "--n", "120", "--m", "500", "--seed", "2", "--out", "g.txt"]);
    let o = spanlab(
        dir.path(),
        &["build-spanner", "--input", "g.txt", "--out", "h.txt", "--paths", "p.json", "--audit"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json_stdout(&o);
    let max = v["result"]["audit"]["max_additive"].as_u64().unwrap();
    assert!(max <= v["result"]["stop_threshold"].as_u64().unwrap());
    assert_eq!(code(&spanlab(dir.path(), &["audit", "--mode", "consistency", "--paths", "p.json"])), 0);
    let o = spanlab(dir.path(), &["audit", "--g", "g.txt", "--h", "h.txt", "--require-subgraph"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn preserver_and_multiplicative_builds() {
    let dir = tempfile::tempdir().unwrap();
    spanlab(dir.path(), &["gen", "--kind", "gnm", "--n", "60", "--m", "200", "--seed", "3", "--out", "g.txt"]);
    let o = spanlab(dir.path(), &["build-preserver", "--input", "g.txt", "--random-pairs", "8", "--seed", "1"]);
    assert_eq!(code(&o), 0);
    let v = json_stdout(&o);
    assert_eq!(v["result"]["max_additive"], 0);
    assert_eq!(v["result"]["consistent"], true);
    std::fs::write(dir.path().join("pairs.txt"), "0 5\n# comment\n7 9\n").unwrap();
    let o = spanlab(dir.path(), &["build-preserver", "--input", "g.txt", "--pairs", "pairs.txt"]);
    assert_eq!(json_stdout(&o)["result"]["pairs"], 2);
    let o = spanlab(dir.path(), &["build-mult", "--input", "g.txt", "--k", "2", "--out", "m.txt"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json_stdout(&o)["result"]["k"], 2);
}

#[test]
fn cis_audit_and_stretch_commands() {
    let dir = tempfile::tempdir().unwrap();
    let o = spanlab(dir.path(), &["audit", "--mode", "cis", "--r", "30"]);
    assert_eq!(code(&o), 0);
    let o = spanlab(dir.path(), &["audit", "--mode", "cis", "--r", "200", "--stripes", "3", "--psi2", "0.02"]);
    assert_eq!(code(&o), 0);
    spanlab(dir.path(), &["lb-gen", "--preset", "tiny"]);
    let o = spanlab(dir.path(), &["stretch", "--pair", "3"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json_stdout(&o)["result"]["inner_copies"], 3);
    let p = spanlab::lower_bound::tiny_instance(true).unwrap().pairs[0].path.clone();
    let edge = format!("{}-{}", p[1], p[2]);
    let o = spanlab(dir.path(), &["stretch", "--policy", "explicit", "--edges", &edge]);
    assert_eq!(code(&o), 0);
    let o = spanlab(dir.path(), &["stretch", "--mode", "pigeonhole"]);
    assert_eq!(code(&o), 0);
    let v = json_stdout(&o);
    assert_eq!(v["result"]["budget_met"], true);
    assert!(v["result"]["missing_fraction"].as_f64().unwrap() >= 0.5);
}

#[test]
fn sweep_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("empty.json"), r#"{"entries": []}"#).unwrap();
    let o = spanlab(dir.path(), &["sweep", "--config", "empty.json"]);
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 1);
    std::fs::write(
        dir.path().join("cfg.json"),
        r#"{"entries": [{"kind": "spanner", "n": [30, 50], "seeds": [1, 2, 3]}]}"#,
    )
    .unwrap();
    let o = spanlab(dir.path(), &["sweep", "--config", "cfg.json", "--jobs", "2", "--out", "out.csv"]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(dir.path().join("out.csv")).unwrap();
    assert_eq!(text.lines().count(), 7);
    assert!(text.starts_with("kind,n,m,seed,depth,r,r_hat"));
}

#[test]
fn dot_export() {
    let dir = tempfile::tempdir().unwrap();
    spanlab(dir.path(), &["gen", "--kind", "path", "--n", "3", "--out", "p.txt"]);
    let o = spanlab(dir.path(), &["export-dot", "--input", "p.txt"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("0 -- 1;") && text.contains("1 -- 2;"));
    spanlab(dir.path(), &["lb-gen", "--preset", "tiny"]);
    let o = spanlab(dir.path(), &["export-dot", "--bundle", "instance", "--out", "t.dot"]);
    assert_eq!(code(&o), 0);
    let dot = std::fs::read_to_string(dir.path().join("t.dot")).unwrap();
    assert!(dot.contains("subgraph cluster_"));
}
