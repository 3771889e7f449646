use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn multiway_with(threads: &str, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_multiway"))
        .args(args)
        .env("MULTIWAY_THREADS", threads)
        .output()
        .expect("binary runs")
}

fn multiway(args: &[&str]) -> Output {
    multiway_with("1", args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn status(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

const PROPOSITION: [&str; 4] = ["--from", "AA", "--to", "ABBBABBB"];

#[test]
fn evolve_writes_the_reference_graph() {
    let ab = data("ab.rules");
    let o = multiway(&["evolve", "-r", &ab, "-i", "AA", "-g", "8", "--format", "json"]);
    assert_eq!(status(&o), 0);
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["nodes"].as_array().unwrap().len(), 45);
    assert_eq!(doc["edges"].as_array().unwrap().len(), 72);
    assert!(stderr(&o).contains("generation 8: 9 nodes"));
    assert!(stderr(&o).contains("total: 45 nodes, 72 edges"));
}

#[test]
fn zero_generations_is_one_node() {
    let o = multiway(&["evolve", "-r", &data("ab.rules"), "-i", "AA", "-g", "0"]);
    assert_eq!(status(&o), 0);
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["nodes"].as_array().unwrap().len(), 1);
    assert!(doc["edges"].as_array().unwrap().is_empty());
}

#[test]
fn dot_and_json_describe_the_same_graph() {
    let ab = data("ab.rules");
    let json = stdout(&multiway(&["evolve", "-r", &ab, "-i", "AA"]));
    let dot = stdout(&multiway(&["evolve", "-r", &ab, "-i", "AA", "--format", "dot"]));
    let doc: Value = serde_json::from_str(&json).unwrap();
    let label = |id: &Value| {
        doc["nodes"][id.as_u64().unwrap() as usize]["string"]
            .as_str()
            .unwrap()
            .to_owned()
    };
    let from_json: BTreeSet<(String, String)> = doc["edges"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| (label(&e["src"]), label(&e["dst"])))
        .collect();

    let mut names: std::collections::HashMap<String, String> = std::collections::HashMap::new();
    let mut from_dot = BTreeSet::new();
    for line in dot.lines().map(str::trim) {
        if let Some((lhs, rest)) = line.split_once(" -> ") {
            let dst = rest.split_whitespace().next().unwrap();
            from_dot.insert((names[lhs].clone(), names[dst].clone()));
        } else if let Some((id, rest)) = line.split_once(" [label=\"") {
            names.insert(id.to_owned(), rest.split('"').next().unwrap().to_owned());
        }
    }
    assert_eq!(names.len(), 45);
    assert_eq!(from_dot, from_json);
}

#[test]
fn proofs_are_listed() {
    let ab = data("ab.rules");
    let mut args = vec!["proofs", "-r", &ab, "--max-len", "6"];
    args.extend(PROPOSITION);
    let o = multiway(&args);
    assert_eq!(status(&o), 0);
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 21);
    assert_eq!(lines[20], "20 proofs");
    assert_eq!(
        lines[0],
        "AA -[r@1]-> AAB -[r@1]-> AABB -[r@1]-> AABBB -[r@0]-> ABABBB -[r@0]-> ABBABBB -[r@0]-> ABBBABBB"
    );
    assert!(lines[..20]
        .iter()
        .all(|l| l.starts_with("AA -[") && l.ends_with("-> ABBBABBB")));
}

#[test]
fn proof_listing_as_json() {
    let ab = data("ab.rules");
    let mut args = vec!["proofs", "-r", &ab, "--max-len", "6", "--format", "json"];
    args.extend(PROPOSITION);
    let doc: Value = serde_json::from_str(&stdout(&multiway(&args))).unwrap();
    assert_eq!(doc["count"], 20);
    assert_eq!(doc["proofs"][0]["states"][3], "AABBB");
    assert_eq!(doc["proofs"][0]["steps"][0], "r@1");
}

#[test]
fn reflexive_and_unreachable_propositions() {
    let ab = data("ab.rules");
    let o = multiway(&["proofs", "-r", &ab, "--from", "AAB", "--to", "AAB"]);
    assert_eq!((status(&o), stdout(&o).as_str()), (0, "AAB\n1 proofs\n"));
    let o = multiway(&["proofs", "-r", &ab, "--from", "AAB", "--to", "ABA"]);
    assert_eq!((status(&o), stdout(&o).as_str()), (0, "0 proofs\n"));
    let o = multiway(&["proofs", "-r", &ab, "--from", "AA", "--to", "BB"]);
    assert_eq!((status(&o), stdout(&o).as_str()), (0, "0 proofs\n"));
}

#[test]
fn order_two_homotopy_emits_the_ten_rungs() {
    let ab = data("ab.rules");
    let mut args = vec!["homotopy", "-r", &ab, "--order", "2"];
    args.extend(PROPOSITION);
    let o = multiway(&args);
    assert_eq!(status(&o), 0);
    let out = stdout(&o);
    for (l, r) in [
        ("AAB", "ABA"),
        ("AABB", "ABBA"),
        ("AABBB", "ABBBA"),
        ("ABABBB", "ABBBAB"),
        ("ABBABBB", "ABBBABB"),
    ] {
        assert!(out.contains(&format!(": {l} -> {r} ")), "{l} -> {r}");
        assert!(out.contains(&format!(": {r} -> {l} ")), "{r} -> {l}");
    }
    assert_eq!(out.lines().filter(|l| l.starts_with("h2_")).count(), 10);
    assert!(stderr(&o).contains("order 2: 1 endpoint pairs, 1 parallel pairs, 1 specs, 10 rungs"));
    // the emitted file is itself a valid input
    assert_eq!(
        out.lines()
            .filter(|l| !l.starts_with('#'))
            .collect::<Vec<_>>()
            .join("\n")
            + "\n",
        std::fs::read_to_string(data("featured.rules")).unwrap()
    );
}

#[test]
fn single_proof_gives_an_empty_layer() {
    let o = multiway(&["homotopy", "-r", &data("ab.rules"), "--from", "AB", "--to", "ABB"]);
    assert_eq!(status(&o), 0);
    assert!(!stdout(&o)
        .lines()
        .any(|l| l.contains("->") && !l.starts_with('#') && !l.starts_with("r:")));
    assert!(stderr(&o).contains("0 rungs"));
}

#[test]
fn order_three_rung_counts() {
    let ab = data("ab.rules");
    let mut args = vec!["homotopy", "-r", &ab, "--order", "3", "--policy", "all"];
    args.extend(PROPOSITION);
    let o = multiway(&args);
    assert_eq!(status(&o), 0);
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.starts_with("h2_")).count(), 28);
    let clique = ["AABBB", "ABABB", "ABBAB", "ABBBA"];
    let order3: Vec<&str> = out.lines().filter(|l| l.starts_with("h3_")).collect();
    assert_eq!(order3.len(), 12);
    for line in order3 {
        let (_, rule) = line.split_once(": ").unwrap();
        let (lhs, rest) = rule.split_once(" -> ").unwrap();
        let rhs = rest.split_whitespace().next().unwrap();
        assert!(clique.contains(&lhs) && clique.contains(&rhs), "{line}");
    }
}

#[test]
fn inadmissible_order_reports_the_order_reached() {
    let ab = data("ab.rules");
    let mut args = vec!["homotopy", "-r", &ab, "--order", "4"];
    args.extend(PROPOSITION);
    let o = multiway(&args);
    assert_eq!(status(&o), 4);
    assert!(stderr(&o).contains("order 4 is inadmissible, reached order 2"));
    assert!(stdout(&o).contains("@order 2"));
}

#[test]
fn featured_system_with_inverses_passes() {
    let featured = data("featured.rules");
    for check in ["category", "groupoid"] {
        let o = multiway(&[
            "verify", "-r", &featured, "-i", "AA", "--invert", "--check", check, "--order", "2",
        ]);
        assert_eq!(status(&o), 0, "{check}: {}", stdout(&o));
        assert!(stdout(&o).ends_with("result: PASS\n"));
    }
}

#[test]
fn base_system_is_not_a_groupoid() {
    let o = multiway(&[
        "verify",
        "-r",
        &data("ab.rules"),
        "-i",
        "AA",
        "--check",
        "groupoid",
        "--format",
        "json",
    ]);
    assert_eq!(status(&o), 5);
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["passed"], false);
    let witness = report["laws"]
        .as_array()
        .unwrap()
        .iter()
        .find_map(|l| l["witness"].as_object())
        .unwrap();
    assert_eq!(witness["corners"], serde_json::json!(["AA", "AAB"]));
}

#[test]
fn missing_rung_fails_verification() {
    let good = multiway(&["verify", "-r", &data("featured.rules"), "-i", "AA"]);
    assert_eq!(status(&good), 0);
    let o = multiway(&["verify", "-r", &data("featured_missing_rung.rules"), "-i", "AA"]);
    assert_eq!(status(&o), 5);
    let report = stdout(&o);
    assert!(report.contains("[FAIL] vertical_composition"));
    assert!(report.contains("missing AABBB -> ABBBA"));
    assert!(report.ends_with("result: FAIL\n"));
    assert!(report.lines().all(|l| l.chars().count() <= 120));
}

#[test]
fn parse_and_budget_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.rules");
    std::fs::write(&bad, "A AB\n").unwrap();
    let o = multiway(&["evolve", "-r", bad.to_str().unwrap(), "-i", "A"]);
    assert_eq!(status(&o), 2);
    assert!(stderr(&o).contains("line 1"));

    let ab = data("ab.rules");
    let o = multiway(&["evolve", "-r", &ab, "-i", "AA", "--node-budget", "10"]);
    assert_eq!(status(&o), 3);
    assert!(stderr(&o).contains("layer sizes"));
    let mut args = vec!["proofs", "-r", &ab, "--path-budget", "5"];
    args.extend(PROPOSITION);
    assert_eq!(status(&multiway(&args)), 3);

    let o = multiway(&["evolve", "-r", &ab]);
    assert_eq!(status(&o), 1);
    assert_eq!(status(&multiway_with("zero", &["evolve", "-r", &ab, "-i", "A"])), 1);
}

#[test]
fn config_file_fills_missing_flags() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(data("ab.rules"), dir.path().join("ab.rules")).unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "rules = \"ab.rules\"\ninitial = [\"AA\"]\ngenerations = 3\nformat = \"text\"\n",
    )
    .unwrap();
    let c = cfg.to_str().unwrap();
    let o = multiway(&["evolve", "--config", c]);
    assert_eq!(status(&o), 0);
    assert!(stdout(&o).ends_with("total: 10 nodes, 12 edges\n"));
    let o = multiway(&["evolve", "--config", c, "-g", "1"]);
    assert!(stdout(&o).ends_with("total: 3 nodes, 2 edges\n"));

    std::fs::write(&cfg, "generation = 3\n").unwrap();
    assert_eq!(status(&multiway(&["evolve", "--config", c])), 2);
}

#[test]
fn out_flag_writes_the_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.json");
    let o = multiway(&[
        "evolve",
        "-r",
        &data("ab.rules"),
        "-i",
        "AA",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(status(&o), 0);
    assert!(o.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(doc["nodes"].as_array().unwrap().len(), 45);
}

#[test]
fn outputs_are_byte_stable_across_thread_counts() {
    let ab = data("ab.rules");
    let featured = data("featured.rules");
    let mut runs: Vec<Vec<&str>> = vec![
        vec!["evolve", "-r", &ab, "-i", "AA"],
        vec!["evolve", "-r", &featured, "-i", "AA", "--format", "dot"],
        vec![
            "verify", "-r", &featured, "-i", "AA", "--invert", "--check", "category", "--check", "groupoid",
            "--format", "json",
        ],
    ];
    let mut homotopy = vec!["homotopy", "-r", &ab, "--order", "3", "--policy", "all"];
    homotopy.extend(PROPOSITION);
    let mut proofs = vec!["proofs", "-r", &ab];
    proofs.extend(PROPOSITION);
    runs.push(homotopy);
    runs.push(proofs);
    for args in runs {
        let reference = multiway_with("1", &args);
        for threads in ["4", "16", "4"] {
            let o = multiway_with(threads, &args);
            assert_eq!(o.stdout, reference.stdout, "{args:?} with {threads} threads");
            assert_eq!(o.status, reference.status);
        }
    }
}

#[test]
fn config_out_is_relative_to_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let rules = data("ab.rules").replace('\\', "/");
    std::fs::write(&cfg, format!("rules = \"{rules}\"\nfrom = \"AA\"\nout = \"graph.dot\"\nformat = \"dot\"\n")).unwrap();
    let o = multiway(&["evolve", "--config", cfg.to_str().unwrap(), "-g", "2"]);
    assert_eq!(status(&o), 0);
    assert!(o.stdout.is_empty());
    let dot = std::fs::read_to_string(dir.path().join("graph.dot")).unwrap();
    assert!(dot.starts_with("digraph multiway {"));
}
