use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use tempfile::TempDir;

fn pudg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pudg"))
        .args(args)
        .env_remove("PUDG_BUDGET")
        .output()
        .expect("binary runs")
}

fn ok_json(args: &[&str]) -> Value {
    let out = pudg(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn code(args: &[&str]) -> i32 {
    pudg(args).status.code().expect("exit code")
}

fn write(dir: &Path, name: &str, v: &Value) -> String {
    let p: PathBuf = dir.join(name);
    std::fs::write(&p, v.to_string()).unwrap();
    p.to_str().unwrap().to_string()
}

/// Graph JSON in canonical form (edges sorted by source, label, target).
fn graph(edges: &[(u64, &str, u64)]) -> Value {
    let mut edges = edges.to_vec();
    edges.sort();
    json!({
        "edge_alphabet": ["follows", "friend"],
        "nodes": [
            {"id": 1, "data": "Alice"}, {"id": 2, "data": "Bob"},
            {"id": 3, "data": "Carl"}, {"id": 4, "data": "Dave"}
        ],
        "edges": edges.iter().map(|(u, l, v)| json!({"from": u, "label": l, "to": v})).collect::<Vec<_>>(),
    })
}

const BASE: [(u64, &str, u64); 4] = [(1, "friend", 2), (2, "friend", 1), (2, "follows", 1), (2, "follows", 3)];

/// The three-world instance: g1 observed, priors 5/10, 4/10, 1/10.
struct World {
    _dir: TempDir,
    g1: String,
    g3: String,
    prior: String,
    flat: String,
}

fn world() -> World {
    let dir = TempDir::new().unwrap();
    let mut g2 = BASE.to_vec();
    g2.push((1, "friend", 4));
    let mut g3 = g2.clone();
    g3.extend([(4, "friend", 3), (3, "follows", 2)]);
    let prior = json!([
        {"graph": graph(&BASE), "weight": "5/10"},
        {"graph": graph(&g2), "weight": "4/10"},
        {"graph": graph(&g3), "weight": "1/10"},
    ]);
    World {
        g1: write(dir.path(), "g1.json", &graph(&BASE)),
        g3: write(dir.path(), "g3.json", &graph(&g3)),
        prior: write(dir.path(), "prior.json", &prior),
        flat: write(dir.path(), "flat.json", &json!({"class": "subset", "kind": "flat"})),
        _dir: dir,
    }
}

#[test]
fn eval_epsilon_gives_identity_pairs() {
    let dir = TempDir::new().unwrap();
    let g = write(
        dir.path(),
        "g.json",
        &json!({"edge_alphabet": ["a"], "nodes": [{"id": 1, "data": "x"}, {"id": 2, "data": "y"}], "edges": []}),
    );
    let v = ok_json(&["eval", "--graph", &g, "--query", "eps"]);
    assert_eq!(v["pairs"], json!([[1, 1], [2, 2]]));
}

#[test]
fn eval_lists_nodes_with_outgoing_friend_edges() {
    let w = world();
    let v = ok_json(&["eval", "--graph", &w.g3, "--query", "<friend>"]);
    assert_eq!(v["nodes"], json!([1, 2, 4]));
    assert_eq!(v["global"], json!(false));
    let v = ok_json(&["eval", "--graph", &w.g3, "--query", "<friend>", "--origin", "3"]);
    assert_eq!(v["satisfied"], json!(false));
    let v = ok_json(&["eval", "--graph", &w.g3, "--query", "friend/friend", "--pair", "1", "1"]);
    assert_eq!(v["satisfied"], json!(true));
}

#[test]
fn malformed_inputs_exit_with_2() {
    let w = world();
    assert_eq!(code(&["eval", "--graph", &w.g1, "--query", "<friend"]), 2);
    assert_eq!(code(&["eval", "--graph", &w.g1, "--query", "<nope>"]), 2);
    assert_eq!(code(&["eval", "--graph", "/does/not/exist.json", "--query", "eps"]), 2);
    assert_eq!(code(&["eval", "--graph", &w.prior, "--query", "eps"]), 2);
    assert_eq!(code(&["eval", "--graph", &w.g1, "--query", "<friend>", "--pair", "1", "2"]), 2);
}

#[test]
fn repetition_limit_is_configurable() {
    let w = world();
    assert_eq!(code(&["eval", "--graph", &w.g1, "--query", "friend{0,65}"]), 2);
    let v = ok_json(&["--max-repeat", "65", "eval", "--graph", &w.g1, "--query", "friend{0,65}", "--pair", "1", "2"]);
    assert_eq!(v["satisfied"], json!(true));
}

#[test]
fn pqa_three_worlds() {
    let w = world();
    let args = |q: &'static str, mode: &'static str| {
        vec!["pqa", "--graph", &w.g1, "--prior", &w.prior, "--model", &w.flat, "--query", q, "--mode", mode]
            .into_iter()
            .map(String::from)
            .collect::<Vec<_>>()
    };
    let run = |a: Vec<String>| ok_json(&a.iter().map(String::as_str).collect::<Vec<_>>());
    let v = run(args("(friend + follows){0,3}", "global"));
    assert_eq!(v["probability"], json!("1/10"));
    assert_eq!(v["probability_decimal"], json!(0.1));
    let v = run(args("!((friend + follows){0,3})", "existential"));
    assert_eq!(v["probability"], json!("9/10"));
    let mut with_bound = args("(friend + follows){0,3}", "global");
    with_bound.extend(["--bound".into(), "1/2".into()]);
    assert_eq!(run(with_bound)["decision"], json!(false));
}

#[test]
fn output_is_byte_identical_across_runs() {
    let w = world();
    let a = ["pqa", "--graph", &w.g1, "--prior", &w.prior, "--model", &w.flat, "--query", "<friend>", "--jobs", "2"];
    assert_eq!(pudg(&a).stdout, pudg(&a).stdout);
}

#[test]
fn clean_picks_the_most_likely_world() {
    let w = world();
    let v = ok_json(&["clean", "--graph", &w.g1, "--prior", &w.prior, "--model", &w.flat]);
    assert_eq!(v["metadata"]["probability"], json!("1/2"));
    assert_eq!(v["metadata"]["exact"], json!(true));
    assert_eq!(v["graph"], graph(&BASE));
    let v = ok_json(&["clean", "--graph", &w.g1, "--prior", &w.prior, "--model", &w.flat, "--bound", "1/2"]);
    assert_eq!(v["decision"], json!(false));
}

#[test]
fn clean_reports_no_candidate_and_budget() {
    let w = world();
    // a loop no prior graph has: nothing can be deleted into this observation
    let dir = TempDir::new().unwrap();
    let mut loopy = BASE.to_vec();
    loopy.push((3, "friend", 3));
    let obs = write(dir.path(), "obs.json", &graph(&loopy));
    assert_eq!(code(&["clean", "--graph", &obs, "--prior", &w.prior, "--model", &w.flat]), 3);
    let del = write(dir.path(), "m.json", &json!({"class": "subset", "kind": "edge_deletion", "p": "1/2"}));
    assert_eq!(code(&["--budget", "10", "clean", "--graph", &w.g1, "--model", &del]), 4);
    let out = Command::new(env!("CARGO_BIN_EXE_pudg"))
        .args(["clean", "--graph", &w.g1, "--model", &del])
        .env("PUDG_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn clean_with_constraints_excludes_hard_violations() {
    let w = world();
    let dir = TempDir::new().unwrap();
    // forbid the most likely world, the only one where Alice is not Dave's friend
    let c = write(dir.path(), "c.json", &json!([{"query": "!=Alice | !<friend/[=Dave]>", "weight": "0"}]));
    let v = ok_json(&["clean", "--graph", &w.g1, "--prior", &w.prior, "--model", &w.flat, "--constraints", &c]);
    assert_eq!(v["metadata"]["probability"], json!("4/5"));
    assert_ne!(v["graph"], graph(&BASE));
}

#[test]
fn specialized_solvers() {
    let dir = TempDir::new().unwrap();
    let g = write(
        dir.path(),
        "g.json",
        &json!({"edge_alphabet": ["a"], "nodes": [{"id": 1, "data": "x"}, {"id": 2, "data": "x"}, {"id": 3, "data": "z"}], "edges": [{"from": 1, "label": "a", "to": 2}]}),
    );
    let m = write(
        dir.path(),
        "m.json",
        &json!({"values": ["a", "b", "c"], "weights": {"a": {"1": "1/2", "2": "1"}, "b": {"1": "1", "2": "1/4"}, "c": {"3": "1"}}}),
    );
    let v = ok_json(&["clean", "--graph", &g, "--instance", &m]);
    assert_eq!(v["metadata"]["score"], json!("1/1"));
    let data: Vec<&str> = v["graph"]["nodes"].as_array().unwrap().iter().map(|n| n["data"].as_str().unwrap()).collect();
    assert_eq!(data, ["b", "a", "c"]);

    let c = write(dir.path(), "c.json", &json!({"target": {"x": 1, "z": 2}}));
    let v = ok_json(&["clean", "--graph", &g, "--instance", &c]);
    assert_eq!(v["metadata"]["cost"], json!(1));

    let h = write(dir.path(), "h.json", &json!({"allowed": {"1": ["p", "q"], "2": ["q", "r"], "3": ["r", "q"]}}));
    let v = ok_json(&["clean", "--graph", &g, "--instance", &h]);
    assert_eq!(v["values"], json!(["q"]));
    assert_eq!(v["metadata"]["exact"], json!(true));
}

#[test]
fn origin_solvers() {
    let dir = TempDir::new().unwrap();
    let g = write(
        dir.path(),
        "g.json",
        &json!({"edge_alphabet": ["a"], "nodes": [{"id": 1, "data": "x"}, {"id": 2, "data": "y"}], "edges": [{"from": 1, "label": "a", "to": 2}], "origin": 1}),
    );
    let v = ok_json(&["clean", "--graph", &g, "--query", "<a/[=goal]>", "--solver", "origin-expr"]);
    assert_eq!(v["metadata"]["cost"], json!(1));
    let v = ok_json(&["clean", "--graph", &g, "--query", "<a/[=goal]>"]);
    assert_eq!(v["graph"]["nodes"][1]["data"], json!("goal"));
    assert_eq!(code(&["clean", "--graph", &g, "--query", "<a/a>"]), 3);
}

#[test]
fn transform_leaves_star_free_input_alone() {
    let w = world();
    let v = ok_json(&["transform", "--graph", &w.g1, "--query", "<friend/follows>", "--kind", "star-elim"]);
    assert_eq!(v["query"], json!("<friend / follows>"));
    assert_eq!(v["graph"], graph(&BASE));
    let v = ok_json(&["transform", "--graph", &w.g1, "--query", "<friend*/follows>", "--kind", "star-elim"]);
    assert_eq!(v["fragment"], json!("PosCoreRegStarFree"));
    let v = ok_json(&["transform", "--graph", &w.g1, "--query", "<friend>", "--kind", "to-origin"]);
    let o = v["origin"].as_u64().unwrap().to_string();
    let dir = TempDir::new().unwrap();
    let h = write(dir.path(), "h.json", &v["graph"]);
    let q = v["query"].as_str().unwrap().to_string();
    let e = ok_json(&["eval", "--graph", &h, "--query", &q, "--origin", &o]);
    assert_eq!(e["satisfied"], json!(false));
}

#[test]
fn gadget_bundles_agree_with_oracles() {
    let dir = TempDir::new().unwrap();
    let sat = dir.path().join("sat.cnf");
    std::fs::write(&sat, "p cnf 2 2\n1 2 -1 0\n-2 -2 -2 0\n").unwrap();
    let unsat = dir.path().join("unsat.cnf");
    std::fs::write(&unsat, "p cnf 1 2\n1 1 1 0\n-1 -1 -1 0\n").unwrap();
    for f in [&sat, &unsat] {
        for kind in ["sat-subset", "sat-superset", "sat-update", "isorepair", "majsat-subset", "majsat-superset"] {
            let v = ok_json(&["gadget", "--kind", kind, "--cnf", f.to_str().unwrap(), "--solve"]);
            assert_eq!(v["decision"], v["oracle"], "{kind} on {}", f.display());
        }
    }
    let d = write(dir.path(), "d.json", &json!({"n": 3, "edges": [[0, 1], [1, 2]], "start": 0}));
    let out = dir.path().join("bundle");
    let v = ok_json(&["gadget", "--kind", "hampath", "--digraph", &d, "--solve", "--out", out.to_str().unwrap()]);
    assert_eq!(v["decision"], json!(true));
    assert!(out.join("observed.json").exists() && out.join("query.txt").exists());
    let v = ok_json(&["gadget", "--kind", "hampath", "--digraph", &d, "--start", "1", "--solve"]);
    assert_eq!(v["decision"], json!(false));
    assert_eq!(code(&["gadget", "--kind", "sat-subset", "--cnf", "/missing.cnf"]), 2);
    let two = dir.path().join("two.cnf");
    std::fs::write(&two, "p cnf 2 1\n1 2 0\n").unwrap();
    assert_eq!(code(&["gadget", "--kind", "sat-subset", "--cnf", two.to_str().unwrap()]), 2);
}

#[test]
fn validate_flags_a_mislabelled_observer() {
    let w = world();
    let dir = TempDir::new().unwrap();
    let bad = write(dir.path(), "bad.json", &json!({"class": "superset", "kind": "edge_deletion", "p": "1/2"}));
    assert_eq!(code(&["validate", "--graph", &w.g1, "--model", &bad, "--seed", "7"]), 1);
    let v = ok_json(&["validate", "--graph", &w.g1, "--model", &w.flat, "--prior", &w.prior, "--query", "<friend>"]);
    assert_eq!(v["valid"], json!(true));
    assert_eq!(v["prior"]["graphs"], json!(3));
}
