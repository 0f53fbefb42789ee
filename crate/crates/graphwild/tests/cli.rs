use std::path::Path;
use std::process::Command;

use graphwild::cli::{self, EXIT_DOMAIN, EXIT_OK, EXIT_USAGE, PAIRS_FILE, REPORT_JSON, REPORT_TABLE, RLCF_STATS_FILE};
use graphwild::forge::{self, RecordStatus, RECORDS_FILE, SFT_FILE};
use graphwild::inference::EvalReport;
use graphwild::library::INDEX_FILE;
use graphwild::manifest::{sha256_hex, Manifest, MANIFEST_FILE};

fn run(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = cli::main_with(std::iter::once("graphwild").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn ok(args: &[&str]) -> String {
    let (code, out, err) = run(args);
    assert_eq!(code, EXIT_OK, "{args:?}: {err}");
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn manifest_matches_outputs(dir: &Path) {
    let m = Manifest::read(dir).unwrap();
    assert!(!m.outputs.is_empty());
    for (file, digest) in &m.outputs {
        assert_eq!(&sha256_hex(&std::fs::read(dir.join(file)).unwrap()), digest, "{file}");
    }
}

#[test]
fn tasks_list_names_every_task() {
    let out = ok(&["tasks", "list"]);
    assert_eq!(out.lines().count(), 21);
    let json: serde_json::Value = serde_json::from_str(&ok(&["tasks", "list", "--json"])).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 21);
}

#[test]
fn usage_and_domain_errors_have_distinct_exit_codes() {
    assert_eq!(run(&["solve", "--task", "nope", "--edge-file", "x"]).0, EXIT_USAGE);
    assert_eq!(run(&["solve", "--task", "diameter"]).0, EXIT_USAGE);
    assert_eq!(run(&["bogus"]).0, EXIT_USAGE);
    assert_eq!(run(&["solve", "--task", "diameter", "--edge-file", "/nonexistent/graph.txt"]).0, EXIT_DOMAIN);
    assert_eq!(run(&["eval", "--client", "stub-planted:7x"]).0, EXIT_USAGE);
    assert_eq!(run(&["gen", "graph", "--n", "5"]).0, EXIT_USAGE);
}

#[test]
fn solve_reads_edge_files() {
    let dir = tempfile::tempdir().unwrap();
    let ef = dir.path().join("g.txt");
    std::fs::write(&ef, "0 1\n1 2\n2 3\n").unwrap();
    let out = ok(&["solve", "--task", "diameter", "--edge-file", s(&ef)]);
    assert_eq!(out.lines().next(), Some("3"));
    assert!(out.contains("check=ok"));
    let out = ok(&["solve", "--task", "connectivity", "--edge-file", s(&ef), "--param", "u=0", "--param", "v=3"]);
    assert_eq!(out.lines().next(), Some("true"));
    let dup = dir.path().join("dup.txt");
    std::fs::write(&dup, "0 1\n1 0\n1 1\n1 2\n").unwrap();
    assert_eq!(run(&["solve", "--task", "diameter", "--edge-file", s(&dup)]).0, EXIT_DOMAIN);
    assert_eq!(ok(&["solve", "--task", "diameter", "--edge-file", s(&dup), "--lenient"]).lines().next(), Some("2"));
    let iso = dir.path().join("iso.txt");
    std::fs::write(&iso, "# graphwild edge-file kind=undirected nodes=3\n0 1\n").unwrap();
    assert_eq!(run(&["solve", "--task", "min_edge_cover", "--edge-file", s(&iso)]).0, EXIT_DOMAIN);
}

#[test]
fn gen_graph_is_seeded() {
    let a = ok(&["--seed", "4", "gen", "graph", "--n", "8", "--p", "0.4", "--format", "adjacency-list"]);
    let b = ok(&["--seed", "4", "gen", "graph", "--n", "8", "--p", "0.4", "--format", "adjacency-list"]);
    let c = ok(&["--seed", "5", "gen", "graph", "--n", "8", "--p", "0.4", "--format", "adjacency-list"]);
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn end_to_end_pipeline() {
    let root = tempfile::tempdir().unwrap();
    let p = |name: &str| root.path().join(name);

    let config = "seed = 3\nbalance_cap = 0.5\n\n[tasks.connectivity]\ncount = 6\n\n[tasks.diameter]\ncount = 6\n\n[tasks.max_clique]\ncount = 4\n";
    std::fs::write(p("forge.toml"), config).unwrap();
    let out = ok(&["forge", "build", "--config", s(&p("forge.toml")), "--out", s(&p("build"))]);
    assert!(out.contains("verified: 16"), "{out}");
    manifest_matches_outputs(&p("build"));
    let records = forge::read_records(p("build").join(RECORDS_FILE)).unwrap();
    assert_eq!(records.len(), 16);
    let sft = std::fs::read_to_string(p("build").join(SFT_FILE)).unwrap();
    for line in sft.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        for key in ["prompt", "completion", "task_id", "metadata"] {
            assert!(v.get(key).is_some(), "{key}");
        }
    }

    let out = ok(&["forge", "clean", "--records", s(&p("build").join(RECORDS_FILE)), "--out", s(&p("clean")), "--wall-secs", "5"]);
    assert!(out.contains("16"), "{out}");
    let cleaned = forge::read_records(p("clean").join(RECORDS_FILE)).unwrap();
    assert!(cleaned.iter().all(|r| r.status == RecordStatus::Verified));

    let out = ok(&[
        "--seed", "8", "forge", "rlcf", "--records", s(&p("build").join(RECORDS_FILE)), "--out", s(&p("rlcf")), "--k", "6", "--target", "10",
        "--client", "stub-bernoulli:0.5", "--audit", "0.5",
    ]);
    assert!(out.contains("pairs"), "{out}");
    let pairs = std::fs::read_to_string(p("rlcf").join(PAIRS_FILE)).unwrap();
    assert!(pairs.lines().count() <= 10 && pairs.lines().count() > 0);
    for line in pairs.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_ne!(v["chosen"], v["rejected"]);
        assert_eq!(v["meta"]["beta_hint"], 0.1);
    }
    assert!(p("rlcf").join(RLCF_STATS_FILE).is_file());
    manifest_matches_outputs(&p("rlcf"));

    let csv = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/library.csv");
    ok(&["index", "build", "--csv", s(&csv), "--out", s(&p("index"))]);
    assert!(p("index").join(INDEX_FILE).is_file());
    let out = ok(&["retrieve", "--index", s(&p("index")), "--query", "find a maximal clique quickly", "-k", "2"]);
    assert!(out.lines().next().unwrap().contains("maximal clique"), "{out}");

    let ef = p("graph.txt");
    std::fs::write(&ef, "# graphwild edge-file kind=undirected nodes=4\n0 1\n1 2\n2 0\n2 3\n").unwrap();
    let out = ok(&["infer", "--query", "What is the diameter of this graph?", "--edge-file", s(&ef), "--client", "stub-correct", "--grade"]);
    assert!(out.contains("route: direct") && out.contains("answer: 2") && out.contains("correct: true"), "{out}");
    let out = ok(&[
        "infer", "--query", "Find the maximum clique of this graph.", "--edge-file", s(&ef), "--client", "stub-correct", "--grade",
        "--index", s(&p("index")), "--out", s(&p("infer")),
    ]);
    assert!(out.contains("route: rag") && out.contains("correct: true"), "{out}");
    manifest_matches_outputs(&p("infer"));

    ok(&["eval", "--tasks", "diameter,max_clique", "--n", "10", "--repeats", "2", "--client", "stub-planted:50", "--out", s(&p("eval"))]);
    let report: EvalReport = serde_json::from_str(&std::fs::read_to_string(p("eval").join(REPORT_JSON)).unwrap()).unwrap();
    assert_eq!(report.tasks.len(), 2);
    assert!(report.tasks.iter().all(|t| t.attempts == 20 && t.accuracy == 0.5));
    assert_eq!(report.tasks[1].rag_routed, 20);
    assert!(std::fs::read_to_string(p("eval").join(REPORT_TABLE)).unwrap().contains("max_clique"));
    assert!(p("eval").join(MANIFEST_FILE).is_file());
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_graphwild");
    assert_eq!(Command::new(bin).args(["tasks", "list"]).output().unwrap().status.code(), Some(EXIT_OK));
    assert_eq!(Command::new(bin).args(["solve", "--task", "nope", "--edge-file", "x"]).output().unwrap().status.code(), Some(EXIT_USAGE));
    let out = Command::new(bin).args(["solve", "--task", "diameter", "--edge-file", "/nonexistent"]).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_DOMAIN));
    assert!(!out.stderr.is_empty());
}
