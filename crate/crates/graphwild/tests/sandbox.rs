use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use graphwild::graph::{Graph, GraphKind};
use graphwild::sandbox::{execute, execute_batch, ExecJob, ExecStatus, GraphPayload, Interpreter, JobDocument, Limits, SH_SHIM};
use graphwild::tasks::{Answer, AnswerType, Params, TaskId};
use serde::Deserialize;

fn p3() -> Arc<Graph> {
    Arc::new(Graph::undirected(3, &[(0, 1), (1, 2)]).unwrap())
}

fn number_job(id: &str, code: &str) -> ExecJob {
    ExecJob::new(id, code, p3(), AnswerType::Number)
}

#[test]
fn connected_fixture_grades_true() {
    let params = Params::from([("u".into(), 0), ("v".into(), 2)]);
    let job = ExecJob::for_task("conn", "echo thinking\nanswer=true", TaskId::Connectivity, p3(), params, Answer::Bool(true));
    let v = execute(&job).unwrap();
    assert_eq!((v.status, v.grade), (ExecStatus::Ok, Some(true)), "{v:?}");
    assert_eq!(v.stdout_answer, "true");
}

#[test]
fn wrong_answer_grades_false() {
    let params = Params::from([("u".into(), 0), ("v".into(), 2)]);
    let job = ExecJob::for_task("conn", "answer=false", TaskId::Connectivity, p3(), params, Answer::Bool(true));
    assert_eq!(execute(&job).unwrap().grade, Some(false));
}

#[test]
fn infinite_loop_times_out_within_slack() {
    let job = number_job("loop", "while :; do :; done").with_limits(Limits { wall_secs: 2.0, ..Limits::default() });
    let start = Instant::now();
    let v = execute(&job).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    assert_eq!(v.status, ExecStatus::Timeout);
    assert!(v.grade.is_none() && v.parsed.is_none());
    assert!(v.wall_time <= 3.0 && elapsed <= 3.0, "{} {elapsed}", v.wall_time);
}

#[test]
fn background_children_are_reaped_on_timeout() {
    let job = number_job("bg", "sleep 30 &\nsleep 30").with_limits(Limits { wall_secs: 0.5, ..Limits::default() });
    let start = Instant::now();
    assert_eq!(execute(&job).unwrap().status, ExecStatus::Timeout);
    assert!(start.elapsed().as_secs_f64() < 2.0);
}

#[test]
fn ten_megabytes_overflow_a_one_megabyte_cap() {
    let job = number_job("big", "head -c 10000000 /dev/zero | tr '\\0' x\nanswer=1")
        .with_limits(Limits { output_bytes: 1 << 20, ..Limits::default() });
    let v = execute(&job).unwrap();
    assert_eq!(v.status, ExecStatus::OutputOverflow);
    assert!(v.grade.is_none());
}

#[test]
fn memory_limit_stops_a_memory_bomb() {
    let job = number_job("mem", "x=$(head -c 200000000 /dev/zero | tr '\\0' x)\nanswer=${#x}")
        .with_limits(Limits { memory_bytes: 64 << 20, ..Limits::default() });
    let v = execute(&job).unwrap();
    assert_ne!(v.status, ExecStatus::Ok, "{v:?}");
}

#[test]
fn candidate_cannot_kill_the_orchestrator() {
    let v = execute(&number_job("kill", "kill -9 0\nanswer=1")).unwrap();
    assert_eq!(v.status, ExecStatus::RuntimeError);
    assert!(execute(&number_job("after", "answer=2")).unwrap().parsed == Some(Answer::Number(2.0)));
}

#[test]
fn grade_only_when_ok_and_parsed() {
    let params = Params::from([("u".into(), 0), ("v".into(), 2)]);
    for code in ["exit 3", "if then", "answer=maybe", "x=1"] {
        let job = ExecJob::for_task("g", code, TaskId::Connectivity, p3(), params.clone(), Answer::Bool(true));
        let v = execute(&job).unwrap();
        assert_eq!(v.grade.is_some(), v.status == ExecStatus::Ok && v.parsed.is_some(), "{code}: {v:?}");
    }
}

#[test]
fn hundred_trivial_jobs_pool_eight() {
    let jobs: Vec<ExecJob> = (0..100).map(|i| number_job(&format!("j{i}"), &format!("answer={i}"))).collect();
    let verdicts = execute_batch(&jobs, 8);
    assert_eq!(verdicts.len(), 100);
    for (i, v) in verdicts.iter().enumerate() {
        let v = v.as_ref().unwrap();
        assert_eq!(v.job_id, format!("j{i}"));
        assert_eq!(v.parsed, Some(Answer::Number(i as f64)));
    }
}

#[test]
fn mixed_batch_has_exactly_one_timeout() {
    let mut jobs: Vec<ExecJob> = (0..12).map(|i| number_job(&format!("j{i}"), "answer=1")).collect();
    jobs[5] = number_job("slow", "sleep 20").with_limits(Limits { wall_secs: 1.0, ..Limits::default() });
    jobs[8] = number_job("crash", "exit 9");
    let verdicts: Vec<_> = execute_batch(&jobs, 4).into_iter().map(Result::unwrap).collect();
    assert_eq!(verdicts.iter().filter(|v| v.status == ExecStatus::Timeout).count(), 1);
    assert_eq!(verdicts[5].status, ExecStatus::Timeout);
    assert_eq!(verdicts[8].status, ExecStatus::RuntimeError);
    assert_eq!(verdicts.iter().filter(|v| v.status == ExecStatus::Ok).count(), 10);
}

#[test]
fn batch_reruns_give_the_same_verdict_content() {
    let jobs: Vec<ExecJob> = ["answer=$N", "exit 2", "if then", "answer=x", "echo a\necho b\nanswer=4"]
        .iter()
        .enumerate()
        .map(|(i, c)| number_job(&i.to_string(), c))
        .collect();
    let key = |vs: Vec<_>| -> Vec<_> {
        vs.into_iter()
            .map(|v: Result<graphwild::sandbox::ExecutionVerdict, _>| {
                let v = v.unwrap();
                (v.status, v.stdout_answer, v.parsed, v.malformed, v.exit_code)
            })
            .collect()
    };
    assert_eq!(key(execute_batch(&jobs, 3)), key(execute_batch(&jobs, 1)));
}

#[test]
fn pool_bounds_concurrency() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("log");
    let code = format!("echo start >> {0}\nsleep 0.3\necho end >> {0}\nanswer=1", log.display());
    let jobs: Vec<ExecJob> = (0..9).map(|i| number_job(&i.to_string(), &code)).collect();
    assert!(execute_batch(&jobs, 3).iter().all(|v| v.as_ref().unwrap().status == ExecStatus::Ok));
    let (mut live, mut peak) = (0i32, 0i32);
    for line in std::fs::read_to_string(&log).unwrap().lines() {
        live += if line == "start" { 1 } else { -1 };
        peak = peak.max(live);
    }
    assert!(peak <= 3 && peak >= 2, "peak {peak}");
}

#[test]
fn edge_file_payload() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.txt");
    graphwild::codec::edge_file::render_to_file(&p3(), &path).unwrap();
    let mut job = number_job("ef", "answer=$N");
    job.graph = GraphPayload::EdgeFile { path: path.clone(), kind: GraphKind::Undirected };
    assert_eq!(execute(&job).unwrap().parsed, Some(Answer::Number(3.0)));
    job.graph = GraphPayload::EdgeFile { path: dir.path().join("missing"), kind: GraphKind::Undirected };
    assert!(execute(&job).is_err());
}

#[test]
fn non_positive_limits_are_rejected() {
    let job = number_job("z", "answer=1").with_limits(Limits { wall_secs: 0.0, ..Limits::default() });
    assert!(execute(&job).is_err());
}

#[test]
fn echo_executor_replaces_the_shim() {
    // Prints the last line of the candidate file verbatim.
    let echo = Interpreter::parse("sh -c 'tail -n 1 \"$0\"' {code}").unwrap();
    let params = Params::from([("u".into(), 0), ("v".into(), 2)]);
    let job = ExecJob::for_task("echo", "ignored\ntrue", TaskId::Connectivity, p3(), params, Answer::Bool(true)).with_interpreter(echo);
    let v = execute(&job).unwrap();
    assert_eq!((v.status, v.grade), (ExecStatus::Ok, Some(true)));
}

#[test]
fn job_document_reaches_a_custom_interpreter() {
    let dump = Interpreter::parse("sh -c 'tr -d \"\\n\" < \"$0\"; echo' {job.json}").unwrap();
    let mut job = number_job("docjob", "answer=1").with_interpreter(dump);
    job.params = Params::from([("source".into(), 1)]);
    let v = execute(&job).unwrap();
    let doc: JobDocument = serde_json::from_str(&v.stdout_answer).unwrap();
    assert_eq!(doc.job_id, "docjob");
    assert_eq!(doc.graph_kind, GraphKind::Undirected);
    assert_eq!(doc.answer_type, AnswerType::Number);
    assert_eq!(doc.params["source"], 1);
    let raw: serde_json::Value = serde_json::from_str(&v.stdout_answer).unwrap();
    for key in ["job_id", "edge_file", "graph_kind", "params", "answer_type"] {
        assert!(raw.get(key).is_some(), "{key}");
    }
}

#[derive(Deserialize)]
struct Conformance {
    cases: Vec<Case>,
}

#[derive(Deserialize)]
struct Case {
    name: String,
    edges: Option<String>,
    graph_kind: String,
    answer_type: String,
    params: serde_json::Map<String, serde_json::Value>,
    code: Option<String>,
    exit: i32,
    last_line: Option<String>,
    #[serde(default)]
    stdout_empty: bool,
}

#[test]
fn shim_conformance_suite() {
    let text = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/shim_conformance.json")).unwrap();
    let suite: Conformance = serde_json::from_str(&text).unwrap();
    assert_eq!(suite.cases.len(), 20);
    for case in suite.cases {
        let dir = tempfile::tempdir().unwrap();
        let shim = dir.path().join("shim.sh");
        std::fs::write(&shim, SH_SHIM).unwrap();
        let edge_file = dir.path().join("graph.txt");
        if let Some(e) = &case.edges {
            std::fs::write(&edge_file, e).unwrap();
        }
        let code_file = dir.path().join("candidate");
        if let Some(c) = &case.code {
            std::fs::write(&code_file, c).unwrap();
        }
        let job = serde_json::json!({
            "job_id": case.name,
            "edge_file": edge_file,
            "graph_kind": case.graph_kind,
            "params": case.params,
            "answer_type": case.answer_type,
            "code_file": code_file,
        });
        let job_file = dir.path().join("job.json");
        std::fs::write(&job_file, job.to_string()).unwrap();
        let out = Command::new("sh").arg(&shim).arg(&job_file).current_dir(dir.path()).env("TMPDIR", dir.path()).output().unwrap();
        let stdout = String::from_utf8_lossy(&out.stdout);
        assert_eq!(out.status.code(), Some(case.exit), "{}: stderr {}", case.name, String::from_utf8_lossy(&out.stderr));
        if let Some(want) = &case.last_line {
            assert_eq!(stdout.lines().last().unwrap_or(""), want, "{}", case.name);
        }
        if case.stdout_empty {
            assert!(stdout.is_empty(), "{}: {stdout:?}", case.name);
        }
    }
}
