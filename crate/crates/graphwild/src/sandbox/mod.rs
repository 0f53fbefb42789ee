//! Run candidate programs in child processes under wall-time, memory and
//! output limits, and turn what they print into graded verdicts.
//!
//! Each job gets a private temp directory holding the edge file, the code,
//! a JSON job document and (for the built-in executor) the shim. The
//! interpreter is a command template whose `{shim}`, `{job}`, `{code}` and
//! `{dir}` placeholders are substituted per job. The answer is the last
//! non-empty stdout line.

use std::io::{Read, Write};
use std::os::unix::process::CommandExt;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::edge_file::{parse_edge_file, write_edges};
use crate::graph::{Graph, GraphKind};
use crate::tasks::grade::grade_against;
use crate::tasks::{Answer, AnswerType, Params, TaskId};

/// Source of the built-in POSIX sh shim.
pub const SH_SHIM: &str = include_str!("shim.sh");

/// Shim exit codes.
pub mod exit {
    pub const JOB_MALFORMED: i32 = 2;
    pub const CANDIDATE_ERROR: i32 = 3;
    pub const ANSWER_UNSET: i32 = 4;
    pub const COMPILE_ERROR: i32 = 5;
}

const STDERR_KEEP: usize = 4096;

#[derive(Debug, Error)]
pub enum SandboxError {
    #[error("interpreter unavailable: {0}")]
    Unavailable(String),
    #[error("invalid job: {0}")]
    InvalidJob(String),
    #[error("sandbox internal error: {0}")]
    Internal(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Limits {
    pub wall_secs: f64,
    pub memory_bytes: u64,
    pub output_bytes: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { wall_secs: 10.0, memory_bytes: 512 << 20, output_bytes: 1 << 20 }
    }
}

/// Command template, e.g. `sh {shim} {job}` or `python3 shim.py {job}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interpreter {
    pub argv: Vec<String>,
}

impl Interpreter {
    /// The built-in sh shim.
    pub fn builtin() -> Self {
        Interpreter { argv: vec!["sh".into(), "{shim}".into(), "{job}".into()] }
    }

    /// Split a shell-quoted template.
    pub fn parse(template: &str) -> Result<Self, SandboxError> {
        let argv = shlex::split(template).ok_or_else(|| SandboxError::InvalidJob(format!("bad interpreter template `{template}`")))?;
        if argv.is_empty() {
            return Err(SandboxError::InvalidJob("empty interpreter template".into()));
        }
        Ok(Interpreter { argv })
    }

    fn uses_shim(&self) -> bool {
        self.argv.iter().any(|a| a.contains("{shim}"))
    }

    fn render(&self, files: &JobFiles) -> Vec<String> {
        self.argv
            .iter()
            .map(|a| {
                a.replace("{shim}", &files.shim.to_string_lossy())
                    .replace("{job}", &files.job.to_string_lossy())
                    .replace("{job.json}", &files.job.to_string_lossy())
                    .replace("{code}", &files.code.to_string_lossy())
                    .replace("{dir}", &files.dir.to_string_lossy())
            })
            .collect()
    }
}

impl Default for Interpreter {
    fn default() -> Self {
        Interpreter::builtin()
    }
}

#[derive(Debug, Clone)]
pub enum GraphPayload {
    Inline(Arc<Graph>),
    EdgeFile { path: PathBuf, kind: GraphKind },
}

/// Expected answer used to grade a successful run.
#[derive(Debug, Clone)]
pub struct Oracle {
    pub task: TaskId,
    pub answer: Answer,
}

#[derive(Debug, Clone)]
pub struct ExecJob {
    pub job_id: String,
    pub code: String,
    pub graph: GraphPayload,
    pub params: Params,
    pub answer_type: AnswerType,
    pub limits: Limits,
    pub interpreter: Interpreter,
    pub oracle: Option<Oracle>,
}

impl ExecJob {
    pub fn new(job_id: impl Into<String>, code: impl Into<String>, graph: Arc<Graph>, answer_type: AnswerType) -> Self {
        ExecJob {
            job_id: job_id.into(),
            code: code.into(),
            graph: GraphPayload::Inline(graph),
            params: Params::new(),
            answer_type,
            limits: Limits::default(),
            interpreter: Interpreter::default(),
            oracle: None,
        }
    }

    /// A job for `task` that is graded against `oracle`.
    pub fn for_task(job_id: impl Into<String>, code: impl Into<String>, task: TaskId, graph: Arc<Graph>, params: Params, oracle: Answer) -> Self {
        let mut job = ExecJob::new(job_id, code, graph, task.spec().answer_type);
        job.params = params;
        job.oracle = Some(Oracle { task, answer: oracle });
        job
    }

    pub fn with_limits(mut self, limits: Limits) -> Self {
        self.limits = limits;
        self
    }

    pub fn with_interpreter(mut self, interpreter: Interpreter) -> Self {
        self.interpreter = interpreter;
        self
    }

    fn validate(&self) -> Result<(), SandboxError> {
        let l = &self.limits;
        if !(l.wall_secs > 0.0 && l.wall_secs.is_finite()) || l.memory_bytes == 0 || l.output_bytes == 0 {
            return Err(SandboxError::InvalidJob("limits must be positive".into()));
        }
        if let GraphPayload::EdgeFile { path, .. } = &self.graph {
            if !path.is_file() {
                return Err(SandboxError::InvalidJob(format!("edge file {} not found", path.display())));
            }
        }
        Ok(())
    }
}

/// Document handed to the interpreter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobDocument {
    pub job_id: String,
    pub edge_file: PathBuf,
    pub graph_kind: GraphKind,
    pub params: Params,
    pub answer_type: AnswerType,
    pub code_file: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExecStatus {
    Ok,
    CompileError,
    RuntimeError,
    Timeout,
    OutputOverflow,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExecutionVerdict {
    pub job_id: String,
    pub status: ExecStatus,
    /// Last non-empty stdout line, trimmed.
    pub stdout_answer: String,
    /// Parsed answer when the line reads as the expected type.
    pub parsed: Option<Answer>,
    /// Why the line did not parse, when it did not.
    pub malformed: Option<String>,
    pub wall_time: f64,
    pub grade: Option<bool>,
    pub exit_code: Option<i32>,
    pub stderr_tail: String,
}

impl ExecutionVerdict {
    /// Ran cleanly and was graded correct.
    pub fn is_correct(&self) -> bool {
        self.grade == Some(true)
    }
}

struct JobFiles {
    dir: PathBuf,
    job: PathBuf,
    code: PathBuf,
    shim: PathBuf,
}

fn prepare(job: &ExecJob, dir: &Path) -> Result<JobFiles, SandboxError> {
    let (edge_file, kind) = match &job.graph {
        GraphPayload::Inline(g) => {
            let path = dir.join("graph.txt");
            let mut out = std::io::BufWriter::new(std::fs::File::create(&path)?);
            write_edges(g, &mut out)?;
            out.flush()?;
            (path, g.kind())
        }
        GraphPayload::EdgeFile { path, kind } => (std::fs::canonicalize(path)?, *kind),
    };
    let files = JobFiles { dir: dir.to_path_buf(), job: dir.join("job.json"), code: dir.join("candidate"), shim: dir.join("shim.sh") };
    std::fs::write(&files.code, &job.code)?;
    let doc = JobDocument {
        job_id: job.job_id.clone(),
        edge_file,
        graph_kind: kind,
        params: job.params.clone(),
        answer_type: job.answer_type,
        code_file: files.code.clone(),
    };
    std::fs::write(&files.job, serde_json::to_string(&doc).map_err(|e| SandboxError::Internal(e.to_string()))?)?;
    if job.interpreter.uses_shim() {
        std::fs::write(&files.shim, SH_SHIM)?;
    }
    Ok(files)
}

fn kill_group(pid: u32) {
    // SAFETY: plain syscall; a stale group id yields ESRCH, which is ignored.
    unsafe {
        libc::kill(-(pid as libc::pid_t), libc::SIGKILL);
    }
}

fn last_line(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).lines().rev().map(str::trim).find(|l| !l.is_empty()).unwrap_or("").to_string()
}

fn tail(bytes: &[u8], keep: usize) -> String {
    let start = bytes.len().saturating_sub(keep);
    String::from_utf8_lossy(&bytes[start..]).into_owned()
}

/// Run one job in a fresh child process group.
pub fn execute(job: &ExecJob) -> Result<ExecutionVerdict, SandboxError> {
    job.validate()?;
    let dir = tempfile::Builder::new().prefix("graphwild-job-").tempdir()?;
    let files = prepare(job, dir.path())?;
    let argv = job.interpreter.render(&files);
    let mut cmd = Command::new(&argv[0]);
    cmd.args(&argv[1..])
        .current_dir(dir.path())
        .env_clear()
        .env("PATH", std::env::var_os("PATH").unwrap_or_else(|| "/usr/bin:/bin".into()))
        .env("HOME", dir.path())
        .env("TMPDIR", dir.path())
        .env("LC_ALL", "C")
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    let memory = job.limits.memory_bytes;
    // SAFETY: only async-signal-safe calls between fork and exec.
    unsafe {
        cmd.pre_exec(move || {
            libc::setpgid(0, 0);
            let lim = libc::rlimit { rlim_cur: memory as libc::rlim_t, rlim_max: memory as libc::rlim_t };
            libc::setrlimit(libc::RLIMIT_AS, &lim);
            Ok(())
        });
    }
    let started = Instant::now();
    let mut child = match cmd.spawn() {
        Ok(c) => c,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(SandboxError::Unavailable(format!("`{}` not found", argv[0])))
        }
        Err(e) => return Err(e.into()),
    };
    let pid = child.id();
    let overflow = Arc::new(AtomicBool::new(false));
    let cap = job.limits.output_bytes as usize;
    let mut stdout = child.stdout.take().expect("stdout is piped");
    let mut stderr = child.stderr.take().expect("stderr is piped");
    let out_reader = {
        let overflow = Arc::clone(&overflow);
        std::thread::spawn(move || {
            let mut kept = Vec::new();
            let mut total = 0usize;
            let mut buf = [0u8; 16384];
            loop {
                match stdout.read(&mut buf) {
                    Ok(0) | Err(_) => break,
                    Ok(k) => {
                        total += k;
                        if total > cap {
                            if !overflow.swap(true, Ordering::SeqCst) {
                                kill_group(pid);
                            }
                        } else {
                            kept.extend_from_slice(&buf[..k]);
                        }
                    }
                }
            }
            kept
        })
    };
    let err_reader = std::thread::spawn(move || {
        let mut kept = Vec::new();
        let mut buf = [0u8; 8192];
        while let Ok(k) = stderr.read(&mut buf) {
            if k == 0 {
                break;
            }
            kept.extend_from_slice(&buf[..k]);
            if kept.len() > 4 * STDERR_KEEP {
                kept.drain(..kept.len() - STDERR_KEEP);
            }
        }
        kept
    });
    let limit = Duration::from_secs_f64(job.limits.wall_secs);
    let mut timed_out = false;
    let mut nap = Duration::from_micros(500);
    let status = loop {
        if let Some(status) = child.try_wait()? {
            break status;
        }
        if started.elapsed() >= limit {
            timed_out = true;
            kill_group(pid);
            break child.wait()?;
        }
        std::thread::sleep(nap.min(limit.saturating_sub(started.elapsed())));
        nap = (nap * 2).min(Duration::from_millis(10));
    };
    // Reap anything the candidate left running in its group.
    kill_group(pid);
    let out = out_reader.join().map_err(|_| SandboxError::Internal("stdout reader panicked".into()))?;
    let err = err_reader.join().map_err(|_| SandboxError::Internal("stderr reader panicked".into()))?;
    let wall_time = started.elapsed().as_secs_f64();
    let exit_code = status.code();
    let status = if timed_out {
        ExecStatus::Timeout
    } else if overflow.load(Ordering::SeqCst) {
        ExecStatus::OutputOverflow
    } else {
        match exit_code {
            Some(0) => ExecStatus::Ok,
            Some(exit::COMPILE_ERROR) => ExecStatus::CompileError,
            _ => ExecStatus::RuntimeError,
        }
    };
    let stdout_answer = last_line(&out);
    let (parsed, malformed) = if status == ExecStatus::Ok {
        match Answer::parse(&stdout_answer, job.answer_type) {
            Ok(a) => (Some(a), None),
            Err(e) => (None, Some(e.reason)),
        }
    } else {
        (None, None)
    };
    let grade = match (&parsed, &job.oracle) {
        (Some(candidate), Some(oracle)) => Some(grade_payload(job, oracle, candidate)?),
        _ => None,
    };
    Ok(ExecutionVerdict {
        job_id: job.job_id.clone(),
        status,
        stdout_answer,
        parsed,
        malformed,
        wall_time,
        grade,
        exit_code,
        stderr_tail: tail(&err, STDERR_KEEP),
    })
}

fn grade_payload(job: &ExecJob, oracle: &Oracle, candidate: &Answer) -> Result<bool, SandboxError> {
    let parsed;
    let g = match &job.graph {
        GraphPayload::Inline(g) => g.as_ref(),
        GraphPayload::EdgeFile { path, .. } => {
            parsed = parse_edge_file(path).map_err(|e| SandboxError::InvalidJob(e.to_string()))?;
            &parsed
        }
    };
    Ok(grade_against(oracle.task, g, &job.params, candidate, &oracle.answer))
}

/// Run `jobs` on at most `pool_size` concurrent children; results keep the
/// input order.
pub fn execute_batch(jobs: &[ExecJob], pool_size: usize) -> Vec<Result<ExecutionVerdict, SandboxError>> {
    crate::pool::parallel_map(jobs, pool_size, |_, job| execute(job))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3() -> Arc<Graph> {
        Arc::new(Graph::undirected(3, &[(0, 1), (1, 2)]).unwrap())
    }

    #[test]
    fn node_count_from_shim() {
        let v = execute(&ExecJob::new("n", "answer=$N", p3(), AnswerType::Number)).unwrap();
        assert_eq!(v.status, ExecStatus::Ok, "{v:?}");
        assert_eq!(v.parsed, Some(Answer::Number(3.0)));
        assert_eq!(v.grade, None);
    }

    #[test]
    fn statuses_map_from_exit_codes() {
        let run = |code: &str| execute(&ExecJob::new("s", code, p3(), AnswerType::Number)).unwrap();
        assert_eq!(run("if then").status, ExecStatus::CompileError);
        assert_eq!(run("x=$((1/0))").status, ExecStatus::RuntimeError);
        let unset = run("y=1");
        assert_eq!(unset.status, ExecStatus::RuntimeError);
        assert_eq!(unset.exit_code, Some(exit::ANSWER_UNSET));
        let bad = run("answer=banana");
        assert_eq!(bad.status, ExecStatus::Ok);
        assert!(bad.parsed.is_none() && bad.malformed.is_some());
    }

    #[test]
    fn graded_job() {
        let g = p3();
        let params = Params::from([("u".into(), 0), ("v".into(), 2)]);
        let code = "answer=true";
        let job = ExecJob::for_task("c", code, TaskId::Connectivity, g, params, Answer::Bool(true));
        assert_eq!(execute(&job).unwrap().grade, Some(true));
    }

    #[test]
    fn missing_interpreter_is_unavailable() {
        let job = ExecJob::new("m", "answer=1", p3(), AnswerType::Number)
            .with_interpreter(Interpreter::parse("/nonexistent/interp {job}").unwrap());
        assert!(matches!(execute(&job), Err(SandboxError::Unavailable(_))));
    }

    #[test]
    fn job_document_fields() {
        let dir = tempfile::tempdir().unwrap();
        let job = ExecJob::new("doc", "answer=1", p3(), AnswerType::Boolean);
        let files = prepare(&job, dir.path()).unwrap();
        let doc: JobDocument = serde_json::from_str(&std::fs::read_to_string(files.job).unwrap()).unwrap();
        assert_eq!(doc.job_id, "doc");
        assert_eq!(doc.graph_kind, GraphKind::Undirected);
        assert!(doc.edge_file.is_file() && doc.code_file.is_file());
    }
}
