//! Query answering: route by domain, optionally retrieve, generate code,
//! execute and grade. Also batch evaluation over fresh instances.

pub mod client;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::forge::{classify, full_catalog, make_record, sample_graph, AlgorithmDoc, ProblemRecord, RejectReason, TaskConfig};
use crate::graph::Graph;
use crate::library::{classify_domain, match_task, retrieve, Domain, EmbeddingProvider, InDomainList, Index, LibraryError, RetrievalHit};
use crate::manifest::digest_of;
use crate::pool::parallel_map;
use crate::prompt::{assemble, extract_code, GraphText, PromptDoc};
use crate::rng;
use crate::sandbox::{execute, ExecJob, ExecutionVerdict, GraphPayload, Interpreter, Limits, Oracle, SandboxError};
use crate::tasks::{Answer, Params, TaskId};

pub use client::{ChatMessage, ChatRequest, ClientError, EndpointConfig, GenerationClient, GenerationContext, HttpClient, StubClient, StubPolicy};

#[derive(Debug, Error)]
pub enum InferError {
    #[error(transparent)]
    Generator(#[from] ClientError),
    #[error("retrieval requested but no index is loaded")]
    NoIndex,
    #[error("cannot tell which task the query asks for; name it explicitly")]
    UnknownTask,
    #[error("could not synthesize an instance of {0}")]
    NoInstance(TaskId),
    #[error(transparent)]
    Library(#[from] LibraryError),
    #[error(transparent)]
    Sandbox(#[from] SandboxError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "mode", content = "k", rename_all = "kebab-case")]
pub enum Mode {
    /// Direct for in-domain queries, retrieval otherwise.
    #[default]
    Auto,
    Direct,
    Rag(usize),
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(Mode::Auto),
            "direct" => Ok(Mode::Direct),
            _ => {
                let k = s
                    .strip_prefix("rag")
                    .map(|r| r.trim_start_matches(['(', ':', '=']).trim_end_matches(')'))
                    .ok_or_else(|| format!("unknown mode `{s}`; expected auto, direct or rag:<k>"))?;
                let k = if k.is_empty() { 1 } else { k.parse().map_err(|_| format!("bad k in `{s}`"))? };
                if k == 0 {
                    return Err("rag k must be at least 1".into());
                }
                Ok(Mode::Rag(k))
            }
        }
    }
}

/// Index and embedding used for retrieval.
#[derive(Clone, Copy)]
pub struct Retriever<'a> {
    pub index: &'a Index,
    pub provider: &'a dyn EmbeddingProvider,
}

#[derive(Debug, Clone)]
pub struct InferOptions {
    pub mode: Mode,
    /// Documents retrieved when `Auto` routes out of domain.
    pub auto_k: usize,
    pub in_domain: InDomainList,
    pub model: String,
    pub temperature: f64,
    pub max_tokens: u32,
    pub limits: Limits,
    pub interpreter: Interpreter,
}

impl Default for InferOptions {
    fn default() -> Self {
        InferOptions {
            mode: Mode::Auto,
            auto_k: 1,
            in_domain: InDomainList::default(),
            model: "default".into(),
            temperature: 0.0,
            max_tokens: 2048,
            limits: Limits::default(),
            interpreter: Interpreter::builtin(),
        }
    }
}

/// One question about one graph.
#[derive(Debug, Clone)]
pub struct Query {
    pub text: String,
    /// What the prompt shows of the graph.
    pub graph_text: GraphText,
    /// What the program reads.
    pub graph: GraphPayload,
    /// Task whose answer shape applies; guessed from the text when absent.
    pub task: Option<TaskId>,
    pub params: Params,
    pub oracle: Option<Answer>,
}

impl Query {
    /// A query for a synthesized record, graded against its oracle.
    pub fn from_record(r: &ProblemRecord, graph: Arc<Graph>) -> Self {
        Query {
            text: r.question.clone(),
            graph_text: GraphText::from_rendering(&r.rendering),
            graph: GraphPayload::Inline(graph),
            task: Some(r.task_id),
            params: r.params.clone(),
            oracle: Some(r.oracle_answer.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "route", rename_all = "snake_case")]
pub enum Route {
    Direct,
    Rag { hits: Vec<RetrievalHit> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InferOutcome {
    pub task: TaskId,
    pub route: Route,
    pub prompt: String,
    pub code: String,
    pub verdict: ExecutionVerdict,
}

/// Answer `query` with one generation.
pub fn infer(query: &Query, client: &dyn GenerationClient, retriever: Option<Retriever<'_>>, opts: &InferOptions, ctx: GenerationContext) -> Result<InferOutcome, InferError> {
    let task = query.task.or_else(|| match_task(&query.text)).ok_or(InferError::UnknownTask)?;
    let k = match opts.mode {
        Mode::Direct => None,
        Mode::Rag(k) => Some(k),
        Mode::Auto => match classify_domain(&query.text, &opts.in_domain) {
            Domain::InDomain(_) => None,
            Domain::OutOfDomain => Some(opts.auto_k.max(1)),
        },
    };
    let route = match k {
        None => Route::Direct,
        Some(k) => {
            let r = retriever.ok_or(InferError::NoIndex)?;
            Route::Rag { hits: retrieve(r.index, r.provider, &query.text, k, None)? }
        }
    };
    let docs: Vec<PromptDoc> = match &route {
        Route::Direct => vec![],
        Route::Rag { hits } => hits.iter().map(|h| PromptDoc { task_name: h.task_name.clone(), text: h.text.clone() }).collect(),
    };
    let prompt = assemble(&query.text, &query.graph_text, &docs).text;
    let request = ChatRequest {
        model: opts.model.clone(),
        messages: vec![ChatMessage::user(prompt.clone())],
        temperature: opts.temperature,
        max_tokens: opts.max_tokens,
    };
    let ctx = GenerationContext { task: Some(task), ..ctx };
    let code = extract_code(&client.generate(&request, &ctx)?);
    let job = ExecJob {
        job_id: format!("{task}-{}-{}", ctx.instance, ctx.sample),
        code: code.clone(),
        graph: query.graph.clone(),
        params: query.params.clone(),
        answer_type: task.spec().answer_type,
        limits: opts.limits,
        interpreter: opts.interpreter.clone(),
        oracle: query.oracle.clone().map(|answer| Oracle { task, answer }),
    };
    let verdict = execute(&job)?;
    Ok(InferOutcome { task, route, prompt, code, verdict })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub tasks: Vec<TaskId>,
    /// Instances per task.
    pub n: usize,
    pub repeats: usize,
    pub seed: u64,
    pub mode: Mode,
    pub jobs: usize,
}

impl EvalConfig {
    pub fn new(tasks: &[TaskId], n: usize, repeats: usize, seed: u64) -> Self {
        EvalConfig { tasks: tasks.to_vec(), n, repeats, seed, mode: Mode::Auto, jobs: 4 }
    }
}

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TaskReport {
    pub task_id: String,
    pub attempts: usize,
    pub ok_executions: usize,
    pub graded_correct: usize,
    pub accuracy: f64,
    pub per_repeat_accuracy: Vec<f64>,
    pub rejections: BTreeMap<RejectReason, usize>,
    pub rag_routed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub schema_version: u32,
    pub client: String,
    pub config_digest: String,
    pub seed: u64,
    pub mode: Mode,
    pub repeats: usize,
    pub wall_time_secs: f64,
    pub tasks: Vec<TaskReport>,
    pub overall_accuracy: f64,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// One row per task with its accuracy, plus the average.
    pub fn to_table(&self) -> String {
        let width = self.tasks.iter().map(|t| t.task_id.len()).max().unwrap_or(4).max(7);
        let mut s = String::new();
        let _ = writeln!(s, "{:<width$}  {:>8}  {:>6}  {:>7}  {:>8}", "task", "attempts", "ok", "correct", "accuracy");
        for t in &self.tasks {
            let _ = writeln!(s, "{:<width$}  {:>8}  {:>6}  {:>7}  {:>7.1}%", t.task_id, t.attempts, t.ok_executions, t.graded_correct, 100.0 * t.accuracy);
        }
        let _ = writeln!(s, "{:<width$}  {:>8}  {:>6}  {:>7}  {:>7.1}%", "average", "", "", "", 100.0 * self.overall_accuracy);
        s
    }
}

/// The `i`-th evaluation instance of `task`: a verified-shape record built
/// the same way as the dataset, retried on a new seed when the oracle
/// refuses the graph.
pub fn eval_instance(task: TaskId, doc: &AlgorithmDoc, i: usize, seed: u64) -> Result<(ProblemRecord, Arc<Graph>), InferError> {
    let tcfg = TaskConfig::new(1);
    for attempt in 0..64u64 {
        let s = rng::derive_named(seed, &format!("eval/{task}"), &[i as u64, attempt]);
        let Ok(sample) = sample_graph(task, &doc.graph_types, &tcfg, &crate::forge::config::default_formats(), s) else { continue };
        if let Some(r) = make_record(&sample, doc) {
            return Ok((r, sample.graph));
        }
    }
    Err(InferError::NoInstance(task))
}

/// Run `cfg.n` instances per task `cfg.repeats` times.
pub fn evaluate(cfg: &EvalConfig, client: &dyn GenerationClient, retriever: Option<Retriever<'_>>, opts: &InferOptions) -> Result<EvalReport, InferError> {
    let start = Instant::now();
    let opts = &InferOptions { mode: cfg.mode, ..opts.clone() };
    let catalog = full_catalog();
    let mut instances = Vec::new();
    for &task in &cfg.tasks {
        let doc = catalog.iter().find(|d| d.task_id == task).ok_or(InferError::NoInstance(task))?;
        for i in 0..cfg.n {
            let (record, graph) = eval_instance(task, doc, i, cfg.seed)?;
            instances.push((task, i, Query::from_record(&record, graph)));
        }
    }
    let runs: Vec<(usize, usize)> = (0..instances.len()).flat_map(|i| (0..cfg.repeats).map(move |r| (i, r))).collect();
    let outcomes = parallel_map(&runs, cfg.jobs, |_, &(i, r)| {
        let (_, idx, q) = &instances[i];
        infer(q, client, retriever, opts, GenerationContext { task: None, instance: *idx as u64, sample: r as u64 })
    });
    let mut per: BTreeMap<TaskId, (TaskReport, Vec<usize>)> = BTreeMap::new();
    for (&(i, r), outcome) in runs.iter().zip(outcomes) {
        let o = outcome?;
        let (rep, per_repeat) = per.entry(instances[i].0).or_insert_with(|| (TaskReport::default(), vec![0; cfg.repeats]));
        rep.attempts += 1;
        if o.verdict.status == crate::sandbox::ExecStatus::Ok {
            rep.ok_executions += 1;
        }
        if matches!(o.route, Route::Rag { .. }) {
            rep.rag_routed += 1;
        }
        match classify(&o.verdict) {
            None => {
                rep.graded_correct += 1;
                per_repeat[r] += 1;
            }
            Some((reason, _)) => *rep.rejections.entry(reason).or_default() += 1,
        }
    }
    let tasks: Vec<TaskReport> = cfg
        .tasks
        .iter()
        .filter_map(|t| per.remove(t).map(|(rep, pr)| (t, rep, pr)))
        .map(|(t, mut rep, pr)| {
            rep.task_id = t.to_string();
            rep.accuracy = ratio(rep.graded_correct, rep.attempts);
            rep.per_repeat_accuracy = pr.iter().map(|&c| ratio(c, cfg.n)).collect();
            rep
        })
        .collect();
    let overall_accuracy = if tasks.is_empty() { 0.0 } else { tasks.iter().map(|t| t.accuracy).sum::<f64>() / tasks.len() as f64 };
    Ok(EvalReport {
        schema_version: REPORT_SCHEMA_VERSION,
        client: client.name(),
        config_digest: digest_of(cfg),
        seed: cfg.seed,
        mode: cfg.mode,
        repeats: cfg.repeats,
        wall_time_secs: start.elapsed().as_secs_f64(),
        tasks,
        overall_accuracy,
    })
}
