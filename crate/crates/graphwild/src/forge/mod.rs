//! Dataset construction: join graphs with algorithm documents, clean by
//! execution, augment the catalog, balance task shares and export.

pub mod catalog;
pub mod config;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::codec::{self, CodecError, RenderFormat, Rendering};
use crate::graph::{generate_er, generate_er_dag, ErConfig, Graph, GraphError, GraphKind};
use crate::manifest::{digest_of, Manifest};
use crate::prompt::{self, GraphText};
use crate::rng;
use crate::sandbox::{execute_batch, ExecJob, ExecStatus, ExecutionVerdict, Interpreter, Limits, SandboxError};
use crate::tasks::{solve, Answer, ParamKind, Params, TaskError, TaskId};

pub use catalog::{builtin_catalog, expert_docs, full_catalog, AlgorithmDoc, DocParam, DocSource};
pub use config::{ForgeConfig, JoinPolicy, TaskConfig};

#[derive(Debug, Error)]
pub enum ForgeError {
    #[error("no document covers task {task} on the requested graph kinds")]
    EmptyJoin { task: String },
    #[error("sandbox unavailable: {0}")]
    SandboxUnavailable(String),
    #[error("schema violation: {0}")]
    SchemaViolation(String),
    #[error("duplicate document: {0}")]
    DuplicateDoc(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Task(#[from] TaskError),
    #[error(transparent)]
    Sandbox(SandboxError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl From<SandboxError> for ForgeError {
    fn from(e: SandboxError) -> Self {
        match e {
            SandboxError::Unavailable(m) => ForgeError::SandboxUnavailable(m),
            other => ForgeError::Sandbox(other),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    CompileError,
    RuntimeError,
    Timeout,
    WrongAnswer,
    MalformedOutput,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RecordStatus {
    Raw,
    Verified,
    Rejected { reason: RejectReason, detail: String },
}

/// How a graph was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphOrigin {
    pub seed: u64,
    pub n: usize,
    pub p: f64,
    pub kind: GraphKind,
    pub acyclic: bool,
}

/// A generated graph with its rendering.
#[derive(Debug, Clone)]
pub struct GraphSample {
    pub graph: Arc<Graph>,
    pub rendering: Rendering,
    pub origin: GraphOrigin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub graph: GraphOrigin,
    pub doc_id: String,
    pub param_seed: u64,
    pub format: RenderFormat,
    /// How the graph is recovered from the text.
    pub extraction: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRecord")]
pub struct ProblemRecord {
    pub record_id: String,
    pub task_id: TaskId,
    pub rendering: Rendering,
    pub params: Params,
    pub question: String,
    pub prompt_text: String,
    pub solution_code: String,
    pub oracle_answer: Answer,
    pub provenance: Provenance,
    #[serde(flatten)]
    pub status: RecordStatus,
}

#[derive(Deserialize)]
struct RawRecord {
    record_id: String,
    task_id: TaskId,
    rendering: Rendering,
    params: Params,
    question: String,
    prompt_text: String,
    solution_code: String,
    oracle_answer: Value,
    provenance: Provenance,
    #[serde(flatten)]
    status: RecordStatus,
}

impl TryFrom<RawRecord> for ProblemRecord {
    type Error = String;

    fn try_from(r: RawRecord) -> Result<Self, Self::Error> {
        let oracle_answer = Answer::from_json(&r.oracle_answer, r.task_id.spec().answer_type)?;
        Ok(ProblemRecord {
            record_id: r.record_id,
            task_id: r.task_id,
            rendering: r.rendering,
            params: r.params,
            question: r.question,
            prompt_text: r.prompt_text,
            solution_code: r.solution_code,
            oracle_answer,
            provenance: r.provenance,
            status: r.status,
        })
    }
}

impl ProblemRecord {
    pub fn is_verified(&self) -> bool {
        self.status == RecordStatus::Verified
    }

    /// Recover the graph from the rendering text.
    pub fn graph(&self) -> Result<Graph, CodecError> {
        codec::parse(&self.rendering)
    }
}

/// Identifier determined by the graph seed, document and parameter seed.
pub fn record_id(task: TaskId, graph_seed: u64, doc_id: &str, param_seed: u64) -> String {
    format!("{task}-{:016x}", rng::derive(graph_seed, &[rng::fnv1a(doc_id.as_bytes()), param_seed]))
}

/// Substitute `{name}` placeholders, showing entity names when the
/// rendering uses them.
pub fn fill_question(template: &str, params: &Params, name_map: Option<&[String]>) -> String {
    let mut out = template.to_string();
    for (name, &value) in params {
        let shown = match name_map {
            Some(names) if name != "k" => names.get(value as usize).cloned().unwrap_or_else(|| value.to_string()),
            _ => value.to_string(),
        };
        out = out.replace(&format!("{{{name}}}"), &shown);
    }
    out
}

fn sample_params(doc: &AlgorithmDoc, n: usize, seed: u64) -> Option<Params> {
    let mut r = rng::seeded(seed);
    let node_params: Vec<&DocParam> = doc.parameters.iter().filter(|p| p.kind == ParamKind::Node).collect();
    if node_params.len() > n {
        return None;
    }
    let mut nodes: Vec<usize> = (0..n).collect();
    nodes.shuffle(&mut r);
    let mut params = Params::new();
    let mut next_node = nodes.into_iter();
    for p in &doc.parameters {
        let value = match p.kind {
            ParamKind::Node => next_node.next()? as u64,
            ParamKind::Int { min, max } => r.random_range(min..=max),
        };
        params.insert(p.name.clone(), value);
    }
    Some(params)
}

/// One raw record for `sample` under `doc`. `None` when the document does
/// not fit the graph or the oracle refuses the instance.
pub fn make_record(sample: &GraphSample, doc: &AlgorithmDoc) -> Option<ProblemRecord> {
    let g = &sample.graph;
    if !doc.graph_types.contains(&g.kind()) {
        return None;
    }
    let param_seed = rng::derive(sample.origin.seed, &[rng::fnv1a(doc.doc_id.as_bytes()), 0x9a7a]);
    let params = sample_params(doc, g.node_count(), param_seed)?;
    let oracle_answer = solve(doc.task_id, g, &params).ok()?;
    let question = fill_question(&doc.problem_text_template, &params, sample.rendering.name_map.as_deref());
    let prompt_text = prompt::assemble(&question, &GraphText::from_rendering(&sample.rendering), &[]).text;
    let extraction = match sample.rendering.format {
        RenderFormat::ScenarioTemplate(..) => "scenario template inversion",
        _ => "format grammar",
    };
    Some(ProblemRecord {
        record_id: record_id(doc.task_id, sample.origin.seed, &doc.doc_id, param_seed),
        task_id: doc.task_id,
        rendering: sample.rendering.clone(),
        params,
        question,
        prompt_text,
        solution_code: doc.solution_code.clone(),
        oracle_answer,
        provenance: Provenance {
            graph: sample.origin.clone(),
            doc_id: doc.doc_id.clone(),
            param_seed,
            format: sample.rendering.format,
            extraction: extraction.to_string(),
        },
        status: RecordStatus::Raw,
    })
}

/// Pair graphs with documents that accept their kind.
pub fn join(graphs: &[GraphSample], docs: &[AlgorithmDoc], policy: JoinPolicy, seed: u64) -> Vec<ProblemRecord> {
    let mut load: BTreeMap<&str, usize> = docs.iter().map(|d| (d.doc_id.as_str(), 0)).collect();
    let mut out = Vec::new();
    for (i, sample) in graphs.iter().enumerate() {
        let compatible: Vec<&AlgorithmDoc> = docs.iter().filter(|d| d.graph_types.contains(&sample.graph.kind())).collect();
        match policy {
            JoinPolicy::All => out.extend(compatible.iter().filter_map(|d| make_record(sample, d))),
            JoinPolicy::Balanced => {
                let Some(least) = compatible.iter().map(|d| load[d.doc_id.as_str()]).min() else { continue };
                let tied: Vec<&&AlgorithmDoc> = compatible.iter().filter(|d| load[d.doc_id.as_str()] == least).collect();
                let mut r = rng::seeded(rng::derive(seed, &[i as u64]));
                let doc = tied.choose(&mut r).expect("at least one compatible doc");
                *load.get_mut(doc.doc_id.as_str()).expect("doc registered") += 1;
                out.extend(make_record(sample, doc));
            }
        }
    }
    out
}

/// Options for executing solution code.
#[derive(Debug, Clone)]
pub struct CleanOptions {
    pub limits: Limits,
    pub interpreter: Interpreter,
    pub jobs: usize,
}

impl Default for CleanOptions {
    fn default() -> Self {
        CleanOptions { limits: Limits::default(), interpreter: Interpreter::builtin(), jobs: 4 }
    }
}

/// Rejection reason for a verdict, `None` when verified.
pub fn classify(v: &ExecutionVerdict) -> Option<(RejectReason, String)> {
    match v.status {
        ExecStatus::CompileError => Some((RejectReason::CompileError, "code does not parse".into())),
        ExecStatus::RuntimeError => {
            Some((RejectReason::RuntimeError, format!("exit status {}", v.exit_code.map_or("signal".into(), |c| c.to_string()))))
        }
        ExecStatus::Timeout => Some((RejectReason::Timeout, "wall-time limit reached".into())),
        ExecStatus::OutputOverflow => Some((RejectReason::MalformedOutput, "output limit exceeded".into())),
        ExecStatus::Ok => match (&v.parsed, v.grade) {
            (None, _) => Some((RejectReason::MalformedOutput, v.malformed.clone().unwrap_or_default())),
            (Some(_), Some(true)) => None,
            (Some(_), _) => Some((RejectReason::WrongAnswer, "answer disagrees with the oracle".into())),
        },
    }
}

/// Execute every record's solution and mark it verified or rejected.
pub fn clean(records: Vec<ProblemRecord>, opts: &CleanOptions) -> Result<Vec<ProblemRecord>, ForgeError> {
    let mut jobs = Vec::with_capacity(records.len());
    for r in &records {
        let g = Arc::new(r.graph()?);
        jobs.push(
            ExecJob::for_task(r.record_id.clone(), r.solution_code.clone(), r.task_id, g, r.params.clone(), r.oracle_answer.clone())
                .with_limits(opts.limits)
                .with_interpreter(opts.interpreter.clone()),
        );
    }
    let verdicts = execute_batch(&jobs, opts.jobs);
    let mut out = Vec::with_capacity(records.len());
    for (mut r, v) in records.into_iter().zip(verdicts) {
        let v = v?;
        r.status = match classify(&v) {
            None => RecordStatus::Verified,
            Some((reason, detail)) => RecordStatus::Rejected { reason, detail },
        };
        out.push(r);
    }
    Ok(out)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanReport {
    pub input: usize,
    pub verified: usize,
    pub rejected: BTreeMap<RejectReason, usize>,
}

impl CleanReport {
    pub fn of(records: &[ProblemRecord]) -> Self {
        let mut rep = CleanReport { input: records.len(), ..Default::default() };
        for r in records {
            match &r.status {
                RecordStatus::Verified => rep.verified += 1,
                RecordStatus::Rejected { reason, .. } => *rep.rejected.entry(*reason).or_default() += 1,
                RecordStatus::Raw => {}
            }
        }
        rep
    }
}

const REQUIRED_DOC_KEYS: [&str; 7] =
    ["doc_id", "task_id", "graph_types", "problem_text_template", "parameters", "solution_code", "source"];

/// Read a JSON array of documents, reporting missing fields by name.
pub fn load_docs(json: &str) -> Result<Vec<AlgorithmDoc>, ForgeError> {
    let value: Value = serde_json::from_str(json).map_err(|e| ForgeError::SchemaViolation(e.to_string()))?;
    let items = value.as_array().ok_or_else(|| ForgeError::SchemaViolation("catalog must be a JSON array".into()))?;
    items
        .iter()
        .enumerate()
        .map(|(i, item)| {
            let obj = item.as_object().ok_or_else(|| ForgeError::SchemaViolation(format!("entry {i} is not an object")))?;
            if let Some(key) = REQUIRED_DOC_KEYS.iter().find(|k| !obj.contains_key(**k)) {
                return Err(ForgeError::SchemaViolation(format!("entry {i} lacks `{key}`")));
            }
            serde_json::from_value(item.clone()).map_err(|e| ForgeError::SchemaViolation(format!("entry {i}: {e}")))
        })
        .collect()
}

/// Check a document against the task registry and its own parameter list.
pub fn validate_doc(doc: &AlgorithmDoc) -> Result<(), ForgeError> {
    let bad = |m: String| Err(ForgeError::SchemaViolation(format!("{}: {m}", doc.doc_id)));
    if doc.doc_id.trim().is_empty() {
        return bad("empty doc_id".into());
    }
    if doc.graph_types.is_empty() {
        return bad("graph_types is empty".into());
    }
    let spec = doc.task_id.spec();
    if let Some(k) = doc.graph_types.iter().find(|k| !spec.accepts(**k)) {
        return bad(format!("task {} does not accept {k} graphs", doc.task_id));
    }
    let declared: BTreeSet<&str> = doc.parameters.iter().map(|p| p.name.as_str()).collect();
    let expected: BTreeSet<&str> = spec.params.iter().map(|p| p.name).collect();
    if declared != expected {
        return bad(format!("parameters {declared:?} do not match the task schema {expected:?}"));
    }
    let re = regex::Regex::new(r"PARAM_([A-Za-z0-9_]+)").expect("valid pattern");
    for cap in re.captures_iter(&doc.solution_code) {
        if !declared.contains(&cap[1]) {
            return bad(format!("code references undeclared parameter `{}`", &cap[1]));
        }
    }
    for name in placeholder_names(&doc.problem_text_template) {
        if !declared.contains(name.as_str()) {
            return bad(format!("problem text references undeclared parameter `{name}`"));
        }
    }
    Ok(())
}

fn placeholder_names(template: &str) -> Vec<String> {
    let re = regex::Regex::new(r"\{([A-Za-z_][A-Za-z0-9_]*)\}").expect("valid pattern");
    re.captures_iter(template).map(|c| c[1].to_string()).collect()
}

fn doc_key(doc: &AlgorithmDoc) -> (TaskId, BTreeSet<GraphKind>) {
    (doc.task_id, doc.graph_types.iter().copied().collect())
}

/// Merge validated expert documents into `catalog`.
pub fn augment(catalog: &[AlgorithmDoc], expert: &[AlgorithmDoc]) -> Result<Vec<AlgorithmDoc>, ForgeError> {
    let mut out = catalog.to_vec();
    let mut keys: HashSet<_> = catalog.iter().map(doc_key).collect();
    let mut ids: HashSet<String> = catalog.iter().map(|d| d.doc_id.clone()).collect();
    for doc in expert {
        validate_doc(doc)?;
        if !ids.insert(doc.doc_id.clone()) {
            return Err(ForgeError::DuplicateDoc(format!("doc_id {}", doc.doc_id)));
        }
        if !keys.insert(doc_key(doc)) {
            return Err(ForgeError::DuplicateDoc(format!("{} already covers task {} on the same graph types", doc.doc_id, doc.task_id)));
        }
        out.push(doc.clone());
    }
    Ok(out)
}

/// Cap each task's share of verified records at `cap` by seeded
/// downsampling. Other records pass through. A task with verified records
/// keeps at least one; when the cap cannot be met the tasks are equalized.
pub fn balance(records: Vec<ProblemRecord>, cap: f64, seed: u64) -> Vec<ProblemRecord> {
    let mut by_task: BTreeMap<TaskId, Vec<usize>> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        if r.is_verified() {
            by_task.entry(r.task_id).or_default().push(i);
        }
    }
    if by_task.is_empty() {
        return records;
    }
    let counts: Vec<usize> = by_task.values().map(Vec::len).collect();
    let fits = |m: usize| {
        let kept: Vec<usize> = counts.iter().map(|&c| c.min(m)).collect();
        let total: usize = kept.iter().sum();
        *kept.iter().max().expect("non-empty") as f64 <= cap * total as f64 + 1e-9
    };
    let max = *counts.iter().max().expect("non-empty");
    let limit = (1..=max).rev().find(|&m| fits(m)).unwrap_or_else(|| *counts.iter().min().expect("non-empty"));
    let mut drop = HashSet::new();
    for (task, idx) in &by_task {
        if idx.len() > limit {
            let mut shuffled = idx.clone();
            shuffled.shuffle(&mut rng::seeded(rng::derive_named(seed, task.name(), &[])));
            drop.extend(shuffled.into_iter().skip(limit));
        }
    }
    records.into_iter().enumerate().filter(|(i, _)| !drop.contains(i)).map(|(_, r)| r).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct SftMetadata<'a> {
    record_id: &'a str,
    doc_id: &'a str,
    format: RenderFormat,
    graph_hash: String,
    graph_seed: u64,
    param_seed: u64,
    params: &'a Params,
    oracle_answer: &'a Answer,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct SftLine<'a> {
    prompt: &'a str,
    completion: &'a str,
    task_id: TaskId,
    metadata: SftMetadata<'a>,
}

/// JSON lines, one per verified record, ordered by record id.
pub fn write_sft(records: &[ProblemRecord], out: &mut impl Write) -> Result<usize, ForgeError> {
    let mut verified: Vec<&ProblemRecord> = records.iter().filter(|r| r.is_verified()).collect();
    verified.sort_by(|a, b| a.record_id.cmp(&b.record_id));
    for r in &verified {
        let line = SftLine {
            prompt: &r.prompt_text,
            completion: &r.solution_code,
            task_id: r.task_id,
            metadata: SftMetadata {
                record_id: &r.record_id,
                doc_id: &r.provenance.doc_id,
                format: r.rendering.format,
                graph_hash: r.rendering.graph_hash.to_string(),
                graph_seed: r.provenance.graph.seed,
                param_seed: r.provenance.param_seed,
                params: &r.params,
                oracle_answer: &r.oracle_answer,
            },
        };
        serde_json::to_writer(&mut *out, &line)?;
        out.write_all(b"\n")?;
    }
    Ok(verified.len())
}

pub fn export_sft(records: &[ProblemRecord], path: impl AsRef<Path>) -> Result<usize, ForgeError> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    let n = write_sft(records, &mut out)?;
    out.flush()?;
    Ok(n)
}

/// All records (any status) as JSON lines in record-id order.
pub fn write_records(records: &[ProblemRecord], path: impl AsRef<Path>) -> Result<(), ForgeError> {
    let mut sorted: Vec<&ProblemRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.record_id.cmp(&b.record_id));
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    for r in sorted {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_records(path: impl AsRef<Path>) -> Result<Vec<ProblemRecord>, ForgeError> {
    let text = std::fs::read_to_string(path)?;
    text.lines().filter(|l| !l.trim().is_empty()).map(|l| Ok(serde_json::from_str(l)?)).collect()
}

fn formats_for(kind: GraphKind) -> BTreeMap<&'static str, Vec<RenderFormat>> {
    let mut classes: BTreeMap<&'static str, Vec<RenderFormat>> = BTreeMap::new();
    for f in RenderFormat::all().into_iter().filter(|f| f.supports(kind)) {
        let class = match f {
            RenderFormat::EdgeList => "edge-list",
            RenderFormat::AdjacencyList => "adjacency-list",
            RenderFormat::AdjacencyMatrix => "adjacency-matrix",
            RenderFormat::NlTemplate(_) => "nl",
            RenderFormat::ScenarioTemplate(..) => "scenario",
        };
        classes.entry(class).or_default().push(f);
    }
    classes
}

/// Pick a format by class weight, then uniformly within the class.
pub fn choose_format(kind: GraphKind, weights: &BTreeMap<String, f64>, r: &mut impl Rng) -> RenderFormat {
    let classes = formats_for(kind);
    let usable: Vec<(&str, f64)> =
        classes.keys().map(|c| (*c, weights.get(*c).copied().unwrap_or(0.0))).filter(|(_, w)| *w > 0.0).collect();
    let total: f64 = usable.iter().map(|(_, w)| w).sum();
    let class = if total <= 0.0 {
        "edge-list"
    } else {
        let mut x = r.random::<f64>() * total;
        usable.iter().find(|(_, w)| {
            x -= w;
            x < 0.0
        }).map_or(usable[usable.len() - 1].0, |(c, _)| *c)
    };
    *classes[class].choose(r).expect("class has formats")
}

/// Generate and render one graph for `task` from `seed`.
pub fn sample_graph(task: TaskId, kinds: &[GraphKind], tcfg: &TaskConfig, formats: &BTreeMap<String, f64>, seed: u64) -> Result<GraphSample, ForgeError> {
    let mut r = rng::seeded(seed);
    let kind = *kinds.choose(&mut r).ok_or_else(|| ForgeError::EmptyJoin { task: task.to_string() })?;
    let (lo, hi) = tcfg.node_range(task);
    let n = r.random_range(lo..=hi);
    let (plo, phi) = tcfg.p_range();
    let p = if phi > plo { r.random_range(plo..=phi) } else { plo };
    let (wlo, whi) = tcfg.weight_range();
    let er = ErConfig::new(n, p, kind, rng::derive(seed, &[1]))?.with_weight_range(wlo, whi)?;
    let acyclic = task == TaskId::TopologicalSort && r.random_bool(0.5);
    let mut graph = if acyclic { generate_er_dag(&er)? } else { generate_er(&er) };
    if task == TaskId::MinEdgeCover {
        graph = graph.attach_isolated(rng::derive(seed, &[2]), (wlo, whi));
    }
    let format = choose_format(kind, formats, &mut r);
    let rendering = codec::render(&graph, format, rng::derive(seed, &[3]))?;
    Ok(GraphSample { graph: Arc::new(graph), rendering, origin: GraphOrigin { seed, n, p, kind, acyclic } })
}

/// Everything a build produced.
#[derive(Debug, Clone)]
pub struct BuildOutput {
    /// Every synthesized record with its cleaning status.
    pub records: Vec<ProblemRecord>,
    /// Verified records after balancing.
    pub balanced: Vec<ProblemRecord>,
    pub report: BuildReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildReport {
    pub per_task: BTreeMap<TaskId, TaskCounts>,
    pub clean: CleanReport,
    pub exported: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskCounts {
    pub requested: usize,
    /// Instances the oracle refused (for example over the node cap).
    pub skipped: usize,
    pub raw: usize,
    pub verified: usize,
    pub exported: usize,
}

/// Synthesize, clean and balance records for every configured task.
pub fn build(cfg: &ForgeConfig, catalog: &[AlgorithmDoc]) -> Result<BuildOutput, ForgeError> {
    cfg.validate()?;
    let mut raw = Vec::new();
    let mut per_task: BTreeMap<TaskId, TaskCounts> = BTreeMap::new();
    for (&task, tcfg) in &cfg.tasks {
        let docs: Vec<&AlgorithmDoc> = catalog.iter().filter(|d| d.task_id == task).collect();
        let Some(doc) = docs.first() else { return Err(ForgeError::EmptyJoin { task: task.to_string() }) };
        let counts = per_task.entry(task).or_default();
        counts.requested = tcfg.count;
        for i in 0..tcfg.count {
            let seed = rng::derive_named(cfg.seed, task.name(), &[i as u64]);
            let sample = sample_graph(task, &doc.graph_types, tcfg, &cfg.formats, seed)?;
            match make_record(&sample, doc) {
                Some(r) => {
                    counts.raw += 1;
                    raw.push(r);
                }
                None => counts.skipped += 1,
            }
        }
    }
    let opts = CleanOptions { limits: cfg.limits, interpreter: cfg.interpreter()?, jobs: cfg.jobs };
    let records = clean(raw, &opts)?;
    let clean_report = CleanReport::of(&records);
    let balanced: Vec<ProblemRecord> =
        balance(records.iter().filter(|r| r.is_verified()).cloned().collect(), cfg.balance_cap, rng::derive_named(cfg.seed, "balance", &[]));
    for r in &records {
        if r.is_verified() {
            per_task.entry(r.task_id).or_default().verified += 1;
        }
    }
    for r in &balanced {
        per_task.entry(r.task_id).or_default().exported += 1;
    }
    let report = BuildReport { per_task, clean: clean_report, exported: balanced.len() };
    Ok(BuildOutput { records, balanced, report })
}

pub const RECORDS_FILE: &str = "records.jsonl";
pub const SFT_FILE: &str = "sft.jsonl";

/// Write records, the SFT export and the manifest under `dir`.
pub fn write_build(dir: &Path, cfg: &ForgeConfig, catalog: &[AlgorithmDoc], out: &BuildOutput) -> Result<Manifest, ForgeError> {
    std::fs::create_dir_all(dir)?;
    write_records(&out.records, dir.join(RECORDS_FILE))?;
    export_sft(&out.balanced, dir.join(SFT_FILE))?;
    let mut manifest = Manifest::new("forge build", Some(cfg.seed), cfg);
    manifest.summary = serde_json::json!({
        "catalog_digest": digest_of(&catalog),
        "report": out.report,
    });
    manifest.add_output(dir, RECORDS_FILE)?;
    manifest.add_output(dir, SFT_FILE)?;
    manifest.write(dir)?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(g: Graph, seed: u64) -> GraphSample {
        let rendering = codec::render(&g, RenderFormat::EdgeList, seed).unwrap();
        let origin = GraphOrigin { seed, n: g.node_count(), p: 0.5, kind: g.kind(), acyclic: false };
        GraphSample { graph: Arc::new(g), rendering, origin }
    }

    fn doc(task: TaskId) -> AlgorithmDoc {
        builtin_catalog().into_iter().find(|d| d.task_id == task).unwrap()
    }

    #[test]
    fn join_by_kind() {
        let g = sample(Graph::undirected(4, &[(0, 1), (1, 2)]).unwrap(), 1);
        assert_eq!(join(&[g.clone()], &[doc(TaskId::Connectivity)], JoinPolicy::All, 0).len(), 1);
        assert!(join(&[g], &[doc(TaskId::MaxFlow)], JoinPolicy::All, 0).is_empty());
    }

    #[test]
    fn record_ids_are_derivable() {
        let g = sample(Graph::undirected(4, &[(0, 1), (1, 2)]).unwrap(), 9);
        let r = make_record(&g, &doc(TaskId::Connectivity)).unwrap();
        assert_eq!(r.record_id, record_id(r.task_id, 9, &r.provenance.doc_id, r.provenance.param_seed));
        let back: ProblemRecord = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn catalog_docs_validate() {
        for d in full_catalog() {
            validate_doc(&d).unwrap();
        }
        assert_eq!(augment(&builtin_catalog(), &[]).unwrap(), builtin_catalog());
    }

    #[test]
    fn missing_parameters_is_a_schema_violation() {
        let mut v = serde_json::to_value(expert_docs()).unwrap();
        v[0].as_object_mut().unwrap().remove("parameters");
        assert!(matches!(load_docs(&v.to_string()), Err(ForgeError::SchemaViolation(_))));
    }

    #[test]
    fn duplicates_are_rejected() {
        let mut twin = doc(TaskId::Bipartite);
        twin.doc_id = "expert/bipartite".into();
        twin.source = DocSource::Expert;
        assert!(matches!(augment(&builtin_catalog(), &[twin]), Err(ForgeError::DuplicateDoc(_))));
    }

    #[test]
    fn question_uses_entity_names() {
        let params = Params::from([("u".into(), 1), ("v".into(), 0)]);
        let names = vec!["Alpha".to_string(), "Beta".to_string()];
        assert_eq!(fill_question("{u} and {v}", &params, Some(&names)), "Beta and Alpha");
        assert_eq!(fill_question("{u} and {v}", &params, None), "1 and 0");
    }
}
