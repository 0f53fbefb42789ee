//! Command-line front end. Exit codes: 0 success, 1 domain error, 2 usage.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use thiserror::Error;

use crate::codec::{self, edge_file::EdgeFileOptions, RenderFormat};
use crate::forge::{self, CleanOptions, ForgeConfig, RecordStatus};
use crate::graph::{generate_er, ErConfig, Graph, GraphKind};
use crate::inference::{self, EndpointConfig, EvalConfig, GenerationClient, GenerationContext, HttpClient, InferOptions, Mode, Query, Retriever, StubClient, StubPolicy};
use crate::library::{self, EmbeddingProvider, HashingEmbedder, Index};
use crate::manifest::Manifest;
use crate::prompt::GraphText;
use crate::rlcf::{self, PairingPolicy, RlcfConfig};
use crate::sandbox::{GraphPayload, Interpreter, Limits};
use crate::tasks::{self, Answer, Params, SolveOptions, TaskId};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Domain(_) => EXIT_DOMAIN,
        }
    }
}

fn domain(e: impl std::fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "graphwild", version, about = "Verified graph problem-code datasets, preference mining and execution-graded inference")]
pub struct Cli {
    /// Seed for every random choice of the run.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Upper bound on concurrent executions and requests.
    #[arg(long, global = true, default_value_t = 4)]
    pub jobs: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Task registry.
    #[command(subcommand)]
    Tasks(TasksCmd),
    /// Graph generation.
    #[command(subcommand)]
    Gen(GenCmd),
    /// Dataset construction.
    #[command(subcommand)]
    Forge(ForgeCmd),
    /// Code-library index.
    #[command(subcommand)]
    Index(IndexCmd),
    /// Query a code-library index.
    Retrieve(RetrieveArgs),
    /// Answer one question about one graph.
    Infer(InferArgs),
    /// Accuracy over fresh instances.
    Eval(EvalArgs),
    /// Run a task solver directly on an edge file.
    Solve(SolveArgs),
}

#[derive(Debug, Subcommand)]
pub enum TasksCmd {
    /// Every task with its graph kinds, parameters and answer type
    List {
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum GenCmd {
    /// Seeded Erdős–Rényi graph as text or an edge file
    Graph(GenGraphArgs),
}

#[derive(Debug, Args)]
pub struct GenGraphArgs {
    #[arg(long)]
    pub n: usize,
    /// Edge probability; `--edges` sets it from an expected edge count.
    #[arg(long, conflicts_with = "edges")]
    pub p: Option<f64>,
    #[arg(long)]
    pub edges: Option<u64>,
    #[arg(long, default_value = "undirected")]
    pub kind: String,
    #[arg(long, default_value = "edge-list")]
    pub format: String,
    #[arg(long, default_value_t = 1)]
    pub min_weight: u64,
    #[arg(long, default_value_t = 10)]
    pub max_weight: u64,
    /// Join every isolated node to a random other node.
    #[arg(long)]
    pub no_isolated: bool,
    /// Write an edge file instead of printing the rendering.
    #[arg(long)]
    pub edge_file: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum ForgeCmd {
    /// Synthesize, clean, balance and export.
    Build {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// JSON array of extra algorithm documents.
        #[arg(long)]
        expert: Option<PathBuf>,
    },
    /// Re-run cleaning on a records file.
    Clean {
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        interpreter: Option<String>,
        #[arg(long, default_value_t = 10.0)]
        wall_secs: f64,
    },
    /// Mine preference pairs from verified records.
    Rlcf(RlcfArgs),
}

#[derive(Debug, Args)]
pub struct RlcfArgs {
    #[arg(long)]
    pub records: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 100)]
    pub k: usize,
    #[arg(long, default_value_t = 3000)]
    pub target: usize,
    /// Cap per problem; switches pairing to all combinations.
    #[arg(long)]
    pub all_pairs_cap: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub temperature: f64,
    /// Fraction of pairs re-executed after mining.
    #[arg(long, default_value_t = 0.1)]
    pub audit: f64,
    #[command(flatten)]
    pub client: ClientArgs,
}

#[derive(Debug, Args)]
pub struct ClientArgs {
    /// stub-correct, stub-wrong, stub-planted:<percent> or stub-bernoulli:<p>.
    #[arg(long, conflicts_with = "endpoint")]
    pub client: Option<String>,
    /// TOML file with url, model, token_env and sampling settings.
    #[arg(long)]
    pub endpoint: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum IndexCmd {
    /// Embed a library CSV into an on-disk index
    Build {
        /// Library CSV (task_name, document); the built-in catalog when absent.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = library::DEFAULT_DIMENSION)]
        dimension: usize,
    },
}

#[derive(Debug, Args)]
pub struct RetrieveArgs {
    #[arg(long)]
    pub index: PathBuf,
    #[arg(long)]
    pub query: String,
    #[arg(short, long, default_value_t = 1)]
    pub k: usize,
    #[arg(long)]
    pub hint: Option<String>,
    /// Rank by cosine similarity alone.
    #[arg(long)]
    pub similarity_only: bool,
}

#[derive(Debug, Args)]
pub struct InferArgs {
    #[arg(long)]
    pub query: String,
    #[arg(long)]
    pub edge_file: PathBuf,
    #[arg(long)]
    pub task: Option<String>,
    /// Task parameter as name=value; repeatable.
    #[arg(long = "param")]
    pub params: Vec<String>,
    /// auto, direct or rag:<k>.
    #[arg(long, default_value = "auto")]
    pub mode: String,
    #[arg(long)]
    pub index: Option<PathBuf>,
    /// Grade against the built-in solver.
    #[arg(long)]
    pub grade: bool,
    #[command(flatten)]
    pub client: ClientArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Comma-separated task ids, or `core` / `all`.
    #[arg(long, default_value = "core")]
    pub tasks: String,
    #[arg(long, default_value_t = 20)]
    pub n: usize,
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,
    #[arg(long, default_value = "auto")]
    pub mode: String,
    /// Index for retrieval; the built-in catalog is indexed when absent.
    #[arg(long)]
    pub index: Option<PathBuf>,
    #[command(flatten)]
    pub client: ClientArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub task: String,
    #[arg(long)]
    pub edge_file: PathBuf,
    #[arg(long = "param")]
    pub params: Vec<String>,
    /// Read as this kind regardless of the header.
    #[arg(long)]
    pub kind: Option<String>,
    /// Skip self-loops and repeated edges.
    #[arg(long)]
    pub lenient: bool,
    /// Write the full answer here instead of stdout.
    #[arg(long)]
    pub answer_out: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parse `args` and run; returns the process exit code.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if code == EXIT_OK { stdout } else { stderr };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match run(&cli, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let ctx = Ctx { seed: cli.seed, jobs: cli.jobs.max(1) };
    match &cli.command {
        Command::Tasks(TasksCmd::List { json }) => tasks_list(*json, out),
        Command::Gen(GenCmd::Graph(a)) => gen_graph(&ctx, a, out),
        Command::Forge(ForgeCmd::Build { config, out: dir, expert }) => forge_build(&ctx, config, dir, expert.as_deref(), out),
        Command::Forge(ForgeCmd::Clean { records, out: dir, interpreter, wall_secs }) => {
            forge_clean(&ctx, records, dir, interpreter.as_deref(), *wall_secs, out)
        }
        Command::Forge(ForgeCmd::Rlcf(a)) => forge_rlcf(&ctx, a, out),
        Command::Index(IndexCmd::Build { csv, out: dir, dimension }) => index_build(csv.as_deref(), dir, *dimension, out),
        Command::Retrieve(a) => retrieve(a, out),
        Command::Infer(a) => infer(&ctx, a, out),
        Command::Eval(a) => eval(&ctx, a, out),
        Command::Solve(a) => solve(a, out),
    }
}

struct Ctx {
    seed: u64,
    jobs: usize,
}

fn emit(out: &mut dyn Write, text: impl std::fmt::Display) -> Result<(), CliError> {
    writeln!(out, "{text}").map_err(domain)
}

fn write_manifest(dir: &Path, m: &Manifest) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(domain)?;
    m.write(dir).map_err(domain)
}

fn parse_task(s: &str) -> Result<TaskId, CliError> {
    s.parse().map_err(usage)
}

fn parse_params(items: &[String]) -> Result<Params, CliError> {
    items
        .iter()
        .map(|kv| {
            let (k, v) = kv.split_once('=').ok_or_else(|| usage(format!("parameter `{kv}` is not name=value")))?;
            let v: u64 = v.trim().parse().map_err(|_| usage(format!("parameter `{kv}` needs a non-negative integer")))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

fn parse_task_list(s: &str) -> Result<Vec<TaskId>, CliError> {
    match s {
        "core" => Ok(TaskId::CORE.to_vec()),
        "all" => Ok(TaskId::ALL.to_vec()),
        _ => s.split(',').filter(|t| !t.trim().is_empty()).map(|t| parse_task(t.trim())).collect(),
    }
}

/// A stub described by name, e.g. `stub-planted:70`.
pub fn parse_stub(spec: &str, seed: u64) -> Result<StubClient, String> {
    let (name, arg) = spec.split_once(':').map_or((spec, None), |(n, a)| (n, Some(a)));
    let policy = match (name, arg) {
        ("stub-correct", None) => StubPolicy::AlwaysCorrect,
        ("stub-wrong", None) => StubPolicy::AlwaysWrong,
        ("stub-planted", Some(a)) => {
            let pct: u64 = a.parse().map_err(|_| format!("bad percentage in `{spec}`"))?;
            if pct > 100 || pct % 10 != 0 {
                return Err(format!("planted percentage must be a multiple of 10 up to 100, got {pct}"));
            }
            StubPolicy::Planted { per_ten: pct / 10 }
        }
        ("stub-bernoulli", Some(a)) => {
            let p: f64 = a.parse().map_err(|_| format!("bad probability in `{spec}`"))?;
            if !(0.0..=1.0).contains(&p) {
                return Err(format!("probability must be in [0, 1], got {p}"));
            }
            StubPolicy::Bernoulli { p }
        }
        _ => return Err(format!("unknown client `{spec}`; expected stub-correct, stub-wrong, stub-planted:<pct> or stub-bernoulli:<p>")),
    };
    Ok(StubClient::new(policy, seed))
}

fn make_client(a: &ClientArgs, seed: u64, temperature: Option<f64>) -> Result<(Box<dyn GenerationClient>, serde_json::Value), CliError> {
    match (&a.client, &a.endpoint) {
        (Some(spec), _) => Ok((Box::new(parse_stub(spec, seed).map_err(usage)?), json!({ "client": spec }))),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(domain)?;
            let mut cfg: EndpointConfig = toml::from_str(&text).map_err(usage)?;
            if let Some(t) = temperature {
                cfg.temperature = t;
            }
            let desc = serde_json::to_value(&cfg).expect("config serializes");
            Ok((Box::new(HttpClient::new(cfg).map_err(domain)?), json!({ "endpoint": desc })))
        }
        (None, None) => Err(usage("pass --client <stub> or --endpoint <file>")),
    }
}

fn tasks_list(as_json: bool, out: &mut dyn Write) -> Result<(), CliError> {
    let specs = tasks::registry();
    if as_json {
        return emit(out, serde_json::to_string_pretty(&specs).map_err(domain)?);
    }
    for s in specs {
        let kinds: Vec<&str> = s.kinds.iter().map(|k| k.name()).collect();
        let params: Vec<&str> = s.params.iter().map(|p| p.name).collect();
        let scope = if s.task_id.is_core() { "core" } else { "extra" };
        emit(out, format!("{:<30} {:<6} {:<14} params=[{}] kinds=[{}]", s.task_id, scope, s.answer_type.to_string(), params.join(","), kinds.join(",")))?;
    }
    Ok(())
}

fn gen_graph(ctx: &Ctx, a: &GenGraphArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let kind: GraphKind = a.kind.parse().map_err(usage)?;
    let p = match (a.p, a.edges) {
        (Some(p), _) => p,
        (None, Some(m)) => {
            let pairs = match kind {
                GraphKind::Directed | GraphKind::WeightedDirected => (a.n as f64) * (a.n as f64 - 1.0),
                GraphKind::Bipartite => (a.n.div_ceil(2) * (a.n / 2)) as f64,
                _ => (a.n as f64) * (a.n as f64 - 1.0) / 2.0,
            };
            if pairs <= 0.0 { 0.0 } else { (m as f64 / pairs).min(1.0) }
        }
        (None, None) => return Err(usage("pass --p or --edges")),
    };
    let cfg = ErConfig::new(a.n, p, kind, ctx.seed).map_err(usage)?.with_weight_range(a.min_weight, a.max_weight).map_err(usage)?;
    let mut g = generate_er(&cfg);
    if a.no_isolated {
        g = g.attach_isolated(rand_seed(ctx.seed, 2), (a.min_weight, a.max_weight));
    }
    let mut m = Manifest::new("gen graph", Some(ctx.seed), &json!({ "n": a.n, "p": p, "kind": kind.name(), "format": a.format, "no_isolated": a.no_isolated }));
    m.summary = json!({ "nodes": g.node_count(), "edges": g.edge_count(), "graph_hash": g.canonical_hash().to_string() });
    if let Some(path) = &a.edge_file {
        codec::edge_file::render_to_file(&g, path).map_err(domain)?;
        emit(out, format!("wrote {} nodes, {} edges to {}", g.node_count(), g.edge_count(), path.display()))?;
    } else {
        let format: RenderFormat = a.format.parse().map_err(usage)?;
        let r = codec::render(&g, format, rand_seed(ctx.seed, 1)).map_err(domain)?;
        emit(out, r.text.trim_end())?;
    }
    if let Some(dir) = &a.out {
        if let Some(path) = &a.edge_file {
            if let (Some(parent), Some(name)) = (path.parent(), path.file_name()) {
                if parent == dir.as_path() {
                    m.add_output(dir, &name.to_string_lossy()).map_err(domain)?;
                }
            }
        }
        write_manifest(dir, &m)?;
    }
    Ok(())
}

fn rand_seed(seed: u64, salt: u64) -> u64 {
    crate::rng::derive(seed, &[salt])
}

fn forge_build(ctx: &Ctx, config: &Path, dir: &Path, expert: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    let text = std::fs::read_to_string(config).map_err(domain)?;
    let mut cfg = ForgeConfig::from_toml(&text).map_err(usage)?;
    if ctx.seed != 0 {
        cfg.seed = ctx.seed;
    }
    cfg.jobs = ctx.jobs;
    let mut catalog = forge::full_catalog();
    if let Some(path) = expert {
        let docs = forge::load_docs(&std::fs::read_to_string(path).map_err(domain)?).map_err(domain)?;
        catalog = forge::augment(&catalog, &docs).map_err(domain)?;
    }
    let built = forge::build(&cfg, &catalog).map_err(domain)?;
    forge::write_build(dir, &cfg, &catalog, &built).map_err(domain)?;
    let r = &built.report;
    emit(out, format!("records: {}  verified: {}  exported: {}", r.clean.input, r.clean.verified, r.exported))?;
    for (reason, n) in &r.clean.rejected {
        emit(out, format!("  rejected {}: {n}", serde_json::to_value(reason).expect("serializes").as_str().unwrap_or("?")))?;
    }
    emit(out, format!("wrote {}", dir.display()))
}

fn forge_clean(ctx: &Ctx, records: &Path, dir: &Path, interpreter: Option<&str>, wall_secs: f64, out: &mut dyn Write) -> Result<(), CliError> {
    let mut recs = forge::read_records(records).map_err(domain)?;
    for r in &mut recs {
        r.status = RecordStatus::Raw;
    }
    let interpreter = match interpreter {
        Some(t) => Interpreter::parse(t).map_err(usage)?,
        None => Interpreter::builtin(),
    };
    let opts = CleanOptions { limits: Limits { wall_secs, ..Limits::default() }, interpreter, jobs: ctx.jobs };
    let cleaned = forge::clean(recs, &opts).map_err(domain)?;
    let report = forge::CleanReport::of(&cleaned);
    std::fs::create_dir_all(dir).map_err(domain)?;
    forge::write_records(&cleaned, dir.join(forge::RECORDS_FILE)).map_err(domain)?;
    forge::export_sft(&cleaned, dir.join(forge::SFT_FILE)).map_err(domain)?;
    let mut m = Manifest::new("forge clean", Some(ctx.seed), &json!({ "records": records, "wall_secs": wall_secs }));
    m.summary = serde_json::to_value(&report).expect("serializes");
    m.add_output(dir, forge::RECORDS_FILE).map_err(domain)?;
    m.add_output(dir, forge::SFT_FILE).map_err(domain)?;
    write_manifest(dir, &m)?;
    emit(out, format!("records: {}  verified: {}", report.input, report.verified))
}

pub const PAIRS_FILE: &str = "pairs.jsonl";
pub const RLCF_STATS_FILE: &str = "rlcf_stats.json";

fn forge_rlcf(ctx: &Ctx, a: &RlcfArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let problems: Vec<_> = forge::read_records(&a.records).map_err(domain)?.into_iter().filter(|r| r.is_verified()).collect();
    let (client, client_desc) = make_client(&a.client, ctx.seed, Some(a.temperature))?;
    let cfg = RlcfConfig {
        k: a.k,
        target: a.target,
        policy: a.all_pairs_cap.map_or(PairingPolicy::MinMatch, |cap| PairingPolicy::AllPairs { cap }),
        beta_hint: a.beta,
        temperature: a.temperature,
        seed: ctx.seed,
        ..RlcfConfig::default()
    };
    cfg.validate().map_err(usage)?;
    let opts = CleanOptions { jobs: ctx.jobs, ..CleanOptions::default() };
    let mined = rlcf::mine(&problems, client.as_ref(), &cfg, &opts).map_err(domain)?;
    let audit = rlcf::audit(&mined.pairs, &problems, a.audit, ctx.seed, &opts).map_err(domain)?;
    std::fs::create_dir_all(&a.out).map_err(domain)?;
    rlcf::export_pairs(&mined.pairs, cfg.beta_hint, a.out.join(PAIRS_FILE)).map_err(domain)?;
    let stats = json!({ "problems": mined.stats, "unvisited": mined.unvisited, "audit": audit });
    std::fs::write(a.out.join(RLCF_STATS_FILE), serde_json::to_string_pretty(&stats).expect("serializes") + "\n").map_err(domain)?;
    let mut m = Manifest::new("forge rlcf", Some(ctx.seed), &json!({ "rlcf": cfg, "generator": client_desc, "records": a.records }));
    m.summary = json!({ "pairs": mined.pairs.len(), "problems": mined.stats.len(), "audit_passed": audit.passed() });
    m.add_output(&a.out, PAIRS_FILE).map_err(domain)?;
    m.add_output(&a.out, RLCF_STATS_FILE).map_err(domain)?;
    write_manifest(&a.out, &m)?;
    emit(out, format!("problems: {}  pairs: {}  audited: {}  audit failures: {}", mined.stats.len(), mined.pairs.len(), audit.audited, audit.failures.len()))?;
    if audit.passed() {
        Ok(())
    } else {
        Err(domain(format!("audit failed for {} pairs", audit.failures.len())))
    }
}

fn index_build(csv: Option<&Path>, dir: &Path, dimension: usize, out: &mut dyn Write) -> Result<(), CliError> {
    if dimension == 0 {
        return Err(usage("dimension must be positive"));
    }
    let docs = match csv {
        Some(p) => library::load_csv(p).map_err(domain)?,
        None => library::read_csv(library::catalog_csv(&forge::full_catalog()).as_bytes()).map_err(domain)?,
    };
    let index = library::build_index(docs, &HashingEmbedder { dimension }).map_err(domain)?;
    index.save(dir).map_err(domain)?;
    emit(out, format!("indexed {} documents (chunk size {}) into {}", index.docs.len(), index.chunk_size, dir.display()))
}

fn load_index(dir: &Path) -> Result<(Index, HashingEmbedder), CliError> {
    let index = Index::load(dir).map_err(domain)?;
    let provider = HashingEmbedder { dimension: index.dimension };
    if provider.name() != index.provider {
        return Err(domain(format!("index was built with {}, which this command cannot reproduce", index.provider)));
    }
    Ok((index, provider))
}

fn retrieve(a: &RetrieveArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if a.k == 0 {
        return Err(usage("-k must be at least 1"));
    }
    let (index, provider) = load_index(&a.index)?;
    let hits = if a.similarity_only {
        library::retrieve_similarity(&index, &provider, &a.query, a.k)
    } else {
        library::retrieve(&index, &provider, &a.query, a.k, a.hint.as_deref())
    }
    .map_err(domain)?;
    for (rank, h) in hits.iter().enumerate() {
        emit(out, format!("{}\t{}\tdoc={}\tsimilarity={:.4}\tkeyword={:.2}", rank + 1, h.task_name, h.doc_id, h.similarity, h.keyword))?;
    }
    Ok(())
}

fn read_graph(path: &Path, kind: Option<&str>, lenient: bool) -> Result<Graph, CliError> {
    let kind = kind.map(|k| k.parse::<GraphKind>().map_err(usage)).transpose()?;
    codec::edge_file::parse_edge_file_with(path, EdgeFileOptions { kind, lenient }).map_err(|e| domain(format!("{}: {e}", path.display())))
}

fn infer(ctx: &Ctx, a: &InferArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let mode: Mode = a.mode.parse().map_err(usage)?;
    let task = a.task.as_deref().map(parse_task).transpose()?;
    let params = parse_params(&a.params)?;
    let g = read_graph(&a.edge_file, None, false)?;
    let task_for_grade = task.or_else(|| library::match_task(&a.query));
    let oracle = match (a.grade, task_for_grade) {
        (false, _) => None,
        (true, None) => return Err(usage("grading needs --task when the query does not name one")),
        (true, Some(t)) => Some(tasks::solve(t, &g, &params).map_err(domain)?),
    };
    let index = a.index.as_deref().map(load_index).transpose()?;
    let retriever = index.as_ref().map(|(i, p)| Retriever { index: i, provider: p as &dyn EmbeddingProvider });
    let (client, client_desc) = make_client(&a.client, ctx.seed, None)?;
    let query = Query {
        text: a.query.clone(),
        graph_text: GraphText::File(a.edge_file.display().to_string()),
        graph: GraphPayload::EdgeFile { path: a.edge_file.clone(), kind: g.kind() },
        task,
        params,
        oracle,
    };
    let opts = InferOptions { mode, ..InferOptions::default() };
    let o = inference::infer(&query, client.as_ref(), retriever, &opts, GenerationContext { task: None, instance: ctx.seed, sample: 0 }).map_err(domain)?;
    let route = match &o.route {
        inference::Route::Direct => "direct".to_string(),
        inference::Route::Rag { hits } => format!("rag ({} docs)", hits.len()),
    };
    emit(out, format!("task: {}\nroute: {route}\nstatus: {:?}\nanswer: {}", o.task, o.verdict.status, o.verdict.stdout_answer))?;
    if let Some(g) = o.verdict.grade {
        emit(out, format!("correct: {g}"))?;
    }
    if let Some(dir) = &a.out {
        std::fs::create_dir_all(dir).map_err(domain)?;
        std::fs::write(dir.join("infer.json"), serde_json::to_string_pretty(&o).expect("serializes") + "\n").map_err(domain)?;
        let mut m = Manifest::new("infer", Some(ctx.seed), &json!({ "query": a.query, "mode": mode, "generator": client_desc }));
        m.add_output(dir, "infer.json").map_err(domain)?;
        write_manifest(dir, &m)?;
    }
    Ok(())
}

pub const REPORT_JSON: &str = "report.json";
pub const REPORT_TABLE: &str = "report.txt";

fn eval(ctx: &Ctx, a: &EvalArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let tasks = parse_task_list(&a.tasks)?;
    let mode: Mode = a.mode.parse().map_err(usage)?;
    let (client, client_desc) = make_client(&a.client, ctx.seed, None)?;
    let (index, provider) = match &a.index {
        Some(dir) => load_index(dir)?,
        None => {
            let docs = library::read_csv(library::catalog_csv(&forge::full_catalog()).as_bytes()).map_err(domain)?;
            let p = HashingEmbedder::default();
            (library::build_index(docs, &p).map_err(domain)?, p)
        }
    };
    let retriever = Retriever { index: &index, provider: &provider };
    let cfg = EvalConfig { tasks, n: a.n, repeats: a.repeats, seed: ctx.seed, mode, jobs: ctx.jobs };
    let report = inference::evaluate(&cfg, client.as_ref(), Some(retriever), &InferOptions::default()).map_err(domain)?;
    write!(out, "{}", report.to_table()).map_err(domain)?;
    if let Some(dir) = &a.out {
        std::fs::create_dir_all(dir).map_err(domain)?;
        std::fs::write(dir.join(REPORT_JSON), report.to_json()).map_err(domain)?;
        std::fs::write(dir.join(REPORT_TABLE), report.to_table()).map_err(domain)?;
        let mut m = Manifest::new("eval", Some(ctx.seed), &json!({ "eval": cfg, "generator": client_desc }));
        m.add_output(dir, REPORT_TABLE).map_err(domain)?;
        m.summary = json!({ "overall_accuracy": report.overall_accuracy });
        write_manifest(dir, &m)?;
    }
    Ok(())
}

/// Structural checks of a solver answer that do not need a second solver.
pub fn check_answer(task: TaskId, g: &Graph, answer: &Answer) -> Result<(), String> {
    match (task, answer) {
        (TaskId::MinEdgeCover, Answer::Edges(edges)) => {
            let mut covered = vec![false; g.node_count()];
            for &(u, v) in edges {
                if !g.has_edge(u, v) {
                    return Err(format!("({u}, {v}) is not an edge"));
                }
                covered[u] = true;
                covered[v] = true;
            }
            match covered.iter().position(|c| !c) {
                Some(v) => Err(format!("node {v} is not covered")),
                None => Ok(()),
            }
        }
        (TaskId::PageRank, Answer::Scores(s)) => {
            let total: f64 = s.values().sum();
            if s.len() != g.node_count() {
                return Err(format!("{} scores for {} nodes", s.len(), g.node_count()));
            }
            if s.values().any(|x| !(*x >= 0.0)) {
                return Err("negative or undefined score".into());
            }
            if (total - 1.0).abs() > 1e-6 {
                return Err(format!("scores sum to {total}"));
            }
            Ok(())
        }
        _ => Ok(()),
    }
}

fn answer_size(a: &Answer) -> Option<usize> {
    match a {
        Answer::Nodes(v) => Some(v.len()),
        Answer::Edges(v) => Some(v.len()),
        Answer::Groups(v) => Some(v.len()),
        Answer::Scores(v) => Some(v.len()),
        _ => None,
    }
}

fn solve(a: &SolveArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let task = parse_task(&a.task)?;
    let params = parse_params(&a.params)?;
    let start = Instant::now();
    let g = read_graph(&a.edge_file, a.kind.as_deref(), a.lenient)?;
    let read_secs = start.elapsed().as_secs_f64();
    let answer = tasks::solve_with(task, &g, &params, &SolveOptions::default()).map_err(domain)?;
    let solve_secs = start.elapsed().as_secs_f64() - read_secs;
    check_answer(task, &g, &answer).map_err(|e| domain(format!("answer check failed: {e}")))?;
    let line = answer.to_line();
    match &a.answer_out {
        Some(p) => std::fs::write(p, line.clone() + "\n").map_err(domain)?,
        None => emit(out, &line)?,
    }
    let size = answer_size(&answer).map_or(String::new(), |s| format!(" size={s}"));
    emit(out, format!("task={task} nodes={} edges={}{size} check=ok read_secs={read_secs:.2} solve_secs={solve_secs:.2}", g.node_count(), g.edge_count()))?;
    if let Some(dir) = &a.out {
        let mut m = Manifest::new("solve", None, &json!({ "task": task, "edge_file": a.edge_file, "params": params }));
        m.summary = json!({ "nodes": g.node_count(), "edges": g.edge_count(), "answer_sha256": crate::manifest::sha256_hex(line.as_bytes()) });
        write_manifest(dir, &m)?;
    }
    Ok(())
}
