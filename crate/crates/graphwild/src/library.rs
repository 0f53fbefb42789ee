//! Code library for retrieval: CSV documents, whole-record chunks, a
//! pluggable embedding, an exhaustive vector index and hybrid
//! similarity + keyword ranking. Also routes queries to in-domain tasks.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};
use std::io::Read;
use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::forge::AlgorithmDoc;
use crate::manifest::{sha256_hex, Manifest};
use crate::rng::fnv1a;
use crate::tasks::TaskId;

pub const INDEX_FORMAT_VERSION: u32 = 1;
pub const INDEX_FILE: &str = "index.json";
pub const DEFAULT_DIMENSION: usize = 512;

#[derive(Debug, Error)]
pub enum LibraryError {
    #[error("csv row {row}: {message}")]
    CsvError { row: usize, message: String },
    #[error("the library has no documents")]
    EmptyLibrary,
    #[error("embedding failed: {0}")]
    Embedding(String),
    #[error("index was built with {built} but queried with {query}")]
    ProviderMismatch { built: String, query: String },
    #[error("unsupported index format version {0}")]
    Version(u32),
    #[error("k must be at least 1")]
    InvalidK,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LibraryDoc {
    /// Zero-based data row.
    pub doc_id: usize,
    pub task_name: String,
    pub document: String,
}

/// Read a two-column CSV (`task_name`, `document`) with a header row.
pub fn read_csv(reader: impl Read) -> Result<Vec<LibraryDoc>, LibraryError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr.headers().map_err(|e| LibraryError::CsvError { row: 0, message: e.to_string() })?.clone();
    let col = |name: &str| {
        headers.iter().position(|h| h.trim() == name).ok_or_else(|| LibraryError::CsvError { row: 0, message: format!("missing column `{name}`") })
    };
    let (ti, di) = (col("task_name")?, col("document")?);
    let mut docs = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| LibraryError::CsvError { row, message: e.to_string() })?;
        let task_name = rec.get(ti).unwrap_or("").trim().to_string();
        if task_name.is_empty() {
            return Err(LibraryError::CsvError { row, message: "empty task_name".into() });
        }
        let document = rec.get(di).ok_or_else(|| LibraryError::CsvError { row, message: "missing document".into() })?.to_string();
        docs.push(LibraryDoc { doc_id: i, task_name, document });
    }
    if docs.is_empty() {
        return Err(LibraryError::EmptyLibrary);
    }
    Ok(docs)
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<Vec<LibraryDoc>, LibraryError> {
    read_csv(std::fs::File::open(path)?)
}

/// Library CSV text from algorithm documents.
pub fn catalog_csv(docs: &[AlgorithmDoc]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["task_name", "document"]).expect("in-memory write");
    for d in docs {
        w.write_record([d.task_id.spec().title, &d.library_text()]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

/// Lowercase alphanumeric tokens.
pub fn tokens(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric()).filter(|t| !t.is_empty()).map(str::to_lowercase).collect()
}

const STOPWORDS: [&str; 24] = [
    "a", "an", "the", "of", "in", "on", "for", "to", "and", "or", "is", "are", "this", "that", "with", "graph", "find", "what",
    "does", "do", "compute", "given", "check", "problem",
];

/// Tokens with stopwords removed.
pub fn keywords(text: &str) -> Vec<String> {
    tokens(text).into_iter().filter(|t| !STOPWORDS.contains(&t.as_str())).collect()
}

fn contains_run(haystack: &[String], needle: &[String]) -> bool {
    !needle.is_empty() && haystack.windows(needle.len()).any(|w| w == needle)
}

pub trait EmbeddingProvider: Send + Sync {
    /// Identifies the vector space; indexes remember it.
    fn name(&self) -> String;
    fn dimension(&self) -> usize;
    /// Unit vectors, one per text.
    fn embed(&self, texts: &[&str]) -> Result<Vec<Vec<f32>>, LibraryError>;
}

fn normalize(v: &mut [f32]) {
    let norm = v.iter().map(|x| (*x as f64) * (*x as f64)).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x = (*x as f64 / norm) as f32);
    }
}

/// Term frequencies hashed into a fixed number of buckets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HashingEmbedder {
    pub dimension: usize,
}

impl Default for HashingEmbedder {
    fn default() -> Self {
        HashingEmbedder { dimension: DEFAULT_DIMENSION }
    }
}

impl HashingEmbedder {
    pub fn vector(&self, text: &str) -> Vec<f32> {
        let mut v = vec![0f32; self.dimension];
        let toks = tokens(text);
        if toks.is_empty() {
            v[0] = 1.0;
            return v;
        }
        for t in &toks {
            let h = fnv1a(t.as_bytes());
            let sign = if h >> 63 == 0 { 1.0 } else { -1.0 };
            v[(h % self.dimension as u64) as usize] += sign;
        }
        if v.iter().all(|x| *x == 0.0) {
            v[0] = 1.0;
        }
        normalize(&mut v);
        v
    }
}

impl EmbeddingProvider for HashingEmbedder {
    fn name(&self) -> String {
        format!("hashing-tf-{}", self.dimension)
    }

    fn dimension(&self) -> usize {
        self.dimension
    }

    fn embed(&self, texts: &[&str]) -> Result<Vec<Vec<f32>>, LibraryError> {
        Ok(texts.iter().map(|t| self.vector(t)).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HttpEmbedderConfig {
    pub url: String,
    pub model: String,
    pub dimension: usize,
    #[serde(default)]
    pub token_env: Option<String>,
}

/// Embeddings endpoint taking `{model, input: [..]}` and answering
/// `{data: [{embedding: [..]}, ..]}`.
pub struct HttpEmbedder {
    config: HttpEmbedderConfig,
    agent: ureq::Agent,
    token: Option<String>,
}

impl HttpEmbedder {
    pub fn new(config: HttpEmbedderConfig) -> Result<Self, LibraryError> {
        let token = match &config.token_env {
            None => None,
            Some(var) => Some(std::env::var(var).map_err(|_| LibraryError::Embedding(format!("environment variable {var} is not set")))?),
        };
        let agent = ureq::Agent::config_builder().timeout_global(Some(Duration::from_secs(60))).build().new_agent();
        Ok(HttpEmbedder { config, agent, token })
    }
}

#[derive(Deserialize)]
struct EmbeddingResponse {
    data: Vec<EmbeddingItem>,
}

#[derive(Deserialize)]
struct EmbeddingItem {
    embedding: Vec<f32>,
}

impl EmbeddingProvider for HttpEmbedder {
    fn name(&self) -> String {
        format!("http:{}", self.config.model)
    }

    fn dimension(&self) -> usize {
        self.config.dimension
    }

    fn embed(&self, texts: &[&str]) -> Result<Vec<Vec<f32>>, LibraryError> {
        let mut req = self.agent.post(&self.config.url);
        if let Some(t) = &self.token {
            req = req.header("Authorization", format!("Bearer {t}"));
        }
        let body = serde_json::json!({ "model": self.config.model, "input": texts });
        let err = |e: ureq::Error| LibraryError::Embedding(e.to_string());
        let resp: EmbeddingResponse = req.send_json(&body).map_err(err)?.body_mut().read_json().map_err(err)?;
        if resp.data.len() != texts.len() {
            return Err(LibraryError::Embedding(format!("{} vectors for {} texts", resp.data.len(), texts.len())));
        }
        resp.data
            .into_iter()
            .map(|item| {
                let mut v = item.embedding;
                if v.len() != self.config.dimension {
                    return Err(LibraryError::Embedding(format!("expected dimension {}, got {}", self.config.dimension, v.len())));
                }
                normalize(&mut v);
                Ok(v)
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chunk {
    pub chunk_id: usize,
    pub doc_id: usize,
    pub text: String,
    pub vector: Vec<f32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Index {
    pub version: u32,
    pub provider: String,
    pub dimension: usize,
    /// Length in bytes of the longest document.
    pub chunk_size: usize,
    pub docs: Vec<LibraryDoc>,
    pub chunks: Vec<Chunk>,
}

/// Split `text` into pieces of at most `size` bytes on char boundaries. A
/// character wider than `size` forms a piece of its own.
pub fn chunk_text(text: &str, size: usize) -> Vec<&str> {
    if text.len() <= size || size == 0 {
        return vec![text];
    }
    let mut out = Vec::new();
    let mut start = 0;
    while start < text.len() {
        let mut end = (start + size).min(text.len());
        while !text.is_char_boundary(end) {
            end -= 1;
        }
        if end == start {
            end = start + text[start..].chars().next().map_or(1, char::len_utf8);
        }
        out.push(&text[start..end]);
        start = end;
    }
    out
}

pub fn build_index(docs: Vec<LibraryDoc>, provider: &dyn EmbeddingProvider) -> Result<Index, LibraryError> {
    if docs.is_empty() {
        return Err(LibraryError::EmptyLibrary);
    }
    let chunk_size = docs.iter().map(|d| d.document.len()).max().unwrap_or(0);
    let pieces: Vec<(usize, &str)> = docs.iter().flat_map(|d| chunk_text(&d.document, chunk_size).into_iter().map(move |t| (d.doc_id, t))).collect();
    let texts: Vec<&str> = pieces.iter().map(|(_, t)| *t).collect();
    let vectors = provider.embed(&texts)?;
    let chunks = pieces
        .iter()
        .zip(vectors)
        .enumerate()
        .map(|(i, ((doc_id, text), vector))| Chunk { chunk_id: i, doc_id: *doc_id, text: text.to_string(), vector })
        .collect();
    Ok(Index { version: INDEX_FORMAT_VERSION, provider: provider.name(), dimension: provider.dimension(), chunk_size, docs, chunks })
}

pub fn build_index_from_csv(path: impl AsRef<Path>, provider: &dyn EmbeddingProvider) -> Result<Index, LibraryError> {
    build_index(load_csv(path)?, provider)
}

impl Index {
    /// Write `index.json` and a manifest into `dir`, replacing any previous
    /// index only once both are complete.
    pub fn save(&self, dir: &Path) -> Result<(), LibraryError> {
        std::fs::create_dir_all(dir)?;
        let bytes = serde_json::to_vec(self)?;
        let tmp = dir.join(format!("{INDEX_FILE}.tmp"));
        std::fs::write(&tmp, &bytes)?;
        std::fs::rename(&tmp, dir.join(INDEX_FILE))?;
        let mut m = Manifest::new("index build", None, &serde_json::json!({ "provider": self.provider, "dimension": self.dimension }));
        m.outputs.insert(INDEX_FILE.to_string(), sha256_hex(&bytes));
        m.summary = serde_json::json!({
            "format_version": self.version,
            "docs": self.docs.len(),
            "chunks": self.chunks.len(),
            "chunk_size": self.chunk_size,
        });
        m.write(dir)?;
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self, LibraryError> {
        let index: Index = serde_json::from_slice(&std::fs::read(dir.join(INDEX_FILE))?)?;
        if index.version != INDEX_FORMAT_VERSION {
            return Err(LibraryError::Version(index.version));
        }
        Ok(index)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievalHit {
    pub doc_id: usize,
    pub chunk_id: usize,
    pub task_name: String,
    pub text: String,
    pub similarity: f64,
    pub keyword: f64,
}

fn dot(a: &[f32], b: &[f32]) -> f64 {
    a.iter().zip(b).map(|(x, y)| *x as f64 * *y as f64).sum()
}

/// Keyword score of a task name against the query: above 1 for whole-name
/// containment (longer names higher), the overlap fraction otherwise.
pub fn keyword_score(task_name: &str, query: &[String]) -> f64 {
    let name = keywords(task_name);
    if name.is_empty() {
        return 0.0;
    }
    if contains_run(query, &name) {
        return 1.0 + name.len() as f64;
    }
    let q: HashSet<&String> = query.iter().collect();
    name.iter().filter(|t| q.contains(t)).count() as f64 / name.len() as f64 * 0.99
}

fn query_vector(index: &Index, provider: &dyn EmbeddingProvider, query: &str) -> Result<Vec<f32>, LibraryError> {
    if provider.name() != index.provider {
        return Err(LibraryError::ProviderMismatch { built: index.provider.clone(), query: provider.name() });
    }
    Ok(provider.embed(&[query])?.pop().expect("one vector per text"))
}

fn hit(index: &Index, c: &Chunk, similarity: f64, keyword: f64) -> RetrievalHit {
    RetrievalHit { doc_id: c.doc_id, chunk_id: c.chunk_id, task_name: index.docs[c.doc_id].task_name.clone(), text: c.text.clone(), similarity, keyword }
}

fn by_similarity(a: &RetrievalHit, b: &RetrievalHit) -> Ordering {
    b.similarity.total_cmp(&a.similarity).then(a.doc_id.cmp(&b.doc_id)).then(a.chunk_id.cmp(&b.chunk_id))
}

/// Ranking by cosine similarity alone.
pub fn retrieve_similarity(index: &Index, provider: &dyn EmbeddingProvider, query: &str, k: usize) -> Result<Vec<RetrievalHit>, LibraryError> {
    if k == 0 {
        return Err(LibraryError::InvalidK);
    }
    let q = query_vector(index, provider, query)?;
    let mut hits: Vec<RetrievalHit> = index.chunks.iter().map(|c| hit(index, c, dot(&q, &c.vector), 0.0)).collect();
    hits.sort_by(by_similarity);
    hits.truncate(k);
    Ok(hits)
}

/// Cosine prefilter to `max(4k, 16)` candidates, then keyword re-rank on
/// task names. Documents whose whole name occurs in the query always join
/// the candidates.
pub fn retrieve(index: &Index, provider: &dyn EmbeddingProvider, query: &str, k: usize, task_hint: Option<&str>) -> Result<Vec<RetrievalHit>, LibraryError> {
    if k == 0 {
        return Err(LibraryError::InvalidK);
    }
    let q = query_vector(index, provider, query)?;
    let mut terms = keywords(query);
    if let Some(h) = task_hint {
        terms.push(String::new());
        terms.extend(keywords(h));
    }
    let mut all: Vec<RetrievalHit> = index.chunks.iter().map(|c| hit(index, c, dot(&q, &c.vector), keyword_score(&index.docs[c.doc_id].task_name, &terms))).collect();
    all.sort_by(by_similarity);
    let m = (4 * k).max(16);
    let mut candidates: Vec<RetrievalHit> = all.iter().take(m).cloned().collect();
    candidates.extend(all.into_iter().skip(m).filter(|h| h.keyword > 1.0));
    candidates.sort_by(|a, b| b.keyword.total_cmp(&a.keyword).then_with(|| by_similarity(a, b)));
    candidates.truncate(k);
    Ok(candidates)
}

/// Tasks the generator was trained on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InDomainList {
    pub tasks: BTreeSet<TaskId>,
}

impl Default for InDomainList {
    fn default() -> Self {
        InDomainList { tasks: TaskId::CORE.iter().copied().collect() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "domain", content = "task", rename_all = "snake_case")]
pub enum Domain {
    InDomain(TaskId),
    OutOfDomain,
}

/// Names and aliases by which queries refer to each task.
pub fn task_aliases(task: TaskId) -> &'static [&'static str] {
    use TaskId as T;
    match task {
        T::Bipartite => &["bipartite", "2-colorable", "two colorable", "2-colourable", "bicolorable"],
        T::TopologicalSort => &["topological sort", "topological order", "topological ordering", "topologically sort"],
        T::ShortestPath => &["shortest path", "cheapest path", "minimum weight path"],
        T::HamiltonPath => &["hamilton path", "hamiltonian path"],
        T::MaxFlow => &["maximum flow", "max flow", "max-flow"],
        T::ClusteringCoefficient => &["clustering coefficient", "local clustering"],
        T::CommonNeighbors => &["common neighbors", "common neighbours", "shared neighbors"],
        T::StronglyConnectedComponents => &["strongly connected components", "strongly connected component", "scc"],
        T::Connectivity => &["connectivity", "connected", "reachable", "path between"],
        T::EulerPath => &["euler path", "eulerian path", "euler trail", "eulerian trail"],
        T::Diameter => &["diameter", "longest shortest path"],
        T::Regular => &["regular graph", "regular", "same degree"],
        T::DistanceRegular => &["distance regular", "distance-regular"],
        T::CycleDetection => &["cycle", "cycles", "contains a cycle"],
        T::MaxClique => &["maximum clique", "max clique", "largest clique"],
        T::MaxIndependentSet => &["maximum independent set", "independent set", "max independent set"],
        T::MinVertexCover => &["minimum vertex cover", "vertex cover", "min vertex cover"],
        T::MinEdgeCover => &["minimum edge cover", "edge cover", "min edge cover"],
        T::KCore => &["k-core", "k core", "core decomposition", "core"],
        T::PageRank => &["pagerank", "page rank"],
        T::SingleSourceShortestPath => &["single source shortest path", "single-source shortest paths", "shortest path lengths from", "shortest path distance", "shortest path distances", "distances from"],
    }
}

/// The task a query names: the earliest alias occurrence, longer aliases
/// first at the same position.
pub fn match_task(query: &str) -> Option<TaskId> {
    let q = tokens(query);
    let mut best: Option<(usize, std::cmp::Reverse<usize>, TaskId)> = None;
    for &t in TaskId::ALL {
        for alias in task_aliases(t) {
            let a = tokens(alias);
            if a.is_empty() || a.len() > q.len() {
                continue;
            }
            if let Some(pos) = q.windows(a.len()).position(|w| w == a.as_slice()) {
                let key = (pos, std::cmp::Reverse(a.len()), t);
                if best.is_none_or(|b| (key.0, key.1) < (b.0, b.1)) {
                    best = Some(key);
                }
            }
        }
    }
    best.map(|(_, _, t)| t)
}

pub fn classify_domain(query: &str, in_domain: &InDomainList) -> Domain {
    match match_task(query) {
        Some(t) if in_domain.tasks.contains(&t) => Domain::InDomain(t),
        _ => Domain::OutOfDomain,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(id: usize, name: &str, text: &str) -> LibraryDoc {
        LibraryDoc { doc_id: id, task_name: name.into(), document: text.into() }
    }

    #[test]
    fn chunk_size_is_the_longest_record() {
        let docs = vec![doc(0, "a", &"x".repeat(100)), doc(1, "b", &"y".repeat(200)), doc(2, "c", &"z".repeat(300))];
        let idx = build_index(docs, &HashingEmbedder::default()).unwrap();
        assert_eq!((idx.chunk_size, idx.chunks.len()), (300, 3));
        for c in &idx.chunks {
            let n: f64 = c.vector.iter().map(|x| (*x as f64).powi(2)).sum();
            assert!((n - 1.0).abs() < 1e-5);
        }
    }

    #[test]
    fn empty_csv_is_empty_library() {
        assert!(matches!(read_csv("task_name,document\n".as_bytes()), Err(LibraryError::EmptyLibrary)));
        assert!(matches!(read_csv("name,text\nx,y\n".as_bytes()), Err(LibraryError::CsvError { row: 0, .. })));
        assert!(matches!(read_csv("task_name,document\n,y\n".as_bytes()), Err(LibraryError::CsvError { row: 1, .. })));
    }

    #[test]
    fn maximum_beats_maximal() {
        let docs = vec![
            doc(0, "maximal clique", "Find a maximal clique: a clique that cannot be extended. Greedy code."),
            doc(1, "maximum clique", "Find the maximum clique: the largest clique. Branch and bound code."),
        ];
        let e = HashingEmbedder::default();
        let idx = build_index(docs, &e).unwrap();
        assert_eq!(retrieve(&idx, &e, "find the maximum clique", 1, None).unwrap()[0].task_name, "maximum clique");
        let no_overlap = retrieve(&idx, &e, "zebra quantum", 2, None).unwrap();
        assert!(no_overlap.iter().all(|h| h.keyword == 0.0));
        assert!(no_overlap[0].similarity >= no_overlap[1].similarity);
    }

    #[test]
    fn csv_round_trip_from_catalog() {
        let text = catalog_csv(&crate::forge::builtin_catalog());
        let docs = read_csv(text.as_bytes()).unwrap();
        assert_eq!(docs.len(), crate::forge::builtin_catalog().len());
        assert_eq!(docs[0].task_name, "bipartite check");
    }

    #[test]
    fn domain_routing() {
        let list = InDomainList::default();
        assert_eq!(classify_domain("Is this graph bipartite?", &list), Domain::InDomain(TaskId::Bipartite));
        assert_eq!(classify_domain("is it 2-colorable", &list), Domain::InDomain(TaskId::Bipartite));
        assert_eq!(classify_domain("find a minimum vertex cover", &list), Domain::OutOfDomain);
        assert_eq!(classify_domain("single source shortest path lengths", &list), Domain::OutOfDomain);
        assert_eq!(classify_domain("list the strongly connected components", &list), Domain::InDomain(TaskId::StronglyConnectedComponents));
        assert_eq!(classify_domain("hello", &list), Domain::OutOfDomain);
    }

    #[test]
    fn save_load_is_byte_stable() {
        let dir = tempfile::tempdir().unwrap();
        let e = HashingEmbedder::default();
        let idx = build_index(read_csv(catalog_csv(&crate::forge::builtin_catalog()).as_bytes()).unwrap(), &e).unwrap();
        idx.save(dir.path()).unwrap();
        let first = std::fs::read(dir.path().join(INDEX_FILE)).unwrap();
        assert_eq!(Index::load(dir.path()).unwrap(), idx);
        idx.save(dir.path()).unwrap();
        assert_eq!(std::fs::read(dir.path().join(INDEX_FILE)).unwrap(), first);
        assert!(matches!(retrieve(&idx, &HashingEmbedder { dimension: 64 }, "x", 1, None), Err(LibraryError::ProviderMismatch { .. })));
    }
}
