//! Graph data model and seeded Erdős–Rényi generation.

use std::fmt;
use std::str::FromStr;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::rng;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("edge endpoint {node} out of range for {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("edge ({0}, {1}) has no weight but the graph kind is weighted")]
    MissingWeight(usize, usize),
    #[error("edge ({0}, {1}) carries a weight but the graph kind is unweighted")]
    UnexpectedWeight(usize, usize),
    #[error("edge ({0}, {1}) has non-positive weight")]
    NonPositiveWeight(usize, usize),
    #[error("bipartite graph needs a partition covering all {0} nodes")]
    MissingPartition(usize),
    #[error("partition given for a non-bipartite kind")]
    UnexpectedPartition,
    #[error("edge ({0}, {1}) joins two nodes of the same part")]
    IntraPartEdge(usize, usize),
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
    #[error("unknown graph kind {0:?}")]
    UnknownKind(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphKind {
    Undirected,
    Directed,
    Bipartite,
    WeightedUndirected,
    WeightedDirected,
}

impl GraphKind {
    pub const ALL: [GraphKind; 5] = [
        GraphKind::Undirected,
        GraphKind::Directed,
        GraphKind::Bipartite,
        GraphKind::WeightedUndirected,
        GraphKind::WeightedDirected,
    ];

    pub fn is_directed(self) -> bool {
        matches!(self, GraphKind::Directed | GraphKind::WeightedDirected)
    }

    pub fn is_weighted(self) -> bool {
        matches!(self, GraphKind::WeightedUndirected | GraphKind::WeightedDirected)
    }

    pub fn name(self) -> &'static str {
        match self {
            GraphKind::Undirected => "undirected",
            GraphKind::Directed => "directed",
            GraphKind::Bipartite => "bipartite",
            GraphKind::WeightedUndirected => "weighted-undirected",
            GraphKind::WeightedDirected => "weighted-directed",
        }
    }
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for GraphKind {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GraphKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| GraphError::UnknownKind(s.to_string()))
    }
}

/// Side of a bipartite partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    U,
    V,
}

/// Digest of a graph's kind, size, edge set, weights and partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GraphHash(pub u64);

impl fmt::Display for GraphHash {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

impl FromStr for GraphHash {
    type Err = std::num::ParseIntError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        u64::from_str_radix(s, 16).map(GraphHash)
    }
}

impl Serialize for GraphHash {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GraphHash {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// An immutable simple graph on nodes `0..n`.
///
/// Undirected edges are stored once as `(min, max)`; the edge list is kept
/// sorted so equality, hashing and lookups are canonical.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct Graph {
    kind: GraphKind,
    n: usize,
    edges: Vec<(usize, usize)>,
    weights: Vec<u64>,
    partition: Option<Vec<Side>>,
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    kind: GraphKind,
    n: usize,
    edges: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    weights: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    partition: Option<Vec<Side>>,
}

impl TryFrom<RawGraph> for Graph {
    type Error = GraphError;

    fn try_from(raw: RawGraph) -> Result<Self, Self::Error> {
        let edges = if raw.kind.is_weighted() {
            if raw.weights.len() != raw.edges.len() {
                let (u, v) = raw.edges.get(raw.weights.len()).copied().unwrap_or((0, 0));
                return Err(GraphError::MissingWeight(u, v));
            }
            raw.edges
                .iter()
                .zip(&raw.weights)
                .map(|(&(u, v), &w)| (u, v, Some(w)))
                .collect()
        } else {
            raw.edges.iter().map(|&(u, v)| (u, v, None)).collect()
        };
        Graph::from_parts(raw.kind, raw.n, edges, raw.partition)
    }
}

impl From<Graph> for RawGraph {
    fn from(g: Graph) -> Self {
        RawGraph {
            kind: g.kind,
            n: g.n,
            edges: g.edges,
            weights: g.weights,
            partition: g.partition,
        }
    }
}

impl Graph {
    /// Validating constructor shared by every other one.
    pub fn from_parts(
        kind: GraphKind,
        n: usize,
        edges: Vec<(usize, usize, Option<u64>)>,
        partition: Option<Vec<Side>>,
    ) -> Result<Self, GraphError> {
        match (&partition, kind) {
            (None, GraphKind::Bipartite) => return Err(GraphError::MissingPartition(n)),
            (Some(p), GraphKind::Bipartite) if p.len() != n => {
                return Err(GraphError::MissingPartition(n))
            }
            (Some(_), k) if k != GraphKind::Bipartite => return Err(GraphError::UnexpectedPartition),
            _ => {}
        }
        let mut list = Vec::with_capacity(edges.len());
        for (u, v, w) in edges {
            for node in [u, v] {
                if node >= n {
                    return Err(GraphError::NodeOutOfRange { node, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            match (kind.is_weighted(), w) {
                (true, None) => return Err(GraphError::MissingWeight(u, v)),
                (true, Some(0)) => return Err(GraphError::NonPositiveWeight(u, v)),
                (false, Some(_)) => return Err(GraphError::UnexpectedWeight(u, v)),
                _ => {}
            }
            if let Some(p) = &partition {
                if p[u] == p[v] {
                    return Err(GraphError::IntraPartEdge(u, v));
                }
            }
            let (a, b) = if kind.is_directed() { (u, v) } else { (u.min(v), u.max(v)) };
            list.push((a, b, w.unwrap_or(0)));
        }
        list.sort_unstable();
        if let Some(pair) = list.windows(2).find(|p| (p[0].0, p[0].1) == (p[1].0, p[1].1)) {
            return Err(GraphError::DuplicateEdge(pair[0].0, pair[0].1));
        }
        let weights = if kind.is_weighted() {
            list.iter().map(|e| e.2).collect()
        } else {
            Vec::new()
        };
        Ok(Graph {
            kind,
            n,
            edges: list.into_iter().map(|(u, v, _)| (u, v)).collect(),
            weights,
            partition,
        })
    }

    /// Unweighted, non-bipartite graph.
    pub fn new(kind: GraphKind, n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        Self::from_parts(kind, n, edges.iter().map(|&(u, v)| (u, v, None)).collect(), None)
    }

    pub fn undirected(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        Self::new(GraphKind::Undirected, n, edges)
    }

    pub fn directed(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        Self::new(GraphKind::Directed, n, edges)
    }

    pub fn weighted(
        kind: GraphKind,
        n: usize,
        edges: &[(usize, usize, u64)],
    ) -> Result<Self, GraphError> {
        Self::from_parts(kind, n, edges.iter().map(|&(u, v, w)| (u, v, Some(w))).collect(), None)
    }

    pub fn bipartite(
        n: usize,
        partition: Vec<Side>,
        edges: &[(usize, usize)],
    ) -> Result<Self, GraphError> {
        Self::from_parts(
            GraphKind::Bipartite,
            n,
            edges.iter().map(|&(u, v)| (u, v, None)).collect(),
            Some(partition),
        )
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn partition(&self) -> Option<&[Side]> {
        self.partition.as_deref()
    }

    /// Edges with their weight (1 for unweighted kinds).
    pub fn weighted_edges(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.edges
            .iter()
            .enumerate()
            .map(|(i, &(u, v))| (u, v, self.weights.get(i).copied().unwrap_or(1)))
    }

    pub fn is_directed(&self) -> bool {
        self.kind.is_directed()
    }

    fn key(&self, u: usize, v: usize) -> (usize, usize) {
        if self.is_directed() {
            (u, v)
        } else {
            (u.min(v), u.max(v))
        }
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.binary_search(&self.key(u, v)).is_ok()
    }

    /// Weight of edge `u -> v` (or `{u, v}`); unweighted edges weigh 1.
    pub fn weight(&self, u: usize, v: usize) -> Option<u64> {
        let i = self.edges.binary_search(&self.key(u, v)).ok()?;
        Some(self.weights.get(i).copied().unwrap_or(1))
    }

    /// Out-neighbours for directed kinds, neighbours otherwise. Sorted.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            if !self.is_directed() {
                adj[v].push(u);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Weighted out-adjacency (neighbours with weights).
    pub fn weighted_adjacency(&self) -> Vec<Vec<(usize, u64)>> {
        let mut adj = vec![Vec::new(); self.n];
        for (u, v, w) in self.weighted_edges() {
            adj[u].push((v, w));
            if !self.is_directed() {
                adj[v].push((u, w));
            }
        }
        adj
    }

    /// In-neighbours; equals `adjacency()` for undirected kinds.
    pub fn reverse_adjacency(&self) -> Vec<Vec<usize>> {
        if !self.is_directed() {
            return self.adjacency();
        }
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[v].push(u);
        }
        adj
    }

    /// Degree of every node ignoring direction.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    /// Canonical 64-bit digest. Node labels are not normalized.
    pub fn canonical_hash(&self) -> GraphHash {
        let mut h = Sha256::new();
        h.update(b"graphwild/graph/v1\0");
        h.update(self.kind.name().as_bytes());
        h.update((self.n as u64).to_le_bytes());
        for (u, v, w) in self.weighted_edges() {
            h.update((u as u64).to_le_bytes());
            h.update((v as u64).to_le_bytes());
            if self.kind.is_weighted() {
                h.update(w.to_le_bytes());
            }
        }
        if let Some(p) = &self.partition {
            h.update(p.iter().map(|s| matches!(s, Side::V) as u8).collect::<Vec<_>>());
        }
        let digest = h.finalize();
        let mut first = [0u8; 8];
        first.copy_from_slice(&digest[..8]);
        GraphHash(u64::from_le_bytes(first))
    }

    /// Copy of this graph with every isolated node joined to a random other
    /// node. Only meaningful for undirected, unweighted-or-weighted kinds.
    pub fn attach_isolated(&self, seed: u64, weight_range: (u64, u64)) -> Graph {
        let mut rng = rng::seeded(seed);
        let deg = self.degrees();
        let mut edges: Vec<(usize, usize, Option<u64>)> = self
            .edges
            .iter()
            .enumerate()
            .map(|(i, &(u, v))| (u, v, self.weights.get(i).copied()))
            .collect();
        if self.n < 2 {
            return self.clone();
        }
        let mut present: std::collections::HashSet<(usize, usize)> = self.edges.iter().copied().collect();
        for v in (0..self.n).filter(|&v| deg[v] == 0) {
            let candidates: Vec<usize> = match &self.partition {
                Some(p) => (0..self.n).filter(|&u| p[u] != p[v]).collect(),
                None => (0..self.n).filter(|&u| u != v).collect(),
            };
            let Some(&u) = candidates.choose(&mut rng) else { continue };
            let key = self.key(u, v);
            if present.insert(key) {
                let w = self.kind.is_weighted().then(|| rng.random_range(weight_range.0..=weight_range.1));
                edges.push((key.0, key.1, w));
            }
        }
        Graph::from_parts(self.kind, self.n, edges, self.partition.clone())
            .expect("attaching isolated nodes preserves graph invariants")
    }
}

/// Parameters of the Erdős–Rényi model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawErConfig")]
pub struct ErConfig {
    n: usize,
    p: f64,
    kind: GraphKind,
    seed: u64,
    weight_range: (u64, u64),
}

#[derive(Deserialize)]
struct RawErConfig {
    n: usize,
    p: f64,
    kind: GraphKind,
    seed: u64,
    #[serde(default = "default_weight_range")]
    weight_range: (u64, u64),
}

fn default_weight_range() -> (u64, u64) {
    ErConfig::DEFAULT_WEIGHT_RANGE
}

impl TryFrom<RawErConfig> for ErConfig {
    type Error = GraphError;

    fn try_from(r: RawErConfig) -> Result<Self, Self::Error> {
        ErConfig::new(r.n, r.p, r.kind, r.seed)?.with_weight_range(r.weight_range.0, r.weight_range.1)
    }
}

impl ErConfig {
    pub const DEFAULT_WEIGHT_RANGE: (u64, u64) = (1, 10);

    pub fn new(n: usize, p: f64, kind: GraphKind, seed: u64) -> Result<Self, GraphError> {
        if n < 1 {
            return Err(GraphError::InvalidConfig("n must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(GraphError::InvalidConfig(format!("p = {p} outside [0, 1]")));
        }
        Ok(ErConfig { n, p, kind, seed, weight_range: Self::DEFAULT_WEIGHT_RANGE })
    }

    pub fn with_weight_range(mut self, lo: u64, hi: u64) -> Result<Self, GraphError> {
        if lo < 1 || hi < lo {
            return Err(GraphError::InvalidConfig(format!("weight range [{lo}, {hi}]")));
        }
        self.weight_range = (lo, hi);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn weight_range(&self) -> (u64, u64) {
        self.weight_range
    }
}

/// Nodes `0..ceil(n/2)` form part U, the rest part V.
pub fn bipartite_split(n: usize) -> Vec<Side> {
    let u_size = n.div_ceil(2);
    (0..n).map(|i| if i < u_size { Side::U } else { Side::V }).collect()
}

/// Enumerates candidate node pairs of one kind by linear index.
enum PairSpace {
    /// `u < v`, row-major.
    Unordered { n: usize },
    /// `u != v`, row-major.
    Ordered { n: usize },
    /// `u` in `0..u_size`, `v` in `u_size..n`.
    Cross { u_size: usize, v_size: usize },
}

impl PairSpace {
    fn for_kind(kind: GraphKind, n: usize) -> Self {
        match kind {
            GraphKind::Undirected | GraphKind::WeightedUndirected => PairSpace::Unordered { n },
            GraphKind::Directed | GraphKind::WeightedDirected => PairSpace::Ordered { n },
            GraphKind::Bipartite => {
                let u_size = n.div_ceil(2);
                PairSpace::Cross { u_size, v_size: n - u_size }
            }
        }
    }

    fn len(&self) -> u64 {
        match *self {
            PairSpace::Unordered { n } => (n as u64) * (n as u64).saturating_sub(1) / 2,
            PairSpace::Ordered { n } => (n as u64) * (n as u64).saturating_sub(1),
            PairSpace::Cross { u_size, v_size } => (u_size as u64) * (v_size as u64),
        }
    }
}

/// Walks pair indices in increasing order.
struct PairCursor<'a> {
    space: &'a PairSpace,
    row: u64,
    row_start: u64,
}

impl<'a> PairCursor<'a> {
    fn new(space: &'a PairSpace) -> Self {
        PairCursor { space, row: 0, row_start: 0 }
    }

    /// Indices passed to `at` must be non-decreasing.
    fn at(&mut self, idx: u64) -> (usize, usize) {
        match *self.space {
            PairSpace::Unordered { n } => {
                let n = n as u64;
                while idx >= self.row_start + (n - 1 - self.row) {
                    self.row_start += n - 1 - self.row;
                    self.row += 1;
                }
                let u = self.row;
                (u as usize, (u + 1 + idx - self.row_start) as usize)
            }
            PairSpace::Ordered { n } => {
                let n = n as u64;
                let u = idx / (n - 1);
                let j = idx % (n - 1);
                let v = if j < u { j } else { j + 1 };
                (u as usize, v as usize)
            }
            PairSpace::Cross { u_size, v_size } => {
                let v_size = v_size as u64;
                ((idx / v_size) as usize, u_size + (idx % v_size) as usize)
            }
        }
    }
}

/// Seeded Erdős–Rényi graph: every candidate pair is included
/// independently with probability `p`.
///
/// Pairs are visited through geometric skips, which gives the same
/// distribution as one Bernoulli trial per pair but runs in time
/// proportional to the number of edges produced.
pub fn generate_er(config: &ErConfig) -> Graph {
    let mut rng = rng::seeded(config.seed);
    let space = PairSpace::for_kind(config.kind, config.n);
    let total = space.len();
    let (lo, hi) = config.weight_range;
    let weighted = config.kind.is_weighted();
    let mut edges = Vec::new();
    let mut cursor = PairCursor::new(&space);
    let mut emit = |idx: u64, rng: &mut rng::StdRng, edges: &mut Vec<(usize, usize, Option<u64>)>| {
        let (u, v) = cursor.at(idx);
        let w = weighted.then(|| rng.random_range(lo..=hi));
        edges.push((u, v, w));
    };
    if config.p >= 1.0 {
        for idx in 0..total {
            emit(idx, &mut rng, &mut edges);
        }
    } else if config.p > 0.0 {
        let log_q = (1.0 - config.p).ln();
        let mut idx: u64 = 0;
        let mut first = true;
        loop {
            let r: f64 = rng.random();
            let skip = ((1.0 - r).ln() / log_q).floor();
            if !skip.is_finite() || skip >= total as f64 {
                break;
            }
            let step = skip as u64 + u64::from(!first);
            first = false;
            idx = match idx.checked_add(step) {
                Some(i) if i < total => i,
                _ => break,
            };
            emit(idx, &mut rng, &mut edges);
        }
    }
    let partition = (config.kind == GraphKind::Bipartite).then(|| bipartite_split(config.n));
    Graph::from_parts(config.kind, config.n, edges, partition)
        .expect("generated pairs are distinct, in range and loop-free")
}

/// Seeded random DAG: an undirected ER draw oriented along a random
/// topological order. `config.kind` must be directed.
pub fn generate_er_dag(config: &ErConfig) -> Result<Graph, GraphError> {
    if !config.kind.is_directed() {
        return Err(GraphError::InvalidConfig("DAG generation needs a directed kind".into()));
    }
    let base_kind = if config.kind.is_weighted() {
        GraphKind::WeightedUndirected
    } else {
        GraphKind::Undirected
    };
    let base = generate_er(&ErConfig { kind: base_kind, ..config.clone() });
    let mut order: Vec<usize> = (0..config.n).collect();
    order.shuffle(&mut rng::seeded(rng::derive(config.seed, &[0xda6])));
    let mut rank = vec![0; config.n];
    for (r, &v) in order.iter().enumerate() {
        rank[v] = r;
    }
    let edges = base
        .weighted_edges()
        .map(|(u, v, w)| {
            let (a, b) = if rank[u] < rank[v] { (u, v) } else { (v, u) };
            (a, b, config.kind.is_weighted().then_some(w))
        })
        .collect();
    Graph::from_parts(config.kind, config.n, edges, None)
}
