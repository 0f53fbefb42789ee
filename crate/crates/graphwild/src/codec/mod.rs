//! Textual graph renderings and their inverse parsers.
//!
//! Every format starts with a header that declares the graph kind and node
//! count. Line grammars:
//!
//! ```text
//! header      = "The graph is " KIND " with " N " node" ["s"] [", numbered from 0 to " N-1] "."
//! partition   = "The nodes are split into two parts: U = {" ids "} and V = {" ids "}."
//! edge-list   = "The edges are:" NL ( "(" u ", " v [", " w] ")" NL )*  |  "There are no edges."
//! adj-list    = "Adjacency list (node: neighbors):" NL ( u ":" [ " " v [" (weight " w ")"] (", " ...)* ] NL ){n}
//! adj-matrix  = "Adjacency matrix" ... ":" NL ( x ( " " x ){n-1} NL ){n}
//! nl-template = "The edges are described below." NL ( sentence NL )*  |  "There are no edges."
//! ```
//!
//! Scenario renderings use their own header (entity roster, link kind line,
//! optional group line) followed by one relation sentence per edge.

pub mod edge_file;
pub mod scenario;

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError, GraphHash, GraphKind, Side};
use crate::rng;

pub use edge_file::{parse_edge_file, parse_edge_file_with, render_to_file, EdgeFileOptions};
pub use scenario::Domain;

#[derive(Debug, Error)]
pub enum CodecError {
    #[error("{format} cannot express a {kind} graph")]
    IncompatibleFormat { format: RenderFormat, kind: GraphKind },
    #[error("parse error at line {line}: {reason}")]
    ParseError { line: usize, reason: String },
    #[error("cannot infer the graph: {0}")]
    AmbiguousGraph(String),
    #[error("unknown render format {0:?}")]
    UnknownFormat(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn perr(line: usize, reason: impl Into<String>) -> CodecError {
    CodecError::ParseError { line, reason: reason.into() }
}

/// Which textual format a rendering uses.
///
/// String form: `edge-list`, `adjacency-list`, `adjacency-matrix`, `nl:<id>`,
/// `scenario:<domain>:<id>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RenderFormat {
    EdgeList,
    AdjacencyList,
    AdjacencyMatrix,
    NlTemplate(u8),
    ScenarioTemplate(Domain, u8),
}

impl RenderFormat {
    /// Every format in the shipped catalogs.
    pub fn all() -> Vec<RenderFormat> {
        let mut v = vec![RenderFormat::EdgeList, RenderFormat::AdjacencyList, RenderFormat::AdjacencyMatrix];
        v.extend((0..NL_TEMPLATES.len() as u8).map(RenderFormat::NlTemplate));
        v.extend(scenario::templates().iter().map(|t| RenderFormat::ScenarioTemplate(t.domain, t.id)));
        v
    }

    /// Whether this format can express graphs of `kind`.
    pub fn supports(self, kind: GraphKind) -> bool {
        match self {
            RenderFormat::NlTemplate(id) => NL_TEMPLATES
                .get(id as usize)
                .is_some_and(|t| !kind.is_weighted() || t.weighted_undirected.is_some()),
            RenderFormat::ScenarioTemplate(d, id) => scenario::template(d, id).is_some(),
            _ => true,
        }
    }
}

impl fmt::Display for RenderFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RenderFormat::EdgeList => f.write_str("edge-list"),
            RenderFormat::AdjacencyList => f.write_str("adjacency-list"),
            RenderFormat::AdjacencyMatrix => f.write_str("adjacency-matrix"),
            RenderFormat::NlTemplate(id) => write!(f, "nl:{id}"),
            RenderFormat::ScenarioTemplate(d, id) => write!(f, "scenario:{d}:{id}"),
        }
    }
}

impl FromStr for RenderFormat {
    type Err = CodecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unknown = || CodecError::UnknownFormat(s.to_string());
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["edge-list"] => Ok(RenderFormat::EdgeList),
            ["adjacency-list"] => Ok(RenderFormat::AdjacencyList),
            ["adjacency-matrix"] => Ok(RenderFormat::AdjacencyMatrix),
            ["nl", id] => id.parse().map(RenderFormat::NlTemplate).map_err(|_| unknown()),
            ["scenario", d, id] => Ok(RenderFormat::ScenarioTemplate(
                d.parse().map_err(|_| unknown())?,
                id.parse().map_err(|_| unknown())?,
            )),
            _ => Err(unknown()),
        }
    }
}

impl Serialize for RenderFormat {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RenderFormat {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// A graph rendered as problem text, plus what is needed to invert it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rendering {
    pub text: String,
    pub format: RenderFormat,
    pub seed: u64,
    pub graph_hash: GraphHash,
    /// Entity name of each node id (scenario formats only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name_map: Option<Vec<String>>,
}

/// Sidecar document written next to each rendering.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderingMeta {
    pub format: RenderFormat,
    pub seed: u64,
    pub graph_hash: GraphHash,
    pub name_map: Option<Vec<String>>,
}

impl Rendering {
    pub fn meta(&self) -> RenderingMeta {
        RenderingMeta {
            format: self.format,
            seed: self.seed,
            graph_hash: self.graph_hash,
            name_map: self.name_map.clone(),
        }
    }
}

struct NlTemplate {
    undirected: &'static str,
    directed: &'static str,
    weighted_undirected: Option<&'static str>,
    weighted_directed: Option<&'static str>,
}

const NL_TEMPLATES: &[NlTemplate] = &[
    NlTemplate {
        undirected: "Node {a} is connected to node {b}.",
        directed: "Node {a} has a directed edge to node {b}.",
        weighted_undirected: Some("Node {a} is connected to node {b} with weight {w}."),
        weighted_directed: Some("Node {a} has a directed edge to node {b} with weight {w}."),
    },
    NlTemplate {
        undirected: "There is an edge between node {a} and node {b}.",
        directed: "There is an edge from node {a} to node {b}.",
        weighted_undirected: Some("There is an edge between node {a} and node {b} of weight {w}."),
        weighted_directed: Some("There is an edge from node {a} to node {b} of weight {w}."),
    },
    NlTemplate {
        undirected: "{a} -- {b}",
        directed: "{a} -> {b}",
        weighted_undirected: None,
        weighted_directed: None,
    },
];

const EDGE_LIST_PLAIN: &str = "({a}, {b})";
const EDGE_LIST_WEIGHTED: &str = "({a}, {b}, {w})";
const NO_EDGES: &str = "There are no edges.";

fn kind_phrase(kind: GraphKind) -> &'static str {
    match kind {
        GraphKind::Undirected => "an undirected graph",
        GraphKind::Directed => "a directed graph",
        GraphKind::Bipartite => "a bipartite graph",
        GraphKind::WeightedUndirected => "an undirected weighted graph",
        GraphKind::WeightedDirected => "a directed weighted graph",
    }
}

fn fill(pattern: &str, a: &str, b: &str, w: Option<u64>) -> String {
    let s = pattern.replace("{a}", a).replace("{b}", b);
    match w {
        Some(w) => s.replace("{w}", &w.to_string()),
        None => s,
    }
}

/// Anchored regex for a `{a}`/`{b}`/`{w}` pattern.
fn pattern_regex(pattern: &str, node: &str) -> Regex {
    let mut re = String::from("^");
    let mut rest = pattern;
    while let Some(start) = rest.find('{') {
        re.push_str(&regex::escape(&rest[..start]));
        let end = start + rest[start..].find('}').expect("closed placeholder");
        re.push_str(match &rest[start..=end] {
            "{a}" | "{b}" => node,
            "{w}" => "([0-9]+)",
            other => panic!("unknown placeholder {other}"),
        });
        rest = &rest[end + 1..];
    }
    re.push_str(&regex::escape(rest));
    re.push('$');
    Regex::new(&re).expect("template regex compiles")
}

fn id_list(ids: impl Iterator<Item = usize>) -> String {
    ids.map(|i| i.to_string()).collect::<Vec<_>>().join(", ")
}

/// Render `g` as text. Edge order is a seeded shuffle.
pub fn render(g: &Graph, format: RenderFormat, seed: u64) -> Result<Rendering, CodecError> {
    if !format.supports(g.kind()) {
        return Err(CodecError::IncompatibleFormat { format, kind: g.kind() });
    }
    let mut rng = rng::seeded(seed);
    let mut edges: Vec<(usize, usize, u64)> = g.weighted_edges().collect();
    edges.shuffle(&mut rng);
    let weight = |w: u64| g.kind().is_weighted().then_some(w);
    let mut name_map = None;
    let text = match format {
        RenderFormat::ScenarioTemplate(domain, id) => {
            let t = scenario::template(domain, id).expect("checked by supports");
            let mut order: Vec<usize> = (0..t.names.len()).collect();
            order.shuffle(&mut rng);
            let names: Vec<String> = (0..g.node_count()).map(|i| t.entity_name(&order, i)).collect();
            let text = render_scenario(g, t, &names, &edges);
            name_map = Some(names);
            text
        }
        _ => {
            let mut lines = vec![common_header(g)];
            if let Some(p) = g.partition() {
                lines.push(partition_line(p));
            }
            match format {
                RenderFormat::EdgeList | RenderFormat::NlTemplate(_) => {
                    let (plain, weighted) = edge_patterns(format, g.kind());
                    if edges.is_empty() {
                        lines.push(NO_EDGES.to_string());
                    } else {
                        lines.push(if format == RenderFormat::EdgeList {
                            "The edges are:".to_string()
                        } else {
                            "The edges are described below.".to_string()
                        });
                        for &(u, v, w) in &edges {
                            let pat = if g.kind().is_weighted() { weighted.unwrap() } else { plain };
                            lines.push(fill(pat, &u.to_string(), &v.to_string(), weight(w)));
                        }
                    }
                }
                RenderFormat::AdjacencyList => {
                    lines.push("Adjacency list (node: neighbors):".to_string());
                    let mut adj: Vec<Vec<(usize, u64)>> = vec![Vec::new(); g.node_count()];
                    for &(u, v, w) in &edges {
                        adj[u].push((v, w));
                        if !g.is_directed() {
                            adj[v].push((u, w));
                        }
                    }
                    let mut nodes: Vec<usize> = (0..g.node_count()).collect();
                    nodes.shuffle(&mut rng);
                    for u in nodes {
                        let items: Vec<String> = adj[u]
                            .iter()
                            .map(|&(v, w)| match weight(w) {
                                Some(w) => format!("{v} (weight {w})"),
                                None => v.to_string(),
                            })
                            .collect();
                        if items.is_empty() {
                            lines.push(format!("{u}:"));
                        } else {
                            lines.push(format!("{u}: {}", items.join(", ")));
                        }
                    }
                }
                RenderFormat::AdjacencyMatrix => {
                    lines.push(if g.kind().is_weighted() {
                        "Adjacency matrix (row i, column j holds the weight of the edge from i to j; 0 means no edge):"
                            .to_string()
                    } else {
                        "Adjacency matrix (row i, column j is 1 if there is an edge from i to j, else 0):".to_string()
                    });
                    let n = g.node_count();
                    let mut m = vec![vec![0u64; n]; n];
                    for (u, v, w) in g.weighted_edges() {
                        m[u][v] = w;
                        if !g.is_directed() {
                            m[v][u] = w;
                        }
                    }
                    for row in m {
                        lines.push(row.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "));
                    }
                }
                RenderFormat::ScenarioTemplate(..) => unreachable!(),
            }
            lines.join("\n")
        }
    };
    Ok(Rendering { text, format, seed, graph_hash: g.canonical_hash(), name_map })
}

fn common_header(g: &Graph) -> String {
    let n = g.node_count();
    let nodes = if n == 1 { "node" } else { "nodes" };
    if n == 0 {
        format!("The graph is {} with 0 nodes.", kind_phrase(g.kind()))
    } else {
        format!("The graph is {} with {n} {nodes}, numbered from 0 to {}.", kind_phrase(g.kind()), n - 1)
    }
}

fn partition_line(p: &[Side]) -> String {
    let side = |s: Side| id_list((0..p.len()).filter(move |&i| p[i] == s));
    format!("The nodes are split into two parts: U = {{{}}} and V = {{{}}}.", side(Side::U), side(Side::V))
}

fn edge_patterns(format: RenderFormat, kind: GraphKind) -> (&'static str, Option<&'static str>) {
    match format {
        RenderFormat::EdgeList => (EDGE_LIST_PLAIN, Some(EDGE_LIST_WEIGHTED)),
        RenderFormat::NlTemplate(id) => {
            let t = &NL_TEMPLATES[id as usize];
            if kind.is_directed() {
                (t.directed, t.weighted_directed)
            } else {
                (t.undirected, t.weighted_undirected)
            }
        }
        _ => unreachable!("only edge-mention formats have edge patterns"),
    }
}

fn render_scenario(
    g: &Graph,
    t: &scenario::ScenarioTemplate,
    names: &[String],
    edges: &[(usize, usize, u64)],
) -> String {
    let n = g.node_count();
    let (verb, noun) = if n == 1 { ("is", t.singular) } else { ("are", t.plural) };
    let mut lines = vec![format!("In {}, there {verb} {n} {noun}: {}.", t.setting, names.join(", "))];
    lines.push(format!(
        "Links are {} and {}.",
        if g.is_directed() { "one-way" } else { "mutual" },
        if g.kind().is_weighted() { "weighted" } else { "unweighted" }
    ));
    if let Some(p) = g.partition() {
        let group = |s: Side| {
            let members: Vec<&str> = (0..n).filter(|&i| p[i] == s).map(|i| names[i].as_str()).collect();
            if members.is_empty() { "none".to_string() } else { members.join(", ") }
        };
        lines.push(format!(
            "The {} form two groups: group U has {}; group V has {}.",
            t.plural,
            group(Side::U),
            group(Side::V)
        ));
    }
    if edges.is_empty() {
        lines.push("No links are recorded.".to_string());
    }
    for &(u, v, w) in edges {
        let mut pattern = String::from(if g.is_directed() { t.one_way } else { t.mutual });
        if g.kind().is_weighted() {
            pattern.push_str(t.weight_clause);
        }
        pattern.push('.');
        lines.push(fill(&pattern, &names[u], &names[v], g.kind().is_weighted().then_some(w)));
    }
    lines.join("\n")
}

/// Parse a rendering back into the graph it encodes.
pub fn parse(r: &Rendering) -> Result<Graph, CodecError> {
    parse_text(&r.text, r.format)
}

/// Parse text that declares itself to be in `format`.
pub fn parse_text(text: &str, format: RenderFormat) -> Result<Graph, CodecError> {
    let lines: Vec<&str> = text.lines().map(str::trim_end).collect();
    match format {
        RenderFormat::ScenarioTemplate(d, id) => {
            let t = scenario::template(d, id).ok_or_else(|| CodecError::UnknownFormat(format.to_string()))?;
            parse_scenario(&lines, t)
        }
        _ => parse_structured(&lines, format),
    }
}

struct Cursor<'a> {
    lines: &'a [&'a str],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn next_nonblank(&mut self) -> Option<(usize, &'a str)> {
        while self.pos < self.lines.len() {
            let line = self.lines[self.pos].trim();
            self.pos += 1;
            if !line.is_empty() {
                return Some((self.pos, line));
            }
        }
        None
    }

    fn peek_nonblank(&self) -> Option<(usize, &'a str)> {
        let mut probe = Cursor { lines: self.lines, pos: self.pos };
        probe.next_nonblank()
    }

    fn line_no(&self) -> usize {
        self.pos.max(1)
    }
}

fn header_regex() -> Regex {
    Regex::new(
        r"^The graph is (an undirected graph|a directed graph|a bipartite graph|an undirected weighted graph|a directed weighted graph) with ([0-9]+) nodes?(?:, numbered from 0 to ([0-9]+))?\.$",
    )
    .expect("header regex")
}

fn parse_ids(s: &str, line: usize) -> Result<Vec<usize>, CodecError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|x| x.trim().parse::<usize>().map_err(|_| perr(line, format!("bad node id {x:?}"))))
        .collect()
}

fn partition_from_lists(
    n: usize,
    u: &[usize],
    v: &[usize],
    line: usize,
) -> Result<Vec<Side>, CodecError> {
    let mut part: Vec<Option<Side>> = vec![None; n];
    for (ids, side) in [(u, Side::U), (v, Side::V)] {
        for &i in ids {
            let slot = part.get_mut(i).ok_or_else(|| perr(line, format!("node {i} out of range")))?;
            if slot.replace(side).is_some() {
                return Err(perr(line, format!("node {i} listed twice in the partition")));
            }
        }
    }
    part.into_iter()
        .enumerate()
        .map(|(i, s)| s.ok_or_else(|| perr(line, format!("node {i} missing from the partition"))))
        .collect()
}

fn graph_err(line: usize, e: GraphError) -> CodecError {
    perr(line, e.to_string())
}

fn parse_structured(lines: &[&str], format: RenderFormat) -> Result<Graph, CodecError> {
    let mut cur = Cursor { lines, pos: 0 };
    let (line, header) = cur
        .next_nonblank()
        .ok_or_else(|| CodecError::AmbiguousGraph("empty text".into()))?;
    let caps = header_regex()
        .captures(header)
        .ok_or_else(|| CodecError::AmbiguousGraph(format!("no node-count header (line {line})")))?;
    let kind = GraphKind::ALL
        .into_iter()
        .find(|k| kind_phrase(*k) == &caps[1])
        .expect("regex alternation mirrors kind phrases");
    let n: usize = caps[2].parse().map_err(|_| perr(line, "node count overflow"))?;
    if let Some(last) = caps.get(3) {
        if n == 0 || last.as_str().parse::<usize>().ok() != Some(n - 1) {
            return Err(perr(line, "node range disagrees with node count"));
        }
    }
    if !format.supports(kind) {
        return Err(CodecError::IncompatibleFormat { format, kind });
    }
    let partition = if kind == GraphKind::Bipartite {
        let (line, text) = cur.next_nonblank().ok_or_else(|| perr(cur.line_no(), "missing partition line"))?;
        let re = Regex::new(r"^The nodes are split into two parts: U = \{([0-9, ]*)\} and V = \{([0-9, ]*)\}\.$")
            .expect("partition regex");
        let caps = re.captures(text).ok_or_else(|| perr(line, "malformed partition line"))?;
        Some(partition_from_lists(n, &parse_ids(&caps[1], line)?, &parse_ids(&caps[2], line)?, line)?)
    } else {
        None
    };
    let edges = match format {
        RenderFormat::EdgeList | RenderFormat::NlTemplate(_) => parse_edge_mentions(&mut cur, format, kind)?,
        RenderFormat::AdjacencyList => parse_adjacency_list(&mut cur, kind, n)?,
        RenderFormat::AdjacencyMatrix => parse_matrix(&mut cur, kind, n)?,
        RenderFormat::ScenarioTemplate(..) => unreachable!(),
    };
    let last_line = cur.line_no();
    Graph::from_parts(kind, n, edges, partition).map_err(|e| graph_err(last_line, e))
}

type EdgeTriples = Vec<(usize, usize, Option<u64>)>;

fn parse_edge_mentions(cur: &mut Cursor<'_>, format: RenderFormat, kind: GraphKind) -> Result<EdgeTriples, CodecError> {
    let (line, intro) = cur.next_nonblank().ok_or_else(|| perr(cur.line_no(), "missing edge section"))?;
    if intro == NO_EDGES {
        if let Some((line, _)) = cur.next_nonblank() {
            return Err(perr(line, "text after the empty edge section"));
        }
        return Ok(Vec::new());
    }
    let expected = if format == RenderFormat::EdgeList { "The edges are:" } else { "The edges are described below." };
    if intro != expected {
        return Err(perr(line, format!("expected {expected:?}")));
    }
    let (plain, weighted) = edge_patterns(format, kind);
    let pattern = if kind.is_weighted() { weighted.expect("supported") } else { plain };
    let re = pattern_regex(pattern, "([0-9]+)");
    let mut edges = Vec::new();
    while let Some((line, text)) = cur.next_nonblank() {
        let caps = re.captures(text).ok_or_else(|| perr(line, format!("unrecognized edge {text:?}")))?;
        let num = |i: usize| caps[i].parse::<u64>().map_err(|_| perr(line, "number overflow"));
        let w = if kind.is_weighted() { Some(num(3)?) } else { None };
        edges.push((num(1)? as usize, num(2)? as usize, w));
    }
    Ok(edges)
}

/// Turns a symmetric arc listing into undirected edges, rejecting asymmetry.
fn symmetrize(arcs: Vec<(usize, usize, Option<u64>)>, line: usize) -> Result<EdgeTriples, CodecError> {
    use std::collections::BTreeMap;
    let mut seen: BTreeMap<(usize, usize), Option<u64>> = BTreeMap::new();
    for (u, v, w) in arcs {
        if seen.insert((u, v), w).is_some() {
            return Err(perr(line, format!("arc {u} -> {v} listed twice")));
        }
    }
    let mut edges = Vec::new();
    for (&(u, v), &w) in &seen {
        match seen.get(&(v, u)) {
            Some(&w2) if w2 == w => {
                if u <= v {
                    edges.push((u, v, w));
                }
            }
            Some(_) => return Err(perr(line, format!("weights of {u}-{v} disagree between directions"))),
            None => return Err(perr(line, format!("undirected graph lists {u} -> {v} but not {v} -> {u}"))),
        }
    }
    Ok(edges)
}

fn parse_adjacency_list(cur: &mut Cursor<'_>, kind: GraphKind, n: usize) -> Result<EdgeTriples, CodecError> {
    let (line, intro) = cur.next_nonblank().ok_or_else(|| perr(cur.line_no(), "missing adjacency list"))?;
    if !intro.starts_with("Adjacency list") {
        return Err(perr(line, "expected the adjacency list heading"));
    }
    let item_re = if kind.is_weighted() {
        Regex::new(r"^([0-9]+) \(weight ([0-9]+)\)$")
    } else {
        Regex::new(r"^([0-9]+)$")
    }
    .expect("item regex");
    let mut seen_nodes = vec![false; n];
    let mut arcs = Vec::new();
    let mut last = line;
    while let Some((line, text)) = cur.next_nonblank() {
        last = line;
        let (head, tail) = text.split_once(':').ok_or_else(|| perr(line, "missing ':'"))?;
        let u: usize = head.trim().parse().map_err(|_| perr(line, format!("bad node id {head:?}")))?;
        let seen = seen_nodes.get_mut(u).ok_or_else(|| perr(line, format!("node {u} out of range")))?;
        if std::mem::replace(seen, true) {
            return Err(perr(line, format!("node {u} listed twice")));
        }
        let tail = tail.trim();
        if tail.is_empty() {
            continue;
        }
        for item in tail.split(", ") {
            let caps = item_re.captures(item.trim()).ok_or_else(|| perr(line, format!("bad neighbor {item:?}")))?;
            let v: usize = caps[1].parse().map_err(|_| perr(line, "number overflow"))?;
            let w = if kind.is_weighted() {
                Some(caps[2].parse().map_err(|_| perr(line, "number overflow"))?)
            } else {
                None
            };
            arcs.push((u, v, w));
        }
    }
    if let Some(missing) = seen_nodes.iter().position(|s| !s) {
        return Err(perr(last, format!("node {missing} has no adjacency line")));
    }
    if kind.is_directed() {
        Ok(arcs)
    } else {
        symmetrize(arcs, last)
    }
}

fn parse_matrix(cur: &mut Cursor<'_>, kind: GraphKind, n: usize) -> Result<EdgeTriples, CodecError> {
    let (line, intro) = cur.next_nonblank().ok_or_else(|| perr(cur.line_no(), "missing adjacency matrix"))?;
    if !intro.starts_with("Adjacency matrix") {
        return Err(perr(line, "expected the adjacency matrix heading"));
    }
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let (line, text) = cur.next_nonblank().ok_or_else(|| perr(cur.line_no(), format!("matrix row {i} missing")))?;
        let row: Vec<u64> = text
            .split_whitespace()
            .map(|x| x.parse().map_err(|_| perr(line, format!("bad matrix entry {x:?}"))))
            .collect::<Result<_, _>>()?;
        if row.len() != n {
            return Err(perr(line, format!("row has {} entries, expected {n}", row.len())));
        }
        if row[i] != 0 {
            return Err(perr(line, "non-zero diagonal entry"));
        }
        if !kind.is_weighted() && row.iter().any(|&x| x > 1) {
            return Err(perr(line, "unweighted matrix entries must be 0 or 1"));
        }
        rows.push((line, row));
    }
    if let Some((line, _)) = cur.next_nonblank() {
        return Err(perr(line, "extra rows after the matrix"));
    }
    let mut edges = Vec::new();
    for (i, (line, row)) in rows.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            if !kind.is_directed() {
                if rows[j].1[i] != x {
                    return Err(perr(*line, format!("matrix not symmetric at ({i}, {j})")));
                }
                if j < i {
                    continue;
                }
            }
            if x > 0 {
                edges.push((i, j, kind.is_weighted().then_some(x)));
            }
        }
    }
    Ok(edges)
}

fn parse_scenario(lines: &[&str], t: &scenario::ScenarioTemplate) -> Result<Graph, CodecError> {
    let mut cur = Cursor { lines, pos: 0 };
    let (line, header) = cur
        .next_nonblank()
        .ok_or_else(|| CodecError::AmbiguousGraph("empty text".into()))?;
    let prefix = format!("In {}, there ", t.setting);
    let rest = header
        .strip_prefix(&prefix)
        .ok_or_else(|| CodecError::AmbiguousGraph(format!("no entity roster (line {line})")))?;
    let roster_re = Regex::new(r"^(?:is|are) ([0-9]+) [a-z]+: (.*)\.$").expect("roster regex");
    let caps = roster_re.captures(rest).ok_or_else(|| perr(line, "malformed roster"))?;
    let n: usize = caps[1].parse().map_err(|_| perr(line, "node count overflow"))?;
    let names: Vec<&str> = if n == 0 { Vec::new() } else { caps.get(2).unwrap().as_str().split(", ").collect() };
    if names.len() != n {
        return Err(perr(line, format!("roster lists {} names for {n} entities", names.len())));
    }
    let mut index = std::collections::HashMap::new();
    for (i, name) in names.iter().enumerate() {
        if index.insert(*name, i).is_some() {
            return Err(perr(line, format!("entity name {name:?} used twice")));
        }
    }
    let (line, kind_line) = cur.next_nonblank().ok_or_else(|| perr(cur.line_no(), "missing link description"))?;
    let (directed, weighted) = match kind_line {
        "Links are mutual and unweighted." => (false, false),
        "Links are one-way and unweighted." => (true, false),
        "Links are mutual and weighted." => (false, true),
        "Links are one-way and weighted." => (true, true),
        _ => return Err(perr(line, "malformed link description")),
    };
    let group_prefix = format!("The {} form two groups: ", t.plural);
    let partition = match cur.peek_nonblank() {
        Some((line, text)) if text.starts_with(&group_prefix) => {
            cur.next_nonblank();
            if directed || weighted {
                return Err(perr(line, "groups are only allowed for unweighted mutual links"));
            }
            let re = Regex::new(r"^group U has (.*); group V has (.*)\.$").expect("group regex");
            let caps = re
                .captures(&text[group_prefix.len()..])
                .ok_or_else(|| perr(line, "malformed group line"))?;
            let resolve = |s: &str| -> Result<Vec<usize>, CodecError> {
                if s == "none" {
                    return Ok(Vec::new());
                }
                s.split(", ")
                    .map(|name| index.get(name).copied().ok_or_else(|| perr(line, format!("unknown entity {name:?}"))))
                    .collect()
            };
            Some(partition_from_lists(n, &resolve(&caps[1])?, &resolve(&caps[2])?, line)?)
        }
        _ => None,
    };
    let kind = match (directed, weighted, partition.is_some()) {
        (_, _, true) => GraphKind::Bipartite,
        (false, false, _) => GraphKind::Undirected,
        (true, false, _) => GraphKind::Directed,
        (false, true, _) => GraphKind::WeightedUndirected,
        (true, true, _) => GraphKind::WeightedDirected,
    };
    let mut pattern = String::from(if directed { t.one_way } else { t.mutual });
    if weighted {
        pattern.push_str(t.weight_clause);
    }
    pattern.push('.');
    let re = pattern_regex(&pattern, "([A-Z][A-Za-z]*[0-9]*)");
    let mut edges = Vec::new();
    let mut saw_empty_marker = false;
    while let Some((line, text)) = cur.next_nonblank() {
        if text == "No links are recorded." && edges.is_empty() && !saw_empty_marker {
            saw_empty_marker = true;
            continue;
        }
        if saw_empty_marker {
            return Err(perr(line, "links listed after the empty-link marker"));
        }
        let caps = re.captures(text).ok_or_else(|| perr(line, format!("unrecognized relation {text:?}")))?;
        let node = |i: usize| {
            index.get(&caps[i]).copied().ok_or_else(|| perr(line, format!("unknown entity {:?}", &caps[i])))
        };
        let w = if weighted {
            Some(caps[3].parse().map_err(|_| perr(line, "number overflow"))?)
        } else {
            None
        };
        edges.push((node(1)?, node(2)?, w));
    }
    let last = cur.line_no();
    Graph::from_parts(kind, n, edges, partition).map_err(|e| graph_err(last, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{bipartite_split, generate_er, ErConfig};

    fn p3() -> Graph {
        Graph::undirected(3, &[(0, 1), (1, 2)]).unwrap()
    }

    fn k3() -> Graph {
        Graph::undirected(3, &[(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn p3_edge_list_mentions_each_edge_once() {
        let r = render(&p3(), RenderFormat::EdgeList, 0).unwrap();
        assert_eq!(r.text.matches("(0, 1)").count(), 1);
        assert_eq!(r.text.matches("(1, 2)").count(), 1);
        assert_eq!(r.text.matches('(').count(), 2);
        assert!(r.text.contains("with 3 nodes"));
    }

    #[test]
    fn k3_matrix_block() {
        let r = render(&k3(), RenderFormat::AdjacencyMatrix, 0).unwrap();
        let rows: Vec<&str> = r.text.lines().skip(2).collect();
        assert_eq!(rows, ["0 1 1", "1 0 1", "1 1 0"]);
    }

    #[test]
    fn weighted_finance_scenario_carries_the_weight() {
        let g = Graph::weighted(GraphKind::WeightedUndirected, 2, &[(0, 1, 5)]).unwrap();
        let r = render(&g, RenderFormat::ScenarioTemplate(Domain::Finance, 0), 11).unwrap();
        let names = r.name_map.clone().unwrap();
        let relation = r.text.lines().last().unwrap();
        assert!(relation.contains(&names[0]) && relation.contains(&names[1]));
        assert!(relation.contains(" 5 "));
        assert_eq!(parse(&r).unwrap(), g);
    }

    #[test]
    fn round_trip_k3_every_format() {
        for f in RenderFormat::all() {
            let r = render(&k3(), f, 5).unwrap();
            assert_eq!(parse(&r).unwrap().canonical_hash(), k3().canonical_hash(), "{f}");
        }
    }

    #[test]
    fn asymmetric_matrix_is_rejected() {
        let text = "The graph is an undirected graph with 2 nodes, numbered from 0 to 1.\nAdjacency matrix:\n0 1\n0 0";
        let err = parse_text(text, RenderFormat::AdjacencyMatrix).unwrap_err();
        assert!(matches!(err, CodecError::ParseError { line: 3, .. }), "{err}");
    }

    #[test]
    fn missing_header_is_ambiguous() {
        let err = parse_text("(0, 1)\n(1, 2)", RenderFormat::EdgeList).unwrap_err();
        assert!(matches!(err, CodecError::AmbiguousGraph(_)));
    }

    #[test]
    fn arrow_template_refuses_weights() {
        let g = Graph::weighted(GraphKind::WeightedDirected, 2, &[(0, 1, 3)]).unwrap();
        assert!(matches!(
            render(&g, RenderFormat::NlTemplate(2), 0),
            Err(CodecError::IncompatibleFormat { .. })
        ));
    }

    #[test]
    fn bipartite_renderings_name_both_parts() {
        let g = Graph::bipartite(4, bipartite_split(4), &[(0, 2), (1, 3)]).unwrap();
        let r = render(&g, RenderFormat::AdjacencyList, 2).unwrap();
        assert!(r.text.contains("U = {0, 1} and V = {2, 3}"));
        let s = render(&g, RenderFormat::ScenarioTemplate(Domain::Logistics, 0), 2).unwrap();
        assert!(s.text.contains("group U has"));
        assert_eq!(parse(&s).unwrap(), g);
    }

    #[test]
    fn format_strings_round_trip() {
        for f in RenderFormat::all() {
            assert_eq!(f.to_string().parse::<RenderFormat>().unwrap(), f);
        }
        assert!("scenario:mars:0".parse::<RenderFormat>().is_err());
    }

    #[test]
    fn seeds_change_order_not_graph() {
        let g = generate_er(&ErConfig::new(12, 0.4, GraphKind::Directed, 3).unwrap());
        let a = render(&g, RenderFormat::EdgeList, 1).unwrap();
        let b = render(&g, RenderFormat::EdgeList, 2).unwrap();
        assert_ne!(a.text, b.text);
        assert_eq!(parse(&a).unwrap(), parse(&b).unwrap());
        assert_eq!(render(&g, RenderFormat::EdgeList, 1).unwrap().text, a.text);
    }

    #[test]
    fn scenario_names_are_distinct() {
        let g = generate_er(&ErConfig::new(60, 0.05, GraphKind::Undirected, 3).unwrap());
        let r = render(&g, RenderFormat::ScenarioTemplate(Domain::Chemistry, 0), 9).unwrap();
        let names = r.name_map.unwrap();
        let set: std::collections::HashSet<_> = names.iter().collect();
        assert_eq!(set.len(), names.len());
    }
}
