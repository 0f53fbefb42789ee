//! Plain edge files: one edge per line, whitespace-separated endpoints and an
//! optional third weight column. `#` starts a comment.
//!
//! Files written here begin with a metadata comment so the kind and node
//! count survive the round trip:
//!
//! ```text
//! # graphwild edge-file kind=undirected nodes=3
//! 0 1
//! 1 2
//! ```
//!
//! Bipartite files add `# partition=UUV...` (one letter per node). Readers
//! that ignore comments still see a valid edge list.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::graph::{Graph, GraphKind, Side};

use super::CodecError;

const HEADER_PREFIX: &str = "# graphwild edge-file";

/// How to read a file that carries no metadata header.
#[derive(Debug, Clone, Copy, Default)]
pub struct EdgeFileOptions {
    /// Forces the kind; otherwise the header decides, falling back to
    /// undirected (weighted when a third column is present).
    pub kind: Option<GraphKind>,
    /// Skip self-loops and repeated edges instead of failing, as needed for
    /// graphs downloaded from public repositories.
    pub lenient: bool,
}

pub fn render_to_file(g: &Graph, path: impl AsRef<Path>) -> Result<(), CodecError> {
    let mut out = BufWriter::new(File::create(path)?);
    write_edges(g, &mut out)?;
    out.flush()?;
    Ok(())
}

/// Writes the edge-file encoding of `g` to any sink.
pub fn write_edges(g: &Graph, out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "{HEADER_PREFIX} kind={} nodes={}", g.kind(), g.node_count())?;
    if let Some(p) = g.partition() {
        let letters: String = p.iter().map(|s| if *s == Side::U { 'U' } else { 'V' }).collect();
        writeln!(out, "# partition={letters}")?;
    }
    let weighted = g.kind().is_weighted();
    for (u, v, w) in g.weighted_edges() {
        if weighted {
            writeln!(out, "{u} {v} {w}")?;
        } else {
            writeln!(out, "{u} {v}")?;
        }
    }
    Ok(())
}

pub fn parse_edge_file(path: impl AsRef<Path>) -> Result<Graph, CodecError> {
    parse_edge_file_with(path, EdgeFileOptions::default())
}

pub fn parse_edge_file_with(path: impl AsRef<Path>, opts: EdgeFileOptions) -> Result<Graph, CodecError> {
    read_edges(BufReader::new(File::open(path)?), opts)
}

fn perr(line: usize, reason: impl Into<String>) -> CodecError {
    CodecError::ParseError { line, reason: reason.into() }
}

/// Streaming parser behind [`parse_edge_file`].
pub fn read_edges(reader: impl BufRead, opts: EdgeFileOptions) -> Result<Graph, CodecError> {
    let mut header_kind = None;
    let mut header_nodes = None;
    let mut partition: Option<Vec<Side>> = None;
    let mut edges: Vec<(usize, usize, Option<u64>)> = Vec::new();
    let mut columns = None;
    let mut max_node = None;
    let mut line_no = 0;
    for line in reader.lines() {
        line_no += 1;
        let line = line?;
        let (data, comment) = match line.find('#') {
            Some(i) => (&line[..i], Some(&line[i..])),
            None => (line.as_str(), None),
        };
        if let Some(c) = comment {
            if let Some(meta) = c.strip_prefix(HEADER_PREFIX) {
                for field in meta.split_whitespace() {
                    match field.split_once('=') {
                        Some(("kind", k)) => {
                            header_kind = Some(k.parse::<GraphKind>().map_err(|e| perr(line_no, e.to_string()))?)
                        }
                        Some(("nodes", n)) => {
                            header_nodes = Some(n.parse::<usize>().map_err(|_| perr(line_no, "bad node count"))?)
                        }
                        _ => {}
                    }
                }
            } else if let Some(letters) = c.strip_prefix("# partition=") {
                let sides = letters
                    .trim()
                    .chars()
                    .map(|ch| match ch {
                        'U' => Ok(Side::U),
                        'V' => Ok(Side::V),
                        _ => Err(perr(line_no, format!("bad partition letter {ch:?}"))),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                partition = Some(sides);
            }
        }
        let mut fields = data.split_whitespace();
        let Some(first) = fields.next() else { continue };
        let parse_node = |s: &str| s.parse::<usize>().map_err(|_| perr(line_no, format!("bad endpoint {s:?}")));
        let u = parse_node(first)?;
        let v = parse_node(fields.next().ok_or_else(|| perr(line_no, "missing second endpoint"))?)?;
        let w = fields
            .next()
            .map(|s| s.parse::<u64>().map_err(|_| perr(line_no, format!("bad weight {s:?}"))))
            .transpose()?;
        if fields.next().is_some() {
            return Err(perr(line_no, "more than three columns"));
        }
        let cols = 2 + usize::from(w.is_some());
        if *columns.get_or_insert(cols) != cols {
            return Err(perr(line_no, "inconsistent column count"));
        }
        if let Some(n) = header_nodes {
            if u.max(v) >= n {
                return Err(perr(line_no, format!("endpoint {} out of range for {n} nodes", u.max(v))));
            }
        }
        if w == Some(0) {
            return Err(perr(line_no, "weights must be positive"));
        }
        if u == v {
            if opts.lenient {
                continue;
            }
            return Err(perr(line_no, format!("self-loop on node {u}")));
        }
        max_node = Some(max_node.map_or(u.max(v), |m: usize| m.max(u).max(v)));
        edges.push((u, v, w));
    }
    let weighted_file = columns == Some(3);
    let kind = opts.kind.or(header_kind).unwrap_or(if weighted_file {
        GraphKind::WeightedUndirected
    } else {
        GraphKind::Undirected
    });
    if kind.is_weighted() != weighted_file && !edges.is_empty() {
        return Err(perr(line_no, format!("{kind} graph but the file has {} columns", columns.unwrap_or(2))));
    }
    let n = header_nodes.unwrap_or_else(|| max_node.map_or(0, |m| m + 1));
    if kind != GraphKind::Bipartite {
        partition = None;
    } else if partition.is_none() {
        return Err(CodecError::AmbiguousGraph("bipartite edge file without a partition line".into()));
    }
    if opts.lenient {
        if !kind.is_directed() {
            for e in &mut edges {
                if e.0 > e.1 {
                    std::mem::swap(&mut e.0, &mut e.1);
                }
            }
        }
        edges.sort_unstable_by_key(|e| (e.0, e.1));
        edges.dedup_by_key(|e| (e.0, e.1));
    }
    Graph::from_parts(kind, n, edges, partition).map_err(|e| perr(line_no, e.to_string()))
}
