//! Local and global structure measures.

use serde::{Deserialize, Serialize};

use crate::graph::{Graph, GraphKind};

use super::traversal::bfs_distances;
use super::{require_kind, require_node, TaskError, UNDIRECTED_FAMILY};

/// `2·triangles(v) / (deg(v)·(deg(v) − 1))`, defined as 0 when deg(v) < 2.
pub fn clustering_coefficient(g: &Graph, v: usize) -> Result<f64, TaskError> {
    require_kind("clustering_coefficient", g, UNDIRECTED_FAMILY)?;
    require_node(g, v)?;
    let adj = g.adjacency();
    let nbrs = &adj[v];
    let d = nbrs.len();
    if d < 2 {
        return Ok(0.0);
    }
    let mut triangles = 0usize;
    for (i, &a) in nbrs.iter().enumerate() {
        for &b in &nbrs[i + 1..] {
            if adj[a].binary_search(&b).is_ok() {
                triangles += 1;
            }
        }
    }
    Ok(2.0 * triangles as f64 / (d * (d - 1)) as f64)
}

pub fn common_neighbors(g: &Graph, u: usize, v: usize) -> Result<Vec<usize>, TaskError> {
    require_kind("common_neighbors", g, UNDIRECTED_FAMILY)?;
    require_node(g, u)?;
    require_node(g, v)?;
    let adj = g.adjacency();
    let (a, b) = (&adj[u], &adj[v]);
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    Ok(out)
}

pub fn is_regular(g: &Graph) -> Result<bool, TaskError> {
    require_kind("regular", g, UNDIRECTED_FAMILY)?;
    let deg = g.degrees();
    Ok(deg.windows(2).all(|w| w[0] == w[1]))
}

/// Connected and, for every pair at distance i, the number of neighbours of
/// one endpoint at distance i − 1 and i + 1 from the other depends only on i.
pub fn is_distance_regular(g: &Graph) -> Result<bool, TaskError> {
    require_kind("distance_regular", g, UNDIRECTED_FAMILY)?;
    let n = g.node_count();
    let adj = g.adjacency();
    let dist: Vec<Vec<usize>> = (0..n).map(|s| bfs_distances(&adj, s)).collect();
    if dist.iter().flatten().any(|&d| d == usize::MAX) {
        return Ok(false);
    }
    // (c_i, b_i) per distance, filled on first sight.
    let mut params: Vec<Option<(usize, usize)>> = vec![None; n.max(1)];
    for u in 0..n {
        for v in 0..n {
            let i = dist[u][v];
            let mut c = 0;
            let mut b = 0;
            for &w in &adj[v] {
                let dw = dist[u][w];
                if dw + 1 == i {
                    c += 1;
                } else if dw == i + 1 {
                    b += 1;
                }
            }
            match params[i] {
                None => params[i] = Some((c, b)),
                Some(p) if p != (c, b) => return Ok(false),
                Some(_) => {}
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PageRankParams {
    pub damping: f64,
    pub max_iter: usize,
    /// L1 change between iterations below which the iteration stops.
    pub tol: f64,
}

impl Default for PageRankParams {
    fn default() -> Self {
        PageRankParams { damping: 0.85, max_iter: 100, tol: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PageRankResult {
    pub scores: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// L1 change of the last iteration.
    pub residual: f64,
}

/// Power iteration. Undirected edges count in both directions; dangling
/// nodes spread their mass uniformly.
pub fn pagerank(g: &Graph, params: PageRankParams) -> Result<PageRankResult, TaskError> {
    require_kind(
        "pagerank",
        g,
        &[GraphKind::Directed, GraphKind::Undirected, GraphKind::Bipartite, GraphKind::WeightedDirected, GraphKind::WeightedUndirected],
    )?;
    let n = g.node_count();
    if n == 0 {
        return Ok(PageRankResult { scores: Vec::new(), iterations: 0, converged: true, residual: 0.0 });
    }
    let radj = g.reverse_adjacency();
    let outdeg: Vec<usize> = g.adjacency().iter().map(Vec::len).collect();
    let nf = n as f64;
    let d = params.damping;
    let mut x = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < params.max_iter {
        iterations += 1;
        let dangling: f64 = (0..n).filter(|&u| outdeg[u] == 0).map(|u| x[u]).sum();
        let base = (1.0 - d) / nf + d * dangling / nf;
        for v in 0..n {
            let inflow: f64 = radj[v].iter().map(|&u| x[u] / outdeg[u] as f64).sum();
            next[v] = base + d * inflow;
        }
        residual = x.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut x, &mut next);
        if residual < params.tol {
            break;
        }
    }
    Ok(PageRankResult { scores: x, iterations, converged: residual < params.tol, residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clustering_examples() {
        let k3 = Graph::undirected(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        for v in 0..3 {
            assert_eq!(clustering_coefficient(&k3, v).unwrap(), 1.0);
        }
        let p3 = Graph::undirected(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(clustering_coefficient(&p3, 1).unwrap(), 0.0);
        assert_eq!(clustering_coefficient(&p3, 0).unwrap(), 0.0);
    }

    #[test]
    fn common_neighbor_examples() {
        let k3 = Graph::undirected(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(common_neighbors(&k3, 0, 1).unwrap(), vec![2]);
        let two = Graph::undirected(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(common_neighbors(&two, 0, 1).unwrap().is_empty());
    }

    #[test]
    fn regularity_examples() {
        let c4 = Graph::undirected(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let p3 = Graph::undirected(3, &[(0, 1), (1, 2)]).unwrap();
        let c5 = Graph::undirected(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        assert!(is_regular(&c4).unwrap());
        assert!(!is_regular(&p3).unwrap());
        assert!(is_distance_regular(&c5).unwrap());
        assert!(!is_distance_regular(&p3).unwrap());
    }

    #[test]
    fn pagerank_two_nodes_is_symmetric() {
        let g = Graph::undirected(2, &[(0, 1)]).unwrap();
        let r = pagerank(&g, PageRankParams::default()).unwrap();
        assert!((r.scores[0] - 0.5).abs() < 1e-12 && (r.scores[1] - 0.5).abs() < 1e-12);
        assert!(r.converged);
    }

    #[test]
    fn pagerank_mass_is_conserved() {
        let g = Graph::directed(4, &[(0, 1), (1, 2), (2, 0), (2, 3)]).unwrap();
        let r = pagerank(&g, PageRankParams::default()).unwrap();
        assert!((r.scores.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
