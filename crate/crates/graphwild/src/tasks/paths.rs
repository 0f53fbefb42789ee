use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use crate::graph::{Graph, GraphKind};

use super::{require_kind, require_node, TaskError};

const WEIGHTED: &[GraphKind] = &[GraphKind::WeightedUndirected, GraphKind::WeightedDirected];

fn dijkstra(g: &Graph, src: usize) -> (Vec<Option<u64>>, Vec<usize>) {
    let adj = g.weighted_adjacency();
    let mut dist: Vec<Option<u64>> = vec![None; g.node_count()];
    let mut pred = vec![usize::MAX; g.node_count()];
    let mut heap = BinaryHeap::new();
    dist[src] = Some(0);
    heap.push(Reverse((0u64, src)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if dist[u] != Some(d) {
            continue;
        }
        for &(v, w) in &adj[u] {
            let nd = d + w;
            if dist[v].is_none_or(|cur| nd < cur) {
                dist[v] = Some(nd);
                pred[v] = u;
                heap.push(Reverse((nd, v)));
            }
        }
    }
    (dist, pred)
}

/// Minimum total weight from `source` to `target` with one witness path;
/// `None` when unreachable.
pub fn shortest_path(g: &Graph, source: usize, target: usize) -> Result<Option<(u64, Vec<usize>)>, TaskError> {
    require_kind("shortest_path", g, WEIGHTED)?;
    require_node(g, source)?;
    require_node(g, target)?;
    let (dist, pred) = dijkstra(g, source);
    let Some(total) = dist[target] else { return Ok(None) };
    let mut path = vec![target];
    while *path.last().unwrap() != source {
        path.push(pred[*path.last().unwrap()]);
    }
    path.reverse();
    Ok(Some((total, path)))
}

/// Distances from `source` to every reachable node.
pub fn single_source_distances(g: &Graph, source: usize) -> Result<BTreeMap<usize, u64>, TaskError> {
    require_kind("single_source_shortest_path", g, WEIGHTED)?;
    require_node(g, source)?;
    let (dist, _) = dijkstra(g, source);
    Ok(dist.into_iter().enumerate().filter_map(|(v, d)| d.map(|d| (v, d))).collect())
}

/// Total weight of `path` if every consecutive pair is an edge.
pub fn path_weight(g: &Graph, path: &[usize]) -> Option<u64> {
    path.windows(2).map(|w| g.weight(w[0], w[1])).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detour_beats_direct_edge() {
        let g = Graph::weighted(GraphKind::WeightedUndirected, 3, &[(0, 1, 5), (0, 2, 1), (2, 1, 1)]).unwrap();
        assert_eq!(shortest_path(&g, 0, 1).unwrap(), Some((2, vec![0, 2, 1])));
    }

    #[test]
    fn single_edge_and_unreachable() {
        let g = Graph::weighted(GraphKind::WeightedUndirected, 3, &[(0, 1, 7)]).unwrap();
        assert_eq!(shortest_path(&g, 0, 1).unwrap().unwrap().0, 7);
        assert_eq!(shortest_path(&g, 0, 2).unwrap(), None);
        assert_eq!(shortest_path(&g, 2, 2).unwrap(), Some((0, vec![2])));
    }

    #[test]
    fn directed_weights_respect_orientation() {
        let g = Graph::weighted(GraphKind::WeightedDirected, 2, &[(1, 0, 3)]).unwrap();
        assert_eq!(shortest_path(&g, 0, 1).unwrap(), None);
        assert_eq!(single_source_distances(&g, 1).unwrap(), BTreeMap::from([(0, 3), (1, 0)]));
    }

    #[test]
    fn unweighted_kind_is_rejected() {
        let g = Graph::undirected(2, &[(0, 1)]).unwrap();
        assert!(matches!(shortest_path(&g, 0, 1), Err(TaskError::KindMismatch { .. })));
    }
}
