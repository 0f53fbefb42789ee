//! Maximum flow (Dinic) with a minimum-cut certificate.

use std::collections::VecDeque;

use crate::graph::{Graph, GraphKind};

use super::{require_kind, require_node, TaskError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowResult {
    pub value: u64,
    /// `true` for nodes on the source side of a minimum cut.
    pub source_side: Vec<bool>,
}

impl FlowResult {
    /// Capacity of the arcs leaving the source side.
    pub fn cut_capacity(&self, g: &Graph) -> u64 {
        g.weighted_edges()
            .filter(|&(u, v, _)| self.source_side[u] && !self.source_side[v])
            .map(|(_, _, w)| w)
            .sum()
    }
}

struct Arc {
    to: usize,
    cap: u64,
}

struct Network {
    arcs: Vec<Arc>,
    out: Vec<Vec<usize>>,
}

impl Network {
    fn from_graph(g: &Graph) -> Self {
        let mut net = Network { arcs: Vec::new(), out: vec![Vec::new(); g.node_count()] };
        for (u, v, c) in g.weighted_edges() {
            net.out[u].push(net.arcs.len());
            net.arcs.push(Arc { to: v, cap: c });
            net.out[v].push(net.arcs.len());
            net.arcs.push(Arc { to: u, cap: 0 });
        }
        net
    }

    fn levels(&self, s: usize) -> Vec<usize> {
        let mut level = vec![usize::MAX; self.out.len()];
        level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &a in &self.out[u] {
                let v = self.arcs[a].to;
                if self.arcs[a].cap > 0 && level[v] == usize::MAX {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        level
    }

    /// One blocking-flow augmentation along the level graph.
    fn augment(&mut self, u: usize, t: usize, pushed: u64, level: &[usize], next: &mut [usize]) -> u64 {
        if u == t {
            return pushed;
        }
        while next[u] < self.out[u].len() {
            let a = self.out[u][next[u]];
            let v = self.arcs[a].to;
            if self.arcs[a].cap > 0 && level[v] == level[u] + 1 {
                let got = self.augment(v, t, pushed.min(self.arcs[a].cap), level, next);
                if got > 0 {
                    self.arcs[a].cap -= got;
                    self.arcs[a ^ 1].cap += got;
                    return got;
                }
            }
            next[u] += 1;
        }
        0
    }
}

pub fn max_flow(g: &Graph, s: usize, t: usize) -> Result<FlowResult, TaskError> {
    require_kind("max_flow", g, &[GraphKind::WeightedDirected])?;
    require_node(g, s)?;
    require_node(g, t)?;
    if s == t {
        return Err(TaskError::InvalidParam { name: "sink".into(), reason: "source and sink must differ".into() });
    }
    let mut net = Network::from_graph(g);
    let mut value = 0u64;
    loop {
        let level = net.levels(s);
        if level[t] == usize::MAX {
            let source_side = level.iter().map(|&l| l != usize::MAX).collect();
            return Ok(FlowResult { value, source_side });
        }
        let mut next = vec![0; g.node_count()];
        loop {
            let pushed = net.augment(s, t, u64::MAX, &level, &mut next);
            if pushed == 0 {
                break;
            }
            value += pushed;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_arc() {
        let g = Graph::weighted(GraphKind::WeightedDirected, 2, &[(0, 1, 9)]).unwrap();
        assert_eq!(max_flow(&g, 0, 1).unwrap().value, 9);
        assert_eq!(max_flow(&g, 1, 0).unwrap().value, 0);
    }

    #[test]
    fn two_disjoint_paths() {
        let g = Graph::weighted(GraphKind::WeightedDirected, 4, &[(0, 1, 3), (1, 3, 3), (0, 2, 2), (2, 3, 2)])
            .unwrap();
        let r = max_flow(&g, 0, 3).unwrap();
        assert_eq!(r.value, 5);
        assert_eq!(r.cut_capacity(&g), 5);
    }

    #[test]
    fn bottleneck_certificate() {
        let g = Graph::weighted(GraphKind::WeightedDirected, 4, &[(0, 1, 10), (1, 2, 1), (2, 3, 10), (0, 2, 4)])
            .unwrap();
        let r = max_flow(&g, 0, 3).unwrap();
        assert_eq!(r.value, 5);
        assert_eq!(r.cut_capacity(&g), r.value);
    }

    #[test]
    fn equal_endpoints_are_invalid() {
        let g = Graph::weighted(GraphKind::WeightedDirected, 2, &[(0, 1, 1)]).unwrap();
        assert!(max_flow(&g, 1, 1).is_err());
    }
}
