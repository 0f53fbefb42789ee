//! Maximum cardinality matching (Edmonds' blossom algorithm) and minimum
//! edge cover.

use crate::graph::Graph;

use super::{require_kind, TaskError, UNDIRECTED_FAMILY};

const NIL: usize = usize::MAX;

struct Blossom<'a> {
    adj: &'a [Vec<usize>],
    mate: Vec<usize>,
    parent: Vec<usize>,
    base: Vec<usize>,
    used: Vec<bool>,
    in_blossom: Vec<bool>,
    /// Vertices touched by the current search; only these are reset.
    tree: Vec<usize>,
    in_tree: Vec<bool>,
    lca_mark: Vec<u32>,
    stamp: u32,
}

impl<'a> Blossom<'a> {
    fn new(adj: &'a [Vec<usize>]) -> Self {
        let n = adj.len();
        Blossom {
            adj,
            mate: vec![NIL; n],
            parent: vec![NIL; n],
            base: (0..n).collect(),
            used: vec![false; n],
            in_blossom: vec![false; n],
            tree: Vec::new(),
            in_tree: vec![false; n],
            lca_mark: vec![0; n],
            stamp: 0,
        }
    }

    /// Match low-degree vertices first, each to its lowest-degree free neighbour.
    fn greedy(&mut self) {
        let n = self.adj.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| (self.adj[v].len(), v));
        for v in order {
            if self.mate[v] != NIL {
                continue;
            }
            let pick = self.adj[v].iter().copied().filter(|&u| self.mate[u] == NIL).min_by_key(|&u| (self.adj[u].len(), u));
            if let Some(u) = pick {
                self.mate[v] = u;
                self.mate[u] = v;
            }
        }
    }

    fn touch(&mut self, v: usize) {
        if !self.in_tree[v] {
            self.in_tree[v] = true;
            self.tree.push(v);
        }
    }

    fn lca(&mut self, mut a: usize, mut b: usize) -> usize {
        self.stamp += 1;
        loop {
            a = self.base[a];
            self.lca_mark[a] = self.stamp;
            if self.mate[a] == NIL {
                break;
            }
            a = self.parent[self.mate[a]];
        }
        loop {
            b = self.base[b];
            if self.lca_mark[b] == self.stamp {
                return b;
            }
            b = self.parent[self.mate[b]];
        }
    }

    fn mark_path(&mut self, mut v: usize, b: usize, mut child: usize) {
        while self.base[v] != b {
            self.in_blossom[self.base[v]] = true;
            self.in_blossom[self.base[self.mate[v]]] = true;
            self.parent[v] = child;
            child = self.mate[v];
            v = self.parent[self.mate[v]];
        }
    }

    fn reset(&mut self) {
        for &v in &self.tree {
            self.parent[v] = NIL;
            self.base[v] = v;
            self.used[v] = false;
            self.in_tree[v] = false;
        }
        self.tree.clear();
    }

    /// Endpoint of an augmenting path from `root`, if any.
    fn search(&mut self, root: usize) -> Option<usize> {
        self.reset();
        self.used[root] = true;
        self.touch(root);
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for i in 0..self.adj[v].len() {
                let to = self.adj[v][i];
                if self.base[v] == self.base[to] || self.mate[v] == to {
                    continue;
                }
                if to == root || (self.mate[to] != NIL && self.parent[self.mate[to]] != NIL) {
                    let cur = self.lca(v, to);
                    for &u in &self.tree {
                        self.in_blossom[u] = false;
                    }
                    self.mark_path(v, cur, to);
                    self.mark_path(to, cur, v);
                    for j in 0..self.tree.len() {
                        let u = self.tree[j];
                        if self.in_blossom[self.base[u]] {
                            self.base[u] = cur;
                            if !self.used[u] {
                                self.used[u] = true;
                                queue.push_back(u);
                            }
                        }
                    }
                } else if self.parent[to] == NIL {
                    self.parent[to] = v;
                    self.touch(to);
                    if self.mate[to] == NIL {
                        return Some(to);
                    }
                    let next = self.mate[to];
                    self.used[next] = true;
                    self.touch(next);
                    queue.push_back(next);
                }
            }
        }
        None
    }

    fn augment(&mut self, mut v: usize) {
        while v != NIL {
            let pv = self.parent[v];
            let next = self.mate[pv];
            self.mate[v] = pv;
            self.mate[pv] = v;
            v = next;
        }
    }

    fn solve(mut self) -> Vec<usize> {
        self.greedy();
        for v in 0..self.adj.len() {
            // A vertex with no augmenting path now never gains one later.
            if self.mate[v] == NIL && !self.adj[v].is_empty() {
                if let Some(end) = self.search(v) {
                    self.augment(end);
                }
            }
        }
        self.mate
    }
}

/// Maximum matching as sorted `(u, v)` pairs with `u < v`.
pub fn maximum_matching(g: &Graph) -> Result<Vec<(usize, usize)>, TaskError> {
    require_kind("maximum_matching", g, UNDIRECTED_FAMILY)?;
    let adj = g.adjacency();
    let mate = Blossom::new(&adj).solve();
    Ok((0..mate.len()).filter(|&v| mate[v] != NIL && v < mate[v]).map(|v| (v, mate[v])).collect())
}

/// Smallest edge set touching every vertex: a maximum matching plus one edge
/// per unmatched vertex.
pub fn min_edge_cover(g: &Graph) -> Result<Vec<(usize, usize)>, TaskError> {
    require_kind("min_edge_cover", g, UNDIRECTED_FAMILY)?;
    let adj = g.adjacency();
    if let Some(v) = (0..adj.len()).find(|&v| adj[v].is_empty()) {
        return Err(TaskError::IsolatedVertex(v));
    }
    let mate = Blossom::new(&adj).solve();
    let mut cover: Vec<(usize, usize)> = (0..adj.len())
        .filter_map(|v| match mate[v] {
            NIL => {
                let u = adj[v][0];
                Some((v.min(u), v.max(u)))
            }
            m if v < m => Some((v, m)),
            _ => None,
        })
        .collect();
    cover.sort_unstable();
    Ok(cover)
}
