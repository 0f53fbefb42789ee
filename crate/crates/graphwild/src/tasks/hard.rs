//! Exact exponential solvers on `u64` bitsets. Inputs above the node cap are
//! refused instead of approximated.

use std::collections::HashSet;

use crate::graph::{Graph, GraphKind};

use super::{require_kind, TaskError, UNDIRECTED_FAMILY};

pub const DEFAULT_CAP: usize = 60;
/// Bitset width; caps above this are clamped.
const WORD: usize = 64;
/// Largest n solved by the subset dynamic program for Hamilton paths.
const DP_LIMIT: usize = 20;

fn check_cap(g: &Graph, cap: usize) -> Result<(), TaskError> {
    let cap = cap.min(WORD);
    if g.node_count() > cap {
        Err(TaskError::CapExceeded { n: g.node_count(), cap })
    } else {
        Ok(())
    }
}

/// Out-neighbour bitsets.
fn bit_adjacency(g: &Graph) -> Vec<u64> {
    g.adjacency().iter().map(|ns| ns.iter().fold(0u64, |m, &v| m | 1 << v)).collect()
}

fn full_mask(n: usize) -> u64 {
    if n == WORD {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (m != 0).then(|| {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            v
        })
    })
}

/// A path visiting every node exactly once, following edge direction on
/// directed kinds; weights are ignored.
pub fn hamilton_path(g: &Graph, cap: usize) -> Result<Option<Vec<usize>>, TaskError> {
    require_kind("hamilton_path", g, &GraphKind::ALL)?;
    check_cap(g, cap)?;
    let adj = bit_adjacency(g);
    Ok(if g.node_count() <= DP_LIMIT { hamilton_dp(&adj) } else { HamiltonSearch::new(&adj).run() })
}

fn hamilton_dp(adj: &[u64]) -> Option<Vec<usize>> {
    let n = adj.len();
    if n == 0 {
        return Some(Vec::new());
    }
    // ends[mask]: nodes that can end a path covering exactly `mask`.
    let mut ends = vec![0u32; 1 << n];
    for v in 0..n {
        ends[1 << v] = 1 << v;
    }
    for mask in 1..(1usize << n) {
        let e = ends[mask];
        if e == 0 {
            continue;
        }
        for v in bits(e as u64) {
            for w in bits(adj[v] & !(mask as u64)) {
                ends[mask | 1 << w] |= 1 << w;
            }
        }
    }
    let full = (1usize << n) - 1;
    let mut v = bits(ends[full] as u64).next()?;
    let mut mask = full;
    let mut path = vec![v];
    while mask.count_ones() > 1 {
        mask &= !(1 << v);
        v = bits(ends[mask] as u64).find(|&u| adj[u] >> v & 1 == 1).expect("dp predecessor exists");
        path.push(v);
    }
    path.reverse();
    Some(path)
}

struct HamiltonSearch<'a> {
    adj: &'a [u64],
    full: u64,
    failed: HashSet<(u64, usize)>,
}

impl<'a> HamiltonSearch<'a> {
    fn new(adj: &'a [u64]) -> Self {
        HamiltonSearch { adj, full: full_mask(adj.len()), failed: HashSet::new() }
    }

    fn run(mut self) -> Option<Vec<usize>> {
        let n = self.adj.len();
        let indeg_zero: Vec<usize> = (0..n).filter(|&v| self.adj.iter().all(|&a| a >> v & 1 == 0)).collect();
        let starts: Vec<usize> = match indeg_zero.len() {
            0 => (0..n).collect(),
            1 => indeg_zero,
            _ => return None,
        };
        for s in starts {
            let mut path = vec![s];
            if self.extend(&mut path, 1 << s) {
                return Some(path);
            }
        }
        None
    }

    /// Every unvisited node reachable from `v` through unvisited nodes.
    fn reaches_rest(&self, v: usize, visited: u64) -> bool {
        let rest = self.full & !visited;
        let mut seen = 0u64;
        let mut frontier = self.adj[v] & rest;
        while frontier != 0 {
            seen |= frontier;
            let mut next = 0;
            for u in bits(frontier) {
                next |= self.adj[u];
            }
            frontier = next & rest & !seen;
        }
        seen == rest
    }

    fn extend(&mut self, path: &mut Vec<usize>, visited: u64) -> bool {
        if visited == self.full {
            return true;
        }
        let v = *path.last().expect("path is never empty");
        if self.failed.contains(&(visited, v)) || !self.reaches_rest(v, visited) {
            return false;
        }
        // Fewest onward options first.
        let mut next: Vec<usize> = bits(self.adj[v] & !visited).collect();
        next.sort_by_key(|&w| ((self.adj[w] & !visited).count_ones(), w));
        for w in next {
            path.push(w);
            if self.extend(path, visited | 1 << w) {
                return true;
            }
            path.pop();
        }
        self.failed.insert((visited, v));
        false
    }
}

/// Branch and bound with greedy-colouring bounds.
struct CliqueSearch<'a> {
    adj: &'a [u64],
    best: u64,
}

impl CliqueSearch<'_> {
    fn colour_order(&self, cand: u64) -> Vec<(usize, u32)> {
        let mut out = Vec::with_capacity(cand.count_ones() as usize);
        let mut uncoloured = cand;
        let mut colour = 0;
        while uncoloured != 0 {
            colour += 1;
            let mut q = uncoloured;
            while q != 0 {
                let v = q.trailing_zeros() as usize;
                q &= !(1 << v) & !self.adj[v];
                uncoloured &= !(1 << v);
                out.push((v, colour));
            }
        }
        out
    }

    fn expand(&mut self, clique: u64, mut cand: u64) {
        let size = clique.count_ones();
        let order = self.colour_order(cand);
        for &(v, colour) in order.iter().rev() {
            if size + colour <= self.best.count_ones() {
                return;
            }
            let grown = clique | 1 << v;
            let next = cand & self.adj[v];
            if next == 0 {
                if grown.count_ones() > self.best.count_ones() {
                    self.best = grown;
                }
            } else {
                self.expand(grown, next);
            }
            cand &= !(1 << v);
        }
    }
}

fn clique_in(adj: &[u64]) -> Vec<usize> {
    let n = adj.len();
    if n == 0 {
        return Vec::new();
    }
    let mut search = CliqueSearch { adj, best: 1 };
    search.expand(0, full_mask(n));
    bits(search.best).collect()
}

pub fn max_clique(g: &Graph, cap: usize) -> Result<Vec<usize>, TaskError> {
    require_kind("max_clique", g, UNDIRECTED_FAMILY)?;
    check_cap(g, cap)?;
    Ok(clique_in(&bit_adjacency(g)))
}

fn complement(adj: &[u64]) -> Vec<u64> {
    let full = full_mask(adj.len());
    adj.iter().enumerate().map(|(v, &a)| full & !a & !(1 << v)).collect()
}

pub fn max_independent_set(g: &Graph, cap: usize) -> Result<Vec<usize>, TaskError> {
    require_kind("max_independent_set", g, UNDIRECTED_FAMILY)?;
    check_cap(g, cap)?;
    Ok(clique_in(&complement(&bit_adjacency(g))))
}

/// The complement of a maximum independent set.
pub fn min_vertex_cover(g: &Graph, cap: usize) -> Result<Vec<usize>, TaskError> {
    require_kind("min_vertex_cover", g, UNDIRECTED_FAMILY)?;
    check_cap(g, cap)?;
    let independent = clique_in(&complement(&bit_adjacency(g)));
    Ok((0..g.node_count()).filter(|v| !independent.contains(v)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        Graph::undirected(n, &edges).unwrap()
    }

    fn star() -> Graph {
        Graph::undirected(4, &[(0, 1), (0, 2), (0, 3)]).unwrap()
    }

    #[test]
    fn small_examples() {
        assert_eq!(max_clique(&complete(4), DEFAULT_CAP).unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(min_vertex_cover(&star(), DEFAULT_CAP).unwrap(), vec![0]);
        assert_eq!(max_independent_set(&star(), DEFAULT_CAP).unwrap(), vec![1, 2, 3]);
        let p4 = Graph::undirected(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert!(hamilton_path(&p4, DEFAULT_CAP).unwrap().is_some());
        assert_eq!(hamilton_path(&star(), DEFAULT_CAP).unwrap(), None);
    }

    #[test]
    fn directed_hamilton_respects_orientation() {
        let g = Graph::directed(3, &[(2, 1), (1, 0)]).unwrap();
        assert_eq!(hamilton_path(&g, DEFAULT_CAP).unwrap(), Some(vec![2, 1, 0]));
        let g = Graph::directed(3, &[(0, 1), (2, 1)]).unwrap();
        assert_eq!(hamilton_path(&g, DEFAULT_CAP).unwrap(), None);
    }

    #[test]
    fn search_and_dp_agree_on_long_paths() {
        let n = 30;
        let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        edges.push((0, 7));
        edges.push((3, 20));
        let g = Graph::undirected(n, &edges).unwrap();
        let path = hamilton_path(&g, DEFAULT_CAP).unwrap().unwrap();
        assert_eq!(path.len(), n);
        assert!(path.windows(2).all(|w| g.has_edge(w[0], w[1])));
        let mut broken = edges.clone();
        broken.retain(|&e| e != (14, 15));
        let g = Graph::undirected(n, &broken).unwrap();
        assert_eq!(hamilton_path(&g, DEFAULT_CAP).unwrap(), None);
    }

    #[test]
    fn cap_is_enforced() {
        let g = Graph::undirected(8, &[]).unwrap();
        assert_eq!(max_clique(&g, 5), Err(TaskError::CapExceeded { n: 8, cap: 5 }));
        assert_eq!(max_clique(&g, 8).unwrap().len(), 1);
    }
}
