//! Reachability-style solvers: bipartiteness, connectivity, components,
//! orderings, cycles, eccentricities and cores.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use crate::graph::{Graph, GraphKind};

use super::{require_kind, require_node, TaskError, UNDIRECTED_FAMILY};

/// BFS distances from `src` ignoring weights; `usize::MAX` marks unreachable.
pub fn bfs_distances(adj: &[Vec<usize>], src: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; adj.len()];
    let mut queue = VecDeque::new();
    dist[src] = 0;
    queue.push_back(src);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Two-colouring of an undirected graph, if one exists.
pub fn two_coloring(g: &Graph) -> Result<Option<Vec<bool>>, TaskError> {
    require_kind("bipartite", g, UNDIRECTED_FAMILY)?;
    let adj = g.adjacency();
    let mut color: Vec<Option<bool>> = vec![None; g.node_count()];
    let mut queue = VecDeque::new();
    for start in 0..g.node_count() {
        if color[start].is_some() {
            continue;
        }
        color[start] = Some(false);
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            let cu = color[u].expect("queued nodes are coloured");
            for &v in &adj[u] {
                match color[v] {
                    None => {
                        color[v] = Some(!cu);
                        queue.push_back(v);
                    }
                    Some(cv) if cv == cu => return Ok(None),
                    Some(_) => {}
                }
            }
        }
    }
    Ok(Some(color.into_iter().map(|c| c.unwrap_or(false)).collect()))
}

pub fn is_bipartite(g: &Graph) -> Result<bool, TaskError> {
    Ok(two_coloring(g)?.is_some())
}

pub fn connectivity(g: &Graph, u: usize, v: usize) -> Result<bool, TaskError> {
    require_kind("connectivity", g, UNDIRECTED_FAMILY)?;
    require_node(g, u)?;
    require_node(g, v)?;
    Ok(bfs_distances(&g.adjacency(), u)[v] != usize::MAX)
}

/// Weakly connected components, each sorted, ordered by smallest member.
pub fn connected_components(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.node_count();
    let mut adj = g.adjacency();
    if g.is_directed() {
        for (u, rev) in g.reverse_adjacency().into_iter().enumerate() {
            adj[u].extend(rev);
        }
    }
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut comp = vec![s];
        seen[s] = true;
        let mut i = 0;
        while i < comp.len() {
            let u = comp[i];
            i += 1;
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    comp.push(v);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Strongly connected components (iterative Kosaraju), each sorted and
/// ordered by smallest member.
pub fn strongly_connected_components(g: &Graph) -> Result<Vec<Vec<usize>>, TaskError> {
    require_kind("strongly_connected_components", g, &[GraphKind::Directed, GraphKind::WeightedDirected])?;
    let n = g.node_count();
    let adj = g.adjacency();
    let radj = g.reverse_adjacency();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for s in 0..n {
        if visited[s] {
            continue;
        }
        visited[s] = true;
        let mut stack = vec![(s, 0usize)];
        while let Some(&mut (u, ref mut i)) = stack.last_mut() {
            if let Some(&v) = adj[u].get(*i) {
                *i += 1;
                if !visited[v] {
                    visited[v] = true;
                    stack.push((v, 0));
                }
            } else {
                order.push(u);
                stack.pop();
            }
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut groups = Vec::new();
    for &s in order.iter().rev() {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = groups.len();
        let mut members = vec![s];
        comp[s] = id;
        let mut i = 0;
        while i < members.len() {
            let u = members[i];
            i += 1;
            for &v in &radj[u] {
                if comp[v] == usize::MAX {
                    comp[v] = id;
                    members.push(v);
                }
            }
        }
        members.sort_unstable();
        groups.push(members);
    }
    groups.sort_unstable_by_key(|g| g[0]);
    Ok(groups)
}

/// Kahn's algorithm, smallest ready node first. `None` when a directed
/// cycle exists.
pub fn topological_order(g: &Graph) -> Result<Option<Vec<usize>>, TaskError> {
    require_kind("topological_sort", g, &[GraphKind::Directed, GraphKind::WeightedDirected])?;
    let adj = g.adjacency();
    let mut indeg = vec![0usize; g.node_count()];
    for &(_, v) in g.edges() {
        indeg[v] += 1;
    }
    let mut ready: BinaryHeap<Reverse<usize>> =
        (0..g.node_count()).filter(|&v| indeg[v] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(g.node_count());
    while let Some(Reverse(u)) = ready.pop() {
        order.push(u);
        for &v in &adj[u] {
            indeg[v] -= 1;
            if indeg[v] == 0 {
                ready.push(Reverse(v));
            }
        }
    }
    Ok((order.len() == g.node_count()).then_some(order))
}

/// Undirected cycle detection: a forest has exactly `n - components` edges.
pub fn detect_cycle(g: &Graph) -> Result<bool, TaskError> {
    require_kind("cycle_detection", g, UNDIRECTED_FAMILY)?;
    let components = connected_components(g).len();
    Ok(g.edge_count() + components > g.node_count())
}

/// Longest shortest-path length in hops; `None` when disconnected.
pub fn diameter(g: &Graph) -> Result<Option<usize>, TaskError> {
    require_kind("diameter", g, UNDIRECTED_FAMILY)?;
    let adj = g.adjacency();
    let mut best = 0;
    for s in 0..g.node_count() {
        for d in bfs_distances(&adj, s) {
            if d == usize::MAX {
                return Ok(None);
            }
            best = best.max(d);
        }
    }
    Ok(Some(best))
}

/// Euler trail existence: non-isolated vertices connected and zero or two
/// odd-degree vertices. Isolated vertices are ignored.
pub fn has_euler_path(g: &Graph) -> Result<bool, TaskError> {
    require_kind("euler_path", g, UNDIRECTED_FAMILY)?;
    let deg = g.degrees();
    let odd = deg.iter().filter(|&&d| d % 2 == 1).count();
    if odd != 0 && odd != 2 {
        return Ok(false);
    }
    let touched = connected_components(g).into_iter().filter(|c| deg[c[0]] > 0 || c.len() > 1).count();
    Ok(touched <= 1)
}

/// Node set of the k-core (maximal subgraph with minimum degree >= k).
pub fn k_core(g: &Graph, k: usize) -> Result<Vec<usize>, TaskError> {
    require_kind("k_core", g, UNDIRECTED_FAMILY)?;
    let adj = g.adjacency();
    let mut deg = g.degrees();
    let mut removed = vec![false; g.node_count()];
    let mut stack: Vec<usize> = (0..g.node_count()).filter(|&v| deg[v] < k).collect();
    for &v in &stack {
        removed[v] = true;
    }
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if !removed[v] {
                deg[v] -= 1;
                if deg[v] < k {
                    removed[v] = true;
                    stack.push(v);
                }
            }
        }
    }
    Ok((0..g.node_count()).filter(|&v| !removed[v]).collect())
}
