//! Definitional brute-force oracles for small graphs and the harness that
//! compares them with the library solvers.
#![allow(dead_code)]

use std::collections::BTreeMap;

use graphwild::graph::{bipartite_split, Graph, GraphKind};
use graphwild::rng;
use graphwild::tasks::{solve, Answer, Params, TaskError, TaskId};
use rand::Rng;

/// Dense view of a graph: `w[u][v]` is the weight of arc u→v (both
/// directions for undirected kinds).
pub struct Dense {
    pub n: usize,
    pub directed: bool,
    pub w: Vec<Vec<Option<u64>>>,
}

impl Dense {
    pub fn of(g: &Graph) -> Self {
        let n = g.node_count();
        let directed = g.is_directed();
        let mut w = vec![vec![None; n]; n];
        for (u, v, wt) in g.weighted_edges() {
            w[u][v] = Some(wt);
            if !directed {
                w[v][u] = Some(wt);
            }
        }
        Dense { n, directed, w }
    }

    pub fn adj(&self, u: usize, v: usize) -> bool {
        self.w[u][v].is_some()
    }

    /// Undirected edge list (u < v) or arcs.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in 0..self.n {
                if self.adj(u, v) && (self.directed || u < v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn degree(&self, u: usize) -> usize {
        (0..self.n).filter(|&v| self.adj(u, v)).count()
    }
}

/// Candidate vertex pairs for `kind` on `n` nodes.
pub fn pair_space(kind: GraphKind, n: usize) -> Vec<(usize, usize)> {
    match kind {
        GraphKind::Directed | GraphKind::WeightedDirected => {
            (0..n).flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v))).collect()
        }
        GraphKind::Bipartite => {
            let u_size = n.div_ceil(2);
            (0..u_size).flat_map(|u| (u_size..n).map(move |v| (u, v))).collect()
        }
        _ => (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect(),
    }
}

pub fn build(kind: GraphKind, n: usize, edges: Vec<(usize, usize, Option<u64>)>) -> Graph {
    let partition = (kind == GraphKind::Bipartite).then(|| bipartite_split(n));
    Graph::from_parts(kind, n, edges, partition).expect("valid test graph")
}

/// Every graph of an unweighted kind on `n` nodes.
pub fn all_graphs(kind: GraphKind, n: usize) -> impl Iterator<Item = Graph> {
    let pairs = pair_space(kind, n);
    let m = pairs.len();
    (0u64..1 << m).map(move |mask| {
        let edges = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| (pairs[i].0, pairs[i].1, None)).collect();
        build(kind, n, edges)
    })
}

/// Seeded random graph of any kind with weights in 1..=9.
pub fn random_graph(kind: GraphKind, n: usize, seed: u64) -> Graph {
    let mut r = rng::seeded(seed);
    let p: f64 = r.random_range(0.15..0.85);
    let edges = pair_space(kind, n)
        .into_iter()
        .filter_map(|(u, v)| r.random_bool(p).then(|| (u, v, kind.is_weighted().then(|| r.random_range(1..=9)))))
        .collect();
    build(kind, n, edges)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                rec(cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

thread_local! {
    static PERMS: std::cell::RefCell<BTreeMap<usize, std::rc::Rc<Vec<Vec<usize>>>>> = Default::default();
}

fn perms(n: usize) -> std::rc::Rc<Vec<Vec<usize>>> {
    PERMS.with(|p| p.borrow_mut().entry(n).or_insert_with(|| std::rc::Rc::new(permutations(n))).clone())
}

/// Hop reachability closure (reflexive).
pub fn reach(d: &Dense) -> Vec<Vec<bool>> {
    let n = d.n;
    let mut r: Vec<Vec<bool>> = (0..n).map(|u| (0..n).map(|v| u == v || d.adj(u, v)).collect()).collect();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if r[i][k] && r[k][j] {
                    r[i][j] = true;
                }
            }
        }
    }
    r
}

/// Hop distances; `None` when unreachable.
pub fn hops(d: &Dense) -> Vec<Vec<Option<usize>>> {
    let n = d.n;
    let mut h: Vec<Vec<Option<usize>>> =
        (0..n).map(|u| (0..n).map(|v| if u == v { Some(0) } else if d.adj(u, v) { Some(1) } else { None }).collect()).collect();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (h[i][k], h[k][j]) {
                    if h[i][j].is_none_or(|c| a + b < c) {
                        h[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    h
}

/// Minimum weight over all simple paths s→t.
pub fn min_path_weight(d: &Dense, s: usize, t: usize) -> Option<u64> {
    fn dfs(d: &Dense, u: usize, t: usize, acc: u64, seen: &mut Vec<bool>, best: &mut Option<u64>) {
        if u == t {
            if best.is_none_or(|b| acc < b) {
                *best = Some(acc);
            }
            return;
        }
        for v in 0..d.n {
            if let (Some(w), false) = (d.w[u][v], seen[v]) {
                seen[v] = true;
                dfs(d, v, t, acc + w, seen, best);
                seen[v] = false;
            }
        }
    }
    let mut best = None;
    let mut seen = vec![false; d.n];
    seen[s] = true;
    dfs(d, s, t, 0, &mut seen, &mut best);
    best
}

pub fn is_path(d: &Dense, p: &[usize]) -> bool {
    p.iter().all(|&v| v < d.n) && p.windows(2).all(|w| d.adj(w[0], w[1]))
}

pub fn path_weight(d: &Dense, p: &[usize]) -> u64 {
    p.windows(2).map(|w| d.w[w[0]][w[1]].expect("checked path")).sum()
}

fn distinct(p: &[usize]) -> bool {
    let mut s = p.to_vec();
    s.sort_unstable();
    s.dedup();
    s.len() == p.len()
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..1 << n).map(move |m| (0..n).filter(|i| m >> i & 1 == 1).collect())
}

fn is_clique(d: &Dense, s: &[usize]) -> bool {
    s.iter().enumerate().all(|(i, &a)| s[i + 1..].iter().all(|&b| d.adj(a, b)))
}

fn is_independent(d: &Dense, s: &[usize]) -> bool {
    s.iter().enumerate().all(|(i, &a)| s[i + 1..].iter().all(|&b| !d.adj(a, b)))
}

fn is_vertex_cover(d: &Dense, s: &[usize]) -> bool {
    d.edges().iter().all(|(u, v)| s.contains(u) || s.contains(v))
}

/// Largest matching by exhaustive recursion over edges.
pub fn max_matching_size(d: &Dense) -> usize {
    fn rec(edges: &[(usize, usize)], used: &mut Vec<bool>) -> usize {
        let Some((&(u, v), rest)) = edges.split_first() else { return 0 };
        let skip = rec(rest, used);
        if used[u] || used[v] {
            return skip;
        }
        used[u] = true;
        used[v] = true;
        let take = 1 + rec(rest, used);
        used[u] = false;
        used[v] = false;
        skip.max(take)
    }
    rec(&d.edges(), &mut vec![false; d.n])
}

/// Smallest edge set covering every node, by enumeration of edge subsets.
pub fn min_edge_cover_enum(d: &Dense) -> Option<usize> {
    let e = d.edges();
    let mut best = None;
    for mask in 0u32..1 << e.len() {
        let mut covered = vec![false; d.n];
        for (i, &(u, v)) in e.iter().enumerate() {
            if mask >> i & 1 == 1 {
                covered[u] = true;
                covered[v] = true;
            }
        }
        if covered.iter().all(|c| *c) {
            let size = mask.count_ones() as usize;
            if best.is_none_or(|b| size < b) {
                best = Some(size);
            }
        }
    }
    best
}

fn euler_trail_exists(d: &Dense) -> bool {
    let edges = d.edges();
    fn rec(d: &Dense, u: usize, used: &mut Vec<bool>, edges: &[(usize, usize)], left: usize) -> bool {
        if left == 0 {
            return true;
        }
        for (i, &(a, b)) in edges.iter().enumerate() {
            if used[i] {
                continue;
            }
            let next = if a == u { b } else if b == u { a } else { continue };
            used[i] = true;
            if rec(d, next, used, edges, left - 1) {
                used[i] = false;
                return true;
            }
            used[i] = false;
        }
        false
    }
    edges.is_empty() || (0..d.n).any(|s| rec(d, s, &mut vec![false; edges.len()], &edges, edges.len()))
}

fn has_simple_cycle(d: &Dense) -> bool {
    fn dfs(d: &Dense, start: usize, u: usize, len: usize, seen: &mut Vec<bool>) -> bool {
        for v in 0..d.n {
            if !d.adj(u, v) {
                continue;
            }
            if v == start && len >= 3 {
                return true;
            }
            if !seen[v] && v > start {
                seen[v] = true;
                if dfs(d, start, v, len + 1, seen) {
                    return true;
                }
                seen[v] = false;
            }
        }
        false
    }
    (0..d.n).any(|s| {
        let mut seen = vec![false; d.n];
        seen[s] = true;
        dfs(d, s, s, 1, &mut seen)
    })
}

fn distance_regular(d: &Dense) -> bool {
    let h = hops(d);
    if h.iter().flatten().any(Option::is_none) {
        return false;
    }
    let dist = |a: usize, b: usize| h[a][b].expect("connected");
    let mut seen: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for u in 0..d.n {
        for v in 0..d.n {
            let i = dist(u, v);
            let c = (0..d.n).filter(|&w| d.adj(v, w) && dist(u, w) + 1 == i).count();
            let b = (0..d.n).filter(|&w| d.adj(v, w) && dist(u, w) == i + 1).count();
            if *seen.entry(i).or_insert((c, b)) != (c, b) {
                return false;
            }
        }
    }
    true
}

/// Solve (I - dP) x = (1 - d)/n with dangling mass spread uniformly, by
/// Gaussian elimination.
pub fn pagerank_exact(d: &Dense, damping: f64) -> Vec<f64> {
    let n = d.n;
    let nf = n as f64;
    let out: Vec<usize> = (0..n).map(|u| d.degree(u)).collect();
    let mut a = vec![vec![0.0; n + 1]; n];
    for v in 0..n {
        a[v][v] += 1.0;
        for u in 0..n {
            if out[u] == 0 {
                a[v][u] -= damping / nf;
            } else if d.adj(u, v) {
                a[v][u] -= damping / out[u] as f64;
            }
        }
        a[v][n] = (1.0 - damping) / nf;
    }
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).expect("rows");
        a.swap(col, piv);
        let p = a[col][col];
        for k in col..=n {
            a[col][k] /= p;
        }
        for r in 0..n {
            if r != col {
                let f = a[r][col];
                if f != 0.0 {
                    for k in col..=n {
                        a[r][k] -= f * a[col][k];
                    }
                }
            }
        }
    }
    (0..n).map(|v| a[v][n]).collect()
}

fn max_flow_by_cuts(d: &Dense, s: usize, t: usize) -> u64 {
    let others: Vec<usize> = (0..d.n).filter(|&v| v != s && v != t).collect();
    let mut best = u64::MAX;
    for mask in 0u32..1 << others.len() {
        let mut side = vec![false; d.n];
        side[s] = true;
        for (i, &v) in others.iter().enumerate() {
            side[v] = mask >> i & 1 == 1;
        }
        let cap: u64 = (0..d.n).flat_map(|u| (0..d.n).map(move |v| (u, v))).filter(|&(u, v)| side[u] && !side[v]).filter_map(|(u, v)| d.w[u][v]).sum();
        best = best.min(cap);
    }
    best
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + b.abs())
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

/// Every parameter assignment for `task` on `n` nodes.
pub fn all_params(task: TaskId, n: usize) -> Vec<Params> {
    let spec = task.spec();
    let mut out = vec![Params::new()];
    for p in &spec.params {
        let values: Vec<u64> = match p.kind {
            graphwild::tasks::ParamKind::Node => (0..n as u64).collect(),
            graphwild::tasks::ParamKind::Int { min, max } => (min..=max).collect(),
        };
        out = out
            .into_iter()
            .flat_map(|base| {
                values.iter().map(move |&v| {
                    let mut m = base.clone();
                    m.insert(p.name.to_string(), v);
                    m
                })
            })
            .collect();
    }
    let node_names: Vec<&str> = spec.params.iter().filter(|p| p.kind == graphwild::tasks::ParamKind::Node).map(|p| p.name).collect();
    out.retain(|m| {
        let mut vals: Vec<u64> = node_names.iter().map(|k| m[*k]).collect();
        vals.sort_unstable();
        vals.windows(2).all(|w| w[0] != w[1])
    });
    out
}

/// One random parameter assignment for `task`.
pub fn random_params(task: TaskId, n: usize, seed: u64) -> Option<Params> {
    let all = all_params(task, n);
    (!all.is_empty()).then(|| all[(rng::derive(seed, &[77]) % all.len() as u64) as usize].clone())
}

/// Compare the library answer for `(task, g, params)` with the oracle.
pub fn check(task: TaskId, g: &Graph, params: &Params) -> Result<(), String> {
    let d = Dense::of(g);
    let got = solve(task, g, params);
    let p = |k: &str| params[k] as usize;
    let fail = |msg: String| Err(format!("{task} on {:?} params {params:?}: {msg}", d.edges()));
    let answer = match (task, got) {
        (TaskId::MinEdgeCover, Err(TaskError::IsolatedVertex(_))) => {
            return if (0..d.n).any(|v| d.degree(v) == 0) { Ok(()) } else { fail("reported an isolated vertex".into()) };
        }
        (_, Err(e)) => return fail(format!("solver error {e}")),
        (_, Ok(a)) => a,
    };
    let ok = match (task, &answer) {
        (TaskId::Bipartite, Answer::Bool(b)) => {
            let e = d.edges();
            *b == (0u32..1 << d.n).any(|m| e.iter().all(|&(u, v)| (m >> u & 1) != (m >> v & 1)))
        }
        (TaskId::TopologicalSort, a) => {
            let exists = perms(d.n).iter().any(|pm| {
                let mut pos = vec![0; d.n];
                pm.iter().enumerate().for_each(|(i, &v)| pos[v] = i);
                d.edges().iter().all(|&(u, v)| pos[u] < pos[v])
            });
            match a {
                Answer::None => !exists,
                Answer::Nodes(order) => {
                    let mut pos = vec![usize::MAX; d.n];
                    order.iter().enumerate().for_each(|(i, &v)| if v < d.n { pos[v] = i });
                    exists && order.len() == d.n && distinct(order) && d.edges().iter().all(|&(u, v)| pos[u] < pos[v])
                }
                _ => false,
            }
        }
        (TaskId::ShortestPath, a) => {
            let (s, t) = (p("source"), p("target"));
            match (a, min_path_weight(&d, s, t)) {
                (Answer::None, None) => true,
                (Answer::Nodes(path), Some(best)) => {
                    is_path(&d, path) && path.first() == Some(&s) && path.last() == Some(&t) && path_weight(&d, path) == best
                }
                _ => false,
            }
        }
        (TaskId::HamiltonPath, a) => {
            let exists = perms(d.n).iter().any(|pm| is_path(&d, pm));
            match a {
                Answer::None => !exists,
                Answer::Nodes(path) => exists && path.len() == d.n && distinct(path) && is_path(&d, path),
                _ => false,
            }
        }
        (TaskId::MaxFlow, Answer::Number(x)) => *x == max_flow_by_cuts(&d, p("source"), p("sink")) as f64,
        (TaskId::ClusteringCoefficient, Answer::Number(x)) => {
            let v = p("node");
            let nb: Vec<usize> = (0..d.n).filter(|&w| d.adj(v, w)).collect();
            let want = if nb.len() < 2 {
                0.0
            } else {
                let links = nb.iter().enumerate().map(|(i, &a)| nb[i + 1..].iter().filter(|&&b| d.adj(a, b)).count()).sum::<usize>();
                links as f64 / (nb.len() * (nb.len() - 1) / 2) as f64
            };
            close(*x, want, 1e-9)
        }
        (TaskId::CommonNeighbors, Answer::Nodes(v)) => {
            let (a, b) = (p("u"), p("v"));
            sorted(v.clone()) == (0..d.n).filter(|&w| d.adj(a, w) && d.adj(b, w)).collect::<Vec<_>>()
        }
        (TaskId::StronglyConnectedComponents, Answer::Groups(groups)) => {
            let r = reach(&d);
            let mut want: Vec<Vec<usize>> = Vec::new();
            for v in 0..d.n {
                if !want.iter().any(|g| g.contains(&v)) {
                    want.push((0..d.n).filter(|&w| r[v][w] && r[w][v]).collect());
                }
            }
            let mut got: Vec<Vec<usize>> = groups.iter().map(|g| sorted(g.clone())).collect();
            got.sort();
            want.sort();
            got == want
        }
        (TaskId::Connectivity, Answer::Bool(b)) => *b == reach(&d)[p("u")][p("v")],
        (TaskId::EulerPath, Answer::Bool(b)) => *b == euler_trail_exists(&d),
        (TaskId::Diameter, a) => {
            let h = hops(&d);
            let want = if h.iter().flatten().any(Option::is_none) { None } else { h.iter().flatten().map(|x| x.unwrap()).max() };
            match (a, want) {
                (Answer::None, None) => true,
                (Answer::Number(x), Some(w)) => *x == w as f64,
                _ => false,
            }
        }
        (TaskId::Regular, Answer::Bool(b)) => *b == (0..d.n).all(|v| d.degree(v) == d.degree(0)),
        (TaskId::DistanceRegular, Answer::Bool(b)) => *b == distance_regular(&d),
        (TaskId::CycleDetection, Answer::Bool(b)) => *b == has_simple_cycle(&d),
        (TaskId::MaxClique, Answer::Nodes(s)) => {
            let best = subsets(d.n).filter(|s| is_clique(&d, s)).map(|s| s.len()).max().unwrap_or(0);
            distinct(s) && s.iter().all(|&v| v < d.n) && is_clique(&d, s) && s.len() == best
        }
        (TaskId::MaxIndependentSet, Answer::Nodes(s)) => {
            let best = subsets(d.n).filter(|s| is_independent(&d, s)).map(|s| s.len()).max().unwrap_or(0);
            distinct(s) && s.iter().all(|&v| v < d.n) && is_independent(&d, s) && s.len() == best
        }
        (TaskId::MinVertexCover, Answer::Nodes(s)) => {
            let best = subsets(d.n).filter(|s| is_vertex_cover(&d, s)).map(|s| s.len()).min().unwrap_or(0);
            distinct(s) && s.iter().all(|&v| v < d.n) && is_vertex_cover(&d, s) && s.len() == best
        }
        (TaskId::MinEdgeCover, Answer::Edges(es)) => {
            let best = if d.edges().len() <= 10 { min_edge_cover_enum(&d).expect("no isolated node") } else { d.n - max_matching_size(&d) };
            let mut covered = vec![false; d.n];
            let valid = es.iter().all(|&(u, v)| {
                let ok = u < d.n && v < d.n && d.adj(u, v);
                if ok {
                    covered[u] = true;
                    covered[v] = true;
                }
                ok
            });
            let mut norm: Vec<(usize, usize)> = es.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
            norm.sort_unstable();
            norm.dedup();
            valid && norm.len() == es.len() && covered.iter().all(|c| *c) && es.len() == best
        }
        (TaskId::KCore, Answer::Nodes(s)) => {
            let k = p("k");
            let want = subsets(d.n)
                .filter(|s| s.iter().all(|&v| s.iter().filter(|&&w| d.adj(v, w)).count() >= k))
                .max_by_key(|s| s.len())
                .unwrap_or_default();
            sorted(s.clone()) == want
        }
        (TaskId::PageRank, Answer::Scores(m)) => {
            let want = pagerank_exact(&d, 0.85);
            m.len() == d.n && (0..d.n).all(|v| m.get(&v).is_some_and(|x| (x - want[v]).abs() < 1e-6))
        }
        (TaskId::SingleSourceShortestPath, Answer::Scores(m)) => {
            let s = p("source");
            let want: BTreeMap<usize, f64> = (0..d.n).filter_map(|t| min_path_weight(&d, s, t).map(|w| (t, w as f64))).collect();
            *m == want
        }
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        fail(format!("answer {}", answer.to_line()))
    }
}

/// Unweighted kinds that `task` accepts.
pub fn unweighted_kinds(task: TaskId) -> Vec<GraphKind> {
    task.spec().kinds.iter().copied().filter(|k| !k.is_weighted()).collect()
}

pub fn weighted_kinds(task: TaskId) -> Vec<GraphKind> {
    task.spec().kinds.iter().copied().filter(|k| k.is_weighted()).collect()
}

/// Largest n checked exhaustively for `kind`.
pub fn exhaustive_limit(kind: GraphKind) -> usize {
    if kind.is_directed() {
        5
    } else {
        6
    }
}

#[derive(Debug, Default)]
pub struct SweepStats {
    pub cases: usize,
    pub failures: Vec<String>,
}

/// Exhaustive sweep over unweighted kinds, all parameters, n in 1..=limit;
/// `directed_extra` random directed graphs at n = 6.
pub fn exhaustive_sweep(task: TaskId, max_n: usize, directed_extra: usize, seed: u64) -> SweepStats {
    let mut st = SweepStats::default();
    for kind in unweighted_kinds(task) {
        let limit = exhaustive_limit(kind).min(max_n);
        for n in 1..=limit {
            let params = all_params(task, n);
            for g in all_graphs(kind, n) {
                for ps in &params {
                    st.cases += 1;
                    if let Err(e) = check(task, &g, ps) {
                        if st.failures.len() < 5 {
                            st.failures.push(e);
                        }
                    }
                }
            }
        }
        if kind.is_directed() && max_n >= 6 {
            for i in 0..directed_extra {
                let s = rng::derive(seed, &[i as u64]);
                let g = random_graph(kind, 6, s);
                if let Some(ps) = random_params(task, 6, s) {
                    st.cases += 1;
                    if let Err(e) = check(task, &g, &ps) {
                        st.failures.push(e);
                    }
                }
            }
        }
    }
    st
}

/// `count` seeded instances per weighted kind, n in 2..=6.
pub fn weighted_sweep(task: TaskId, count: usize, seed: u64) -> SweepStats {
    let mut st = SweepStats::default();
    for kind in weighted_kinds(task) {
        for i in 0..count {
            let s = rng::derive_named(seed, task.name(), &[i as u64]);
            let n = 2 + (s % 5) as usize;
            let g = random_graph(kind, n, s);
            let Some(ps) = random_params(task, n, s) else { continue };
            st.cases += 1;
            if let Err(e) = check(task, &g, &ps) {
                if st.failures.len() < 5 {
                    st.failures.push(e);
                }
            }
        }
    }
    st
}
