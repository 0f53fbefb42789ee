//! Built-in algorithm documents. Solution code is POSIX sh + awk written
//! against the shim contract: `$EDGE_FILE`, `$N`, `$GRAPH_KIND` and
//! `$PARAM_<name>` are set, and the program assigns `answer`.

use serde::{Deserialize, Serialize};

use crate::graph::GraphKind;
use crate::tasks::{ParamKind, TaskId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DocSource {
    Catalog,
    Expert,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocParam {
    pub name: String,
    #[serde(flatten)]
    pub kind: ParamKind,
}

/// One algorithm document: the problem, the graph types it applies to, its
/// parameters and a reference solution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgorithmDoc {
    pub doc_id: String,
    pub task_id: TaskId,
    pub graph_types: Vec<GraphKind>,
    /// Question text; `{name}` placeholders take parameter values.
    pub problem_text_template: String,
    pub parameters: Vec<DocParam>,
    pub solution_code: String,
    pub source: DocSource,
    /// Prose description used by the code library.
    #[serde(default)]
    pub description: String,
}

impl AlgorithmDoc {
    /// Library text: problem, graph types, parameters and code.
    pub fn library_text(&self) -> String {
        let kinds: Vec<&str> = self.graph_types.iter().map(|k| k.name()).collect();
        let params: Vec<String> = self
            .parameters
            .iter()
            .map(|p| match p.kind {
                ParamKind::Node => format!("{} (node)", p.name),
                ParamKind::Int { min, max } => format!("{} (integer {min}..{max})", p.name),
            })
            .collect();
        format!(
            "Problem: {}\n{}\nGraph types: {}\nParameters: {}\nCode:\n{}",
            self.task_id.spec().title,
            self.description,
            kinds.join(", "),
            if params.is_empty() { "none".to_string() } else { params.join(", ") },
            self.solution_code.trim_end()
        )
    }
}

struct Entry {
    task: TaskId,
    question: &'static str,
    description: &'static str,
    code: &'static str,
}

const BIPARTITE: &str = r#"answer=$(awk -v n="$N" '
/^#/ { next }
{ a[$1] = a[$1] " " $2; a[$2] = a[$2] " " $1 }
END {
    ok = 1
    for (s = 0; s < n && ok; s++) {
        if (s in col) continue
        col[s] = 0; head = 0; tail = 0; q[tail++] = s
        while (head < tail && ok) {
            u = q[head++]; k = split(a[u], nb, " ")
            for (i = 1; i <= k; i++) {
                v = nb[i]
                if (!(v in col)) { col[v] = 1 - col[u]; q[tail++] = v }
                else if (col[v] == col[u]) { ok = 0; break }
            }
        }
    }
    print (ok ? "true" : "false")
}' "$EDGE_FILE")
"#;

const TOPOLOGICAL_SORT: &str = r#"answer=$(awk -v n="$N" '
/^#/ { next }
{ a[$1] = a[$1] " " $2; indeg[$2]++ }
END {
    head = 0; tail = 0; out = ""
    for (v = 0; v < n; v++) if (!indeg[v]) q[tail++] = v
    while (head < tail) {
        u = q[head++]; out = out (out == "" ? "" : ",") u
        k = split(a[u], nb, " ")
        for (i = 1; i <= k; i++) if (--indeg[nb[i]] == 0) q[tail++] = nb[i]
    }
    if (tail < n) print "null"; else print "[" out "]"
}' "$EDGE_FILE")
"#;

const SHORTEST_PATH: &str = r#"answer=$(awk -v n="$N" -v kind="$GRAPH_KIND" -v s="$PARAM_source" -v t="$PARAM_target" '
/^#/ { next }
{
    a[$1] = a[$1] " " $2; w[$1, $2] = $3
    if (kind ~ /undirected/) { a[$2] = a[$2] " " $1; w[$2, $1] = $3 }
}
END {
    for (v = 0; v < n; v++) d[v] = -1
    d[s] = 0
    while (1) {
        u = -1
        for (v = 0; v < n; v++) if (d[v] >= 0 && !done[v] && (u < 0 || d[v] < d[u])) u = v
        if (u < 0) break
        done[u] = 1; k = split(a[u], nb, " ")
        for (i = 1; i <= k; i++) {
            v = nb[i]; nd = d[u] + w[u, v]
            if (d[v] < 0 || nd < d[v]) { d[v] = nd; p[v] = u }
        }
    }
    if (d[t] < 0) { print "null"; exit }
    path = t; v = t
    while (v != s) { v = p[v]; path = v "," path }
    print "[" path "]"
}' "$EDGE_FILE")
"#;

const HAMILTON_PATH: &str = r#"answer=$(awk -v n="$N" -v kind="$GRAPH_KIND" '
function dfs(u, depth,   k, i, v, nb) {
    path[depth] = u
    if (depth == n) return 1
    used[u] = 1; k = split(a[u], nb, " ")
    for (i = 1; i <= k; i++) { v = nb[i]; if (!used[v] && dfs(v, depth + 1)) return 1 }
    used[u] = 0
    return 0
}
/^#/ { next }
{ a[$1] = a[$1] " " $2; if (kind !~ /directed$/ || kind ~ /undirected/) a[$2] = a[$2] " " $1 }
END {
    for (s = 0; s < n; s++) {
        if (dfs(s, 1)) {
            out = path[1]
            for (i = 2; i <= n; i++) out = out "," path[i]
            print "[" out "]"
            exit
        }
    }
    print "null"
}' "$EDGE_FILE")
"#;

const MAX_FLOW: &str = r#"answer=$(awk -v s="$PARAM_source" -v t="$PARAM_sink" '
/^#/ { next }
{ cap[$1, $2] += $3; a[$1] = a[$1] " " $2; a[$2] = a[$2] " " $1 }
END {
    flow = 0
    while (1) {
        split("", prev); prev[s] = s; head = 0; tail = 0; q[tail++] = s
        while (head < tail && !(t in prev)) {
            u = q[head++]; k = split(a[u], nb, " ")
            for (i = 1; i <= k; i++) {
                v = nb[i]
                if (!(v in prev) && cap[u, v] > 0) { prev[v] = u; q[tail++] = v }
            }
        }
        if (!(t in prev)) break
        b = -1
        for (v = t; v != s; v = prev[v]) { u = prev[v]; if (b < 0 || cap[u, v] < b) b = cap[u, v] }
        for (v = t; v != s; v = prev[v]) { u = prev[v]; cap[u, v] -= b; cap[v, u] += b }
        flow += b
    }
    print flow
}' "$EDGE_FILE")
"#;

const CLUSTERING: &str = r#"answer=$(awk -v x="$PARAM_node" '
/^#/ { next }
{ adj[$1, $2] = 1; adj[$2, $1] = 1; a[$1] = a[$1] " " $2; a[$2] = a[$2] " " $1 }
END {
    k = split(a[x], nb, " ")
    if (k < 2) { print 0; exit }
    tri = 0
    for (i = 1; i <= k; i++) for (j = i + 1; j <= k; j++) if ((nb[i], nb[j]) in adj) tri++
    printf "%.12g\n", 2 * tri / (k * (k - 1))
}' "$EDGE_FILE")
"#;

const COMMON_NEIGHBORS: &str = r#"answer=$(awk -v n="$N" -v u="$PARAM_u" -v v="$PARAM_v" '
/^#/ { next }
$1 == u { nu[$2] = 1 } $2 == u { nu[$1] = 1 }
$1 == v { nv[$2] = 1 } $2 == v { nv[$1] = 1 }
END {
    out = ""
    for (w = 0; w < n; w++) if ((w in nu) && (w in nv)) out = out (out == "" ? "" : ",") w
    print "[" out "]"
}' "$EDGE_FILE")
"#;

const SCC: &str = r#"answer=$(awk -v n="$N" '
/^#/ { next }
{ r[$1, $2] = 1 }
END {
    for (v = 0; v < n; v++) r[v, v] = 1
    for (k = 0; k < n; k++) for (i = 0; i < n; i++) if ((i, k) in r) for (j = 0; j < n; j++) if ((k, j) in r) r[i, j] = 1
    out = ""
    for (i = 0; i < n; i++) {
        if (i in seen) continue
        grp = ""
        for (j = i; j < n; j++) if (((i, j) in r) && ((j, i) in r)) { seen[j] = 1; grp = grp (grp == "" ? "" : ",") j }
        out = out (out == "" ? "" : ",") "[" grp "]"
    }
    print "[" out "]"
}' "$EDGE_FILE")
"#;

const CONNECTIVITY: &str = r#"answer=$(awk -v u="$PARAM_u" -v v="$PARAM_v" '
/^#/ { next }
{ a[$1] = a[$1] " " $2; a[$2] = a[$2] " " $1 }
END {
    seen[u] = 1; head = 0; tail = 0; q[tail++] = u
    while (head < tail) {
        x = q[head++]; k = split(a[x], nb, " ")
        for (i = 1; i <= k; i++) if (!(nb[i] in seen)) { seen[nb[i]] = 1; q[tail++] = nb[i] }
    }
    print ((v in seen) ? "true" : "false")
}' "$EDGE_FILE")
"#;

const EULER_PATH: &str = r#"answer=$(awk -v n="$N" '
/^#/ { next }
{ deg[$1]++; deg[$2]++; a[$1] = a[$1] " " $2; a[$2] = a[$2] " " $1 }
END {
    odd = 0; start = -1
    for (v = 0; v < n; v++) { if (deg[v] % 2) odd++; if (deg[v] > 0 && start < 0) start = v }
    if (odd != 0 && odd != 2) { print "false"; exit }
    if (start < 0) { print "true"; exit }
    seen[start] = 1; head = 0; tail = 0; q[tail++] = start
    while (head < tail) {
        x = q[head++]; k = split(a[x], nb, " ")
        for (i = 1; i <= k; i++) if (!(nb[i] in seen)) { seen[nb[i]] = 1; q[tail++] = nb[i] }
    }
    for (v = 0; v < n; v++) if (deg[v] > 0 && !(v in seen)) { print "false"; exit }
    print "true"
}' "$EDGE_FILE")
"#;

const DIAMETER: &str = r#"answer=$(awk -v n="$N" '
/^#/ { next }
{ a[$1] = a[$1] " " $2; a[$2] = a[$2] " " $1 }
END {
    best = 0
    for (s = 0; s < n; s++) {
        split("", d); d[s] = 0; head = 0; tail = 0; q[tail++] = s
        while (head < tail) {
            x = q[head++]; k = split(a[x], nb, " ")
            for (i = 1; i <= k; i++) if (!(nb[i] in d)) { d[nb[i]] = d[x] + 1; q[tail++] = nb[i] }
        }
        if (tail < n) { print "null"; exit }
        for (v = 0; v < n; v++) if (d[v] > best) best = d[v]
    }
    print best
}' "$EDGE_FILE")
"#;

const REGULAR: &str = r#"answer=$(awk -v n="$N" '
/^#/ { next }
{ deg[$1]++; deg[$2]++ }
END {
    for (v = 1; v < n; v++) if (deg[v] + 0 != deg[0] + 0) { print "false"; exit }
    print "true"
}' "$EDGE_FILE")
"#;

const DISTANCE_REGULAR: &str = r#"answer=$(awk -v n="$N" '
/^#/ { next }
{ a[$1] = a[$1] " " $2; a[$2] = a[$2] " " $1 }
END {
    for (s = 0; s < n; s++) {
        d[s, s] = 0; head = 0; tail = 0; q[tail++] = s
        while (head < tail) {
            x = q[head++]; k = split(a[x], nb, " ")
            for (i = 1; i <= k; i++) if (!((s, nb[i]) in d)) { d[s, nb[i]] = d[s, x] + 1; q[tail++] = nb[i] }
        }
        if (tail < n) { print "false"; exit }
    }
    for (u = 0; u < n; u++) for (v = 0; v < n; v++) {
        dist = d[u, v]; c = 0; b = 0; k = split(a[v], nb, " ")
        for (i = 1; i <= k; i++) {
            dw = d[u, nb[i]]
            if (dw + 1 == dist) c++
            else if (dw == dist + 1) b++
        }
        if (dist in cc) {
            if (cc[dist] != c || bb[dist] != b) { print "false"; exit }
        } else { cc[dist] = c; bb[dist] = b }
    }
    print "true"
}' "$EDGE_FILE")
"#;

const CYCLE_DETECTION: &str = r#"answer=$(awk -v n="$N" '
function find(x) { while (p[x] != x) { p[x] = p[p[x]]; x = p[x] } return x }
BEGIN { for (v = 0; v < n; v++) p[v] = v; cyc = 0 }
/^#/ { next }
{ ra = find($1); rb = find($2); if (ra == rb) cyc = 1; else p[ra] = rb }
END { print (cyc ? "true" : "false") }' "$EDGE_FILE")
"#;

const MAX_CLIQUE: &str = r#"answer=$(awk -v n="$N" '
function expand(r, size, cand,   k, i, j, v, nx, c) {
    k = split(cand, c, " ")
    if (k == 0) { if (size > best) { best = size; bestset = r } return }
    for (i = 1; i <= k; i++) {
        if (size + k - i + 1 <= best) return
        v = c[i]; nx = ""
        for (j = i + 1; j <= k; j++) if ((v, c[j]) in adj) nx = nx " " c[j]
        expand(r " " v, size + 1, nx)
    }
}
/^#/ { next }
{ adj[$1, $2] = 1; adj[$2, $1] = 1 }
END {
    all = ""
    for (v = 0; v < n; v++) all = all " " v
    best = 0; expand("", 0, all)
    sub(/^ /, "", bestset); gsub(/ /, ",", bestset)
    print "[" bestset "]"
}' "$EDGE_FILE")
"#;

const MAX_INDEPENDENT_SET: &str = r#"answer=$(awk -v n="$N" '
function expand(r, size, cand,   k, i, j, v, nx, c) {
    k = split(cand, c, " ")
    if (k == 0) { if (size > best) { best = size; bestset = r } return }
    for (i = 1; i <= k; i++) {
        if (size + k - i + 1 <= best) return
        v = c[i]; nx = ""
        for (j = i + 1; j <= k; j++) if (!((v, c[j]) in adj)) nx = nx " " c[j]
        expand(r " " v, size + 1, nx)
    }
}
/^#/ { next }
{ adj[$1, $2] = 1; adj[$2, $1] = 1 }
END {
    all = ""
    for (v = 0; v < n; v++) all = all " " v
    best = 0; expand("", 0, all)
    sub(/^ /, "", bestset); gsub(/ /, ",", bestset)
    print "[" bestset "]"
}' "$EDGE_FILE")
"#;

const MIN_VERTEX_COVER: &str = r#"answer=$(awk -v n="$N" '
function expand(r, size, cand,   k, i, j, v, nx, c) {
    k = split(cand, c, " ")
    if (k == 0) { if (size > best) { best = size; bestset = r } return }
    for (i = 1; i <= k; i++) {
        if (size + k - i + 1 <= best) return
        v = c[i]; nx = ""
        for (j = i + 1; j <= k; j++) if (!((v, c[j]) in adj)) nx = nx " " c[j]
        expand(r " " v, size + 1, nx)
    }
}
/^#/ { next }
{ adj[$1, $2] = 1; adj[$2, $1] = 1 }
END {
    all = ""
    for (v = 0; v < n; v++) all = all " " v
    best = 0; expand("", 0, all)
    k = split(bestset, ind, " ")
    for (i = 1; i <= k; i++) skip[ind[i]] = 1
    out = ""
    for (v = 0; v < n; v++) if (!(v in skip)) out = out (out == "" ? "" : ",") v
    print "[" out "]"
}' "$EDGE_FILE")
"#;

const MIN_EDGE_COVER: &str = r#"answer=$(awk -v n="$N" '
function search(u, size,   k, i, v, nb, x, rem) {
    while (u < n && (u in mate)) u++
    if (u >= n) {
        if (size > best) {
            best = size; split("", bm)
            for (x = 0; x < n; x++) if (mate[x] >= 0) bm[x] = mate[x]
        }
        return
    }
    rem = 0
    for (x = u; x < n; x++) if (!(x in mate)) rem++
    if (size + int(rem / 2) <= best) return
    k = split(a[u], nb, " ")
    for (i = 1; i <= k; i++) {
        v = nb[i]
        if (!(v in mate)) { mate[u] = v; mate[v] = u; search(u + 1, size + 1); delete mate[u]; delete mate[v] }
    }
    mate[u] = -1; search(u + 1, size); delete mate[u]
}
/^#/ { next }
{ a[$1] = a[$1] " " $2; a[$2] = a[$2] " " $1 }
END {
    for (v = 0; v < n; v++) if (a[v] == "") exit 3
    best = -1; search(0, 0)
    out = ""
    for (v = 0; v < n; v++) {
        if (v in bm) { if (bm[v] + 0 > v) out = out (out == "" ? "" : ",") "[" v "," bm[v] "]" }
        else { split(a[v], nb, " "); out = out (out == "" ? "" : ",") "[" v "," nb[1] "]" }
    }
    print "[" out "]"
}' "$EDGE_FILE")
"#;

const K_CORE: &str = r#"answer=$(awk -v n="$N" -v k="$PARAM_k" '
/^#/ { next }
{ deg[$1]++; deg[$2]++; a[$1] = a[$1] " " $2; a[$2] = a[$2] " " $1 }
END {
    changed = 1
    while (changed) {
        changed = 0
        for (v = 0; v < n; v++) {
            if ((v in gone) || deg[v] + 0 >= k + 0) continue
            gone[v] = 1; changed = 1; m = split(a[v], nb, " ")
            for (i = 1; i <= m; i++) deg[nb[i]]--
        }
    }
    out = ""
    for (v = 0; v < n; v++) if (!(v in gone)) out = out (out == "" ? "" : ",") v
    print "[" out "]"
}' "$EDGE_FILE")
"#;

const PAGERANK: &str = r#"answer=$(awk -v n="$N" -v kind="$GRAPH_KIND" '
/^#/ { next }
{
    src[++m] = $1; dst[m] = $2; out[$1]++
    if (kind !~ /directed$/ || kind ~ /undirected/) { src[++m] = $2; dst[m] = $1; out[$2]++ }
}
END {
    d = 0.85
    for (v = 0; v < n; v++) x[v] = 1 / n
    for (it = 0; it < 100; it++) {
        dang = 0
        for (v = 0; v < n; v++) if (!out[v]) dang += x[v]
        for (v = 0; v < n; v++) y[v] = (1 - d) / n + d * dang / n
        for (e = 1; e <= m; e++) y[dst[e]] += d * x[src[e]] / out[src[e]]
        diff = 0
        for (v = 0; v < n; v++) { diff += (x[v] > y[v] ? x[v] - y[v] : y[v] - x[v]); x[v] = y[v] }
        if (diff < 1e-10) break
    }
    s = ""
    for (v = 0; v < n; v++) s = s (s == "" ? "" : ",") "\"" v "\":" sprintf("%.12g", x[v])
    print "{" s "}"
}' "$EDGE_FILE")
"#;

const SINGLE_SOURCE: &str = r#"answer=$(awk -v n="$N" -v kind="$GRAPH_KIND" -v s="$PARAM_source" '
/^#/ { next }
{
    a[$1] = a[$1] " " $2; w[$1, $2] = $3
    if (kind ~ /undirected/) { a[$2] = a[$2] " " $1; w[$2, $1] = $3 }
}
END {
    for (v = 0; v < n; v++) d[v] = -1
    d[s] = 0
    while (1) {
        u = -1
        for (v = 0; v < n; v++) if (d[v] >= 0 && !done[v] && (u < 0 || d[v] < d[u])) u = v
        if (u < 0) break
        done[u] = 1; k = split(a[u], nb, " ")
        for (i = 1; i <= k; i++) { v = nb[i]; nd = d[u] + w[u, v]; if (d[v] < 0 || nd < d[v]) d[v] = nd }
    }
    out = ""
    for (v = 0; v < n; v++) if (d[v] >= 0) out = out (out == "" ? "" : ",") "\"" v "\":" d[v]
    print "{" out "}"
}' "$EDGE_FILE")
"#;

const ENTRIES: &[Entry] = &[
    Entry {
        task: TaskId::Bipartite,
        question: "Determine whether the graph is bipartite, i.e. whether its nodes can be split into two sets so that no edge joins two nodes of the same set. Answer true or false.",
        description: "Breadth-first two-colouring: colour each component alternately and report a conflict when an edge joins equal colours.",
        code: BIPARTITE,
    },
    Entry {
        task: TaskId::TopologicalSort,
        question: "Give a topological ordering of the nodes, a list in which every edge points from an earlier node to a later one. Answer null if the graph has a directed cycle.",
        description: "Kahn's algorithm: repeatedly remove nodes of in-degree zero; leftover nodes mean a directed cycle.",
        code: TOPOLOGICAL_SORT,
    },
    Entry {
        task: TaskId::ShortestPath,
        question: "Find the shortest path from node {source} to node {target}, the path of minimal total edge weight. Answer with the list of nodes on the path, or null if node {target} is unreachable.",
        description: "Dijkstra's algorithm with predecessor tracking, then walk predecessors back from the target.",
        code: SHORTEST_PATH,
    },
    Entry {
        task: TaskId::HamiltonPath,
        question: "Find a Hamilton path, a path that visits every node exactly once, following edge directions if the graph is directed. Answer with the node list, or null if no such path exists.",
        description: "Depth-first backtracking from every start node, extending the path with unvisited neighbours.",
        code: HAMILTON_PATH,
    },
    Entry {
        task: TaskId::MaxFlow,
        question: "Edge weights are capacities. What is the maximum flow from node {source} to node {sink}? Answer with a number.",
        description: "Edmonds-Karp: augment along shortest residual paths found by breadth-first search until none remain.",
        code: MAX_FLOW,
    },
    Entry {
        task: TaskId::ClusteringCoefficient,
        question: "What is the clustering coefficient of node {node}, the fraction of pairs of its neighbours that are themselves adjacent? Use 0 when the node has fewer than two neighbours.",
        description: "Count edges among the neighbours of the node and divide by deg*(deg-1)/2.",
        code: CLUSTERING,
    },
    Entry {
        task: TaskId::CommonNeighbors,
        question: "Which nodes are common neighbors of node {u} and node {v}, i.e. adjacent to both? Answer with a list of node ids.",
        description: "Intersect the neighbour sets of the two nodes.",
        code: COMMON_NEIGHBORS,
    },
    Entry {
        task: TaskId::StronglyConnectedComponents,
        question: "List the strongly connected components of the graph, each as a list of node ids.",
        description: "Transitive closure by Floyd-Warshall; two nodes share a component when each reaches the other.",
        code: SCC,
    },
    Entry {
        task: TaskId::Connectivity,
        question: "Is there a path between node {u} and node {v}? Answer true or false.",
        description: "Breadth-first search from one node, then check whether the other was reached.",
        code: CONNECTIVITY,
    },
    Entry {
        task: TaskId::EulerPath,
        question: "Does the graph have an Euler path, a trail that uses every edge exactly once? Answer true or false.",
        description: "Zero or two odd-degree nodes, and all nodes with edges in one connected component; isolated nodes are ignored.",
        code: EULER_PATH,
    },
    Entry {
        task: TaskId::Diameter,
        question: "What is the diameter of the graph, the largest number of edges on a shortest path between two nodes? Answer null if the graph is disconnected.",
        description: "Breadth-first search from every node and keep the largest distance seen.",
        code: DIAMETER,
    },
    Entry {
        task: TaskId::Regular,
        question: "Is the graph regular, i.e. do all nodes have the same degree? Answer true or false.",
        description: "Compare every node degree with the degree of node 0.",
        code: REGULAR,
    },
    Entry {
        task: TaskId::DistanceRegular,
        question: "Is the graph distance-regular? For two nodes at distance i, the number of neighbours of one at distance i-1 and at distance i+1 from the other must depend only on i. Answer true or false.",
        description: "All-pairs breadth-first distances, then check that the intersection numbers are consistent for every pair.",
        code: DISTANCE_REGULAR,
    },
    Entry {
        task: TaskId::CycleDetection,
        question: "Does the undirected graph contain a cycle? Answer true or false.",
        description: "Union-find over the edges; an edge inside one set closes a cycle.",
        code: CYCLE_DETECTION,
    },
    Entry {
        task: TaskId::MaxClique,
        question: "Find a maximum clique, a largest set of nodes that are pairwise adjacent. Answer with a list of node ids.",
        description: "Branch and bound over candidate sets with a size bound; enumerate the cliques in the graph and keep the largest.",
        code: MAX_CLIQUE,
    },
    Entry {
        task: TaskId::MaxIndependentSet,
        question: "Find a maximum independent set, a largest set of nodes with no edge between any two of them. Answer with a list of node ids.",
        description: "Branch and bound over non-adjacent candidates, keeping the largest set found.",
        code: MAX_INDEPENDENT_SET,
    },
    Entry {
        task: TaskId::MinVertexCover,
        question: "Find a minimum vertex cover, a smallest set of nodes touching every edge. Answer with a list of node ids.",
        description: "The complement of a maximum independent set is a minimum vertex cover.",
        code: MIN_VERTEX_COVER,
    },
    Entry {
        task: TaskId::MinEdgeCover,
        question: "Find a minimum edge cover, a smallest set of edges such that every vertex is incident to at least one edge in the set. Answer with a list of [u, v] pairs.",
        description: "Take a maximum matching and add one edge for each unmatched node.",
        code: MIN_EDGE_COVER,
    },
    Entry {
        task: TaskId::KCore,
        question: "Which nodes belong to the {k}-core, the largest subgraph in which every node has degree at least {k}? Answer with a list of node ids.",
        description: "Peel nodes of degree below k until none remain.",
        code: K_CORE,
    },
    Entry {
        task: TaskId::PageRank,
        question: "Compute the PageRank score of every node with damping factor 0.85. Answer with a JSON object mapping node id to score.",
        description: "Power iteration with uniform teleport; dangling nodes spread their score evenly; stop after 100 rounds or when the L1 change drops below 1e-10.",
        code: PAGERANK,
    },
];

const SINGLE_SOURCE_ENTRY: Entry = Entry {
    task: TaskId::SingleSourceShortestPath,
    question: "Compute the shortest-path distance from node {source} to every node it can reach. Answer with a JSON object mapping node id to distance.",
    description: "Dijkstra's algorithm from a single source; unreachable nodes are omitted.",
    code: SINGLE_SOURCE,
};

fn doc_from(entry: &Entry, source: DocSource) -> AlgorithmDoc {
    let spec = entry.task.spec();
    AlgorithmDoc {
        doc_id: format!("{}/{}", match source { DocSource::Catalog => "catalog", DocSource::Expert => "expert" }, entry.task),
        task_id: entry.task,
        graph_types: spec.kinds.to_vec(),
        problem_text_template: entry.question.to_string(),
        parameters: spec.params.iter().map(|p| DocParam { name: p.name.to_string(), kind: p.kind }).collect(),
        solution_code: entry.code.to_string(),
        source,
        description: entry.description.to_string(),
    }
}

/// One document per registered task except the single-source variant.
pub fn builtin_catalog() -> Vec<AlgorithmDoc> {
    ENTRIES.iter().map(|e| doc_from(e, DocSource::Catalog)).collect()
}

/// Expert-supplied documents shipped with the crate: the single-source
/// shortest-path variant.
pub fn expert_docs() -> Vec<AlgorithmDoc> {
    vec![doc_from(&SINGLE_SOURCE_ENTRY, DocSource::Expert)]
}

/// Catalog merged with the shipped expert documents.
pub fn full_catalog() -> Vec<AlgorithmDoc> {
    let mut docs = builtin_catalog();
    docs.extend(expert_docs());
    docs
}
