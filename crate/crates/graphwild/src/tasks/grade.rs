//! Grading candidate answers against oracle answers.
//!
//! Tasks with a unique answer compare values. Tasks whose answers are not
//! unique are graded by a validity checker plus the optimal value.

use serde::{Deserialize, Serialize};

use crate::graph::Graph;

use super::answer::{Answer, MalformedAnswer};
use super::paths::path_weight;
use super::{solve, Params, TaskError, TaskId};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
}

impl Tolerance {
    pub const DEFAULT: Tolerance = Tolerance { rtol: 1e-6, atol: 1e-9 };
    pub const PAGERANK: Tolerance = Tolerance { rtol: 1e-4, atol: 1e-6 };

    pub fn close(&self, candidate: f64, expected: f64) -> bool {
        candidate.is_finite() && (candidate - expected).abs() <= self.atol + self.rtol * expected.abs()
    }
}

/// Grade `candidate` by solving the instance first.
pub fn grade(task: TaskId, g: &Graph, params: &Params, candidate: &Answer) -> Result<bool, TaskError> {
    let oracle = solve(task, g, params)?;
    Ok(grade_against(task, g, params, candidate, &oracle))
}

/// Parse an answer-channel line and grade it.
pub fn grade_line(task: TaskId, g: &Graph, params: &Params, line: &str, oracle: &Answer) -> Result<bool, MalformedAnswer> {
    let candidate = Answer::parse(line, task.spec().answer_type)?;
    Ok(grade_against(task, g, params, &candidate, oracle))
}

/// Grade against a known oracle answer for the same instance.
pub fn grade_against(task: TaskId, g: &Graph, params: &Params, candidate: &Answer, oracle: &Answer) -> bool {
    use TaskId as T;
    let tol = task.spec().tolerance;
    match (task, candidate, oracle) {
        (_, Answer::None, Answer::None) => true,
        (_, Answer::None, _) | (_, _, Answer::None) => false,
        (T::TopologicalSort, Answer::Nodes(c), _) => is_permutation(c, g.node_count()) && {
            let mut pos = vec![0; g.node_count()];
            for (i, &v) in c.iter().enumerate() {
                pos[v] = i;
            }
            g.edges().iter().all(|&(u, v)| pos[u] < pos[v])
        },
        (T::ShortestPath, Answer::Nodes(c), Answer::Nodes(o)) => {
            let (s, t) = (params["source"] as usize, params["target"] as usize);
            c.first() == Some(&s) && c.last() == Some(&t) && path_weight(g, c).is_some() && path_weight(g, c) == path_weight(g, o)
        }
        (T::HamiltonPath, Answer::Nodes(c), _) => {
            is_permutation(c, g.node_count()) && c.windows(2).all(|w| g.has_edge(w[0], w[1]))
        }
        (T::MaxClique, Answer::Nodes(c), Answer::Nodes(o)) => {
            c.len() == o.len() && distinct_in_range(c, g.node_count()) && all_pairs(c, |a, b| g.has_edge(a, b))
        }
        (T::MaxIndependentSet, Answer::Nodes(c), Answer::Nodes(o)) => {
            c.len() == o.len() && distinct_in_range(c, g.node_count()) && all_pairs(c, |a, b| !g.has_edge(a, b))
        }
        (T::MinVertexCover, Answer::Nodes(c), Answer::Nodes(o)) => {
            c.len() == o.len()
                && distinct_in_range(c, g.node_count())
                && g.edges().iter().all(|(u, v)| c.contains(u) || c.contains(v))
        }
        (T::MinEdgeCover, Answer::Edges(c), Answer::Edges(o)) => {
            let mut norm: Vec<_> = c.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
            norm.sort_unstable();
            norm.dedup();
            let mut covered = vec![false; g.node_count()];
            norm.len() == c.len()
                && c.len() == o.len()
                && norm.iter().all(|&(a, b)| {
                    let ok = g.has_edge(a, b);
                    if ok {
                        covered[a] = true;
                        covered[b] = true;
                    }
                    ok
                })
                && covered.iter().all(|&x| x)
        }
        (_, Answer::Bool(c), Answer::Bool(o)) => c == o,
        (_, Answer::Number(c), Answer::Number(o)) => tol.close(*c, *o),
        (_, Answer::Nodes(c), Answer::Nodes(o)) => {
            let mut c = c.clone();
            c.sort_unstable();
            let len = c.len();
            c.dedup();
            len == c.len() && c == *o
        }
        (_, Answer::Groups(c), Answer::Groups(o)) => {
            let mut c: Vec<Vec<usize>> = c
                .iter()
                .map(|grp| {
                    let mut grp = grp.clone();
                    grp.sort_unstable();
                    grp
                })
                .collect();
            c.sort();
            c == *o
        }
        (_, Answer::Scores(c), Answer::Scores(o)) => {
            c.len() == o.len() && o.iter().all(|(k, &x)| c.get(k).is_some_and(|&y| tol.close(y, x)))
        }
        _ => false,
    }
}

fn is_permutation(c: &[usize], n: usize) -> bool {
    c.len() == n && distinct_in_range(c, n)
}

fn distinct_in_range(c: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    c.iter().all(|&v| v < n && !std::mem::replace(&mut seen[v], true))
}

fn all_pairs(c: &[usize], ok: impl Fn(usize, usize) -> bool) -> bool {
    c.iter().enumerate().all(|(i, &a)| c[i + 1..].iter().all(|&b| ok(a, b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphKind;

    #[test]
    fn any_valid_topological_order_passes() {
        let g = Graph::directed(3, &[(0, 1), (0, 2)]).unwrap();
        assert!(grade(TaskId::TopologicalSort, &g, &Params::new(), &Answer::Nodes(vec![0, 2, 1])).unwrap());
        assert!(!grade(TaskId::TopologicalSort, &g, &Params::new(), &Answer::Nodes(vec![1, 0, 2])).unwrap());
        assert!(!grade(TaskId::TopologicalSort, &g, &Params::new(), &Answer::None).unwrap());
    }

    #[test]
    fn suboptimal_clique_fails() {
        let g = Graph::undirected(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert!(!grade(TaskId::MaxClique, &g, &Params::new(), &Answer::Nodes(vec![0, 1, 2])).unwrap());
        assert!(grade(TaskId::MaxClique, &g, &Params::new(), &Answer::Nodes(vec![3, 1, 2, 0])).unwrap());
    }

    #[test]
    fn numbers_use_tolerance() {
        let k3 = Graph::undirected(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let p3 = Graph::undirected(3, &[(0, 1), (1, 2)]).unwrap();
        let params = Params::from([("node".into(), 1)]);
        assert!(grade(TaskId::ClusteringCoefficient, &k3, &params, &Answer::Number(1.0)).unwrap());
        // Compare a rounded value against 2/3 through the line channel.
        let two_thirds = Answer::Number(2.0 / 3.0);
        assert!(grade_line(TaskId::ClusteringCoefficient, &p3, &params, "0.6666667", &two_thirds).unwrap());
        assert!(!grade_line(TaskId::ClusteringCoefficient, &p3, &params, "0.67", &two_thirds).unwrap());
    }

    #[test]
    fn shortest_path_witness() {
        let g = Graph::weighted(GraphKind::WeightedUndirected, 4, &[(0, 1, 1), (1, 3, 1), (0, 2, 1), (2, 3, 1)]).unwrap();
        let params = Params::from([("source".into(), 0), ("target".into(), 3)]);
        assert!(grade(TaskId::ShortestPath, &g, &params, &Answer::Nodes(vec![0, 2, 3])).unwrap());
        assert!(grade(TaskId::ShortestPath, &g, &params, &Answer::Nodes(vec![0, 1, 3])).unwrap());
        assert!(!grade(TaskId::ShortestPath, &g, &params, &Answer::Nodes(vec![0, 3])).unwrap());
    }

    #[test]
    fn shape_mismatch_fails() {
        let g = Graph::undirected(2, &[(0, 1)]).unwrap();
        assert!(!grade(TaskId::Bipartite, &g, &Params::new(), &Answer::Number(1.0)).unwrap());
        assert!(grade_line(TaskId::Bipartite, &g, &Params::new(), "maybe", &Answer::Bool(true)).is_err());
    }

    #[test]
    fn duplicate_nodes_fail_set_answers() {
        let g = Graph::undirected(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let params = Params::from([("u".into(), 0), ("v".into(), 1)]);
        assert!(!grade(TaskId::CommonNeighbors, &g, &params, &Answer::Nodes(vec![2, 2])).unwrap());
    }
}
