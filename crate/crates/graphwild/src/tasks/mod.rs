//! Task registry, exact solvers and grading.

pub mod answer;
pub mod flow;
pub mod grade;
pub mod hard;
pub mod matching;
pub mod metrics;
pub mod paths;
pub mod traversal;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphKind};

pub use answer::{Answer, AnswerType, MalformedAnswer};
pub use grade::{grade, Tolerance};
pub use metrics::PageRankParams;

/// Concrete parameter values keyed by schema name.
pub type Params = BTreeMap<String, u64>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TaskError {
    #[error("task {task} does not accept {kind} graphs")]
    KindMismatch { task: String, kind: GraphKind },
    #[error("node {node} out of range for a graph with {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("missing parameter `{0}`")]
    MissingParam(String),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam { name: String, reason: String },
    #[error("{n} nodes exceeds the exact-solver cap of {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("node {0} has no incident edge")]
    IsolatedVertex(usize),
    #[error("unknown task `{0}`")]
    UnknownTask(String),
}

pub(crate) const UNDIRECTED_FAMILY: &[GraphKind] =
    &[GraphKind::Undirected, GraphKind::Bipartite, GraphKind::WeightedUndirected];
const DIRECTED_FAMILY: &[GraphKind] = &[GraphKind::Directed, GraphKind::WeightedDirected];
const WEIGHTED_FAMILY: &[GraphKind] = &[GraphKind::WeightedUndirected, GraphKind::WeightedDirected];

pub(crate) fn require_kind(task: &str, g: &Graph, allowed: &[GraphKind]) -> Result<(), TaskError> {
    if allowed.contains(&g.kind()) {
        Ok(())
    } else {
        Err(TaskError::KindMismatch { task: task.to_string(), kind: g.kind() })
    }
}

pub(crate) fn require_node(g: &Graph, node: usize) -> Result<(), TaskError> {
    if node < g.node_count() {
        Ok(())
    } else {
        Err(TaskError::NodeOutOfRange { node, n: g.node_count() })
    }
}

macro_rules! task_ids {
    ($($variant:ident => $name:literal),* $(,)?) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum TaskId { $($variant),* }

        impl TaskId {
            pub const ALL: &'static [TaskId] = &[$(TaskId::$variant),*];

            pub fn name(self) -> &'static str {
                match self { $(TaskId::$variant => $name),* }
            }
        }

        impl FromStr for TaskId {
            type Err = TaskError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s.trim() {
                    $($name => Ok(TaskId::$variant),)*
                    other => Err(TaskError::UnknownTask(other.to_string())),
                }
            }
        }
    };
}

task_ids! {
    Bipartite => "bipartite",
    TopologicalSort => "topological_sort",
    ShortestPath => "shortest_path",
    HamiltonPath => "hamilton_path",
    MaxFlow => "max_flow",
    ClusteringCoefficient => "clustering_coefficient",
    CommonNeighbors => "common_neighbors",
    StronglyConnectedComponents => "strongly_connected_components",
    Connectivity => "connectivity",
    EulerPath => "euler_path",
    Diameter => "diameter",
    Regular => "regular",
    DistanceRegular => "distance_regular",
    CycleDetection => "cycle_detection",
    MaxClique => "max_clique",
    MaxIndependentSet => "max_independent_set",
    MinVertexCover => "min_vertex_cover",
    MinEdgeCover => "min_edge_cover",
    KCore => "k_core",
    PageRank => "pagerank",
    SingleSourceShortestPath => "single_source_shortest_path",
}

impl fmt::Display for TaskId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl Serialize for TaskId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for TaskId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum ParamKind {
    /// A node id; all node parameters of one task are pairwise distinct.
    Node,
    Int { min: u64, max: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParamSpec {
    pub name: &'static str,
    #[serde(flatten)]
    pub kind: ParamKind,
}

#[derive(Debug, Clone, Serialize)]
pub struct TaskSpec {
    pub task_id: TaskId,
    pub title: &'static str,
    pub kinds: &'static [GraphKind],
    pub params: Vec<ParamSpec>,
    pub answer_type: AnswerType,
    /// Whether `null` is a legitimate answer (unreachable, cyclic, infinite).
    pub nullable: bool,
    /// Answers are graded by a validity checker plus an optimality value.
    pub witness: bool,
    pub tolerance: Tolerance,
}

const ALL_KINDS: &[GraphKind] = &GraphKind::ALL;

fn node(name: &'static str) -> ParamSpec {
    ParamSpec { name, kind: ParamKind::Node }
}

impl TaskId {
    /// The thirteen tasks of the core benchmark suite.
    pub const CORE: [TaskId; 13] = [
        TaskId::Bipartite,
        TaskId::TopologicalSort,
        TaskId::ShortestPath,
        TaskId::HamiltonPath,
        TaskId::MaxFlow,
        TaskId::ClusteringCoefficient,
        TaskId::CommonNeighbors,
        TaskId::StronglyConnectedComponents,
        TaskId::Connectivity,
        TaskId::EulerPath,
        TaskId::Diameter,
        TaskId::Regular,
        TaskId::DistanceRegular,
    ];

    pub fn is_core(self) -> bool {
        TaskId::CORE.contains(&self)
    }

    /// Tasks whose exact solvers are exponential and honour the node cap.
    pub fn is_capped(self) -> bool {
        matches!(
            self,
            TaskId::HamiltonPath | TaskId::MaxClique | TaskId::MaxIndependentSet | TaskId::MinVertexCover
        )
    }

    pub fn spec(self) -> TaskSpec {
        use AnswerType as A;
        use TaskId as T;
        let (title, kinds, params, answer_type, nullable, witness): (_, &'static [GraphKind], _, _, _, _) = match self {
            T::Bipartite => ("bipartite check", UNDIRECTED_FAMILY, vec![], A::Boolean, false, false),
            T::TopologicalSort => ("topological sort", DIRECTED_FAMILY, vec![], A::NodeSequence, true, true),
            T::ShortestPath => {
                ("shortest path", WEIGHTED_FAMILY, vec![node("source"), node("target")], A::NodeSequence, true, true)
            }
            T::HamiltonPath => ("hamilton path", ALL_KINDS, vec![], A::NodeSequence, true, true),
            T::MaxFlow => (
                "maximum flow",
                &[GraphKind::WeightedDirected],
                vec![node("source"), node("sink")],
                A::Number,
                false,
                false,
            ),
            T::ClusteringCoefficient => {
                ("clustering coefficient", UNDIRECTED_FAMILY, vec![node("node")], A::Number, false, false)
            }
            T::CommonNeighbors => ("common neighbors", UNDIRECTED_FAMILY, vec![node("u"), node("v")], A::NodeSet, false, false),
            T::StronglyConnectedComponents => {
                ("strongly connected components", DIRECTED_FAMILY, vec![], A::NodeSets, false, false)
            }
            T::Connectivity => ("connectivity", UNDIRECTED_FAMILY, vec![node("u"), node("v")], A::Boolean, false, false),
            T::EulerPath => ("euler path", UNDIRECTED_FAMILY, vec![], A::Boolean, false, false),
            T::Diameter => ("diameter", UNDIRECTED_FAMILY, vec![], A::Number, true, false),
            T::Regular => ("regular graph check", UNDIRECTED_FAMILY, vec![], A::Boolean, false, false),
            T::DistanceRegular => ("distance regular graph check", UNDIRECTED_FAMILY, vec![], A::Boolean, false, false),
            T::CycleDetection => ("cycle detection", UNDIRECTED_FAMILY, vec![], A::Boolean, false, false),
            T::MaxClique => ("maximum clique", UNDIRECTED_FAMILY, vec![], A::NodeSet, false, true),
            T::MaxIndependentSet => ("maximum independent set", UNDIRECTED_FAMILY, vec![], A::NodeSet, false, true),
            T::MinVertexCover => ("minimum vertex cover", UNDIRECTED_FAMILY, vec![], A::NodeSet, false, true),
            T::MinEdgeCover => ("minimum edge cover", UNDIRECTED_FAMILY, vec![], A::EdgeSet, false, true),
            T::KCore => (
                "k-core",
                UNDIRECTED_FAMILY,
                vec![ParamSpec { name: "k", kind: ParamKind::Int { min: 1, max: 4 } }],
                A::NodeSet,
                false,
                false,
            ),
            T::PageRank => ("pagerank", ALL_KINDS, vec![], A::ScoreMap, false, false),
            T::SingleSourceShortestPath => {
                ("single source shortest path", WEIGHTED_FAMILY, vec![node("source")], A::ScoreMap, false, false)
            }
        };
        let tolerance = if self == T::PageRank { Tolerance::PAGERANK } else { Tolerance::DEFAULT };
        TaskSpec { task_id: self, title, kinds, params, answer_type, nullable, witness, tolerance }
    }
}

impl TaskSpec {
    pub fn accepts(&self, kind: GraphKind) -> bool {
        self.kinds.contains(&kind)
    }

    /// Check `params` against the schema for graph `g`.
    pub fn validate(&self, g: &Graph, params: &Params) -> Result<(), TaskError> {
        require_kind(self.task_id.name(), g, self.kinds)?;
        let mut nodes = Vec::new();
        for p in &self.params {
            let &value = params.get(p.name).ok_or_else(|| TaskError::MissingParam(p.name.to_string()))?;
            match p.kind {
                ParamKind::Node => {
                    require_node(g, value as usize)?;
                    if nodes.contains(&value) {
                        return Err(TaskError::InvalidParam {
                            name: p.name.to_string(),
                            reason: "node parameters must be distinct".into(),
                        });
                    }
                    nodes.push(value);
                }
                ParamKind::Int { min, max } if value < min || value > max => {
                    return Err(TaskError::InvalidParam {
                        name: p.name.to_string(),
                        reason: format!("expected {min}..={max}, got {value}"),
                    })
                }
                ParamKind::Int { .. } => {}
            }
        }
        if let Some(extra) = params.keys().find(|k| !self.params.iter().any(|p| p.name == k.as_str())) {
            return Err(TaskError::InvalidParam { name: extra.clone(), reason: "not in the task schema".into() });
        }
        Ok(())
    }
}

pub fn registry() -> Vec<TaskSpec> {
    TaskId::ALL.iter().map(|t| t.spec()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Node-count limit for the exponential solvers.
    pub cap: usize,
    pub pagerank: PageRankParams,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { cap: hard::DEFAULT_CAP, pagerank: PageRankParams::default() }
    }
}

pub fn solve(task: TaskId, g: &Graph, params: &Params) -> Result<Answer, TaskError> {
    solve_with(task, g, params, &SolveOptions::default())
}

/// Run the exact solver for `task` and return its answer in channel form.
pub fn solve_with(task: TaskId, g: &Graph, params: &Params, opts: &SolveOptions) -> Result<Answer, TaskError> {
    task.spec().validate(g, params)?;
    let p = |name: &str| params[name] as usize;
    let nodes_or_none = |r: Option<Vec<usize>>| r.map_or(Answer::None, Answer::Nodes);
    use TaskId as T;
    Ok(match task {
        T::Bipartite => Answer::Bool(traversal::is_bipartite(g)?),
        T::TopologicalSort => nodes_or_none(traversal::topological_order(g)?),
        T::ShortestPath => nodes_or_none(paths::shortest_path(g, p("source"), p("target"))?.map(|(_, path)| path)),
        T::HamiltonPath => nodes_or_none(hard::hamilton_path(g, opts.cap)?),
        T::MaxFlow => Answer::Number(flow::max_flow(g, p("source"), p("sink"))?.value as f64),
        T::ClusteringCoefficient => Answer::Number(metrics::clustering_coefficient(g, p("node"))?),
        T::CommonNeighbors => Answer::Nodes(metrics::common_neighbors(g, p("u"), p("v"))?),
        T::StronglyConnectedComponents => Answer::Groups(traversal::strongly_connected_components(g)?),
        T::Connectivity => Answer::Bool(traversal::connectivity(g, p("u"), p("v"))?),
        T::EulerPath => Answer::Bool(traversal::has_euler_path(g)?),
        T::Diameter => traversal::diameter(g)?.map_or(Answer::None, |d| Answer::Number(d as f64)),
        T::Regular => Answer::Bool(metrics::is_regular(g)?),
        T::DistanceRegular => Answer::Bool(metrics::is_distance_regular(g)?),
        T::CycleDetection => Answer::Bool(traversal::detect_cycle(g)?),
        T::MaxClique => Answer::Nodes(hard::max_clique(g, opts.cap)?),
        T::MaxIndependentSet => Answer::Nodes(hard::max_independent_set(g, opts.cap)?),
        T::MinVertexCover => Answer::Nodes(hard::min_vertex_cover(g, opts.cap)?),
        T::MinEdgeCover => Answer::Edges(matching::min_edge_cover(g)?),
        T::KCore => Answer::Nodes(traversal::k_core(g, p("k"))?),
        T::PageRank => {
            let r = metrics::pagerank(g, opts.pagerank)?;
            Answer::Scores(r.scores.into_iter().enumerate().collect())
        }
        T::SingleSourceShortestPath => Answer::Scores(
            paths::single_source_distances(g, p("source"))?.into_iter().map(|(v, d)| (v, d as f64)).collect(),
        ),
    })
}
