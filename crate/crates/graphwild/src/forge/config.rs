use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::sandbox::{Interpreter, Limits};
use crate::tasks::TaskId;

use super::ForgeError;

/// Format classes the mix weights refer to.
pub const FORMAT_CLASSES: [&str; 5] = ["edge-list", "adjacency-list", "adjacency-matrix", "nl", "scenario"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskConfig {
    /// Records to synthesize before cleaning.
    pub count: usize,
    /// Inclusive node-count range.
    #[serde(default)]
    pub nodes: Option<(usize, usize)>,
    /// Inclusive edge-probability range.
    #[serde(default)]
    pub p: Option<(f64, f64)>,
    #[serde(default)]
    pub weights: Option<(u64, u64)>,
}

impl TaskConfig {
    pub fn new(count: usize) -> Self {
        TaskConfig { count, nodes: None, p: None, weights: None }
    }

    pub fn node_range(&self, task: TaskId) -> (usize, usize) {
        self.nodes.unwrap_or_else(|| default_nodes(task))
    }

    pub fn p_range(&self) -> (f64, f64) {
        self.p.unwrap_or((0.1, 0.6))
    }

    pub fn weight_range(&self) -> (u64, u64) {
        self.weights.unwrap_or((1, 10))
    }
}

/// Node ranges small enough for the shipped reference programs.
pub fn default_nodes(task: TaskId) -> (usize, usize) {
    match task {
        TaskId::HamiltonPath => (4, 9),
        TaskId::MinEdgeCover => (4, 12),
        TaskId::MaxClique | TaskId::MaxIndependentSet | TaskId::MinVertexCover => (5, 16),
        TaskId::DistanceRegular | TaskId::Diameter | TaskId::StronglyConnectedComponents => (5, 25),
        _ => (5, 35),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JoinPolicy {
    /// Every compatible (graph, document) pair.
    All,
    /// One document per graph, always the least-used compatible one.
    #[default]
    Balanced,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForgeConfig {
    pub seed: u64,
    /// Largest share of the verified corpus any one task may hold.
    #[serde(default = "one")]
    pub balance_cap: f64,
    /// Mix weights per format class; must sum to 1.
    #[serde(default = "default_formats")]
    pub formats: BTreeMap<String, f64>,
    #[serde(default = "default_jobs")]
    pub jobs: usize,
    #[serde(default)]
    pub limits: Limits,
    #[serde(default)]
    pub interpreter: Option<String>,
    pub tasks: BTreeMap<TaskId, TaskConfig>,
}

fn one() -> f64 {
    1.0
}

fn default_jobs() -> usize {
    4
}

pub fn default_formats() -> BTreeMap<String, f64> {
    BTreeMap::from([
        ("edge-list".to_string(), 0.25),
        ("adjacency-list".to_string(), 0.2),
        ("adjacency-matrix".to_string(), 0.1),
        ("nl".to_string(), 0.25),
        ("scenario".to_string(), 0.2),
    ])
}

impl ForgeConfig {
    /// Uniform settings over `tasks`.
    pub fn uniform(seed: u64, tasks: &[TaskId], count: usize) -> Self {
        ForgeConfig {
            seed,
            balance_cap: 1.0,
            formats: default_formats(),
            jobs: default_jobs(),
            limits: Limits::default(),
            interpreter: None,
            tasks: tasks.iter().map(|&t| (t, TaskConfig::new(count))).collect(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, ForgeError> {
        let cfg: ForgeConfig = toml::from_str(text).map_err(|e| ForgeError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn interpreter(&self) -> Result<Interpreter, ForgeError> {
        match &self.interpreter {
            None => Ok(Interpreter::builtin()),
            Some(t) => Interpreter::parse(t).map_err(|e| ForgeError::Config(e.to_string())),
        }
    }

    pub fn validate(&self) -> Result<(), ForgeError> {
        let bad = |m: String| Err(ForgeError::Config(m));
        if !(self.balance_cap > 0.0 && self.balance_cap <= 1.0) {
            return bad(format!("balance_cap must be in (0, 1], got {}", self.balance_cap));
        }
        for (name, &w) in &self.formats {
            if !FORMAT_CLASSES.contains(&name.as_str()) {
                return bad(format!("unknown format class `{name}`"));
            }
            if !(w >= 0.0) {
                return bad(format!("format weight for `{name}` must be non-negative"));
            }
        }
        let total: f64 = self.formats.values().sum();
        if (total - 1.0).abs() > 1e-9 {
            return bad(format!("format weights sum to {total}, not 1"));
        }
        for (task, t) in &self.tasks {
            let (lo, hi) = t.node_range(*task);
            if lo < 2 || lo > hi {
                return bad(format!("{task}: node range must satisfy 2 <= lo <= hi"));
            }
            let (plo, phi) = t.p_range();
            if !(0.0..=1.0).contains(&plo) || !(0.0..=1.0).contains(&phi) || plo > phi {
                return bad(format!("{task}: p range must lie in [0, 1] with lo <= hi"));
            }
            let (wlo, whi) = t.weight_range();
            if wlo < 1 || wlo > whi {
                return bad(format!("{task}: weight range must satisfy 1 <= lo <= hi"));
            }
        }
        Ok(())
    }
}
