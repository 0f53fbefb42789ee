//! Typed answers and the single-line answer channel.
//!
//! Candidates print one line: JSON (`true`, `3`, `[0, 2]`, `[[0, 1]]`,
//! `{"0": 0.5}`, `null`) or a bare literal (`True`, `False`, `None`, `inf`).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnswerType {
    Boolean,
    Number,
    NodeSet,
    NodeSequence,
    EdgeSet,
    ScoreMap,
    /// A set of node sets (components).
    NodeSets,
}

impl AnswerType {
    pub fn name(self) -> &'static str {
        match self {
            AnswerType::Boolean => "boolean",
            AnswerType::Number => "number",
            AnswerType::NodeSet => "node-set",
            AnswerType::NodeSequence => "node-sequence",
            AnswerType::EdgeSet => "edge-set",
            AnswerType::ScoreMap => "score-map",
            AnswerType::NodeSets => "node-sets",
        }
    }
}

impl fmt::Display for AnswerType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for AnswerType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        serde_json::from_value(Value::String(s.to_string())).map_err(|_| format!("unknown answer type `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Answer {
    Bool(bool),
    Number(f64),
    Nodes(Vec<usize>),
    Edges(Vec<(usize, usize)>),
    Groups(Vec<Vec<usize>>),
    Scores(BTreeMap<usize, f64>),
    /// Unreachable, no ordering, infinite distance, no path.
    None,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed answer for {expected}: {reason}")]
pub struct MalformedAnswer {
    pub expected: AnswerType,
    pub reason: String,
}

fn number_json(x: f64) -> Value {
    if x.is_finite() && x.fract() == 0.0 && x.abs() < 9.0e15 {
        Value::from(x as i64)
    } else {
        serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
    }
}

impl Answer {
    pub fn to_json(&self) -> Value {
        match self {
            Answer::Bool(b) => Value::Bool(*b),
            Answer::Number(x) => number_json(*x),
            Answer::Nodes(v) => Value::from(v.clone()),
            Answer::Edges(es) => Value::Array(es.iter().map(|&(u, v)| Value::from(vec![u, v])).collect()),
            Answer::Groups(gs) => Value::Array(gs.iter().map(|g| Value::from(g.clone())).collect()),
            Answer::Scores(m) => Value::Object(m.iter().map(|(k, &x)| (k.to_string(), number_json(x))).collect()),
            Answer::None => Value::Null,
        }
    }

    /// Compact single-line JSON form used on the answer channel.
    pub fn to_line(&self) -> String {
        self.to_json().to_string()
    }

    /// Parse an answer line as `expected`.
    pub fn parse(line: &str, expected: AnswerType) -> Result<Answer, MalformedAnswer> {
        let bad = |reason: String| MalformedAnswer { expected, reason };
        let value = literal(line.trim()).ok_or_else(|| bad(format!("cannot read `{}`", clip(line))))?;
        Answer::from_json(&value, expected).map_err(bad)
    }

    pub fn from_json(v: &Value, expected: AnswerType) -> Result<Answer, String> {
        if v.is_null() {
            return Ok(Answer::None);
        }
        Ok(match expected {
            AnswerType::Boolean => match v {
                Value::Bool(b) => Answer::Bool(*b),
                Value::Number(n) if n.as_u64() == Some(0) || n.as_u64() == Some(1) => Answer::Bool(n.as_u64() == Some(1)),
                _ => return Err(format!("expected a boolean, got {v}")),
            },
            AnswerType::Number => match v {
                Value::Number(n) => Answer::Number(n.as_f64().ok_or("number out of range")?),
                Value::String(s) if is_infinite_word(s) => Answer::None,
                _ => return Err(format!("expected a number, got {v}")),
            },
            AnswerType::NodeSet | AnswerType::NodeSequence => Answer::Nodes(node_list(v)?),
            AnswerType::EdgeSet => {
                let items = v.as_array().ok_or("expected a list of edges")?;
                let mut out = Vec::with_capacity(items.len());
                for item in items {
                    let pair = node_list(item)?;
                    let [a, b] = pair[..] else { return Err(format!("edge {item} is not a pair")) };
                    out.push((a, b));
                }
                Answer::Edges(out)
            }
            AnswerType::NodeSets => {
                let items = v.as_array().ok_or("expected a list of node lists")?;
                Answer::Groups(items.iter().map(node_list).collect::<Result<_, _>>()?)
            }
            AnswerType::ScoreMap => {
                let mut out = BTreeMap::new();
                match v {
                    Value::Object(m) => {
                        for (k, x) in m {
                            let node = k.trim().parse::<usize>().map_err(|_| format!("key `{k}` is not a node id"))?;
                            out.insert(node, x.as_f64().ok_or_else(|| format!("score for {k} is not a number"))?);
                        }
                    }
                    Value::Array(xs) => {
                        for (i, x) in xs.iter().enumerate() {
                            out.insert(i, x.as_f64().ok_or_else(|| format!("score {i} is not a number"))?);
                        }
                    }
                    _ => return Err(format!("expected a score map, got {v}")),
                }
                Answer::Scores(out)
            }
        })
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_line())
    }
}

impl Serialize for Answer {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

fn clip(s: &str) -> String {
    s.chars().take(60).collect()
}

fn is_infinite_word(s: &str) -> bool {
    matches!(s.trim().to_ascii_lowercase().as_str(), "inf" | "infinity" | "infinite" | "+inf")
}

fn node_list(v: &Value) -> Result<Vec<usize>, String> {
    let items = v.as_array().ok_or_else(|| format!("expected a list of nodes, got {v}"))?;
    items
        .iter()
        .map(|x| match x {
            Value::Number(n) => n
                .as_u64()
                .or_else(|| n.as_f64().filter(|f| f.fract() == 0.0 && *f >= 0.0).map(|f| f as u64))
                .map(|n| n as usize)
                .ok_or_else(|| format!("`{n}` is not a node id")),
            Value::String(s) => s.trim().parse().map_err(|_| format!("`{s}` is not a node id")),
            _ => Err(format!("`{x}` is not a node id")),
        })
        .collect()
}

/// JSON first, then the usual scripting-language spellings.
fn literal(s: &str) -> Option<Value> {
    if s.is_empty() {
        return None;
    }
    if let Ok(v) = serde_json::from_str::<Value>(s) {
        return Some(v);
    }
    match s {
        "True" | "TRUE" | "yes" | "Yes" => return Some(Value::Bool(true)),
        "False" | "FALSE" | "no" | "No" => return Some(Value::Bool(false)),
        "None" | "nil" | "null" | "NULL" => return Some(Value::Null),
        _ => {}
    }
    if is_infinite_word(s) {
        return Some(Value::String("inf".into()));
    }
    let normalized: String = s
        .replace("True", "true")
        .replace("False", "false")
        .replace("None", "null")
        .chars()
        .map(|c| match c {
            '(' => '[',
            ')' => ']',
            '\'' => '"',
            c => c,
        })
        .collect();
    let normalized = normalized.trim_end_matches(',');
    if let Ok(v) = serde_json::from_str::<Value>(normalized) {
        return Some(v);
    }
    if normalized.starts_with('{') && normalized.contains(':') {
        static KEY: std::sync::LazyLock<regex::Regex> =
            std::sync::LazyLock::new(|| regex::Regex::new(r"([{,]\s*)(\d+)\s*:").expect("valid pattern"));
        return serde_json::from_str(&KEY.replace_all(normalized, "$1\"$2\":")).ok();
    }
    // Python set literal `{1, 2}`.
    if let Some(inner) = normalized.strip_prefix('{').and_then(|s| s.strip_suffix('}')) {
        return serde_json::from_str(&format!("[{inner}]")).ok();
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integral_numbers_print_as_integers() {
        assert_eq!(Answer::Number(3.0).to_line(), "3");
        assert_eq!(Answer::Number(0.5).to_line(), "0.5");
        assert_eq!(Answer::Bool(true).to_line(), "true");
        assert_eq!(Answer::Edges(vec![(0, 1)]).to_line(), "[[0,1]]");
        assert_eq!(Answer::Scores(BTreeMap::from([(0, 0.5)])).to_line(), r#"{"0":0.5}"#);
    }

    #[test]
    fn python_spellings_are_accepted() {
        assert_eq!(Answer::parse("True", AnswerType::Boolean).unwrap(), Answer::Bool(true));
        assert_eq!(Answer::parse("None", AnswerType::NodeSequence).unwrap(), Answer::None);
        assert_eq!(Answer::parse("{2, 0}", AnswerType::NodeSet).unwrap(), Answer::Nodes(vec![2, 0]));
        assert_eq!(Answer::parse("[(0, 1), (1, 2)]", AnswerType::EdgeSet).unwrap(), Answer::Edges(vec![(0, 1), (1, 2)]));
        assert_eq!(
            Answer::parse("{0: 0.5, 1: 0.5}", AnswerType::ScoreMap).unwrap(),
            Answer::Scores(BTreeMap::from([(0, 0.5), (1, 0.5)]))
        );
        assert_eq!(Answer::parse("inf", AnswerType::Number).unwrap(), Answer::None);
    }

    #[test]
    fn wrong_shapes_are_malformed() {
        assert!(Answer::parse("", AnswerType::Boolean).is_err());
        assert!(Answer::parse("maybe", AnswerType::Boolean).is_err());
        assert!(Answer::parse("[1, 2, 3]", AnswerType::EdgeSet).is_err());
        assert!(Answer::parse("[-1]", AnswerType::NodeSet).is_err());
    }

    #[test]
    fn round_trip_through_line() {
        let answers = [
            (Answer::Bool(false), AnswerType::Boolean),
            (Answer::Number(2.0 / 3.0), AnswerType::Number),
            (Answer::Nodes(vec![3, 1]), AnswerType::NodeSequence),
            (Answer::Groups(vec![vec![0, 1], vec![2]]), AnswerType::NodeSets),
            (Answer::Scores(BTreeMap::from([(0, 0.25), (1, 0.75)])), AnswerType::ScoreMap),
        ];
        for (a, t) in answers {
            assert_eq!(Answer::parse(&a.to_line(), t).unwrap(), a);
        }
    }
}
