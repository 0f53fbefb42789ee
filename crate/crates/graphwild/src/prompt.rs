//! Prompt layout shared by dataset export and inference.
//!
//! Sections, in order: instruction, reference documents (when any), problem,
//! graph. The instruction states the code contract understood by the
//! sandbox shim.

use serde::{Deserialize, Serialize};

use crate::codec::Rendering;

pub const INSTRUCTION: &str = "\
Write a POSIX sh program that solves the problem below and reply with it in a single fenced code block.
The program runs with these variables set:
  EDGE_FILE   path of the graph file: '#' header lines, then one edge per line as `u v` or `u v w`
  N           number of nodes, numbered 0 to N-1
  GRAPH_KIND  undirected, directed, bipartite, weighted-undirected or weighted-directed
  PARAM_<name> each problem parameter, as a node id or integer
Assign the result to the variable `answer` as one line: true/false, a number, a JSON list of node ids, \
a JSON list of [u, v] pairs, a JSON list of node lists, a JSON object from node id to number, or null.";

/// How the graph reaches the prompt.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "kebab-case")]
pub enum GraphText {
    /// Full rendering text.
    Inline(String),
    /// Only a notice that the graph lives in an edge file.
    File(String),
}

impl GraphText {
    pub fn from_rendering(r: &Rendering) -> Self {
        GraphText::Inline(r.text.clone())
    }
}

/// A retrieved library document to include.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptDoc {
    pub task_name: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prompt {
    pub text: String,
    /// Length in bytes.
    pub length: usize,
    pub doc_count: usize,
}

pub fn assemble(problem: &str, graph: &GraphText, docs: &[PromptDoc]) -> Prompt {
    let mut text = String::new();
    text.push_str("### Instruction\n");
    text.push_str(INSTRUCTION);
    text.push_str("\n\n");
    if !docs.is_empty() {
        text.push_str("### Reference documents\n");
        for (i, d) in docs.iter().enumerate() {
            text.push_str(&format!("[{}] {}\n{}\n\n", i + 1, d.task_name, d.text.trim_end()));
        }
    }
    text.push_str("### Problem\n");
    text.push_str(problem.trim_end());
    text.push_str("\n\n### Graph\n");
    match graph {
        GraphText::Inline(t) => text.push_str(t.trim_end()),
        GraphText::File(path) => {
            text.push_str(&format!("The graph is too large to show and is stored in the edge file {path} (available as $EDGE_FILE)."))
        }
    }
    text.push('\n');
    let length = text.len();
    Prompt { text, length, doc_count: docs.len() }
}

/// First fenced code block in `content`, or the whole content when none.
pub fn extract_code(content: &str) -> String {
    let mut lines = content.lines();
    while let Some(line) = lines.next() {
        if line.trim_start().starts_with("```") {
            let body: Vec<&str> = lines.by_ref().take_while(|l| !l.trim_start().starts_with("```")).collect();
            return body.join("\n") + "\n";
        }
    }
    content.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_sections_without_docs() {
        let p = assemble("Is it bipartite?", &GraphText::Inline("(0, 1)".into()), &[]);
        assert!(!p.text.contains("### Reference documents"));
        assert_eq!(p.text.matches("### ").count(), 3);
        assert_eq!(p.length, p.text.len());
    }

    #[test]
    fn docs_keep_rank_order() {
        let docs = [
            PromptDoc { task_name: "maximum clique".into(), text: "first".into() },
            PromptDoc { task_name: "maximal clique".into(), text: "second".into() },
        ];
        let p = assemble("q", &GraphText::File("/tmp/g.txt".into()), &docs);
        assert!(p.text.find("first").unwrap() < p.text.find("second").unwrap());
        assert!(p.text.contains("/tmp/g.txt"));
        assert_eq!(p, assemble("q", &GraphText::File("/tmp/g.txt".into()), &docs));
    }

    #[test]
    fn first_fence_wins() {
        let reply = "Here:\n```sh\nanswer=1\n```\nor\n```sh\nanswer=2\n```";
        assert_eq!(extract_code(reply), "answer=1\n");
        assert_eq!(extract_code("answer=3"), "answer=3");
    }
}
