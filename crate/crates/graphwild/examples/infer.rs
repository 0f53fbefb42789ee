//! Answer a natural-language question about a graph: route it, generate a
//! program, execute it and grade the result.
//!
//!     cargo run --example infer

use std::sync::Arc;

use graphwild::codec::{self, RenderFormat};
use graphwild::forge::full_catalog;
use graphwild::graph::Graph;
use graphwild::inference::{infer, GenerationContext, InferOptions, Query, Retriever, Route, StubClient};
use graphwild::library::{build_index, catalog_csv, read_csv, HashingEmbedder};
use graphwild::prompt::GraphText;
use graphwild::sandbox::GraphPayload;
use graphwild::tasks::{solve, Params};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let embedder = HashingEmbedder::default();
    let index = build_index(read_csv(catalog_csv(&full_catalog()).as_bytes())?, &embedder)?;
    let retriever = Retriever { index: &index, provider: &embedder };

    let g = Arc::new(Graph::undirected(6, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3)])?);
    let text = codec::render(&g, RenderFormat::EdgeList, 0)?.text;

    // The stub returns the library's reference program; use HttpClient for a
    // real endpoint.
    let client = StubClient::correct();
    for question in ["What is the diameter of this graph?", "Find the maximum clique in this graph."] {
        let mut query = Query {
            text: question.into(),
            graph_text: GraphText::Inline(text.clone()),
            graph: GraphPayload::Inline(g.clone()),
            task: None,
            params: Params::new(),
            oracle: None,
        };
        let task = graphwild::library::match_task(question).expect("recognised");
        query.oracle = Some(solve(task, &g, &query.params)?);
        let out = infer(&query, &client, Some(retriever), &InferOptions::default(), GenerationContext::default())?;
        let route = match &out.route {
            Route::Direct => "direct".to_string(),
            Route::Rag { hits } => format!("rag ({})", hits.iter().map(|h| h.task_name.as_str()).collect::<Vec<_>>().join(", ")),
        };
        println!("{question}\n  task {}  route {route}\n  answer {}  correct {:?}\n", out.task, out.verdict.stdout_answer, out.verdict.grade);
    }
    Ok(())
}
