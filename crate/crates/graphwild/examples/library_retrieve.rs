//! Build a retrieval index over the algorithm library and compare hybrid
//! ranking with similarity alone.
//!
//!     cargo run --example library_retrieve ["query text"]

use graphwild::forge::full_catalog;
use graphwild::library::{build_index, catalog_csv, read_csv, retrieve, retrieve_similarity, HashingEmbedder};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let docs = read_csv(catalog_csv(&full_catalog()).as_bytes())?;
    let embedder = HashingEmbedder::default();
    let index = build_index(docs, &embedder)?;
    println!("{} documents, {} chunks, provider {}", index.docs.len(), index.chunks.len(), index.provider);

    let queries: Vec<String> = match std::env::args().nth(1) {
        Some(q) => vec![q],
        None => vec![
            "Which nodes can reach each other in both directions?".into(),
            "Compute the pagerank of every node.".into(),
            "What is the largest clique?".into(),
        ],
    };
    for q in &queries {
        println!("\n{q}");
        for h in retrieve(&index, &embedder, q, 3, None)? {
            println!("  hybrid     {:<32} sim {:.3} kw {:.2}", h.task_name, h.similarity, h.keyword);
        }
        for h in retrieve_similarity(&index, &embedder, q, 3)? {
            println!("  similarity {:<32} sim {:.3}", h.task_name, h.similarity);
        }
    }
    Ok(())
}
