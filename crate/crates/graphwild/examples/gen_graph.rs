//! Seeded Erdős–Rényi graphs of each kind, plus a DAG and an edge file.
//!
//!     cargo run --example gen_graph

use graphwild::codec::edge_file;
use graphwild::graph::{generate_er, generate_er_dag, ErConfig, GraphKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for kind in GraphKind::ALL {
        let g = generate_er(&ErConfig::new(12, 0.3, kind, 7)?);
        println!("{kind:<20} nodes {:>2}  edges {:>2}  hash {}", g.node_count(), g.edge_count(), g.canonical_hash());
    }

    let dag = generate_er_dag(&ErConfig::new(8, 0.5, GraphKind::Directed, 7)?)?;
    println!("\ndag with {} edges:", dag.edge_count());
    edge_file::write_edges(&dag, &mut std::io::stdout())?;

    // Same seed, same graph.
    let cfg = ErConfig::new(50, 0.1, GraphKind::WeightedUndirected, 42)?.with_weight_range(1, 5)?;
    assert_eq!(generate_er(&cfg), generate_er(&cfg));
    Ok(())
}
