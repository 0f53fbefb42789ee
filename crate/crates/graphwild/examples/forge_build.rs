//! Synthesize, verify and balance a small dataset, then write it to disk.
//!
//!     cargo run --example forge_build [out-dir]

use graphwild::forge::{self, full_catalog, ForgeConfig, TaskConfig};
use graphwild::tasks::TaskId;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut cfg = ForgeConfig::uniform(17, &[TaskId::Connectivity, TaskId::ShortestPath, TaskId::MaxClique], 8);
    cfg.tasks.insert(TaskId::PageRank, TaskConfig::new(4));
    cfg.balance_cap = 0.4;
    println!("{}", cfg.to_toml());

    let catalog = full_catalog();
    let out = forge::build(&cfg, &catalog)?;
    for (task, c) in &out.report.per_task {
        println!("{task:<14} requested {:>2}  raw {:>2}  verified {:>2}  exported {:>2}", c.requested, c.raw, c.verified, c.exported);
    }

    let first = &out.balanced[0];
    println!("\nexample record {}:\n{}\n--- reference program ---\n{}--- oracle: {}", first.record_id, first.prompt_text, first.solution_code, first.oracle_answer);

    let dir = match std::env::args().nth(1) {
        Some(d) => std::path::PathBuf::from(d),
        None => std::env::temp_dir().join("graphwild-forge-example"),
    };
    let manifest = forge::write_build(&dir, &cfg, &catalog, &out)?;
    println!("\nwrote {} with outputs {:?}", dir.display(), manifest.outputs.keys().collect::<Vec<_>>());
    Ok(())
}
