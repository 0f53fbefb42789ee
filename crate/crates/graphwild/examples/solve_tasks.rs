//! Run every task's reference solver on a small graph of a kind it accepts.
//!
//!     cargo run --example solve_tasks

use graphwild::graph::{generate_er, ErConfig};
use graphwild::tasks::{solve, ParamKind, Params, TaskId};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for &task in TaskId::ALL {
        let spec = task.spec();
        let kind = spec.kinds[0];
        let g = generate_er(&ErConfig::new(7, 0.45, kind, 5)?);
        let mut params = Params::new();
        let mut next_node = 0;
        for p in &spec.params {
            let v = match p.kind {
                ParamKind::Node => {
                    next_node += 1;
                    next_node - 1
                }
                ParamKind::Int { min, .. } => min,
            };
            params.insert(p.name.to_string(), v);
        }
        match solve(task, &g, &params) {
            Ok(a) => println!("{task:<24} {kind:<20} {params:?} -> {a}"),
            Err(e) => println!("{task:<24} {kind:<20} {params:?} -> error: {e}"),
        }
    }
    Ok(())
}
