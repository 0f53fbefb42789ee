//! Accuracy per task over synthesized instances, with a stub generator that
//! is right on 7 of every 10 instances.
//!
//!     cargo run --example eval

use graphwild::inference::{evaluate, EvalConfig, InferOptions, Mode, StubClient};
use graphwild::tasks::TaskId;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut cfg = EvalConfig::new(&[TaskId::Connectivity, TaskId::Diameter, TaskId::KCore], 10, 2, 1);
    cfg.mode = Mode::Direct;
    let report = evaluate(&cfg, &StubClient::planted(7), None, &InferOptions::default())?;
    print!("{}", report.to_table());
    println!("overall {:.1}%", 100.0 * report.overall_accuracy);
    Ok(())
}
