//! Execution-based cleaning: every record's program is re-run against its
//! oracle, and records that fail are rejected with a reason.
//!
//!     cargo run --example clean_records

use graphwild::forge::{self, full_catalog, CleanOptions, CleanReport, ForgeConfig, RecordStatus};
use graphwild::sandbox::Limits;
use graphwild::tasks::{Answer, TaskId};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ForgeConfig::uniform(5, &[TaskId::Connectivity, TaskId::Diameter], 5);
    let mut records = forge::build(&cfg, &full_catalog())?.balanced;

    // Break a few of them in different ways.
    records[0].solution_code = "if then fi\n".into();
    records[1].solution_code = "while :; do :; done\n".into();
    records[2].solution_code = "answer='a lot'\n".into();
    if let Answer::Bool(b) = records[3].oracle_answer {
        records[3].oracle_answer = Answer::Bool(!b);
    } else {
        records[3].solution_code = "answer=987654\n".into();
    }

    let opts = CleanOptions { limits: Limits { wall_secs: 1.0, ..Limits::default() }, ..CleanOptions::default() };
    let cleaned = forge::clean(records, &opts)?;
    for r in cleaned.iter().take(6) {
        match &r.status {
            RecordStatus::Verified => println!("{:<40} verified", r.record_id),
            other => println!("{:<40} {other:?}", r.record_id),
        }
    }
    let report = CleanReport::of(&cleaned);
    println!("\n{} of {} verified, rejected {:?}", report.verified, report.input, report.rejected);
    Ok(())
}
