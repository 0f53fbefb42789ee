//! Mine preference pairs from compiler and execution feedback, then audit
//! a sample of them by re-execution.
//!
//!     cargo run --example rlcf_mine

use graphwild::forge::{self, full_catalog, CleanOptions, ForgeConfig};
use graphwild::inference::StubClient;
use graphwild::rlcf::{self, PairingPolicy, RlcfConfig};
use graphwild::tasks::TaskId;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let problems = forge::build(&ForgeConfig::uniform(9, &[TaskId::Bipartite, TaskId::KCore, TaskId::Diameter], 2), &full_catalog())?.balanced;

    // A generator that is right about 40% of the time. Swap in an HttpClient
    // to mine from a real model.
    let client = StubClient::bernoulli(0.4, 3);
    let cfg = RlcfConfig { k: 12, target: 20, policy: PairingPolicy::MinMatch, seed: 1, ..RlcfConfig::default() };
    let opts = CleanOptions::default();
    let out = rlcf::mine(&problems, &client, &cfg, &opts)?;
    for s in &out.stats {
        println!("{s:?}");
    }
    println!("{} pairs, {} problems left unvisited", out.pairs.len(), out.unvisited);

    if let Some(p) = out.pairs.first() {
        println!("\nchosen (sample {}):\n{}\nrejected (sample {}, {:?}):\n{}", p.chosen_sample, p.chosen, p.rejected_sample, p.rejected_reason, p.rejected);
    }

    let mut jsonl = Vec::new();
    rlcf::write_pairs(&out.pairs, cfg.beta_hint, &mut jsonl)?;
    println!("jsonl: {} bytes", jsonl.len());

    let audit = rlcf::audit(&out.pairs, &problems, 0.25, 2, &opts)?;
    println!("audit: {} of {} re-executed, passed: {}", audit.audited, audit.total_pairs, audit.passed());
    Ok(())
}
