//! Preference-pair mining from execution feedback: sample K programs per
//! problem, execute and grade each, pair correct with incorrect ones.

use std::collections::HashSet;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::forge::{classify, CleanOptions, ProblemRecord, RejectReason};
use crate::inference::client::{ChatMessage, ClientError, GenerationClient, GenerationContext};
use crate::pool::parallel_map;
use crate::prompt::extract_code;
use crate::rng;
use crate::sandbox::{execute, ExecJob};

#[derive(Debug, Error)]
pub enum RlcfError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("generator unavailable: {0}")]
    GeneratorUnavailable(String),
    #[error("record {0} cannot be re-read: {1}")]
    Record(String, String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl From<ClientError> for RlcfError {
    fn from(e: ClientError) -> Self {
        RlcfError::GeneratorUnavailable(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "kebab-case")]
pub enum PairingPolicy {
    /// Each correct program is paired once with a distinct incorrect one.
    #[default]
    MinMatch,
    /// Every (correct, incorrect) combination, at most `cap` per problem.
    AllPairs { cap: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RlcfConfig {
    /// Samples per problem.
    #[serde(default = "default_k")]
    pub k: usize,
    /// Stop once this many pairs are collected.
    #[serde(default = "default_target")]
    pub target: usize,
    #[serde(default)]
    pub policy: PairingPolicy,
    /// Preference-loss scale recorded for trainers.
    #[serde(default = "default_beta")]
    pub beta_hint: f64,
    #[serde(default = "default_temperature")]
    pub temperature: f64,
    #[serde(default = "default_max_tokens")]
    pub max_tokens: u32,
    #[serde(default = "default_model")]
    pub model: String,
    #[serde(default)]
    pub seed: u64,
}

fn default_k() -> usize {
    100
}

fn default_target() -> usize {
    3000
}

fn default_beta() -> f64 {
    0.1
}

fn default_temperature() -> f64 {
    1.0
}

fn default_max_tokens() -> u32 {
    2048
}

fn default_model() -> String {
    "default".into()
}

impl Default for RlcfConfig {
    fn default() -> Self {
        RlcfConfig {
            k: default_k(),
            target: default_target(),
            policy: PairingPolicy::default(),
            beta_hint: default_beta(),
            temperature: default_temperature(),
            max_tokens: default_max_tokens(),
            model: default_model(),
            seed: 0,
        }
    }
}

impl RlcfConfig {
    pub fn validate(&self) -> Result<(), RlcfError> {
        if self.k < 2 {
            return Err(RlcfError::Config(format!("k must be at least 2, got {}", self.k)));
        }
        if self.target < 1 {
            return Err(RlcfError::Config("target must be at least 1".into()));
        }
        if let PairingPolicy::AllPairs { cap: 0 } = self.policy {
            return Err(RlcfError::Config("all-pairs cap must be at least 1".into()));
        }
        Ok(())
    }
}

/// Outcome of one generated sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleOutcome {
    pub sample: usize,
    pub code: String,
    pub correct: bool,
    /// Why the sample failed, when it did.
    pub reason: Option<RejectReason>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreferencePair {
    pub pair_id: String,
    pub record_id: String,
    pub prompt: String,
    pub chosen: String,
    pub rejected: String,
    /// Sample indices the codes came from.
    pub chosen_sample: usize,
    pub rejected_sample: usize,
    pub rejected_reason: Option<RejectReason>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemStats {
    pub record_id: String,
    pub k: usize,
    /// Samples graded correct.
    pub correct: usize,
    /// Samples that failed for any reason.
    pub incorrect: usize,
    /// Textual duplicates dropped before pairing.
    pub duplicates_correct: usize,
    pub duplicates_incorrect: usize,
    /// Samples whose execution could not be attempted.
    pub sandbox_errors: usize,
    pub pairs: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MineOutput {
    pub pairs: Vec<PreferencePair>,
    pub stats: Vec<ProblemStats>,
    /// Problems skipped because the target was already met.
    pub unvisited: usize,
}

fn dedup(samples: Vec<&SampleOutcome>) -> (Vec<&SampleOutcome>, usize) {
    let mut seen = HashSet::new();
    let before = samples.len();
    let kept: Vec<&SampleOutcome> = samples.into_iter().filter(|s| seen.insert(s.code.as_str())).collect();
    let dropped = before - kept.len();
    (kept, dropped)
}

/// Pair correct with incorrect samples of one problem.
pub fn pair_samples(record: &ProblemRecord, samples: &[SampleOutcome], policy: PairingPolicy, seed: u64) -> (Vec<PreferencePair>, ProblemStats) {
    let (t, dup_t) = dedup(samples.iter().filter(|s| s.correct).collect());
    let (mut f, dup_f) = dedup(samples.iter().filter(|s| !s.correct).collect());
    let combos: Vec<(&SampleOutcome, &SampleOutcome)> = match policy {
        PairingPolicy::MinMatch => {
            f.shuffle(&mut rng::seeded(rng::derive_named(seed, &record.record_id, &[])));
            t.iter().copied().zip(f.iter().copied()).collect()
        }
        PairingPolicy::AllPairs { cap } => t.iter().flat_map(|c| f.iter().map(move |r| (*c, *r))).take(cap).collect(),
    };
    let pairs: Vec<PreferencePair> = combos
        .into_iter()
        .filter(|(c, r)| c.code != r.code)
        .map(|(c, r)| PreferencePair {
            pair_id: format!("{}/{}-{}", record.record_id, c.sample, r.sample),
            record_id: record.record_id.clone(),
            prompt: record.prompt_text.clone(),
            chosen: c.code.clone(),
            rejected: r.code.clone(),
            chosen_sample: c.sample,
            rejected_sample: r.sample,
            rejected_reason: r.reason,
        })
        .collect();
    let correct = samples.iter().filter(|s| s.correct).count();
    let stats = ProblemStats {
        record_id: record.record_id.clone(),
        k: samples.len(),
        correct,
        incorrect: samples.len() - correct,
        duplicates_correct: dup_t,
        duplicates_incorrect: dup_f,
        sandbox_errors: 0,
        pairs: pairs.len(),
    };
    (pairs, stats)
}

fn job_for(record: &ProblemRecord, id: String, code: String, opts: &CleanOptions) -> Result<ExecJob, RlcfError> {
    let g = record.graph().map_err(|e| RlcfError::Record(record.record_id.clone(), e.to_string()))?;
    Ok(ExecJob::for_task(id, code, record.task_id, Arc::new(g), record.params.clone(), record.oracle_answer.clone())
        .with_limits(opts.limits)
        .with_interpreter(opts.interpreter.clone()))
}

/// Generate and grade `cfg.k` samples for one problem.
pub fn sample_problem(
    record: &ProblemRecord,
    instance: u64,
    client: &dyn GenerationClient,
    cfg: &RlcfConfig,
    opts: &CleanOptions,
) -> Result<(Vec<SampleOutcome>, usize), RlcfError> {
    let request = crate::inference::client::ChatRequest {
        model: cfg.model.clone(),
        messages: vec![ChatMessage::user(record.prompt_text.clone())],
        temperature: cfg.temperature,
        max_tokens: cfg.max_tokens,
    };
    let indices: Vec<usize> = (0..cfg.k).collect();
    let generated = parallel_map(&indices, opts.jobs, |_, &s| {
        let ctx = GenerationContext { task: Some(record.task_id), instance, sample: s as u64 };
        client.generate(&request, &ctx).map(|c| extract_code(&c))
    });
    let codes = generated.into_iter().collect::<Result<Vec<String>, ClientError>>()?;
    let jobs = codes
        .iter()
        .enumerate()
        .map(|(s, code)| job_for(record, format!("{}#{s}", record.record_id), code.clone(), opts))
        .collect::<Result<Vec<_>, _>>()?;
    let verdicts = parallel_map(&jobs, opts.jobs, |_, j| execute(j));
    let mut sandbox_errors = 0;
    let outcomes = verdicts
        .into_iter()
        .zip(codes)
        .enumerate()
        .map(|(s, (v, code))| {
            let (correct, reason) = match v {
                Ok(v) => match classify(&v) {
                    None => (true, None),
                    Some((r, _)) => (false, Some(r)),
                },
                Err(_) => {
                    sandbox_errors += 1;
                    (false, None)
                }
            };
            SampleOutcome { sample: s, code, correct, reason }
        })
        .collect();
    Ok((outcomes, sandbox_errors))
}

/// Mine pairs problem by problem until `cfg.target` pairs exist.
pub fn mine(problems: &[ProblemRecord], client: &dyn GenerationClient, cfg: &RlcfConfig, opts: &CleanOptions) -> Result<MineOutput, RlcfError> {
    cfg.validate()?;
    let mut out = MineOutput::default();
    for (i, record) in problems.iter().enumerate() {
        if out.pairs.len() >= cfg.target {
            out.unvisited = problems.len() - i;
            break;
        }
        let (samples, sandbox_errors) = sample_problem(record, i as u64, client, cfg, opts)?;
        let (mut pairs, mut stats) = pair_samples(record, &samples, cfg.policy, cfg.seed);
        pairs.truncate(cfg.target - out.pairs.len());
        stats.pairs = pairs.len();
        stats.sandbox_errors = sandbox_errors;
        out.pairs.extend(pairs);
        out.stats.push(stats);
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
struct PairLine<'a> {
    prompt: &'a str,
    chosen: &'a str,
    rejected: &'a str,
    meta: PairMeta<'a>,
}

#[derive(Debug, Serialize)]
struct PairMeta<'a> {
    beta_hint: f64,
    pair_id: &'a str,
    record_id: &'a str,
}

pub fn write_pairs(pairs: &[PreferencePair], beta_hint: f64, out: &mut impl Write) -> Result<(), RlcfError> {
    for p in pairs {
        let line = PairLine {
            prompt: &p.prompt,
            chosen: &p.chosen,
            rejected: &p.rejected,
            meta: PairMeta { beta_hint, pair_id: &p.pair_id, record_id: &p.record_id },
        };
        serde_json::to_writer(&mut *out, &line)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// JSON lines `{prompt, chosen, rejected, meta}` in mining order.
pub fn export_pairs(pairs: &[PreferencePair], beta_hint: f64, path: impl AsRef<Path>) -> Result<(), RlcfError> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_pairs(pairs, beta_hint, &mut out)?;
    out.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub total_pairs: usize,
    pub audited: usize,
    /// Pair ids whose re-execution contradicted the label.
    pub failures: Vec<String>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Re-execute a seeded sample of at least `fraction` of the pairs: chosen
/// must grade correct and rejected must not.
pub fn audit(pairs: &[PreferencePair], problems: &[ProblemRecord], fraction: f64, seed: u64, opts: &CleanOptions) -> Result<AuditReport, RlcfError> {
    let want = ((pairs.len() as f64 * fraction).ceil() as usize).min(pairs.len());
    let mut idx: Vec<usize> = (0..pairs.len()).collect();
    idx.shuffle(&mut rng::seeded(rng::derive_named(seed, "audit", &[])));
    idx.truncate(want);
    idx.sort_unstable();
    let mut jobs = Vec::with_capacity(2 * want);
    for &i in &idx {
        let p = &pairs[i];
        let record = problems
            .iter()
            .find(|r| r.record_id == p.record_id)
            .ok_or_else(|| RlcfError::Record(p.record_id.clone(), "not among the problems".into()))?;
        jobs.push(job_for(record, format!("{}:chosen", p.pair_id), p.chosen.clone(), opts)?);
        jobs.push(job_for(record, format!("{}:rejected", p.pair_id), p.rejected.clone(), opts)?);
    }
    let verdicts = parallel_map(&jobs, opts.jobs, |_, j| execute(j));
    let mut failures = Vec::new();
    for (k, &i) in idx.iter().enumerate() {
        let chosen_ok = verdicts[2 * k].as_ref().is_ok_and(|v| v.is_correct());
        let rejected_ok = verdicts[2 * k + 1].as_ref().map_or(true, |v| !v.is_correct());
        if !(chosen_ok && rejected_ok) {
            failures.push(pairs[i].pair_id.clone());
        }
    }
    Ok(AuditReport { total_pairs: pairs.len(), audited: want, failures })
}
