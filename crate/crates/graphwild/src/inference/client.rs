//! Generation endpoints: the chat-completion HTTP client and deterministic
//! stubs for tests and offline runs.

use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::forge::{full_catalog, AlgorithmDoc};
use crate::rng;
use crate::tasks::TaskId;

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("generator unavailable: {0}")]
    GeneratorUnavailable(String),
    #[error("environment variable {0} holding the API token is not set")]
    MissingToken(String),
    #[error("malformed response: {0}")]
    BadResponse(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

impl ChatMessage {
    pub fn user(content: impl Into<String>) -> Self {
        ChatMessage { role: "user".into(), content: content.into() }
    }
}

/// Request body of the chat-completion contract.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model: String,
    pub messages: Vec<ChatMessage>,
    pub temperature: f64,
    pub max_tokens: u32,
}

#[derive(Debug, Deserialize)]
struct ChatResponse {
    choices: Vec<Choice>,
}

#[derive(Debug, Deserialize)]
struct Choice {
    message: ChoiceMessage,
}

#[derive(Debug, Deserialize)]
struct ChoiceMessage {
    content: String,
}

/// Side information about a request. Real endpoints ignore it; stubs use it
/// to decide what to emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GenerationContext {
    pub task: Option<TaskId>,
    pub instance: u64,
    pub sample: u64,
}

pub trait GenerationClient: Send + Sync {
    fn name(&self) -> String;

    /// Assistant message content for `request`.
    fn generate(&self, request: &ChatRequest, ctx: &GenerationContext) -> Result<String, ClientError>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndpointConfig {
    pub url: String,
    pub model: String,
    /// Name of the environment variable holding the bearer token.
    #[serde(default)]
    pub token_env: Option<String>,
    #[serde(default)]
    pub temperature: f64,
    #[serde(default = "default_max_tokens")]
    pub max_tokens: u32,
    #[serde(default = "default_retries")]
    pub retries: u32,
    #[serde(default = "default_timeout")]
    pub timeout_secs: f64,
}

fn default_max_tokens() -> u32 {
    2048
}

fn default_retries() -> u32 {
    2
}

fn default_timeout() -> f64 {
    120.0
}

impl EndpointConfig {
    pub fn new(url: impl Into<String>, model: impl Into<String>) -> Self {
        EndpointConfig {
            url: url.into(),
            model: model.into(),
            token_env: None,
            temperature: 0.0,
            max_tokens: default_max_tokens(),
            retries: default_retries(),
            timeout_secs: default_timeout(),
        }
    }

    pub fn request(&self, messages: Vec<ChatMessage>) -> ChatRequest {
        ChatRequest { model: self.model.clone(), messages, temperature: self.temperature, max_tokens: self.max_tokens }
    }
}

/// Chat-completion client over HTTP.
pub struct HttpClient {
    config: EndpointConfig,
    agent: ureq::Agent,
    token: Option<String>,
}

impl HttpClient {
    pub fn new(config: EndpointConfig) -> Result<Self, ClientError> {
        let token = match &config.token_env {
            None => None,
            Some(var) => Some(std::env::var(var).map_err(|_| ClientError::MissingToken(var.clone()))?),
        };
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs_f64(config.timeout_secs)))
            .http_status_as_error(false)
            .build()
            .new_agent();
        Ok(HttpClient { config, agent, token })
    }

    pub fn config(&self) -> &EndpointConfig {
        &self.config
    }

    fn attempt(&self, request: &ChatRequest) -> Result<String, (bool, String)> {
        let mut req = self.agent.post(&self.config.url).header("Content-Type", "application/json");
        if let Some(t) = &self.token {
            req = req.header("Authorization", format!("Bearer {t}"));
        }
        let mut resp = req.send_json(request).map_err(|e| (true, e.to_string()))?;
        let status = resp.status().as_u16();
        if status != 200 {
            let retry = status == 429 || status >= 500;
            return Err((retry, format!("http status {status}")));
        }
        let body: ChatResponse = resp.body_mut().read_json().map_err(|e| (false, format!("response body: {e}")))?;
        body.choices.into_iter().next().map(|c| c.message.content).ok_or((false, "no choices in response".to_string()))
    }
}

impl GenerationClient for HttpClient {
    fn name(&self) -> String {
        format!("http:{}", self.config.model)
    }

    fn generate(&self, request: &ChatRequest, _ctx: &GenerationContext) -> Result<String, ClientError> {
        let mut last = String::new();
        for attempt in 0..=self.config.retries {
            if attempt > 0 {
                std::thread::sleep(Duration::from_millis(200 << (attempt - 1).min(5)));
            }
            match self.attempt(request) {
                Ok(content) => return Ok(content),
                Err((true, msg)) => last = msg,
                Err((false, msg)) => return Err(ClientError::BadResponse(msg)),
            }
        }
        Err(ClientError::GeneratorUnavailable(last))
    }
}

/// When a stub answers correctly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "kebab-case")]
pub enum StubPolicy {
    AlwaysCorrect,
    AlwaysWrong,
    /// Correct exactly on instances whose index mod 10 is below `per_ten`.
    Planted { per_ten: u64 },
    /// Correct with probability `p`, drawn from the seed, instance and sample.
    Bernoulli { p: f64 },
}

/// Emits reference programs from the catalog, or faulty variants of them.
#[derive(Debug, Clone)]
pub struct StubClient {
    pub policy: StubPolicy,
    pub seed: u64,
    docs: Vec<AlgorithmDoc>,
}

/// Faults a wrong stub sample cycles through; none can grade correct.
const FAULTS: [&str; 4] = [
    "if then fi\n",
    "echo broken >&2\nexit 1\n",
    "unset answer\n",
    "answer='not an answer'\n",
];

impl StubClient {
    pub fn new(policy: StubPolicy, seed: u64) -> Self {
        StubClient { policy, seed, docs: full_catalog() }
    }

    pub fn correct() -> Self {
        StubClient::new(StubPolicy::AlwaysCorrect, 0)
    }

    pub fn planted(per_ten: u64) -> Self {
        StubClient::new(StubPolicy::Planted { per_ten }, 0)
    }

    pub fn bernoulli(p: f64, seed: u64) -> Self {
        StubClient::new(StubPolicy::Bernoulli { p }, seed)
    }

    /// Whether the sample for `ctx` is meant to be correct.
    pub fn is_correct_sample(&self, ctx: &GenerationContext) -> bool {
        match self.policy {
            StubPolicy::AlwaysCorrect => true,
            StubPolicy::AlwaysWrong => false,
            StubPolicy::Planted { per_ten } => ctx.instance % 10 < per_ten,
            StubPolicy::Bernoulli { p } => {
                let x = rng::derive(self.seed, &[ctx.instance, ctx.sample]);
                ((x >> 11) as f64 / (1u64 << 53) as f64) < p
            }
        }
    }

    /// The program the stub emits, before fencing.
    pub fn program(&self, ctx: &GenerationContext) -> Result<String, ClientError> {
        let task = ctx.task.ok_or_else(|| ClientError::GeneratorUnavailable("stub client needs a task".into()))?;
        let doc = self
            .docs
            .iter()
            .find(|d| d.task_id == task)
            .ok_or_else(|| ClientError::GeneratorUnavailable(format!("stub has no program for {task}")))?;
        let tag = format!("# sample {}.{}\n", ctx.instance, ctx.sample);
        if self.is_correct_sample(ctx) {
            Ok(tag + &doc.solution_code)
        } else {
            let fault = FAULTS[(rng::derive(self.seed, &[ctx.instance, ctx.sample, 7]) % FAULTS.len() as u64) as usize];
            Ok(tag + &doc.solution_code + fault)
        }
    }
}

impl GenerationClient for StubClient {
    fn name(&self) -> String {
        match self.policy {
            StubPolicy::AlwaysCorrect => "stub-correct".into(),
            StubPolicy::AlwaysWrong => "stub-wrong".into(),
            StubPolicy::Planted { per_ten } => format!("stub-planted-{}", per_ten * 10),
            StubPolicy::Bernoulli { p } => format!("stub-bernoulli-{p}"),
        }
    }

    fn generate(&self, _request: &ChatRequest, ctx: &GenerationContext) -> Result<String, ClientError> {
        Ok(format!("```sh\n{}```\n", self.program(ctx)?))
    }
}
