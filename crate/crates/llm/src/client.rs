//! Chat-completion requests and the clients that answer them.

use std::collections::VecDeque;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

pub const ENDPOINT_ENV: &str = "STOCKAGENT_LLM_ENDPOINT";
pub const MODEL_ENV: &str = "STOCKAGENT_LLM_MODEL";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: Role,
    pub content: String,
}

impl ChatMessage {
    pub fn system(content: impl Into<String>) -> Self {
        ChatMessage { role: Role::System, content: content.into() }
    }

    pub fn user(content: impl Into<String>) -> Self {
        ChatMessage { role: Role::User, content: content.into() }
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        ChatMessage { role: Role::Assistant, content: content.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model: String,
    pub messages: Vec<ChatMessage>,
    pub temperature: f64,
    pub max_tokens: u32,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Usage {
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChatResponse {
    pub text: String,
    pub finish_reason: Option<String>,
    pub usage: Option<Usage>,
    pub latency_ms: u64,
}

impl ChatResponse {
    pub fn text(text: impl Into<String>) -> Self {
        ChatResponse { text: text.into(), finish_reason: Some("stop".into()), usage: None, latency_ms: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ChatError {
    #[error("transport error: {0}")]
    Transport(String),
    #[error("endpoint returned status {status}: {body}")]
    Status { status: u16, body: String },
    #[error("could not decode the endpoint response: {0}")]
    Decode(String),
    #[error("replay cache has no entry for request {hash}")]
    ReplayMiss { hash: String },
    #[error("replay cache line {line} is corrupt: {reason}")]
    CacheCorrupt { line: usize, reason: String },
    #[error("replay cache i/o: {0}")]
    Io(String),
    #[error("no endpoint configured; set {ENDPOINT_ENV} or llm.endpoint")]
    NoEndpoint,
}

impl ChatError {
    /// Errors that must stop the run instead of degrading one decision.
    pub fn is_fatal(&self) -> bool {
        matches!(
            self,
            ChatError::ReplayMiss { .. } | ChatError::CacheCorrupt { .. } | ChatError::Io(_) | ChatError::NoEndpoint
        )
    }

    /// Worth calling again after a pause.
    pub fn is_transient(&self) -> bool {
        match self {
            ChatError::Transport(_) => true,
            ChatError::Status { status, .. } => *status == 429 || *status >= 500,
            _ => false,
        }
    }
}

pub trait ChatClient: Send + Sync {
    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, ChatError>;
}

/// A client for any endpoint speaking the OpenAI-style
/// `/chat/completions` wire format.
pub struct HttpClient {
    agent: ureq::Agent,
    endpoint: String,
    api_key: Option<String>,
}

impl HttpClient {
    pub fn new(endpoint: impl Into<String>, api_key: Option<String>, timeout: Duration) -> Self {
        HttpClient { agent: ureq::AgentBuilder::new().timeout(timeout).build(), endpoint: endpoint.into(), api_key }
    }

    /// Builds a client from an explicit endpoint or `STOCKAGENT_LLM_ENDPOINT`,
    /// with the key read from `api_key_env`.
    pub fn from_env(endpoint: Option<&str>, api_key_env: &str, timeout: Duration) -> Result<Self, ChatError> {
        let endpoint = match endpoint {
            Some(e) => e.to_string(),
            None => std::env::var(ENDPOINT_ENV).map_err(|_| ChatError::NoEndpoint)?,
        };
        Ok(HttpClient::new(endpoint, std::env::var(api_key_env).ok(), timeout))
    }
}

#[derive(Deserialize)]
struct WireResponse {
    choices: Vec<WireChoice>,
    usage: Option<Usage>,
}

#[derive(Deserialize)]
struct WireChoice {
    message: WireMessage,
    finish_reason: Option<String>,
}

#[derive(Deserialize)]
struct WireMessage {
    content: Option<String>,
}

impl ChatClient for HttpClient {
    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, ChatError> {
        let started = Instant::now();
        let mut call = self.agent.post(&self.endpoint).set("Content-Type", "application/json");
        if let Some(key) = &self.api_key {
            call = call.set("Authorization", &format!("Bearer {key}"));
        }
        let body = json!({
            "model": request.model,
            "messages": request.messages,
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        });
        let resp = call.send_json(body).map_err(|e| match e {
            ureq::Error::Status(status, resp) => {
                ChatError::Status { status, body: resp.into_string().unwrap_or_default() }
            }
            ureq::Error::Transport(t) => ChatError::Transport(t.to_string()),
        })?;
        let wire: WireResponse = resp.into_json().map_err(|e| ChatError::Decode(e.to_string()))?;
        let choice = wire.choices.into_iter().next().ok_or_else(|| ChatError::Decode("no choices".into()))?;
        Ok(ChatResponse {
            text: choice.message.content.unwrap_or_default(),
            finish_reason: choice.finish_reason,
            usage: wire.usage,
            latency_ms: started.elapsed().as_millis() as u64,
        })
    }
}

/// Answers from a fixed queue, recording every request. Runs dry with a
/// transport error.
#[derive(Default)]
pub struct ScriptedClient {
    replies: Mutex<VecDeque<Result<String, ChatError>>>,
    requests: Mutex<Vec<ChatRequest>>,
}

impl ScriptedClient {
    pub fn new<S: Into<String>>(replies: impl IntoIterator<Item = S>) -> Self {
        ScriptedClient::with_results(replies.into_iter().map(|r| Ok(r.into())))
    }

    pub fn with_results(replies: impl IntoIterator<Item = Result<String, ChatError>>) -> Self {
        ScriptedClient { replies: Mutex::new(replies.into_iter().collect()), requests: Mutex::default() }
    }

    pub fn requests(&self) -> Vec<ChatRequest> {
        self.requests.lock().expect("lock").clone()
    }

    pub fn calls(&self) -> usize {
        self.requests.lock().expect("lock").len()
    }
}

impl ChatClient for ScriptedClient {
    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, ChatError> {
        self.requests.lock().expect("lock").push(request.clone());
        let next = self.replies.lock().expect("lock").pop_front();
        next.unwrap_or_else(|| Err(ChatError::Transport("scripted client exhausted".into()))).map(ChatResponse::text)
    }
}

/// Answers with a function of the request; a stand-in model for tests
/// that must stay deterministic under concurrency.
pub struct FnClient<F>(pub F);

impl<F> ChatClient for FnClient<F>
where
    F: Fn(&ChatRequest) -> Result<String, ChatError> + Send + Sync,
{
    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, ChatError> {
        (self.0)(request).map(ChatResponse::text)
    }
}
