//! Model-backed agents: prompt templates, response parsing, the retry
//! loop, chat clients and a record/replay cache.

pub mod cache;
pub mod client;
pub mod parse;
pub mod policy;
pub mod prompts;
pub mod render;
pub mod retry;
pub mod templates;

pub use cache::{request_hash, CacheMode, ReplayCache};
pub use client::{ChatClient, ChatError, ChatMessage, ChatRequest, ChatResponse, FnClient, HttpClient, Role, ScriptedClient};
pub use parse::{parse_action, parse_estimate, parse_loan, parse_post, ParseFailure};
pub use policy::LlmPolicy;
pub use retry::{decide_with_retries, Exchange, ModelParams, RetryPolicy};
pub use templates::TemplateName;
