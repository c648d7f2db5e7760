//! The render, call, parse and validate loop with correction prompts.

use std::time::{Duration, Instant};

use stockagent_core::agents::{TraceStep, Traced};
use stockagent_core::config::LlmSettings;

use crate::client::{ChatClient, ChatError, ChatMessage, ChatRequest};

#[derive(Clone, Debug, PartialEq)]
pub struct RetryPolicy {
    /// Model calls allowed per decision, failed transport calls included.
    pub max_attempts: u32,
    /// First pause after a transient failure; doubles each time.
    pub backoff: Duration,
    /// Give up once this much time has gone by for one decision.
    pub wall_budget: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy { max_attempts: 3, backoff: Duration::from_millis(500), wall_budget: Duration::from_secs(60) }
    }
}

impl RetryPolicy {
    pub fn from_settings(s: &LlmSettings) -> Self {
        RetryPolicy {
            max_attempts: s.max_attempts.max(1),
            backoff: Duration::from_millis(s.backoff_ms),
            wall_budget: Duration::from_millis(s.wall_budget_ms),
        }
    }
}

/// Model name and decoding parameters shared by every request.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    pub model: String,
    pub temperature: f64,
    pub max_tokens: u32,
}

impl ModelParams {
    pub fn from_settings(s: &LlmSettings) -> Self {
        ModelParams { model: s.model.clone(), temperature: s.temperature, max_tokens: s.max_tokens }
    }
}

/// One decision's conversation: the system background, the prompt, and a
/// way to check and correct answers.
pub struct Exchange<'a, T> {
    pub system: &'a str,
    pub prompt: String,
    /// Parses and validates an answer; the error is the reason shown to
    /// the model on the next attempt.
    pub accept: &'a dyn Fn(&str) -> Result<T, String>,
    /// The correction prompt for a reason.
    pub correct: &'a dyn Fn(&str) -> String,
    pub fallback: T,
}

/// Asks until an answer is accepted or attempts run out, then returns the
/// fallback marked as degraded. Only fatal client errors escape.
pub fn decide_with_retries<T>(
    client: &dyn ChatClient,
    params: &ModelParams,
    policy: &RetryPolicy,
    ex: Exchange<'_, T>,
) -> Result<Traced<T>, ChatError> {
    let started = Instant::now();
    let mut messages = vec![ChatMessage::system(ex.system), ChatMessage::user(ex.prompt)];
    let mut trail = Vec::new();
    let mut pause = policy.backoff;
    let mut attempts = 0;
    while attempts < policy.max_attempts.max(1) {
        attempts += 1;
        let request = ChatRequest {
            model: params.model.clone(),
            messages: messages.clone(),
            temperature: params.temperature,
            max_tokens: params.max_tokens,
        };
        let prompt = messages.last().map(|m| m.content.clone()).unwrap_or_default();
        match client.complete(&request) {
            Ok(resp) => match (ex.accept)(&resp.text) {
                Ok(value) => {
                    trail.push(TraceStep { prompt, response: Some(resp.text), error: None });
                    return Ok(Traced { value, attempts, degraded: false, trail });
                }
                Err(reason) => {
                    trail.push(TraceStep { prompt, response: Some(resp.text.clone()), error: Some(reason.clone()) });
                    messages.push(ChatMessage::assistant(resp.text));
                    messages.push(ChatMessage::user((ex.correct)(&reason)));
                }
            },
            Err(e) if e.is_fatal() => return Err(e),
            Err(e) => {
                trail.push(TraceStep { prompt, response: None, error: Some(e.to_string()) });
                if e.is_transient() {
                    if started.elapsed() + pause > policy.wall_budget {
                        break;
                    }
                    std::thread::sleep(pause);
                    pause *= 2;
                }
            }
        }
        if started.elapsed() > policy.wall_budget {
            break;
        }
    }
    Ok(Traced { value: ex.fallback, attempts, degraded: true, trail })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::client::ScriptedClient;

    fn params() -> ModelParams {
        ModelParams { model: "m".into(), temperature: 0.0, max_tokens: 16 }
    }

    fn quick() -> RetryPolicy {
        RetryPolicy { max_attempts: 3, backoff: Duration::ZERO, wall_budget: Duration::from_secs(5) }
    }

    fn run(client: &ScriptedClient) -> Traced<i64> {
        let accept = |t: &str| t.trim().parse::<i64>().map_err(|_| format!("`{t}` is not a number"));
        let correct = |r: &str| format!("fix: {r}");
        decide_with_retries(
            client,
            &params(),
            &quick(),
            Exchange { system: "sys", prompt: "go".into(), accept: &accept, correct: &correct, fallback: -1 },
        )
        .unwrap()
    }

    #[test]
    fn second_answer_accepted() {
        let c = ScriptedClient::new(["nope", "42"]);
        let t = run(&c);
        assert_eq!((t.value, t.attempts, t.degraded), (42, 2, false));
        let second = &c.requests()[1].messages;
        assert_eq!(second.len(), 4);
        assert_eq!(second[2].content, "nope");
        assert_eq!(second[3].content, "fix: `nope` is not a number");
        assert_eq!(t.trail[1].prompt, "fix: `nope` is not a number");
    }

    #[test]
    fn exhaustion_degrades() {
        let c = ScriptedClient::new(["a", "b", "c", "4"]);
        let t = run(&c);
        assert_eq!((t.value, t.attempts, t.degraded), (-1, 3, true));
        assert_eq!(c.calls(), 3);
        assert!(t.trail.iter().all(|s| s.error.is_some()));
    }

    #[test]
    fn transport_errors_count_as_attempts() {
        let c = ScriptedClient::with_results([
            Err(ChatError::Transport("reset".into())),
            Err(ChatError::Status { status: 500, body: String::new() }),
            Ok("7".to_string()),
        ]);
        let t = run(&c);
        assert_eq!((t.value, t.attempts), (7, 3));
        // a failed call does not add turns to the conversation
        assert_eq!(c.requests()[2].messages.len(), 2);
    }

    #[test]
    fn fatal_errors_escape() {
        let c = ScriptedClient::with_results([Err(ChatError::ReplayMiss { hash: "h".into() })]);
        let accept = |_: &str| Ok(0);
        let correct = |r: &str| r.to_string();
        let out = decide_with_retries(
            &c,
            &params(),
            &quick(),
            Exchange { system: "s", prompt: "p".into(), accept: &accept, correct: &correct, fallback: 0 },
        );
        assert!(matches!(out, Err(ChatError::ReplayMiss { .. })));
    }

    #[test]
    fn wall_budget_stops_backoff() {
        let c = ScriptedClient::with_results((0..3).map(|_| Err(ChatError::Transport("down".into()))));
        let policy = RetryPolicy { max_attempts: 3, backoff: Duration::from_secs(10), wall_budget: Duration::from_millis(50) };
        let accept = |_: &str| Ok(0);
        let correct = |r: &str| r.to_string();
        let started = Instant::now();
        let t = decide_with_retries(
            &c,
            &params(),
            &policy,
            Exchange { system: "s", prompt: "p".into(), accept: &accept, correct: &correct, fallback: 9 },
        )
        .unwrap();
        assert!(started.elapsed() < Duration::from_secs(1));
        assert_eq!((t.value, t.attempts, t.degraded), (9, 1, true));
    }
}
