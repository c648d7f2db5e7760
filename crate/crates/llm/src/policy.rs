//! A model-backed agent policy, plug-compatible with the scripted ones.

use std::sync::{Arc, Mutex};

use stockagent_core::agents::{
    secretary_validate, validate_loan, ActionDecision, AgentPolicy, DecisionContext, LoanDecision, NextDayEstimate,
    RejectReason, Traced, Verdict,
};
use stockagent_core::config::LlmSettings;
use stockagent_core::calendar::incremental_fee;
use stockagent_core::rng::RngStream;
use stockagent_core::AblationFlag;

use crate::client::ChatClient;
use crate::parse::{parse_action, parse_estimate, parse_loan, parse_post};
use crate::prompts;
use crate::render::RenderError;
use crate::retry::{decide_with_retries, Exchange, ModelParams, RetryPolicy};

pub const FALLBACK_POST: &str = "No comment today.";

pub struct LlmPolicy {
    client: Arc<dyn ChatClient>,
    params: ModelParams,
    retry: RetryPolicy,
    fatal: Mutex<Option<String>>,
}

/// The secretary's verdict phrased for the model.
fn explain_trade(d: &ActionDecision, ctx: &DecisionContext, reason: RejectReason) -> String {
    match (reason, d.terms()) {
        (RejectReason::InsufficientCash, Some((_, amount, price))) => {
            let q = amount.max(0) as u64;
            let cost = price
                .checked_times(q)
                .map_or_else(|| "more".to_string(), |n| (n + incremental_fee(&ctx.fees, 0, q)).to_string());
            format!("insufficient cash: the order needs {cost} yuan including fees but you have {} yuan", ctx.agent.cash)
        }
        (RejectReason::InsufficientHoldings, Some((stock, amount, _))) => format!(
            "insufficient holdings: you tried to sell {amount} shares of stock {stock} but hold {}",
            ctx.agent.holdings[stock]
        ),
        (r, _) => r.as_str().to_string(),
    }
}

impl LlmPolicy {
    pub fn new(client: Arc<dyn ChatClient>, settings: &LlmSettings) -> Self {
        LlmPolicy::with_params(client, ModelParams::from_settings(settings), RetryPolicy::from_settings(settings))
    }

    pub fn with_params(client: Arc<dyn ChatClient>, params: ModelParams, retry: RetryPolicy) -> Self {
        LlmPolicy { client, params, retry, fatal: Mutex::new(None) }
    }

    fn run<T: Clone>(
        &self,
        prompt: Result<String, RenderError>,
        accept: &dyn Fn(&str) -> Result<T, String>,
        correct: &dyn Fn(&str) -> String,
        fallback: T,
    ) -> Traced<T> {
        let degraded = |msg: String| {
            self.fatal.lock().expect("lock").get_or_insert(msg);
            Traced { value: fallback.clone(), attempts: 0, degraded: true, trail: Vec::new() }
        };
        let prompt = match prompt {
            Ok(p) => p,
            Err(e) => return degraded(format!("prompt rendering failed: {e}")),
        };
        let ex = Exchange { system: prompts::background(), prompt, accept, correct, fallback: fallback.clone() };
        match decide_with_retries(self.client.as_ref(), &self.params, &self.retry, ex) {
            Ok(t) => t,
            Err(e) => degraded(e.to_string()),
        }
    }
}

impl AgentPolicy for LlmPolicy {
    fn decide_trade(&self, ctx: &DecisionContext, _rng: &mut RngStream) -> Traced<ActionDecision> {
        let accept = |text: &str| {
            let d = parse_action(text).map_err(|e| e.0)?;
            match secretary_validate(&d, &ctx.agent, &ctx.fees) {
                Verdict::Accept => Ok(d),
                Verdict::Reject(r) => Err(explain_trade(&d, ctx, r)),
            }
        };
        self.run(prompts::trade_prompt(ctx), &accept, &prompts::trade_retry, ActionDecision::No)
    }

    fn decide_loan(&self, ctx: &DecisionContext, _rng: &mut RngStream) -> Traced<LoanDecision> {
        if ctx.ablations.contains(&AblationFlag::NoLoan) && ctx.day >= 2 {
            return Traced::plain(LoanDecision::none());
        }
        let accept = |text: &str| {
            let d = parse_loan(text).map_err(|e| e.0)?;
            match validate_loan(&d, ctx.max_new_loan, ctx.loan_terms.len()) {
                Verdict::Accept => Ok(d),
                Verdict::Reject(RejectReason::LoanExceedsCapital) => {
                    Err(format!("loan exceeds capital: you can borrow at most {} yuan", ctx.max_new_loan))
                }
                Verdict::Reject(r) => Err(r.as_str().to_string()),
            }
        };
        self.run(prompts::loan_prompt(ctx), &accept, &prompts::loan_retry, LoanDecision::none())
    }

    fn estimate_next_day(&self, ctx: &DecisionContext, _rng: &mut RngStream) -> Traced<NextDayEstimate> {
        let accept = |text: &str| parse_estimate(text).map_err(|e| e.0);
        self.run(prompts::estimate_prompt(ctx), &accept, &prompts::estimate_retry, NextDayEstimate::default())
    }

    fn compose_post(&self, ctx: &DecisionContext, _rng: &mut RngStream) -> Traced<String> {
        let accept = |text: &str| parse_post(text).map_err(|e| e.0);
        self.run(prompts::post_prompt(ctx), &accept, &prompts::post_retry, FALLBACK_POST.to_string())
    }

    fn fatal_error(&self) -> Option<String> {
        self.fatal.lock().expect("lock").clone()
    }
}
