//! Agent decision layer: contexts, decisions, policies, the secretary and
//! the forum.

mod bbs;
mod scripted;
mod secretary;

use serde::{Deserialize, Serialize};

pub use bbs::{BbsPost, BbsStore};
pub use scripted::{PersonalityRule, PolicyTable, ScriptedPolicy};
pub use secretary::{secretary_validate, validate_loan, RejectReason, Verdict};

use crate::agent::AgentState;
use crate::calendar::{FeeSchedule, LoanTerm, NewsItem};
use crate::exchange::BookSummary;
use crate::money::Money;
use crate::rng::RngStream;
use crate::types::{AblationSet, Day, PerStock, Side, StockId};

/// A trade the agent took part in today, as seen by that agent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OwnFill {
    pub session: u32,
    pub stock: StockId,
    pub side: Side,
    pub quantity: u64,
    pub price: Money,
}

/// Everything one agent may see when deciding. Holds no other agent's
/// private state.
#[derive(Clone, Debug, Serialize)]
pub struct DecisionContext {
    pub day: Day,
    /// 0 outside trading sessions.
    pub session: u32,
    pub sessions_per_day: u32,
    pub num_days: Day,
    pub prices: PerStock<Money>,
    /// Closing prices of the previous day (initial prices on day 1).
    pub prev_close: PerStock<Money>,
    pub book: PerStock<BookSummary>,
    pub agent: AgentState,
    /// Yesterday's forum posts, anonymous. Empty under the forum ablation.
    pub forum: Vec<String>,
    /// Reports and event lines visible today, already ablation-filtered.
    pub news: Vec<NewsItem>,
    pub loan_terms: Vec<LoanTerm>,
    pub fees: FeeSchedule,
    pub max_new_loan: Money,
    pub ablations: AblationSet,
    pub own_fills: Vec<OwnFill>,
}

impl DecisionContext {
    /// Percentage-free trend sign of `stock` against the previous close.
    pub fn trend(&self, stock: StockId) -> std::cmp::Ordering {
        self.prices[stock].cmp(&self.prev_close[stock])
    }
}

/// One order intent, mirroring the trade JSON schema.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "action_type", rename_all = "lowercase")]
pub enum ActionDecision {
    Buy { stock: StockId, amount: i64, price: Money },
    Sell { stock: StockId, amount: i64, price: Money },
    No,
}

impl ActionDecision {
    pub fn side(&self) -> Option<Side> {
        match self {
            ActionDecision::Buy { .. } => Some(Side::Buy),
            ActionDecision::Sell { .. } => Some(Side::Sell),
            ActionDecision::No => None,
        }
    }

    /// `(stock, amount, price)` for buys and sells.
    pub fn terms(&self) -> Option<(StockId, i64, Money)> {
        match *self {
            ActionDecision::Buy { stock, amount, price } | ActionDecision::Sell { stock, amount, price } => {
                Some((stock, amount, price))
            }
            ActionDecision::No => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoanDecision {
    pub take_loan: bool,
    pub term_index: usize,
    pub amount: Money,
}

impl LoanDecision {
    pub fn none() -> Self {
        LoanDecision { take_loan: false, term_index: 0, amount: Money::ZERO }
    }
}

mod yes_no {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &bool, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(if *v { "yes" } else { "no" })
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<bool, D::Error> {
        let s = String::deserialize(d)?;
        match s.trim().to_ascii_lowercase().as_str() {
            "yes" => Ok(true),
            "no" => Ok(false),
            other => Err(D::Error::custom(format!("expected \"yes\" or \"no\", got \"{other}\""))),
        }
    }
}

/// Tomorrow's intentions. Logged only.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NextDayEstimate {
    #[serde(rename = "buy_A", with = "yes_no")]
    pub buy_a: bool,
    #[serde(rename = "buy_B", with = "yes_no")]
    pub buy_b: bool,
    #[serde(rename = "sell_A", with = "yes_no")]
    pub sell_a: bool,
    #[serde(rename = "sell_B", with = "yes_no")]
    pub sell_b: bool,
    #[serde(with = "yes_no")]
    pub loan: bool,
}

/// One model exchange behind a decision.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub prompt: String,
    pub response: Option<String>,
    pub error: Option<String>,
}

/// A decision with the attempts that produced it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Traced<T> {
    pub value: T,
    /// Model calls made; 0 for rule-based policies.
    pub attempts: u32,
    /// True when retries ran out and the value is the safe fallback.
    pub degraded: bool,
    pub trail: Vec<TraceStep>,
}

impl<T> Traced<T> {
    pub fn plain(value: T) -> Self {
        Traced { value, attempts: 0, degraded: false, trail: Vec::new() }
    }
}

/// A source of agent decisions. Implementations must be pure in
/// `(ctx, rng)` for runs to be reproducible.
pub trait AgentPolicy: Send + Sync {
    fn decide_trade(&self, ctx: &DecisionContext, rng: &mut RngStream) -> Traced<ActionDecision>;
    fn decide_loan(&self, ctx: &DecisionContext, rng: &mut RngStream) -> Traced<LoanDecision>;
    fn estimate_next_day(&self, ctx: &DecisionContext, rng: &mut RngStream) -> Traced<NextDayEstimate>;
    fn compose_post(&self, ctx: &DecisionContext, rng: &mut RngStream) -> Traced<String>;

    /// A failure that must stop the run, such as a replay-cache miss.
    /// Decisions returned after one are fallbacks and must not be used.
    fn fatal_error(&self) -> Option<String> {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn action_schema() {
        let buy: ActionDecision =
            serde_json::from_str(r#"{"action_type": "buy", "stock": "A", "amount": 100, "price": 30}"#).unwrap();
        assert_eq!(buy, ActionDecision::Buy { stock: StockId::A, amount: 100, price: Money::from_units(30) });
        let no: ActionDecision = serde_json::from_str(r#"{"action_type": "no"}"#).unwrap();
        assert_eq!(no, ActionDecision::No);
        assert_eq!(serde_json::to_string(&no).unwrap(), r#"{"action_type":"no"}"#);
    }

    #[test]
    fn estimate_roundtrip_all_values() {
        for bits in 0u8..32 {
            let e = NextDayEstimate {
                buy_a: bits & 1 != 0,
                buy_b: bits & 2 != 0,
                sell_a: bits & 4 != 0,
                sell_b: bits & 8 != 0,
                loan: bits & 16 != 0,
            };
            let json = serde_json::to_string(&e).unwrap();
            assert_eq!(serde_json::from_str::<NextDayEstimate>(&json).unwrap(), e);
        }
        let e: NextDayEstimate = serde_json::from_str(
            r#"{"buy_A": "yes", "buy_B": "no", "sell_A": "no", "sell_B": "no", "loan": "yes"}"#,
        )
        .unwrap();
        assert!(e.buy_a && e.loan && !e.sell_b);
    }
}
