//! Rule-based personality policies.
//!
//! Each personality trades within a price band around the current price
//! and commits at most a fixed fraction of its cash or holdings:
//!
//! | personality  | band | size |
//! |--------------|------|------|
//! | conservative | ±2%  | 10%  |
//! | balanced     | ±4%  | 25%  |
//! | aggressive   | ±8%  | 50%  |
//!
//! Growth-oriented agents buy a stock with positive news on the day it
//! appears and otherwise act as balanced. All arithmetic is on cents and
//! basis points.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::{
    ActionDecision, AgentPolicy, DecisionContext, LoanDecision, NextDayEstimate, Traced,
};
use crate::exchange::buy_commitment;
use crate::money::{Money, Rate};
use crate::rng::RngStream;
use crate::types::{AblationFlag, Personality, Side, StockId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PersonalityRule {
    /// Half-width of the limit-price band, in basis points of the price.
    pub band_bps: i64,
    /// Fraction of cash (buys) or holdings (sells) committed per order.
    pub size: Rate,
}

impl PersonalityRule {
    pub const fn new(band_bps: i64, size_pct: i64) -> Self {
        PersonalityRule { band_bps, size: Rate::from_units(size_pct * 1_000_000) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PolicyTable {
    pub conservative: PersonalityRule,
    pub aggressive: PersonalityRule,
    pub balanced: PersonalityRule,
    pub growth_oriented: PersonalityRule,
    /// Fraction of borrowing capacity an aggressive agent draws.
    pub aggressive_loan_fraction: Rate,
}

impl Default for PolicyTable {
    fn default() -> Self {
        PolicyTable {
            conservative: PersonalityRule::new(200, 10),
            aggressive: PersonalityRule::new(800, 50),
            balanced: PersonalityRule::new(400, 25),
            growth_oriented: PersonalityRule::new(400, 25),
            aggressive_loan_fraction: Rate::from_ratio(1, 2),
        }
    }
}

impl PolicyTable {
    pub fn rule(&self, p: Personality) -> PersonalityRule {
        match p {
            Personality::Conservative => self.conservative,
            Personality::Aggressive => self.aggressive,
            Personality::Balanced => self.balanced,
            Personality::GrowthOriented => self.growth_oriented,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        for p in Personality::ALL {
            let r = self.rule(p);
            if !(0..10_000).contains(&r.band_bps) {
                return Err(format!("{} band_bps must be in 0..10000", p.label()));
            }
            if !r.size.is_positive() || r.size > Rate::ONE {
                return Err(format!("{} size must be in (0, 1]", p.label()));
            }
        }
        if self.aggressive_loan_fraction < Rate::ZERO || self.aggressive_loan_fraction > Rate::ONE {
            return Err("aggressive_loan_fraction must be in [0, 1]".into());
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default)]
pub struct ScriptedPolicy {
    pub table: PolicyTable,
}

impl ScriptedPolicy {
    pub fn new(table: PolicyTable) -> Self {
        ScriptedPolicy { table }
    }

    /// First stock with positive stock-specific news today.
    fn good_news(ctx: &DecisionContext) -> Option<StockId> {
        ctx.news.iter().find(|n| n.tone > 0 && n.stock.is_some()).and_then(|n| n.stock)
    }

    fn limit(price: Money, offset_bps: i64) -> Money {
        price.apply_rate(Rate::from_bps(10_000 + offset_bps)).max(Money::from_cents(1))
    }

    fn buy(ctx: &DecisionContext, rule: PersonalityRule, stock: StockId, price: Money) -> ActionDecision {
        let budget = ctx.agent.cash.apply_rate(rule.size) - ctx.fees.max_fee;
        let amount = budget.shares_at(price);
        if amount == 0 || buy_commitment(&ctx.fees, price, amount) > ctx.agent.cash {
            return ActionDecision::No;
        }
        ActionDecision::Buy { stock, amount: amount as i64, price }
    }

    fn sell(ctx: &DecisionContext, rule: PersonalityRule, stock: StockId, price: Money) -> ActionDecision {
        let amount =
            (ctx.agent.holdings[stock] as i128 * rule.size.units() as i128 / Rate::ONE.units() as i128) as i64;
        if amount == 0 {
            return ActionDecision::No;
        }
        ActionDecision::Sell { stock, amount, price }
    }

    fn trade(&self, ctx: &DecisionContext, rng: &mut RngStream) -> ActionDecision {
        let agent = &ctx.agent;
        let personality = agent.personality;
        if personality == Personality::GrowthOriented {
            if let Some(stock) = Self::good_news(ctx) {
                let rule = self.table.growth_oriented;
                let off = rng.between(0, rule.band_bps);
                return Self::buy(ctx, rule, stock, Self::limit(ctx.prices[stock], off));
            }
        }
        let rule = match personality {
            Personality::GrowthOriented => self.table.balanced,
            p => self.table.rule(p),
        };
        let stock = if rng.coin() { StockId::A } else { StockId::B };
        let price = ctx.prices[stock];
        let can_buy = agent.cash > price + ctx.fees.max_fee;
        let can_sell = agent.holdings[stock] > 0;
        let side = match (can_buy, can_sell) {
            (false, false) => return ActionDecision::No,
            (true, false) => Side::Buy,
            (false, true) => Side::Sell,
            (true, true) => {
                if rng.coin() {
                    Side::Buy
                } else {
                    Side::Sell
                }
            }
        };
        let limit = Self::limit(price, rng.between(-rule.band_bps, rule.band_bps));
        match side {
            Side::Buy => Self::buy(ctx, rule, stock, limit),
            Side::Sell => Self::sell(ctx, rule, stock, limit),
        }
    }

    /// Loan amount the rules call for, before choosing a term.
    fn wanted_loan(&self, ctx: &DecisionContext) -> Money {
        let agent = &ctx.agent;
        if ctx.ablations.contains(&AblationFlag::NoLoan) && ctx.day >= 2 {
            return Money::ZERO;
        }
        if !agent.is_debt_free() {
            return Money::ZERO;
        }
        let cap = ctx.max_new_loan;
        match agent.personality {
            Personality::Conservative => Money::ZERO,
            Personality::Aggressive => cap.apply_rate(self.table.aggressive_loan_fraction),
            Personality::Balanced => {
                let gross = agent.gross_assets(&ctx.prices);
                if agent.cash < gross.apply_rate(Rate::from_ratio(1, 4)) {
                    cap.apply_rate(self.table.balanced.size)
                } else {
                    Money::ZERO
                }
            }
            Personality::GrowthOriented => {
                if Self::good_news(ctx).is_some() {
                    cap.apply_rate(self.table.growth_oriented.size)
                } else {
                    Money::ZERO
                }
            }
        }
    }
}

impl AgentPolicy for ScriptedPolicy {
    fn decide_trade(&self, ctx: &DecisionContext, rng: &mut RngStream) -> Traced<ActionDecision> {
        Traced::plain(self.trade(ctx, rng))
    }

    fn decide_loan(&self, ctx: &DecisionContext, rng: &mut RngStream) -> Traced<LoanDecision> {
        let amount = self.wanted_loan(ctx).min(ctx.max_new_loan);
        if !amount.is_positive() || ctx.loan_terms.is_empty() {
            return Traced::plain(LoanDecision::none());
        }
        let term_index = rng.below(ctx.loan_terms.len() as u64) as usize;
        Traced::plain(LoanDecision { take_loan: true, term_index, amount })
    }

    /// Trend-following, except conservative agents who lean against the
    /// day's move.
    fn estimate_next_day(&self, ctx: &DecisionContext, _rng: &mut RngStream) -> Traced<NextDayEstimate> {
        let contrarian = ctx.agent.personality == Personality::Conservative;
        let view = |s: StockId| {
            let (up, down) = match ctx.trend(s) {
                Ordering::Greater => (true, false),
                Ordering::Less => (false, true),
                Ordering::Equal => (false, false),
            };
            let (buy, sell) = if contrarian { (down, up) } else { (up, down) };
            (buy && ctx.agent.cash.is_positive(), sell && ctx.agent.holdings[s] > 0)
        };
        let (buy_a, sell_a) = view(StockId::A);
        let (buy_b, sell_b) = view(StockId::B);
        let loan = self.wanted_loan(ctx).is_positive();
        Traced::plain(NextDayEstimate { buy_a, buy_b, sell_a, sell_b, loan })
    }

    fn compose_post(&self, ctx: &DecisionContext, _rng: &mut RngStream) -> Traced<String> {
        let mut parts = Vec::new();
        for stock in StockId::ALL {
            let bought: u64 = ctx.own_fills.iter().filter(|f| f.stock == stock && f.side == Side::Buy).map(|f| f.quantity).sum();
            let sold: u64 = ctx.own_fills.iter().filter(|f| f.stock == stock && f.side == Side::Sell).map(|f| f.quantity).sum();
            if bought > 0 {
                parts.push(format!("bought {bought} shares of stock {stock}"));
            }
            if sold > 0 {
                parts.push(format!("sold {sold} shares of stock {stock}"));
            }
        }
        let activity = if parts.is_empty() { "No trades for me today".to_string() } else { format!("Today I {}", parts.join(" and ")) };
        let moves: Vec<String> = StockId::ALL
            .iter()
            .map(|&s| {
                let word = match ctx.trend(s) {
                    Ordering::Greater => "rose",
                    Ordering::Less => "fell",
                    Ordering::Equal => "held",
                };
                format!("stock {s} {word} to {}", ctx.prices[s])
            })
            .collect();
        let mood = match (ctx.trend(StockId::A), ctx.trend(StockId::B)) {
            (Ordering::Greater, Ordering::Greater) => "bullish",
            (Ordering::Less, Ordering::Less) => "bearish",
            _ => "cautious",
        };
        Traced::plain(format!("{activity}. {}. Feeling {mood}.", capitalize(&moves.join(" and "))))
    }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().collect::<String>() + c.as_str(),
        None => String::new(),
    }
}
