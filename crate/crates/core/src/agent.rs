//! Agent ledgers and their initialization.

use serde::{Deserialize, Serialize};

use crate::calendar::LoanContract;
use crate::config::SimConfig;
use crate::money::Money;
use crate::rng::RngStream;
use crate::types::{AgentId, PerStock, Personality, StockId};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentState {
    pub agent_id: AgentId,
    pub personality: Personality,
    pub cash: Money,
    pub holdings: PerStock<u64>,
    pub loans: Vec<LoanContract>,
    pub alive: bool,
    /// Wealth (cash + stock at initial prices − debt) at initialization.
    pub initial_wealth: Money,
    pub bought: PerStock<u64>,
    pub sold: PerStock<u64>,
    pub buy_trades: PerStock<u32>,
    pub sell_trades: PerStock<u32>,
}

impl AgentState {
    pub fn new(agent_id: AgentId, personality: Personality, cash: Money) -> Self {
        AgentState {
            agent_id,
            personality,
            cash,
            holdings: PerStock::default(),
            loans: Vec::new(),
            alive: true,
            initial_wealth: cash,
            bought: PerStock::default(),
            sold: PerStock::default(),
            buy_trades: PerStock::default(),
            sell_trades: PerStock::default(),
        }
    }

    pub fn stock_value(&self, prices: &PerStock<Money>) -> Money {
        StockId::ALL
            .iter()
            .map(|&s| prices[s].times(self.holdings[s]))
            .sum()
    }

    /// Cash plus market value of holdings.
    pub fn gross_assets(&self, prices: &PerStock<Money>) -> Money {
        self.cash + self.stock_value(prices)
    }

    pub fn outstanding_debt(&self) -> Money {
        self.loans.iter().map(|l| l.principal).sum()
    }

    /// Net worth: gross assets minus outstanding loan principal.
    pub fn capital(&self, prices: &PerStock<Money>) -> Money {
        self.gross_assets(prices) - self.outstanding_debt()
    }

    /// Largest new loan keeping total debt within capital.
    pub fn max_new_loan(&self, prices: &PerStock<Money>) -> Money {
        (self.capital(prices) - self.outstanding_debt()).max(Money::ZERO)
    }

    pub fn is_debt_free(&self) -> bool {
        self.loans.is_empty()
    }
}

/// Draws the initial population.
///
/// Each agent's gross wealth is uniform over `asset_range` (to the cent). A
/// configurable fraction is converted into whole shares split evenly by value
/// between A and B at the initial prices; the remainder (including the cash
/// left over from rounding to whole shares) is cash. Each agent also carries
/// an initial liability drawn uniformly from `[0, max_initial_liability ×
/// wealth]`, booked as a loan already in force on day 0 with a random term.
pub fn init_agents(config: &SimConfig, rng: &mut RngStream) -> Vec<AgentState> {
    let lo = config.asset_range.lo.cents();
    let hi = config.asset_range.hi.cents();
    let prices = config.initial_prices;
    let mut next_loan_id = 0u64;
    (0..config.num_agents as AgentId)
        .map(|id| {
            let personality = Personality::ALL[rng.below(4) as usize];
            let wealth = Money::from_cents(rng.between(lo, hi));
            let stock_budget = wealth.apply_rate(config.initial_stock_fraction);
            let half = Money::from_cents(stock_budget.cents() / 2);
            let holdings = PerStock::new(
                half.shares_at(prices.a),
                (stock_budget - half).shares_at(prices.b),
            );
            let stock_value = prices.a.times(holdings.a) + prices.b.times(holdings.b);
            let mut agent = AgentState::new(id, personality, wealth - stock_value);
            agent.holdings = holdings;

            let cap = wealth.apply_rate(config.max_initial_liability);
            let liability = Money::from_cents(rng.between(0, cap.cents()));
            let term = config.loan_terms[rng.below(config.loan_terms.len() as u64) as usize];
            if liability.is_positive() {
                agent.loans.push(LoanContract::issue(next_loan_id, id, liability, term, 0));
                next_loan_id += 1;
            }
            agent.initial_wealth = agent.capital(&prices);
            agent
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded_rng;

    fn config() -> SimConfig {
        SimConfig::with_seed(7)
    }

    #[test]
    fn wealth_within_range_and_debt_within_capital() {
        let cfg = config();
        let agents = init_agents(&cfg, &mut seeded_rng(cfg.seed));
        assert_eq!(agents.len(), 200);
        for a in &agents {
            let gross = a.gross_assets(&cfg.initial_prices);
            assert!(gross >= cfg.asset_range.lo && gross <= cfg.asset_range.hi, "{gross}");
            assert!(a.outstanding_debt() <= gross);
            assert!(!a.cash.is_negative());
        }
    }

    #[test]
    fn deterministic_in_seed() {
        let cfg = config();
        let a = init_agents(&cfg, &mut seeded_rng(3));
        let b = init_agents(&cfg, &mut seeded_rng(3));
        let c = init_agents(&cfg, &mut seeded_rng(4));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn all_personalities_present() {
        let mut cfg = config();
        cfg.num_agents = 100;
        for seed in 0..20 {
            let agents = init_agents(&cfg, &mut seeded_rng(seed));
            for p in Personality::ALL {
                assert!(agents.iter().any(|a| a.personality == p), "seed {seed} lacks {p:?}");
            }
        }
    }

    #[test]
    fn all_cash_when_stock_fraction_zero() {
        let mut cfg = config();
        cfg.initial_stock_fraction = crate::money::Rate::ZERO;
        let agents = init_agents(&cfg, &mut seeded_rng(1));
        assert!(agents.iter().all(|a| a.holdings == PerStock::default()));
    }
}
