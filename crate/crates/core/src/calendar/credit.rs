//! Loans, monthly interest, principal repayment and bankruptcy.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Calendar, CalendarError, TRADING_DAYS_PER_MONTH};
use crate::agent::AgentState;
use crate::money::{Money, Rate};
use crate::types::{AgentId, Day, PerStock, StockId};

/// A loan product: term in months and its annual simple rate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoanTerm {
    pub term_months: u32,
    pub annual_rate: Rate,
}

impl LoanTerm {
    pub fn maturity_days(&self) -> Day {
        self.term_months * TRADING_DAYS_PER_MONTH
    }
}

pub fn default_loan_terms() -> Vec<LoanTerm> {
    [(1, 270), (2, 300), (3, 330)]
        .into_iter()
        .map(|(m, bps)| LoanTerm { term_months: m, annual_rate: Rate::from_bps(bps) })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoanContract {
    pub loan_id: u64,
    pub agent_id: AgentId,
    pub principal: Money,
    pub term: LoanTerm,
    pub start_day: Day,
    pub maturity_day: Day,
    pub rate_at_issuance: Rate,
}

impl LoanContract {
    /// Issues at the term's own rate.
    pub fn issue(loan_id: u64, agent_id: AgentId, principal: Money, term: LoanTerm, day: Day) -> Self {
        LoanContract {
            loan_id,
            agent_id,
            principal,
            term,
            start_day: day,
            maturity_day: day + term.maturity_days(),
            rate_at_issuance: term.annual_rate,
        }
    }

    /// Interest accrues on month-end days in `(start_day, maturity_day]`.
    pub fn accrues_on(&self, day: Day) -> bool {
        self.start_day < day && day <= self.maturity_day
    }

    /// One month of simple interest.
    pub fn monthly_interest(&self) -> Money {
        self.principal.apply_rate_over(self.rate_at_issuance, 12)
    }
}

/// Interest owed per agent on a month-end day. Agents with nothing due
/// are omitted.
pub fn interest_due<'a>(
    calendar: &Calendar,
    loans: impl IntoIterator<Item = &'a LoanContract>,
    day: Day,
) -> Result<BTreeMap<AgentId, Money>, CalendarError> {
    if !calendar.is_month_end(day) {
        return Err(CalendarError::NotMonthEnd(day));
    }
    let mut due: BTreeMap<AgentId, Money> = BTreeMap::new();
    for loan in loans.into_iter().filter(|l| l.accrues_on(day)) {
        *due.entry(loan.agent_id).or_default() += loan.monthly_interest();
    }
    Ok(due)
}

/// Deducts principal of every loan maturing on `day` and drops those loans.
/// Cash may go negative. Returns the repaid contracts.
pub fn repay_matured(agent: &mut AgentState, day: Day) -> Vec<LoanContract> {
    let (matured, active): (Vec<_>, Vec<_>) =
        agent.loans.drain(..).partition(|l| l.maturity_day == day);
    agent.loans = active;
    for loan in &matured {
        agent.cash -= loan.principal;
    }
    matured
}

/// Shares sold to the market-maker sink during liquidation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiquidationFill {
    pub agent_id: AgentId,
    pub stock: StockId,
    pub quantity: u64,
    pub price: Money,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bankruptcy {
    pub fills: Vec<LiquidationFill>,
    pub cash_before: Money,
    pub written_off: Vec<LoanContract>,
}

/// Liquidates and withdraws an agent whose cash is strictly negative.
/// Returns `None` when the agent is solvent.
pub fn bankruptcy_check(agent: &mut AgentState, prices: &PerStock<Money>) -> Option<Bankruptcy> {
    if !agent.cash.is_negative() {
        return None;
    }
    let cash_before = agent.cash;
    let mut fills = Vec::new();
    for stock in StockId::ALL {
        let qty = agent.holdings[stock];
        if qty > 0 {
            agent.cash += prices[stock].times(qty);
            agent.holdings[stock] = 0;
            fills.push(LiquidationFill { agent_id: agent.agent_id, stock, quantity: qty, price: prices[stock] });
        }
    }
    let written_off = std::mem::take(&mut agent.loans);
    agent.alive = false;
    Some(Bankruptcy { fills, cash_before, written_off })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Personality;

    fn m(s: &str) -> Money {
        s.parse().unwrap()
    }

    fn term(i: usize) -> LoanTerm {
        default_loan_terms()[i]
    }

    #[test]
    fn interest_examples() {
        let cal = Calendar::new(264, &[]);
        let one = LoanContract::issue(0, 1, m("100000"), term(0), 1);
        assert_eq!(interest_due(&cal, [&one], 22).unwrap()[&1], m("225.00"));

        let a = LoanContract::issue(1, 2, m("50000"), term(1), 1);
        let b = LoanContract::issue(2, 2, m("100000"), term(2), 1);
        assert_eq!(interest_due(&cal, [&a, &b], 22).unwrap()[&2], m("400.00"));

        assert!(interest_due(&cal, [], 22).unwrap().is_empty());
        assert_eq!(interest_due(&cal, [&one], 21), Err(CalendarError::NotMonthEnd(21)));
    }

    #[test]
    fn month_end_count_matches_term() {
        let cal = Calendar::new(264, &[]);
        for t in default_loan_terms() {
            for start in 0..(264 - t.maturity_days()) {
                let loan = LoanContract::issue(0, 0, m("1000"), t, start);
                let n = cal.month_end_days().iter().filter(|&&d| loan.accrues_on(d)).count();
                assert_eq!(n as u32, t.term_months, "start {start}");
            }
        }
    }

    #[test]
    fn repayment_examples() {
        let mut a = AgentState::new(0, Personality::Balanced, m("10000"));
        a.loans.push(LoanContract::issue(0, 0, m("8000"), term(0), 1));
        assert!(repay_matured(&mut a, 22).is_empty());
        assert_eq!(repay_matured(&mut a, 23).len(), 1);
        assert_eq!(a.cash, m("2000"));
        assert!(a.loans.is_empty());

        let mut b = AgentState::new(1, Personality::Balanced, m("5000"));
        b.loans.push(LoanContract::issue(1, 1, m("8000"), term(0), 1));
        repay_matured(&mut b, 23);
        assert_eq!(b.cash, m("-3000"));
    }

    #[test]
    fn bankruptcy_examples() {
        let prices = PerStock::new(m("30"), m("40"));
        let mut a = AgentState::new(0, Personality::Aggressive, m("-100"));
        a.holdings.a = 10;
        let out = bankruptcy_check(&mut a, &prices).unwrap();
        assert_eq!(a.cash, m("200"));
        assert_eq!(a.holdings, PerStock::default());
        assert!(!a.alive);
        assert_eq!(out.fills.len(), 1);

        let mut zero = AgentState::new(1, Personality::Aggressive, Money::ZERO);
        assert!(bankruptcy_check(&mut zero, &prices).is_none());
        assert!(zero.alive);

        let mut broke = AgentState::new(2, Personality::Aggressive, m("-5"));
        assert!(bankruptcy_check(&mut broke, &prices).unwrap().fills.is_empty());
        assert_eq!(broke.cash, m("-5"));
        assert!(!broke.alive);
    }
}
