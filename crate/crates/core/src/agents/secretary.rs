//! The secretary: rejects decisions an agent could not actually carry out.

use serde::{Deserialize, Serialize};

use super::{ActionDecision, LoanDecision};
use crate::agent::AgentState;
use crate::calendar::{transaction_fee, FeeSchedule};
use crate::money::Money;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RejectReason {
    InsufficientCash,
    InsufficientHoldings,
    NonPositiveAmount,
    NonPositivePrice,
    LoanExceedsCapital,
    UnknownLoanType,
}

impl RejectReason {
    pub fn as_str(self) -> &'static str {
        match self {
            RejectReason::InsufficientCash => "insufficient cash",
            RejectReason::InsufficientHoldings => "insufficient holdings",
            RejectReason::NonPositiveAmount => "non-positive amount",
            RejectReason::NonPositivePrice => "non-positive price",
            RejectReason::LoanExceedsCapital => "loan exceeds capital",
            RejectReason::UnknownLoanType => "unknown loan type",
        }
    }
}

impl std::fmt::Display for RejectReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "reason", rename_all = "lowercase")]
pub enum Verdict {
    Accept,
    Reject(RejectReason),
}

impl Verdict {
    pub fn is_accept(self) -> bool {
        self == Verdict::Accept
    }
}

/// Checks a trade against the agent's cash and holdings. A buy must cover
/// its notional at the limit price plus the fee on its full amount, which
/// bounds what any sequence of fills can cost.
pub fn secretary_validate(decision: &ActionDecision, state: &AgentState, fees: &FeeSchedule) -> Verdict {
    let Some((stock, amount, price)) = decision.terms() else {
        return Verdict::Accept;
    };
    if amount <= 0 {
        return Verdict::Reject(RejectReason::NonPositiveAmount);
    }
    if !price.is_positive() {
        return Verdict::Reject(RejectReason::NonPositivePrice);
    }
    let qty = amount as u64;
    match decision {
        ActionDecision::Buy { .. } => {
            let cost = price.checked_times(qty).and_then(|n| {
                n.cents().checked_add(transaction_fee(fees, qty).ok()?.cents()).map(Money::from_cents)
            });
            match cost {
                Some(c) if c <= state.cash => Verdict::Accept,
                _ => Verdict::Reject(RejectReason::InsufficientCash),
            }
        }
        ActionDecision::Sell { .. } if state.holdings[stock] < qty => {
            Verdict::Reject(RejectReason::InsufficientHoldings)
        }
        _ => Verdict::Accept,
    }
}

/// Checks a loan request against the term table and borrowing capacity.
pub fn validate_loan(decision: &LoanDecision, max_new_loan: Money, num_terms: usize) -> Verdict {
    if !decision.take_loan {
        return Verdict::Accept;
    }
    if decision.term_index >= num_terms {
        return Verdict::Reject(RejectReason::UnknownLoanType);
    }
    if !decision.amount.is_positive() {
        return Verdict::Reject(RejectReason::NonPositiveAmount);
    }
    if decision.amount > max_new_loan {
        return Verdict::Reject(RejectReason::LoanExceedsCapital);
    }
    Verdict::Accept
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{PerStock, Personality, StockId};
    use proptest::prelude::*;

    fn m(s: &str) -> Money {
        s.parse().unwrap()
    }

    fn agent(cash: &str, a: u64) -> AgentState {
        let mut s = AgentState::new(0, Personality::Balanced, m(cash));
        s.holdings = PerStock::new(a, 0);
        s
    }

    fn buy(amount: i64, price: &str) -> ActionDecision {
        ActionDecision::Buy { stock: StockId::A, amount, price: m(price) }
    }

    #[test]
    fn examples() {
        let fees = FeeSchedule::default();
        assert_eq!(
            secretary_validate(&buy(100, "30.00"), &agent("2000", 0), &fees),
            Verdict::Reject(RejectReason::InsufficientCash)
        );
        let sell = ActionDecision::Sell { stock: StockId::A, amount: 50, price: m("30") };
        assert_eq!(
            secretary_validate(&sell, &agent("0", 40), &fees),
            Verdict::Reject(RejectReason::InsufficientHoldings)
        );
        assert_eq!(secretary_validate(&buy(10, "30.00"), &agent("1000", 0), &fees), Verdict::Accept);
        assert_eq!(secretary_validate(&buy(10, "30.00"), &agent("300.99", 0), &fees), Verdict::Reject(RejectReason::InsufficientCash));
        assert_eq!(secretary_validate(&buy(10, "30.00"), &agent("301.00", 0), &fees), Verdict::Accept);
        assert_eq!(secretary_validate(&buy(0, "30"), &agent("1000", 0), &fees), Verdict::Reject(RejectReason::NonPositiveAmount));
        assert_eq!(secretary_validate(&buy(1, "0"), &agent("1000", 0), &fees), Verdict::Reject(RejectReason::NonPositivePrice));
        assert_eq!(secretary_validate(&ActionDecision::No, &agent("0", 0), &fees), Verdict::Accept);
    }

    #[test]
    fn loan_checks() {
        let req = |amount: &str, term| LoanDecision { take_loan: true, term_index: term, amount: m(amount) };
        assert_eq!(validate_loan(&req("100", 0), m("100"), 3), Verdict::Accept);
        assert_eq!(validate_loan(&req("100.01", 0), m("100"), 3), Verdict::Reject(RejectReason::LoanExceedsCapital));
        assert_eq!(validate_loan(&req("1", 3), m("100"), 3), Verdict::Reject(RejectReason::UnknownLoanType));
        assert_eq!(validate_loan(&req("0", 0), m("100"), 3), Verdict::Reject(RejectReason::NonPositiveAmount));
        assert_eq!(validate_loan(&LoanDecision::none(), Money::ZERO, 3), Verdict::Accept);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn accepted_decisions_never_overdraw(
            cash in 0i64..10_000_000,
            held in 0u64..5_000,
            is_buy: bool,
            amount in -10i64..5_000,
            price in -100i64..100_000,
        ) {
            let state = agent("0", held);
            let state = AgentState { cash: Money::from_cents(cash), ..state };
            let price = Money::from_cents(price);
            let d = if is_buy {
                ActionDecision::Buy { stock: StockId::A, amount, price }
            } else {
                ActionDecision::Sell { stock: StockId::A, amount, price }
            };
            let fees = FeeSchedule::default();
            if secretary_validate(&d, &state, &fees).is_accept() {
                let q = amount as u64;
                if is_buy {
                    let after = state.cash - price.times(q) - transaction_fee(&fees, q).unwrap();
                    prop_assert!(!after.is_negative());
                } else {
                    prop_assert!(state.holdings.a >= q);
                    prop_assert!(price.is_positive());
                }
            }
        }
    }
}
