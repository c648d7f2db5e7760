use serde::{Deserialize, Serialize};

use super::{ExchangeError, Trade};
use crate::agent::AgentState;
use crate::calendar::{incremental_fee, FeeSchedule};
use crate::money::Money;
use crate::types::{PerStock, StockId};

/// Accounts outside the agent economy. Fees and interest leave agents into
/// their sinks; the market maker buys liquidated shares; loan principal
/// enters on issuance and leaves on repayment.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sinks {
    pub fees: Money,
    pub interest: Money,
    pub mm_cash: Money,
    pub mm_shares: PerStock<u64>,
    pub loans_issued: Money,
    pub loans_repaid: Money,
    pub written_off: Money,
}

impl Sinks {
    /// `Σ cash + fees + interest + mm_cash − (issued − repaid)`. Constant
    /// over a run.
    pub fn cash_identity<'a>(&self, agents: impl IntoIterator<Item = &'a AgentState>) -> Money {
        let cash: Money = agents.into_iter().map(|a| a.cash).sum();
        cash + self.fees + self.interest + self.mm_cash - self.loans_issued + self.loans_repaid
    }

    /// Shares held by agents plus the market maker.
    pub fn share_total<'a>(&self, agents: impl IntoIterator<Item = &'a AgentState> + Clone, stock: StockId) -> u64 {
        agents.into_iter().map(|a| a.holdings[stock]).sum::<u64>() + self.mm_shares[stock]
    }
}

/// Moves cash and shares for one fill and returns the buyer's fee.
///
/// `buyer_filled_before` is how many shares the buyer's order had already
/// filled this session, so that all fills of one order together pay the fee
/// for their total. Fails without mutating anything when the buyer cannot
/// pay or the seller lacks the shares; that only happens if an unvalidated
/// order reached the book.
pub fn settle_trade(
    trade: &Trade,
    buyer: &mut AgentState,
    seller: &mut AgentState,
    fees: &FeeSchedule,
    buyer_filled_before: u64,
) -> Result<Money, ExchangeError> {
    if buyer.agent_id == seller.agent_id || trade.quantity == 0 {
        return Err(ExchangeError::InvalidTrade(trade.trade_id));
    }
    let notional = trade.notional();
    let fee = incremental_fee(fees, buyer_filled_before, trade.quantity);
    if buyer.cash < notional + fee {
        return Err(ExchangeError::ReservationViolation {
            agent_id: buyer.agent_id,
            detail: format!("needs {} has {}", notional + fee, buyer.cash),
        });
    }
    if seller.holdings[trade.stock] < trade.quantity {
        return Err(ExchangeError::ReservationViolation {
            agent_id: seller.agent_id,
            detail: format!("sells {} {} holds {}", trade.quantity, trade.stock, seller.holdings[trade.stock]),
        });
    }
    buyer.cash -= notional + fee;
    buyer.holdings[trade.stock] += trade.quantity;
    buyer.bought[trade.stock] += trade.quantity;
    buyer.buy_trades[trade.stock] += 1;
    seller.cash += notional;
    seller.holdings[trade.stock] -= trade.quantity;
    seller.sold[trade.stock] += trade.quantity;
    seller.sell_trades[trade.stock] += 1;
    Ok(fee)
}

/// New prices after a session: each stock's last trade price, else the
/// previous price.
pub fn close_session(trades: &[Trade], prev: &PerStock<Money>) -> PerStock<Money> {
    PerStock::from_fn(|s| {
        trades
            .iter()
            .rev()
            .find(|t| t.stock == s)
            .map_or(prev[s], |t| t.price)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{Personality, Side};

    fn m(s: &str) -> Money {
        s.parse().unwrap()
    }

    fn trade(stock: StockId, price: &str, qty: u64) -> Trade {
        Trade {
            trade_id: 0,
            stock,
            buyer_id: 1,
            seller_id: 2,
            buy_order_id: 0,
            sell_order_id: 1,
            price: m(price),
            quantity: qty,
            day: 1,
            session: 1,
            aggressor_side: Side::Buy,
        }
    }

    fn pair(cash: &str, shares: u64) -> (AgentState, AgentState) {
        let buyer = AgentState::new(1, Personality::Balanced, m(cash));
        let mut seller = AgentState::new(2, Personality::Balanced, Money::ZERO);
        seller.holdings = PerStock::new(shares, shares);
        (buyer, seller)
    }

    #[test]
    fn hundred_at_thirty() {
        let (mut b, mut s) = pair("10000", 100);
        let fee = settle_trade(&trade(StockId::A, "30.00", 100), &mut b, &mut s, &FeeSchedule::default(), 0).unwrap();
        assert_eq!(fee, m("1.00"));
        assert_eq!(b.cash, m("10000") - m("3001.00"));
        assert_eq!(s.cash, m("3000.00"));
        assert_eq!((b.holdings.a, s.holdings.a), (100, 0));
    }

    #[test]
    fn five_hundred_at_ten() {
        let (mut b, mut s) = pair("10000", 500);
        let fee = settle_trade(&trade(StockId::B, "10.00", 500), &mut b, &mut s, &FeeSchedule::default(), 0).unwrap();
        assert_eq!(fee, m("2.50"));
    }

    #[test]
    fn split_fills_pay_one_fee() {
        let (mut b, mut s) = pair("100000", 2000);
        let fees = FeeSchedule::default();
        let f1 = settle_trade(&trade(StockId::A, "10.00", 100), &mut b, &mut s, &fees, 0).unwrap();
        let f2 = settle_trade(&trade(StockId::A, "10.00", 400), &mut b, &mut s, &fees, 100).unwrap();
        assert_eq!(f1 + f2, m("2.50"));
    }

    #[test]
    fn violation_leaves_state_untouched() {
        let (mut b, mut s) = pair("100", 100);
        let before = (b.clone(), s.clone());
        assert!(settle_trade(&trade(StockId::A, "30.00", 100), &mut b, &mut s, &FeeSchedule::default(), 0).is_err());
        assert_eq!((b, s), before);
    }

    #[test]
    fn close_takes_last_trade_per_stock() {
        let prev = PerStock::new(m("31.00"), m("40.00"));
        let only_a = [trade(StockId::A, "30.00", 1), trade(StockId::A, "29.50", 1)];
        assert_eq!(close_session(&only_a, &prev), PerStock::new(m("29.50"), m("40.00")));
        let mixed = [
            trade(StockId::A, "30.00", 1),
            trade(StockId::B, "41.00", 1),
            trade(StockId::A, "30.50", 1),
            trade(StockId::B, "39.00", 1),
        ];
        assert_eq!(close_session(&mixed, &prev), PerStock::new(m("30.50"), m("39.00")));
        assert_eq!(close_session(&[], &prev), prev);
    }
}
