//! Order book, matching, settlement and session lifecycle.
//!
//! Books are session-scoped: every order rests at most until the session
//! closes, when the book is emptied and each stock's price becomes its last
//! trade price.

mod book;
mod sequence;
mod settle;

use std::collections::BTreeMap;

use thiserror::Error;

pub use book::{BookSummary, Order, OrderBook, Trade};
pub use sequence::{generate_sequence, SessionSequence};
pub use settle::{close_session, settle_trade, Sinks};

use crate::agent::AgentState;
use crate::calendar::FeeSchedule;
use crate::money::Money;
use crate::types::{AgentId, PerStock, SessionId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExchangeError {
    #[error("cannot sequence an empty agent list")]
    EmptySequence,
    #[error("reservation violated by agent {agent_id}: {detail}")]
    ReservationViolation { agent_id: AgentId, detail: String },
    #[error("invalid trade {0}")]
    InvalidTrade(u64),
    #[error("unknown agent {0}")]
    UnknownAgent(AgentId),
}

/// Outcome of closing a session.
#[derive(Clone, Debug)]
pub struct SessionClose {
    pub prices: PerStock<Money>,
    pub cancelled: Vec<Order>,
    pub trades: Vec<Trade>,
}

/// One trading session: its book, trades, and per-order fill counts.
///
/// Agents are addressed by id, which must equal their index in the slice
/// passed to [`Session::submit`].
#[derive(Debug)]
pub struct Session {
    pub id: SessionId,
    book: OrderBook,
    trades: Vec<Trade>,
    filled: BTreeMap<u64, u64>,
}

impl Session {
    pub fn open(id: SessionId, strict_coincide: bool) -> Self {
        Session { id, book: OrderBook::new(strict_coincide), trades: Vec::new(), filled: BTreeMap::new() }
    }

    pub fn book(&self) -> &OrderBook {
        &self.book
    }

    pub fn trades(&self) -> &[Trade] {
        &self.trades
    }

    pub fn summary(&self) -> PerStock<BookSummary> {
        PerStock::from_fn(|s| self.book.summary(s))
    }

    /// Matches `order` and settles each fill against the agent ledgers.
    /// Fees go to `sinks.fees`.
    pub fn submit(
        &mut self,
        order: Order,
        agents: &mut [AgentState],
        fees: &FeeSchedule,
        sinks: &mut Sinks,
        next_trade_id: &mut u64,
    ) -> Result<Vec<Trade>, ExchangeError> {
        if agents.get(order.agent_id as usize).map(|a| a.agent_id) != Some(order.agent_id) {
            return Err(ExchangeError::UnknownAgent(order.agent_id));
        }
        let trades = self.book.submit_order(order, next_trade_id);
        for t in &trades {
            let (b, s) = (t.buyer_id as usize, t.seller_id as usize);
            if agents.get(b).map(|a| a.agent_id) != Some(t.buyer_id) {
                return Err(ExchangeError::UnknownAgent(t.buyer_id));
            }
            if agents.get(s).map(|a| a.agent_id) != Some(t.seller_id) {
                return Err(ExchangeError::UnknownAgent(t.seller_id));
            }
            let (buyer, seller) = pair_mut(agents, b, s).ok_or(ExchangeError::InvalidTrade(t.trade_id))?;
            let before = self.filled.get(&t.buy_order_id).copied().unwrap_or(0);
            let fee = settle_trade(t, buyer, seller, fees, before)?;
            *self.filled.entry(t.buy_order_id).or_default() += t.quantity;
            *self.filled.entry(t.sell_order_id).or_default() += t.quantity;
            sinks.fees += fee;
        }
        self.trades.extend(trades.iter().cloned());
        Ok(trades)
    }

    /// Cancels resting orders and computes the closing prices.
    pub fn close(mut self, prev: &PerStock<Money>) -> SessionClose {
        let cancelled = self.book.clear();
        SessionClose { prices: close_session(&self.trades, prev), cancelled, trades: self.trades }
    }
}

fn pair_mut<T>(v: &mut [T], i: usize, j: usize) -> Option<(&mut T, &mut T)> {
    if i == j {
        return None;
    }
    if i < j {
        let (l, r) = v.split_at_mut(j);
        Some((&mut l[i], &mut r[0]))
    } else {
        let (l, r) = v.split_at_mut(i);
        Some((&mut r[0], &mut l[j]))
    }
}

/// Spending cap of a buy order: notional at the limit plus its full fee.
pub fn buy_commitment(fees: &FeeSchedule, price: Money, quantity: u64) -> Money {
    price.times(quantity) + crate::calendar::incremental_fee(fees, 0, quantity)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{Personality, Side, StockId};

    fn m(s: &str) -> Money {
        s.parse().unwrap()
    }

    #[test]
    fn session_settles_and_closes() {
        let mut agents: Vec<AgentState> =
            (0..3).map(|i| AgentState::new(i, Personality::Balanced, m("10000"))).collect();
        agents[0].holdings = PerStock::new(100, 0);
        let fees = FeeSchedule::default();
        let mut sinks = Sinks::default();
        let start = sinks.cash_identity(&agents);
        let mut tid = 0;
        let mut s = Session::open(SessionId { day: 1, session: 1 }, false);
        let sell = Order { order_id: 0, agent_id: 0, stock: StockId::A, side: Side::Sell, price: m("29.00"), quantity: 100, day: 1, session: 1 };
        let buy = Order { order_id: 1, agent_id: 1, stock: StockId::A, side: Side::Buy, price: m("30.00"), quantity: 60, day: 1, session: 1 };
        let buy2 = Order { order_id: 2, agent_id: 2, stock: StockId::A, side: Side::Buy, price: m("28.00"), quantity: 10, day: 1, session: 1 };
        s.submit(sell, &mut agents, &fees, &mut sinks, &mut tid).unwrap();
        assert_eq!(s.submit(buy, &mut agents, &fees, &mut sinks, &mut tid).unwrap().len(), 1);
        assert!(s.submit(buy2, &mut agents, &fees, &mut sinks, &mut tid).unwrap().is_empty());
        assert_eq!(sinks.fees, m("1.00"));
        assert_eq!(sinks.cash_identity(&agents), start);
        let close = s.close(&PerStock::new(m("31.00"), m("40.00")));
        assert_eq!(close.prices, PerStock::new(m("29.00"), m("40.00")));
        assert_eq!(close.cancelled.len(), 2);
        assert_eq!(sinks.share_total(&agents, StockId::A), 100);
    }

    #[test]
    fn unknown_agent_rejected() {
        let mut agents = vec![AgentState::new(0, Personality::Balanced, m("10"))];
        let order = Order { order_id: 0, agent_id: 9, stock: StockId::A, side: Side::Buy, price: m("1"), quantity: 1, day: 1, session: 1 };
        let mut s = Session::open(SessionId { day: 1, session: 1 }, false);
        let err = s.submit(order, &mut agents, &FeeSchedule::default(), &mut Sinks::default(), &mut 0);
        assert_eq!(err.unwrap_err(), ExchangeError::UnknownAgent(9));
    }
}
