use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::money::Money;
use crate::types::{AgentId, Day, PerStock, Side, StockId};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Order {
    pub order_id: u64,
    pub agent_id: AgentId,
    pub stock: StockId,
    pub side: Side,
    pub price: Money,
    pub quantity: u64,
    pub day: Day,
    pub session: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Trade {
    pub trade_id: u64,
    pub stock: StockId,
    pub buyer_id: AgentId,
    pub seller_id: AgentId,
    pub buy_order_id: u64,
    pub sell_order_id: u64,
    pub price: Money,
    pub quantity: u64,
    pub day: Day,
    pub session: u32,
    pub aggressor_side: Side,
}

impl Trade {
    pub fn notional(&self) -> Money {
        self.price.times(self.quantity)
    }
}

/// Aggregated `(price, quantity)` levels, best first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BookSummary {
    pub bids: Vec<(Money, u64)>,
    pub asks: Vec<(Money, u64)>,
}

impl BookSummary {
    pub fn is_empty(&self) -> bool {
        self.bids.is_empty() && self.asks.is_empty()
    }
}

#[derive(Clone, Debug, Default)]
struct Ladder {
    bids: BTreeMap<Money, VecDeque<Order>>,
    asks: BTreeMap<Money, VecDeque<Order>>,
}

/// Per-stock price-level book with FIFO queues at each level.
#[derive(Clone, Debug, Default)]
pub struct OrderBook {
    ladders: PerStock<Ladder>,
    strict_coincide: bool,
}

impl OrderBook {
    /// `strict_coincide` trades only when bid and ask prices are equal
    /// instead of whenever they cross.
    pub fn new(strict_coincide: bool) -> Self {
        OrderBook { ladders: PerStock::default(), strict_coincide }
    }

    pub fn best_bid(&self, stock: StockId) -> Option<Money> {
        self.ladders[stock].bids.keys().next_back().copied()
    }

    pub fn best_ask(&self, stock: StockId) -> Option<Money> {
        self.ladders[stock].asks.keys().next().copied()
    }

    pub fn is_empty(&self) -> bool {
        StockId::ALL
            .iter()
            .all(|&s| self.ladders[s].bids.is_empty() && self.ladders[s].asks.is_empty())
    }

    pub fn resting_orders(&self) -> impl Iterator<Item = &Order> {
        StockId::ALL.into_iter().flat_map(move |s| {
            let l = &self.ladders[s];
            l.bids.values().chain(l.asks.values()).flatten()
        })
    }

    pub fn summary(&self, stock: StockId) -> BookSummary {
        let l = &self.ladders[stock];
        let level = |(p, q): (&Money, &VecDeque<Order>)| (*p, q.iter().map(|o| o.quantity).sum());
        BookSummary {
            bids: l.bids.iter().rev().map(level).collect(),
            asks: l.asks.iter().map(level).collect(),
        }
    }

    /// True when some bid and ask from different agents cross.
    pub fn is_crossed(&self, stock: StockId) -> bool {
        let l = &self.ladders[stock];
        l.bids.iter().rev().any(|(bp, bq)| {
            l.asks
                .range(..=*bp)
                .any(|(_, aq)| aq.iter().any(|a| bq.iter().any(|b| b.agent_id != a.agent_id)))
        })
    }

    fn crosses(&self, incoming: &Order, resting_price: Money) -> bool {
        if self.strict_coincide {
            return resting_price == incoming.price;
        }
        match incoming.side {
            Side::Buy => resting_price <= incoming.price,
            Side::Sell => resting_price >= incoming.price,
        }
    }

    /// Matches `order` against the opposite side and rests any residual.
    ///
    /// Fills execute at the resting order's price, best price first, then
    /// FIFO within a level. Resting orders of the same agent are skipped.
    /// Trade ids are drawn from `next_trade_id`.
    pub fn submit_order(&mut self, mut order: Order, next_trade_id: &mut u64) -> Vec<Trade> {
        debug_assert!(order.quantity > 0 && order.price.is_positive());
        let mut trades = Vec::new();
        let prices: Vec<Money> = {
            let l = &self.ladders[order.stock];
            match order.side {
                Side::Buy => l.asks.keys().copied().collect(),
                Side::Sell => l.bids.keys().rev().copied().collect(),
            }
        };
        for level_price in prices {
            if order.quantity == 0 {
                break;
            }
            if !self.crosses(&order, level_price) {
                if self.strict_coincide {
                    continue;
                }
                break;
            }
            let ladder = &mut self.ladders[order.stock];
            let side_map = match order.side {
                Side::Buy => &mut ladder.asks,
                Side::Sell => &mut ladder.bids,
            };
            let queue = side_map.get_mut(&level_price).expect("level exists");
            let mut i = 0;
            while i < queue.len() && order.quantity > 0 {
                if queue[i].agent_id == order.agent_id {
                    i += 1;
                    continue;
                }
                let resting = &mut queue[i];
                let qty = resting.quantity.min(order.quantity);
                let (buy, sell) = match order.side {
                    Side::Buy => (&order, &*resting),
                    Side::Sell => (&*resting, &order),
                };
                trades.push(Trade {
                    trade_id: *next_trade_id,
                    stock: order.stock,
                    buyer_id: buy.agent_id,
                    seller_id: sell.agent_id,
                    buy_order_id: buy.order_id,
                    sell_order_id: sell.order_id,
                    price: level_price,
                    quantity: qty,
                    day: order.day,
                    session: order.session,
                    aggressor_side: order.side,
                });
                *next_trade_id += 1;
                resting.quantity -= qty;
                order.quantity -= qty;
                if resting.quantity == 0 {
                    queue.remove(i);
                }
            }
            if queue.is_empty() {
                side_map.remove(&level_price);
            }
        }
        if order.quantity > 0 {
            let ladder = &mut self.ladders[order.stock];
            let side_map = match order.side {
                Side::Buy => &mut ladder.bids,
                Side::Sell => &mut ladder.asks,
            };
            side_map.entry(order.price).or_default().push_back(order);
        }
        trades
    }

    /// Cancels every resting order, returning them.
    pub fn clear(&mut self) -> Vec<Order> {
        let out: Vec<Order> = self.resting_orders().cloned().collect();
        self.ladders = PerStock::default();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(s: &str) -> Money {
        s.parse().unwrap()
    }

    fn order(id: u64, agent: AgentId, side: Side, price: &str, qty: u64) -> Order {
        Order { order_id: id, agent_id: agent, stock: StockId::A, side, price: m(price), quantity: qty, day: 1, session: 1 }
    }

    #[test]
    fn crossing_buy_fills_at_resting_price() {
        let mut book = OrderBook::new(false);
        let mut tid = 0;
        assert!(book.submit_order(order(1, 1, Side::Sell, "29.00", 100), &mut tid).is_empty());
        let t = book.submit_order(order(2, 2, Side::Buy, "30.00", 100), &mut tid);
        assert_eq!(t.len(), 1);
        assert_eq!((t[0].price, t[0].quantity, t[0].buyer_id, t[0].seller_id), (m("29.00"), 100, 2, 1));
        assert_eq!(t[0].aggressor_side, Side::Buy);
        assert!(book.is_empty());
    }

    #[test]
    fn uncrossed_orders_rest() {
        let mut book = OrderBook::new(false);
        let mut tid = 0;
        book.submit_order(order(1, 1, Side::Buy, "30.00", 10), &mut tid);
        assert!(book.submit_order(order(2, 2, Side::Sell, "31.00", 10), &mut tid).is_empty());
        assert_eq!(book.best_bid(StockId::A), Some(m("30.00")));
        assert_eq!(book.best_ask(StockId::A), Some(m("31.00")));
    }

    #[test]
    fn walks_levels_and_rests_residual() {
        let mut book = OrderBook::new(false);
        let mut tid = 0;
        book.submit_order(order(1, 1, Side::Sell, "29.00", 50), &mut tid);
        book.submit_order(order(2, 2, Side::Sell, "29.50", 50), &mut tid);
        let t = book.submit_order(order(3, 3, Side::Buy, "29.50", 80), &mut tid);
        let fills: Vec<_> = t.iter().map(|t| (t.price, t.quantity)).collect();
        assert_eq!(fills, vec![(m("29.00"), 50), (m("29.50"), 30)]);
        assert_eq!(book.summary(StockId::A).asks, vec![(m("29.50"), 20)]);
        assert!(book.summary(StockId::A).bids.is_empty());
    }

    #[test]
    fn fifo_within_level() {
        let mut book = OrderBook::new(false);
        let mut tid = 0;
        book.submit_order(order(1, 1, Side::Buy, "30.00", 10), &mut tid);
        book.submit_order(order(2, 2, Side::Buy, "30.00", 10), &mut tid);
        let t = book.submit_order(order(3, 3, Side::Sell, "29.00", 15), &mut tid);
        assert_eq!(t[0].buyer_id, 1);
        assert_eq!((t[1].buyer_id, t[1].quantity), (2, 5));
        assert_eq!(t[0].price, m("30.00"));
    }

    #[test]
    fn self_match_skipped() {
        let mut book = OrderBook::new(false);
        let mut tid = 0;
        book.submit_order(order(1, 7, Side::Sell, "29.00", 10), &mut tid);
        book.submit_order(order(2, 8, Side::Sell, "29.00", 10), &mut tid);
        let t = book.submit_order(order(3, 7, Side::Buy, "30.00", 10), &mut tid);
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].seller_id, 8);
        assert_eq!(book.summary(StockId::A).asks, vec![(m("29.00"), 10)]);
        assert!(!book.is_crossed(StockId::A));
    }

    #[test]
    fn strict_mode_requires_equal_prices() {
        let mut book = OrderBook::new(true);
        let mut tid = 0;
        book.submit_order(order(1, 1, Side::Sell, "29.00", 10), &mut tid);
        assert!(book.submit_order(order(2, 2, Side::Buy, "30.00", 10), &mut tid).is_empty());
        let t = book.submit_order(order(3, 3, Side::Buy, "29.00", 10), &mut tid);
        assert_eq!(t.len(), 1);
    }

    #[test]
    fn clear_returns_resting() {
        let mut book = OrderBook::new(false);
        let mut tid = 0;
        book.submit_order(order(1, 1, Side::Sell, "29.00", 10), &mut tid);
        book.submit_order(order(2, 2, Side::Buy, "20.00", 10), &mut tid);
        assert_eq!(book.clear().len(), 2);
        assert!(book.is_empty());
    }
}
