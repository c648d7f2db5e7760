//! Brute-force matcher used as an oracle for the order book.
//!
//! Keeps every resting order in one flat list in arrival order. For each
//! incoming order it repeatedly scans for the best-priced crossing order of
//! another agent (earliest on ties), fills against it at its price, and
//! rests whatever is left.

use stockagent_core::exchange::{Order, Trade};
use stockagent_core::Side;

#[derive(Default)]
pub struct ReferenceBook {
    resting: Vec<Order>,
}

impl ReferenceBook {
    pub fn submit(&mut self, mut order: Order, next_trade_id: &mut u64) -> Vec<Trade> {
        let mut trades = Vec::new();
        while order.quantity > 0 {
            let mut best: Option<usize> = None;
            for (i, r) in self.resting.iter().enumerate() {
                if r.stock != order.stock || r.side == order.side || r.agent_id == order.agent_id {
                    continue;
                }
                let crosses = match order.side {
                    Side::Buy => r.price <= order.price,
                    Side::Sell => r.price >= order.price,
                };
                if !crosses {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some(b) => {
                        let cur = &self.resting[b];
                        match order.side {
                            Side::Buy => r.price < cur.price,
                            Side::Sell => r.price > cur.price,
                        }
                    }
                };
                if better {
                    best = Some(i);
                }
            }
            let Some(i) = best else { break };
            let r = &mut self.resting[i];
            let qty = r.quantity.min(order.quantity);
            let (buy, sell) = if order.side == Side::Buy { (&order, &*r) } else { (&*r, &order) };
            trades.push(Trade {
                trade_id: *next_trade_id,
                stock: order.stock,
                buyer_id: buy.agent_id,
                seller_id: sell.agent_id,
                buy_order_id: buy.order_id,
                sell_order_id: sell.order_id,
                price: r.price,
                quantity: qty,
                day: order.day,
                session: order.session,
                aggressor_side: order.side,
            });
            *next_trade_id += 1;
            r.quantity -= qty;
            order.quantity -= qty;
            if r.quantity == 0 {
                self.resting.remove(i);
            }
        }
        if order.quantity > 0 {
            self.resting.push(order);
        }
        trades
    }
}

/// Trades with ids dropped and sorted, for multiset comparison.
pub fn canonical(trades: &[Trade]) -> Vec<String> {
    let mut v: Vec<String> = trades
        .iter()
        .map(|t| {
            format!(
                "{} {}<-{} {}/{} {}x{} {:?}",
                t.stock, t.buyer_id, t.seller_id, t.buy_order_id, t.sell_order_id, t.quantity, t.price, t.aggressor_side
            )
        })
        .collect();
    v.sort();
    v
}
