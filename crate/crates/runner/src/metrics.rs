//! Summary statistics over a run log.

use std::path::Path;

use serde::Serialize;
use stockagent_core::{AgentId, Day, Money, Personality, StockId};
use thiserror::Error;

use crate::log::RunLog;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("truncated log: {0}")]
    Truncated(String),
    #[error("cannot write {path}: {message}")]
    Write { path: String, message: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StockMetrics {
    pub stock: StockId,
    pub shares: u64,
    pub volume: Money,
    pub trades: u64,
    pub first_price: Money,
    pub last_price: Money,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AgentMetrics {
    pub agent_id: AgentId,
    pub personality: Personality,
    pub alive: bool,
    pub initial_wealth: Money,
    pub final_wealth: Money,
    pub pnl: Money,
    pub holdings_a: u64,
    pub holdings_b: u64,
    pub bought_a: u64,
    pub sold_a: u64,
    pub bought_b: u64,
    pub sold_b: u64,
    pub buy_trades_a: u32,
    pub sell_trades_a: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DailyClose {
    pub day: Day,
    pub price_a: Money,
    pub price_b: Money,
}

/// Account of where agent profit and loss went.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Conservation {
    pub agent_pnl: Money,
    pub fees: Money,
    pub interest: Money,
    /// Market-maker cash plus its shares at the final prices.
    pub market_maker_pnl: Money,
    /// Change in value of all outstanding shares from first to last price.
    pub revaluation: Money,
    pub written_off: Money,
    /// `agent_pnl + fees + interest + market_maker_pnl − revaluation −
    /// written_off`; zero for a complete log.
    pub residual: Money,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricsReport {
    pub stocks: Vec<StockMetrics>,
    pub agents: Vec<AgentMetrics>,
    pub closes: Vec<DailyClose>,
    pub conservation: Option<Conservation>,
}

pub fn compute_metrics(log: &RunLog) -> Result<MetricsReport, MetricsError> {
    let first = log.prices.first().ok_or_else(|| MetricsError::Truncated("no price rows".into()))?;
    let last = log.prices.last().expect("non-empty");
    let expected = log.summary.trade_count.0 + log.summary.trade_count.1;
    if log.manifest.get("summary").is_some() && expected != log.trades.len() as u64 {
        return Err(MetricsError::Truncated(format!(
            "manifest records {expected} trades, trades.jsonl has {}",
            log.trades.len()
        )));
    }

    let stocks = StockId::ALL
        .iter()
        .map(|&stock| {
            let trades = log.trades.iter().filter(|t| t.stock == stock);
            let price = |r: &crate::log::PriceRow| if stock == StockId::A { r.price_a } else { r.price_b };
            StockMetrics {
                stock,
                shares: trades.clone().map(|t| t.quantity).sum(),
                volume: trades.clone().map(|t| t.notional()).sum(),
                trades: trades.count() as u64,
                first_price: price(first),
                last_price: price(last),
            }
        })
        .collect();

    let mut closes: Vec<DailyClose> = Vec::new();
    for r in &log.prices {
        let close = DailyClose { day: r.day, price_a: r.price_a, price_b: r.price_b };
        match closes.last_mut() {
            Some(c) if c.day == r.day => *c = close,
            _ => closes.push(close),
        }
    }

    let final_day = log.agents.iter().map(|a| a.day).max();
    let agents: Vec<AgentMetrics> = log
        .agents
        .iter()
        .filter(|a| Some(a.day) == final_day)
        .map(|a| AgentMetrics {
            agent_id: a.agent_id,
            personality: a.personality,
            alive: a.alive,
            initial_wealth: a.initial_wealth,
            final_wealth: a.wealth,
            pnl: a.pnl,
            holdings_a: a.holdings_a,
            holdings_b: a.holdings_b,
            bought_a: a.bought_a,
            sold_a: a.sold_a,
            bought_b: a.bought_b,
            sold_b: a.sold_b,
            buy_trades_a: a.buy_trades_a,
            sell_trades_a: a.sell_trades_a,
        })
        .collect();
    if log.ledger.last().map(|l| l.day) != final_day.filter(|_| !log.ledger.is_empty()) {
        return Err(MetricsError::Truncated("ledger and agent snapshots end on different days".into()));
    }

    let conservation = log.ledger.last().map(|l| {
        let agent_pnl: Money = agents.iter().map(|a| a.pnl).sum();
        let (pa, pb) = (last.price_a, last.price_b);
        let market_maker_pnl = l.sinks.mm_cash + pa.times(l.sinks.mm_shares.a) + pb.times(l.sinks.mm_shares.b);
        let revaluation = (pa - first.price_a).times(l.shares_a) + (pb - first.price_b).times(l.shares_b);
        let residual = agent_pnl + l.sinks.fees + l.sinks.interest + market_maker_pnl - revaluation - l.sinks.written_off;
        Conservation {
            agent_pnl,
            fees: l.sinks.fees,
            interest: l.sinks.interest,
            market_maker_pnl,
            revaluation,
            written_off: l.sinks.written_off,
            residual,
        }
    });

    Ok(MetricsReport { stocks, agents, closes, conservation })
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), MetricsError> {
    let err = |e: &dyn std::fmt::Display| MetricsError::Write { path: path.display().to_string(), message: e.to_string() };
    let mut w = csv::Writer::from_path(path).map_err(|e| err(&e))?;
    for r in rows {
        w.serialize(r).map_err(|e| err(&e))?;
    }
    w.flush().map_err(|e| err(&e))
}

impl MetricsReport {
    /// Writes `stock_metrics.csv`, `agent_metrics.csv` and `daily_closes.csv`.
    pub fn write_csv(&self, dir: &Path) -> Result<(), MetricsError> {
        write_csv(&dir.join("stock_metrics.csv"), &self.stocks)?;
        write_csv(&dir.join("agent_metrics.csv"), &self.agents)?;
        write_csv(&dir.join("daily_closes.csv"), &self.closes)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str("stock  shares      volume  trades  first   last\n");
        for s in &self.stocks {
            out.push_str(&format!(
                "{:<5} {:>7} {:>11} {:>7} {:>6} {:>6}\n",
                s.stock.company(),
                s.shares,
                s.volume.to_string(),
                s.trades,
                s.first_price.to_string(),
                s.last_price.to_string()
            ));
        }
        if !self.agents.is_empty() {
            let mut pnl: Vec<Money> = self.agents.iter().map(|a| a.pnl).collect();
            pnl.sort_unstable();
            let alive = self.agents.iter().filter(|a| a.alive).count();
            out.push_str(&format!(
                "agents {} (alive {alive}), pnl min {} median {} max {}\n",
                self.agents.len(),
                pnl[0],
                pnl[pnl.len() / 2],
                pnl[pnl.len() - 1]
            ));
        }
        if let Some(c) = &self.conservation {
            out.push_str(&format!(
                "fees {} interest {} market maker {} revaluation {} written off {} residual {}\n",
                c.fees, c.interest, c.market_maker_pnl, c.revaluation, c.written_off, c.residual
            ));
        }
        out
    }
}
