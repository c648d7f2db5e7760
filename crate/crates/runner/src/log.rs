//! Run log records and the on-disk layout.
//!
//! Every record carries `day` and `session`. Session 0 marks pre- and
//! post-trading records; trading sessions count from 1. Day 0 holds the
//! initial state.

use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use stockagent_core::agents::{ActionDecision, LoanDecision, NextDayEstimate, TraceStep};
use stockagent_core::calendar::LiquidationFill;
use stockagent_core::exchange::{Sinks, Trade};
use stockagent_core::{AgentId, Day, Money, Personality, Rate, Side, StockId};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderRecord {
    pub day: Day,
    pub session: u32,
    pub order_id: u64,
    pub agent_id: AgentId,
    pub stock: StockId,
    pub side: Side,
    pub price: Money,
    pub quantity: u64,
    /// Shares filled before the session closed; the rest was cancelled.
    pub filled: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PriceRow {
    pub day: Day,
    pub session: u32,
    pub price_a: Money,
    pub price_b: Money,
    pub shares_a: u64,
    pub shares_b: u64,
    pub trades_a: u64,
    pub trades_b: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentSnapshot {
    pub day: Day,
    pub session: u32,
    pub agent_id: AgentId,
    pub personality: Personality,
    pub alive: bool,
    pub cash: Money,
    pub holdings_a: u64,
    pub holdings_b: u64,
    pub debt: Money,
    /// Cash plus stock at the day's closing prices minus debt.
    pub wealth: Money,
    pub initial_wealth: Money,
    pub pnl: Money,
    pub bought_a: u64,
    pub sold_a: u64,
    pub bought_b: u64,
    pub sold_b: u64,
    pub buy_trades_a: u32,
    pub sell_trades_a: u32,
    pub buy_trades_b: u32,
    pub sell_trades_b: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BbsRecord {
    pub day: Day,
    pub session: u32,
    pub post_id: u64,
    pub text: String,
}

/// A loan issued, including the liabilities agents start with on day 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoanRecord {
    pub day: Day,
    pub session: u32,
    pub loan_id: u64,
    pub agent_id: AgentId,
    pub principal: Money,
    pub term_months: u32,
    pub annual_rate: Rate,
    pub maturity_day: Day,
    pub initial: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CreditKind {
    Interest,
    Repayment,
    WriteOff,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CreditRecord {
    pub day: Day,
    pub session: u32,
    pub agent_id: AgentId,
    pub kind: CreditKind,
    pub amount: Money,
    /// The loan for repayments and write-offs; interest is summed per agent.
    pub loan_id: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub day: Day,
    pub session: u32,
    pub kind: String,
    pub outcome: String,
    /// New loan-rate table for rate events.
    pub rates: Option<Vec<Rate>>,
    pub stock: Option<StockId>,
    pub surprise_pct: Option<f64>,
    /// Text shown to agents, if any.
    pub news: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BankruptcyRecord {
    pub day: Day,
    pub session: u32,
    pub agent_id: AgentId,
    pub cash_before: Money,
    pub cash_after: Money,
    pub fills: Vec<LiquidationFill>,
    pub written_off: Money,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub day: Day,
    pub session: u32,
    pub agent_id: AgentId,
    #[serde(flatten)]
    pub estimate: NextDayEstimate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceRecord {
    pub day: Day,
    pub session: u32,
    pub permutation: Vec<AgentId>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phase {
    InterestPayment,
    LoanRepayment,
    BankruptcyCheck,
    SpecialEvents,
    ReportRelease,
    LoanDecision,
    TradingSession,
    NextDayEstimate,
    BbsSharing,
}

impl Phase {
    /// Order of one day's phases, trading sessions collapsed into one.
    pub const ORDER: [Phase; 9] = [
        Phase::InterestPayment,
        Phase::LoanRepayment,
        Phase::BankruptcyCheck,
        Phase::SpecialEvents,
        Phase::ReportRelease,
        Phase::LoanDecision,
        Phase::TradingSession,
        Phase::NextDayEstimate,
        Phase::BbsSharing,
    ];
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseRecord {
    pub day: Day,
    pub session: u32,
    pub phase: Phase,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "decision", rename_all = "kebab-case")]
pub enum DecisionValue {
    Trade(ActionDecision),
    Loan(LoanDecision),
    Estimate(NextDayEstimate),
    Post { text: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionRecord {
    pub day: Day,
    pub session: u32,
    pub agent_id: AgentId,
    pub value: DecisionValue,
    /// `accept`, or the reason the runner's own check refused it.
    pub verdict: String,
    pub attempts: u32,
    pub degraded: bool,
    pub trail: Vec<TraceStep>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerRecord {
    pub day: Day,
    pub session: u32,
    #[serde(flatten)]
    pub sinks: Sinks,
    pub agent_cash: Money,
    pub cash_identity: Money,
    pub shares_a: u64,
    pub shares_b: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub final_prices: (Money, Money),
    pub shares_traded: (u64, u64),
    pub volume: (Money, Money),
    pub trade_count: (u64, u64),
    pub bankruptcies: usize,
    pub loans_issued: usize,
    pub posts: usize,
    pub degraded_decisions: usize,
}

/// Everything a run produced, in memory.
#[derive(Clone, Debug, Default)]
pub struct RunLog {
    pub manifest: serde_json::Value,
    pub orders: Vec<OrderRecord>,
    pub trades: Vec<Trade>,
    pub prices: Vec<PriceRow>,
    pub agents: Vec<AgentSnapshot>,
    pub bbs: Vec<BbsRecord>,
    pub loans: Vec<LoanRecord>,
    pub credit: Vec<CreditRecord>,
    pub events: Vec<EventRecord>,
    pub bankruptcies: Vec<BankruptcyRecord>,
    pub estimates: Vec<EstimateRecord>,
    pub sequences: Vec<SequenceRecord>,
    pub phases: Vec<PhaseRecord>,
    pub decisions: Vec<DecisionRecord>,
    pub ledger: Vec<LedgerRecord>,
    pub summary: RunSummary,
}

pub fn jsonl<T: Serialize>(records: &[T]) -> Vec<u8> {
    let mut out = Vec::new();
    for r in records {
        serde_json::to_writer(&mut out, r).expect("record serializes");
        out.push(b'\n');
    }
    out
}

pub fn prices_csv(rows: &[PriceRow]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("row serializes");
    }
    w.into_inner().expect("in-memory writer")
}

/// File names in the order they are written.
pub const FILES: [&str; 15] = [
    "manifest.json",
    "orders.jsonl",
    "trades.jsonl",
    "prices.csv",
    "agents.jsonl",
    "bbs.jsonl",
    "loans.jsonl",
    "credit.jsonl",
    "events.jsonl",
    "bankruptcies.jsonl",
    "estimates.jsonl",
    "sequences.jsonl",
    "phases.jsonl",
    "decisions.jsonl",
    "ledger.jsonl",
];

impl RunLog {
    /// Serialized contents of every file, in [`FILES`] order.
    pub fn files(&self) -> Vec<(&'static str, Vec<u8>)> {
        let mut manifest = serde_json::to_vec_pretty(&self.manifest).expect("manifest serializes");
        manifest.push(b'\n');
        let bodies = vec![
            manifest,
            jsonl(&self.orders),
            jsonl(&self.trades),
            prices_csv(&self.prices),
            jsonl(&self.agents),
            jsonl(&self.bbs),
            jsonl(&self.loans),
            jsonl(&self.credit),
            jsonl(&self.events),
            jsonl(&self.bankruptcies),
            jsonl(&self.estimates),
            jsonl(&self.sequences),
            jsonl(&self.phases),
            jsonl(&self.decisions),
            jsonl(&self.ledger),
        ];
        FILES.into_iter().zip(bodies).collect()
    }

    pub fn write_dir(&self, dir: &Path) -> io::Result<()> {
        fs::create_dir_all(dir)?;
        for (name, body) in self.files() {
            fs::write(dir.join(name), body)?;
        }
        Ok(())
    }
}

pub fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| format!("{} line {}: {e}", path.display(), i + 1)))
        .collect()
}

pub fn read_prices(path: &Path) -> Result<Vec<PriceRow>, String> {
    let mut r = csv::Reader::from_path(path).map_err(|e| format!("{}: {e}", path.display()))?;
    r.deserialize().collect::<Result<_, _>>().map_err(|e| format!("{}: {e}", path.display()))
}

impl RunLog {
    /// Loads a log directory written by [`RunLog::write_dir`]. Streams the
    /// metrics do not need may be absent.
    pub fn read_dir(dir: &Path) -> Result<RunLog, String> {
        let manifest_path = dir.join("manifest.json");
        let manifest: serde_json::Value = serde_json::from_str(
            &fs::read_to_string(&manifest_path).map_err(|e| format!("{}: {e}", manifest_path.display()))?,
        )
        .map_err(|e| format!("{}: {e}", manifest_path.display()))?;
        let required = |name: &str| -> Result<std::path::PathBuf, String> {
            let p = dir.join(name);
            if p.exists() {
                Ok(p)
            } else {
                Err(format!("{} is missing", p.display()))
            }
        };
        fn optional<T: for<'de> Deserialize<'de>>(dir: &Path, name: &str) -> Result<Vec<T>, String> {
            let p = dir.join(name);
            if p.exists() {
                read_jsonl(&p)
            } else {
                Ok(Vec::new())
            }
        }
        let summary = serde_json::from_value(manifest["summary"].clone()).unwrap_or_default();
        Ok(RunLog {
            orders: read_jsonl(&required("orders.jsonl")?)?,
            trades: read_jsonl(&required("trades.jsonl")?)?,
            prices: read_prices(&required("prices.csv")?)?,
            agents: read_jsonl(&required("agents.jsonl")?)?,
            bbs: read_jsonl(&required("bbs.jsonl")?)?,
            loans: read_jsonl(&required("loans.jsonl")?)?,
            events: read_jsonl(&required("events.jsonl")?)?,
            credit: optional(dir, "credit.jsonl")?,
            bankruptcies: optional(dir, "bankruptcies.jsonl")?,
            estimates: optional(dir, "estimates.jsonl")?,
            sequences: optional(dir, "sequences.jsonl")?,
            phases: optional(dir, "phases.jsonl")?,
            decisions: optional(dir, "decisions.jsonl")?,
            ledger: optional(dir, "ledger.jsonl")?,
            manifest,
            summary,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prices_csv_header_and_money_format() {
        let row = PriceRow {
            day: 1,
            session: 2,
            price_a: "30.10".parse().unwrap(),
            price_b: "40".parse().unwrap(),
            shares_a: 5,
            shares_b: 0,
            trades_a: 1,
            trades_b: 0,
        };
        let text = String::from_utf8(prices_csv(std::slice::from_ref(&row))).unwrap();
        assert_eq!(text, "day,session,price_a,price_b,shares_a,shares_b,trades_a,trades_b\n1,2,30.1,40.0,5,0,1,0\n");
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("p.csv"), text).unwrap();
        assert_eq!(read_prices(&dir.path().join("p.csv")).unwrap(), vec![row]);
    }

    #[test]
    fn jsonl_one_record_per_line() {
        let recs = vec![PhaseRecord { day: 1, session: 0, phase: Phase::InterestPayment }; 2];
        let text = String::from_utf8(jsonl(&recs)).unwrap();
        assert_eq!(text, "{\"day\":1,\"session\":0,\"phase\":\"interest-payment\"}\n".repeat(2));
    }

    #[test]
    fn bad_line_reports_its_number() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.jsonl");
        std::fs::write(&p, "{\"day\":1,\"session\":0,\"phase\":\"interest-payment\"}\nnot json\n").unwrap();
        let err = read_jsonl::<PhaseRecord>(&p).unwrap_err();
        assert!(err.contains("line 2"), "{err}");
    }
}
