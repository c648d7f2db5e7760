//! The day loop.
//!
//! Each day runs interest payment, loan repayment, the bankruptcy check,
//! scheduled events, report release, loan decisions, the trading sessions,
//! next-day estimates and forum posts, in that order. Pre- and post-trading
//! phases are recorded at session 0.

use std::collections::BTreeMap;

use serde_json::json;
use stockagent_core::agents::{
    secretary_validate, validate_loan, ActionDecision, AgentPolicy, BbsStore, DecisionContext, OwnFill, Traced,
    Verdict,
};
use stockagent_core::calendar::{
    apply_event, bankruptcy_check, interest_due, repay_matured, Calendar, CalendarError, EventKind, EventOutcome,
    LoanContract, LoanTerm, MarketEvent, MarketState, ReportLibrary,
};
use stockagent_core::config::ConfigError;
use stockagent_core::exchange::{generate_sequence, BookSummary, ExchangeError, Order, Session, Sinks, Trade};
use stockagent_core::rng::purpose;
use stockagent_core::{
    init_agents, par, AblationFlag, AgentId, AgentState, Day, DecisionTiming, Money, PerStock, RngStream, SessionId,
    Side, SimConfig, StockId,
};
use thiserror::Error;

use crate::log::*;

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Exchange(#[from] ExchangeError),
    #[error(transparent)]
    Calendar(#[from] CalendarError),
    #[error("cannot load reports: {0}")]
    Reports(std::io::Error),
    #[error("agent backend failed on day {day}: {message}")]
    Backend { day: Day, message: String },
    #[error("invariant violated on day {day}: {message}")]
    Invariant { day: Day, message: String },
}

/// Runs `cfg` with agents drawn from its seed.
pub fn run_simulation(cfg: &SimConfig, policy: &dyn AgentPolicy) -> Result<RunLog, SimError> {
    cfg.validate()?;
    let agents = init_agents(cfg, &mut RngStream::derive(cfg.seed, &[purpose::INIT_AGENTS]));
    run_with_agents(cfg, policy, agents)
}

/// Runs `cfg` starting from the given population. Agent ids must equal
/// their index. Loans the agents already hold are logged as day-0 loans.
pub fn run_with_agents(cfg: &SimConfig, policy: &dyn AgentPolicy, agents: Vec<AgentState>) -> Result<RunLog, SimError> {
    cfg.validate()?;
    let reports = match &cfg.report_dir {
        Some(dir) => ReportLibrary::from_dir(dir).map_err(SimError::Reports)?,
        None => ReportLibrary::builtin(),
    };
    let mut engine = Engine::new(cfg, policy, agents, reports)?;
    for day in 1..=cfg.num_days {
        engine.run_day(day)?;
    }
    Ok(engine.finish())
}

struct Engine<'a> {
    cfg: &'a SimConfig,
    policy: &'a dyn AgentPolicy,
    calendar: Calendar,
    market: MarketState,
    agents: Vec<AgentState>,
    sinks: Sinks,
    bbs: BbsStore,
    prices: PerStock<Money>,
    prev_close: PerStock<Money>,
    terms: Vec<LoanTerm>,
    forum: Vec<String>,
    fills: Vec<Vec<OwnFill>>,
    /// Book of the previous session just before it closed.
    last_book: Option<PerStock<BookSummary>>,
    next_order_id: u64,
    next_trade_id: u64,
    next_loan_id: u64,
    identity: Money,
    shares: PerStock<u64>,
    log: RunLog,
}

fn verdict_text(v: Verdict) -> String {
    match v {
        Verdict::Accept => "accept".to_string(),
        Verdict::Reject(r) => r.to_string(),
    }
}

fn empty_book() -> PerStock<BookSummary> {
    PerStock::from_fn(|_| BookSummary::default())
}

impl<'a> Engine<'a> {
    fn new(
        cfg: &'a SimConfig,
        policy: &'a dyn AgentPolicy,
        agents: Vec<AgentState>,
        reports: ReportLibrary,
    ) -> Result<Self, SimError> {
        for (i, a) in agents.iter().enumerate() {
            if a.agent_id as usize != i {
                return Err(SimError::Invariant { day: 0, message: format!("agent at index {i} has id {}", a.agent_id) });
            }
        }
        let mut sinks = Sinks::default();
        let mut log = RunLog::default();
        let mut next_loan_id = 0;
        for a in &agents {
            for l in &a.loans {
                sinks.loans_issued += l.principal;
                next_loan_id = next_loan_id.max(l.loan_id + 1);
                log.loans.push(loan_record(l, true));
            }
        }
        let prices = cfg.initial_prices;
        let identity = sinks.cash_identity(&agents);
        let shares = PerStock::from_fn(|s| sinks.share_total(&agents, s));
        let mut engine = Engine {
            cfg,
            policy,
            calendar: Calendar::new(cfg.num_days, &cfg.report_days).with_events(&cfg.event_timeline),
            market: MarketState::new(&cfg.loan_terms, cfg.ablations.clone(), reports),
            fills: vec![Vec::new(); agents.len()],
            agents,
            sinks,
            bbs: BbsStore::default(),
            prices,
            prev_close: prices,
            terms: cfg.loan_terms.clone(),
            forum: Vec::new(),
            last_book: None,
            next_order_id: 0,
            next_trade_id: 0,
            next_loan_id,
            identity,
            shares,
            log,
        };
        engine.log.prices.push(PriceRow {
            day: 0,
            session: 0,
            price_a: prices.a,
            price_b: prices.b,
            shares_a: 0,
            shares_b: 0,
            trades_a: 0,
            trades_b: 0,
        });
        engine.end_of_day(0)?;
        Ok(engine)
    }

    fn ablated(&self, flag: AblationFlag) -> bool {
        self.cfg.ablations.contains(&flag)
    }

    fn alive(&self) -> Vec<AgentId> {
        self.agents.iter().filter(|a| a.alive).map(|a| a.agent_id).collect()
    }

    fn phase(&mut self, day: Day, session: u32, phase: Phase) {
        self.log.phases.push(PhaseRecord { day, session, phase });
    }

    fn check_backend(&self, day: Day) -> Result<(), SimError> {
        match self.policy.fatal_error() {
            Some(message) => Err(SimError::Backend { day, message }),
            None => Ok(()),
        }
    }

    fn context(&self, id: AgentId, day: Day, session: u32, book: PerStock<BookSummary>) -> DecisionContext {
        let agent = self.agents[id as usize].clone();
        DecisionContext {
            day,
            session,
            sessions_per_day: self.cfg.sessions_per_day,
            num_days: self.cfg.num_days,
            prices: self.prices,
            prev_close: self.prev_close,
            book,
            max_new_loan: agent.max_new_loan(&self.prices),
            agent,
            forum: self.forum.clone(),
            news: self.market.news.clone(),
            loan_terms: self.terms.clone(),
            fees: self.cfg.fee_schedule,
            ablations: self.cfg.ablations.clone(),
            own_fills: self.fills[id as usize].clone(),
        }
    }

    fn record_decision<T>(
        &mut self,
        day: Day,
        session: u32,
        agent_id: AgentId,
        value: DecisionValue,
        verdict: String,
        traced: &Traced<T>,
    ) {
        self.log.decisions.push(DecisionRecord {
            day,
            session,
            agent_id,
            value,
            verdict,
            attempts: traced.attempts,
            degraded: traced.degraded,
            trail: traced.trail.clone(),
        });
    }

    fn run_day(&mut self, day: Day) -> Result<(), SimError> {
        self.market.begin_day(day);
        self.prev_close = self.prices;
        self.forum = if self.ablated(AblationFlag::NoBbs) { Vec::new() } else { self.bbs.digest(day) };
        self.last_book = None;
        for f in &mut self.fills {
            f.clear();
        }

        self.pay_interest(day)?;
        self.repay_loans(day);
        self.check_bankruptcies(day);
        self.apply_events(day);
        self.release_reports(day);
        self.terms = self.market.current_terms(&self.cfg.loan_terms);
        self.decide_loans(day)?;
        for k in 1..=self.cfg.sessions_per_day {
            self.trading_session(day, k)?;
        }
        self.estimate(day)?;
        self.share_posts(day)?;
        self.end_of_day(day)
    }

    fn pay_interest(&mut self, day: Day) -> Result<(), SimError> {
        self.phase(day, 0, Phase::InterestPayment);
        if !self.calendar.is_month_end(day) {
            return Ok(());
        }
        let due = interest_due(&self.calendar, self.agents.iter().flat_map(|a| a.loans.iter()), day)?;
        for (agent_id, amount) in due {
            self.agents[agent_id as usize].cash -= amount;
            self.sinks.interest += amount;
            self.log.credit.push(CreditRecord { day, session: 0, agent_id, kind: CreditKind::Interest, amount, loan_id: None });
        }
        Ok(())
    }

    fn repay_loans(&mut self, day: Day) {
        self.phase(day, 0, Phase::LoanRepayment);
        for agent in self.agents.iter_mut().filter(|a| a.alive) {
            for loan in repay_matured(agent, day) {
                self.sinks.loans_repaid += loan.principal;
                self.log.credit.push(CreditRecord {
                    day,
                    session: 0,
                    agent_id: agent.agent_id,
                    kind: CreditKind::Repayment,
                    amount: loan.principal,
                    loan_id: Some(loan.loan_id),
                });
            }
        }
    }

    fn check_bankruptcies(&mut self, day: Day) {
        self.phase(day, 0, Phase::BankruptcyCheck);
        let prices = self.prices;
        for agent in self.agents.iter_mut().filter(|a| a.alive) {
            let Some(b) = bankruptcy_check(agent, &prices) else { continue };
            for f in &b.fills {
                self.sinks.mm_cash -= f.price.times(f.quantity);
                self.sinks.mm_shares[f.stock] += f.quantity;
            }
            let mut written_off = Money::ZERO;
            for loan in &b.written_off {
                written_off += loan.principal;
                self.log.credit.push(CreditRecord {
                    day,
                    session: 0,
                    agent_id: agent.agent_id,
                    kind: CreditKind::WriteOff,
                    amount: loan.principal,
                    loan_id: Some(loan.loan_id),
                });
            }
            self.sinks.written_off += written_off;
            self.log.bankruptcies.push(BankruptcyRecord {
                day,
                session: 0,
                agent_id: agent.agent_id,
                cash_before: b.cash_before,
                cash_after: agent.cash,
                fills: b.fills,
                written_off,
            });
        }
    }

    fn record_event(&mut self, event: &MarketEvent, outcome: EventOutcome, news_from: usize) {
        let (rates, stock, surprise_pct) = match &event.kind {
            EventKind::MonetaryEasing { rates } | EventKind::InterestRateHike { rates } => (Some(rates.clone()), None, None),
            EventKind::RevenueSurprise { stock, surprise_pct } => (None, Some(*stock), Some(*surprise_pct)),
            EventKind::ReportRelease => (None, None, None),
        };
        let outcome = match outcome {
            EventOutcome::Applied => "applied",
            EventOutcome::Suppressed => "suppressed",
            EventOutcome::AlreadyApplied => "already-applied",
        };
        self.log.events.push(EventRecord {
            day: event.day,
            session: 0,
            kind: event.label().to_string(),
            outcome: outcome.to_string(),
            rates,
            stock,
            surprise_pct,
            news: self.market.news[news_from..].iter().map(|n| n.text.clone()).collect(),
        });
    }

    fn apply_events(&mut self, day: Day) {
        self.phase(day, 0, Phase::SpecialEvents);
        let events = self.calendar.events_on(day).to_vec();
        for (index, event) in events.iter().filter(|(_, e)| e.kind != EventKind::ReportRelease) {
            let from = self.market.news.len();
            let outcome = apply_event(&mut self.market, *index, event);
            self.record_event(event, outcome, from);
        }
    }

    /// Reports come out on calendar report days; a timeline entry for the
    /// same day replaces the calendar release.
    fn release_reports(&mut self, day: Day) {
        self.phase(day, 0, Phase::ReportRelease);
        let scheduled: Vec<(usize, MarketEvent)> = self
            .calendar
            .events_on(day)
            .iter()
            .filter(|(_, e)| e.kind == EventKind::ReportRelease)
            .cloned()
            .collect();
        let releases = if scheduled.is_empty() && self.calendar.is_report_day(day) {
            vec![(usize::MAX, MarketEvent { day, kind: EventKind::ReportRelease })]
        } else {
            scheduled
        };
        for (index, event) in releases {
            let from = self.market.news.len();
            let outcome = apply_event(&mut self.market, index, &event);
            self.record_event(&event, outcome, from);
        }
    }

    fn decide_loans(&mut self, day: Day) -> Result<(), SimError> {
        self.phase(day, 0, Phase::LoanDecision);
        if day >= 2 && self.ablated(AblationFlag::NoLoan) {
            return Ok(());
        }
        let ids = self.alive();
        let contexts: Vec<DecisionContext> = ids.iter().map(|&id| self.context(id, day, 0, empty_book())).collect();
        let (policy, seed) = (self.policy, self.cfg.seed);
        let decisions = par::map(&contexts, |ctx| {
            let mut rng = RngStream::derive(seed, &[purpose::LOAN, ctx.agent.agent_id as u64, day as u64]);
            policy.decide_loan(ctx, &mut rng)
        });
        self.check_backend(day)?;
        for (id, traced) in ids.into_iter().zip(decisions) {
            let max = self.agents[id as usize].max_new_loan(&self.prices);
            let verdict = validate_loan(&traced.value, max, self.terms.len());
            if verdict.is_accept() && traced.value.take_loan {
                let term = self.terms[traced.value.term_index];
                let loan = LoanContract::issue(self.next_loan_id, id, traced.value.amount, term, day);
                self.next_loan_id += 1;
                let agent = &mut self.agents[id as usize];
                agent.cash += loan.principal;
                self.sinks.loans_issued += loan.principal;
                self.log.loans.push(loan_record(&loan, false));
                agent.loans.push(loan);
            }
            self.record_decision(day, 0, id, DecisionValue::Loan(traced.value.clone()), verdict_text(verdict), &traced);
        }
        Ok(())
    }

    fn trade_rng(&self, id: AgentId, day: Day, session: u32) -> RngStream {
        RngStream::derive(self.cfg.seed, &[purpose::TRADE, id as u64, day as u64, session as u64])
    }

    fn trading_session(&mut self, day: Day, k: u32) -> Result<(), SimError> {
        self.phase(day, k, Phase::TradingSession);
        let mut session = Session::open(SessionId { day, session: k }, self.cfg.strict_coincide);
        let mut orders: Vec<Order> = Vec::new();
        let alive = self.alive();
        if !alive.is_empty() {
            let mut seq_rng = RngStream::derive(self.cfg.seed, &[purpose::SEQUENCE, day as u64, k as u64]);
            let permutation = generate_sequence(&mut seq_rng, &alive)?.permutation;
            self.log.sequences.push(SequenceRecord { day, session: k, permutation: permutation.clone() });
            match self.cfg.decision_timing {
                DecisionTiming::Live => {
                    for &id in &permutation {
                        let ctx = self.context(id, day, k, session.summary());
                        let traced = self.policy.decide_trade(&ctx, &mut self.trade_rng(id, day, k));
                        self.check_backend(day)?;
                        self.apply_trade(&mut session, &mut orders, day, k, id, traced)?;
                    }
                }
                DecisionTiming::Batch => {
                    let book = self.last_book.take().unwrap_or_else(empty_book);
                    let contexts: Vec<DecisionContext> =
                        permutation.iter().map(|&id| self.context(id, day, k, book.clone())).collect();
                    let (policy, seed) = (self.policy, self.cfg.seed);
                    let decisions = par::map(&contexts, |ctx| {
                        let id = ctx.agent.agent_id as u64;
                        let mut rng = RngStream::derive(seed, &[purpose::TRADE, id, day as u64, k as u64]);
                        policy.decide_trade(ctx, &mut rng)
                    });
                    self.check_backend(day)?;
                    for (&id, traced) in permutation.iter().zip(decisions) {
                        self.apply_trade(&mut session, &mut orders, day, k, id, traced)?;
                    }
                }
            }
        }
        self.last_book = Some(session.summary());
        let close = session.close(&self.prices);
        self.prices = close.prices;
        self.close_session(day, k, orders, close.trades);
        Ok(())
    }

    fn apply_trade(
        &mut self,
        session: &mut Session,
        orders: &mut Vec<Order>,
        day: Day,
        k: u32,
        id: AgentId,
        traced: Traced<ActionDecision>,
    ) -> Result<(), SimError> {
        let verdict = secretary_validate(&traced.value, &self.agents[id as usize], &self.cfg.fee_schedule);
        if let (true, Some(side), Some((stock, amount, price))) =
            (verdict.is_accept(), traced.value.side(), traced.value.terms())
        {
            let order = Order {
                order_id: self.next_order_id,
                agent_id: id,
                stock,
                side,
                price,
                quantity: amount as u64,
                day,
                session: k,
            };
            self.next_order_id += 1;
            orders.push(order.clone());
            let trades =
                session.submit(order, &mut self.agents, &self.cfg.fee_schedule, &mut self.sinks, &mut self.next_trade_id)?;
            for t in &trades {
                for (agent, side) in [(t.buyer_id, Side::Buy), (t.seller_id, Side::Sell)] {
                    self.fills[agent as usize].push(OwnFill {
                        session: k,
                        stock: t.stock,
                        side,
                        quantity: t.quantity,
                        price: t.price,
                    });
                }
            }
        }
        self.record_decision(day, k, id, DecisionValue::Trade(traced.value.clone()), verdict_text(verdict), &traced);
        Ok(())
    }

    fn close_session(&mut self, day: Day, k: u32, orders: Vec<Order>, trades: Vec<Trade>) {
        let mut filled: BTreeMap<u64, u64> = BTreeMap::new();
        let mut shares = PerStock::new(0u64, 0u64);
        let mut count = PerStock::new(0u64, 0u64);
        for t in &trades {
            *filled.entry(t.buy_order_id).or_default() += t.quantity;
            *filled.entry(t.sell_order_id).or_default() += t.quantity;
            shares[t.stock] += t.quantity;
            count[t.stock] += 1;
        }
        for o in orders {
            self.log.orders.push(OrderRecord {
                day: o.day,
                session: o.session,
                order_id: o.order_id,
                agent_id: o.agent_id,
                stock: o.stock,
                side: o.side,
                price: o.price,
                quantity: o.quantity,
                filled: filled.get(&o.order_id).copied().unwrap_or(0),
            });
        }
        self.log.prices.push(PriceRow {
            day,
            session: k,
            price_a: self.prices.a,
            price_b: self.prices.b,
            shares_a: shares.a,
            shares_b: shares.b,
            trades_a: count.a,
            trades_b: count.b,
        });
        self.log.trades.extend(trades);
    }

    fn post_trading_contexts(&self, day: Day) -> (Vec<AgentId>, Vec<DecisionContext>) {
        let ids = self.alive();
        let contexts = ids.iter().map(|&id| self.context(id, day, 0, empty_book())).collect();
        (ids, contexts)
    }

    fn estimate(&mut self, day: Day) -> Result<(), SimError> {
        self.phase(day, 0, Phase::NextDayEstimate);
        let (ids, contexts) = self.post_trading_contexts(day);
        let (policy, seed) = (self.policy, self.cfg.seed);
        let estimates = par::map(&contexts, |ctx| {
            let mut rng = RngStream::derive(seed, &[purpose::ESTIMATE, ctx.agent.agent_id as u64, day as u64]);
            policy.estimate_next_day(ctx, &mut rng)
        });
        self.check_backend(day)?;
        for (agent_id, traced) in ids.into_iter().zip(estimates) {
            self.log.estimates.push(EstimateRecord { day, session: 0, agent_id, estimate: traced.value });
            self.record_decision(day, 0, agent_id, DecisionValue::Estimate(traced.value), "accept".into(), &traced);
        }
        Ok(())
    }

    fn share_posts(&mut self, day: Day) -> Result<(), SimError> {
        self.phase(day, 0, Phase::BbsSharing);
        if self.ablated(AblationFlag::NoBbs) {
            return Ok(());
        }
        let (ids, contexts) = self.post_trading_contexts(day);
        let (policy, seed) = (self.policy, self.cfg.seed);
        let posts = par::map(&contexts, |ctx| {
            let mut rng = RngStream::derive(seed, &[purpose::POST, ctx.agent.agent_id as u64, day as u64]);
            policy.compose_post(ctx, &mut rng)
        });
        self.check_backend(day)?;
        for (agent_id, traced) in ids.into_iter().zip(posts) {
            let post_id = self.bbs.post(day, agent_id, traced.value.clone()).post_id;
            self.log.bbs.push(BbsRecord { day, session: 0, post_id, text: traced.value.clone() });
            let value = DecisionValue::Post { text: traced.value.clone() };
            self.record_decision(day, 0, agent_id, value, "accept".into(), &traced);
        }
        Ok(())
    }

    fn end_of_day(&mut self, day: Day) -> Result<(), SimError> {
        for a in &self.agents {
            let wealth = a.capital(&self.prices);
            self.log.agents.push(AgentSnapshot {
                day,
                session: 0,
                agent_id: a.agent_id,
                personality: a.personality,
                alive: a.alive,
                cash: a.cash,
                holdings_a: a.holdings.a,
                holdings_b: a.holdings.b,
                debt: a.outstanding_debt(),
                wealth,
                initial_wealth: a.initial_wealth,
                pnl: wealth - a.initial_wealth,
                bought_a: a.bought.a,
                sold_a: a.sold.a,
                bought_b: a.bought.b,
                sold_b: a.sold.b,
                buy_trades_a: a.buy_trades.a,
                sell_trades_a: a.sell_trades.a,
                buy_trades_b: a.buy_trades.b,
                sell_trades_b: a.sell_trades.b,
            });
        }
        let identity = self.sinks.cash_identity(&self.agents);
        let shares = PerStock::from_fn(|s| self.sinks.share_total(&self.agents, s));
        self.log.ledger.push(LedgerRecord {
            day,
            session: 0,
            sinks: self.sinks.clone(),
            agent_cash: self.agents.iter().map(|a| a.cash).sum(),
            cash_identity: identity,
            shares_a: shares.a,
            shares_b: shares.b,
        });
        if identity != self.identity {
            return Err(SimError::Invariant {
                day,
                message: format!("cash identity moved from {} to {identity}", self.identity),
            });
        }
        for s in StockId::ALL {
            if shares[s] != self.shares[s] {
                return Err(SimError::Invariant {
                    day,
                    message: format!("{} shares moved from {} to {}", s.company(), self.shares[s], shares[s]),
                });
            }
        }
        if let Some(a) = self.agents.iter().find(|a| a.alive && a.cash.is_negative()) {
            return Err(SimError::Invariant { day, message: format!("agent {} is alive with negative cash", a.agent_id) });
        }
        Ok(())
    }

    fn finish(mut self) -> RunLog {
        let mut summary = RunSummary {
            final_prices: (self.prices.a, self.prices.b),
            bankruptcies: self.log.bankruptcies.len(),
            loans_issued: self.log.loans.len(),
            posts: self.log.bbs.len(),
            degraded_decisions: self.log.decisions.iter().filter(|d| d.degraded).count(),
            ..RunSummary::default()
        };
        for t in &self.log.trades {
            match t.stock {
                StockId::A => {
                    summary.shares_traded.0 += t.quantity;
                    summary.volume.0 += t.notional();
                    summary.trade_count.0 += 1;
                }
                StockId::B => {
                    summary.shares_traded.1 += t.quantity;
                    summary.volume.1 += t.notional();
                    summary.trade_count.1 += 1;
                }
            }
        }
        let cfg = self.cfg;
        let config: serde_json::Value =
            serde_json::from_str(&cfg.to_canonical_json()).expect("canonical config is JSON");
        self.log.manifest = json!({
            "format_version": FORMAT_VERSION,
            "code_version": env!("CARGO_PKG_VERSION"),
            "seed": cfg.seed,
            "backend": cfg.agent_backend,
            "decision_timing": cfg.decision_timing,
            "ablations": cfg.ablations.iter().map(|f| f.cli_name()).collect::<Vec<_>>(),
            "llm": cfg.llm,
            "config": config,
            "files": FILES,
            "summary": summary,
        });
        self.log.summary = summary;
        self.log
    }
}

fn loan_record(l: &LoanContract, initial: bool) -> LoanRecord {
    LoanRecord {
        day: l.start_day,
        session: 0,
        loan_id: l.loan_id,
        agent_id: l.agent_id,
        principal: l.principal,
        term_months: l.term.term_months,
        annual_rate: l.rate_at_issuance,
        maturity_day: l.maturity_day,
        initial,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use stockagent_core::agents::ScriptedPolicy;
    use stockagent_core::Preset;

    #[test]
    fn ids_must_match_positions() {
        let cfg = SimConfig::preset(Preset::Desk, 1);
        let agents = vec![AgentState::new(3, stockagent_core::Personality::Balanced, Money::ZERO)];
        let err = run_with_agents(&cfg, &ScriptedPolicy::default(), agents).unwrap_err();
        assert!(matches!(err, SimError::Invariant { day: 0, .. }));
    }

    #[test]
    fn statement_ablation_suppresses_day_one_report() {
        let mut cfg = SimConfig::preset(Preset::Desk, 1);
        cfg.set_num_days(1);
        cfg.ablations.insert(AblationFlag::NoFinancialStatement);
        let log = run_simulation(&cfg, &ScriptedPolicy::new(cfg.policy.clone())).unwrap();
        let reports: Vec<_> = log.events.iter().filter(|e| e.kind == "report-release").collect();
        assert_eq!(reports.len(), 1);
        assert_eq!(reports[0].outcome, "suppressed");
        assert!(reports[0].news.is_empty());
    }

    #[test]
    fn day_one_report_released() {
        let mut cfg = SimConfig::preset(Preset::Desk, 1);
        cfg.set_num_days(1);
        let log = run_simulation(&cfg, &ScriptedPolicy::new(cfg.policy.clone())).unwrap();
        let r = log.events.iter().find(|e| e.kind == "report-release").unwrap();
        assert_eq!((r.day, r.outcome.as_str(), r.news.len()), (1, "applied", 2));
    }
}
