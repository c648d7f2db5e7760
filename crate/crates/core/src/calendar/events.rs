//! Scheduled market events and the mutable market-wide state they act on.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::credit::LoanTerm;
use super::reports::ReportLibrary;
use crate::money::Rate;
use crate::types::{AblationFlag, AblationSet, Day, StockId};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EventKind {
    /// Replaces the personal loan-rate table, one rate per configured term.
    MonetaryEasing { rates: Vec<Rate> },
    InterestRateHike { rates: Vec<Rate> },
    /// Revenue guidance relative to expectations, in percent (negative = miss).
    RevenueSurprise { stock: StockId, surprise_pct: f64 },
    ReportRelease,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarketEvent {
    pub day: Day,
    #[serde(flatten)]
    pub kind: EventKind,
}

impl MarketEvent {
    pub fn label(&self) -> &'static str {
        match self.kind {
            EventKind::MonetaryEasing { .. } => "monetary-easing",
            EventKind::InterestRateHike { .. } => "interest-rate-hike",
            EventKind::RevenueSurprise { .. } => "revenue-surprise",
            EventKind::ReportRelease => "report-release",
        }
    }

    pub fn is_rate_change(&self) -> bool {
        matches!(self.kind, EventKind::MonetaryEasing { .. } | EventKind::InterestRateHike { .. })
    }

    /// The ablation that removes this event entirely, if any.
    pub fn suppressed_by(&self) -> AblationFlag {
        match self.kind {
            EventKind::MonetaryEasing { .. } | EventKind::InterestRateHike { .. } => {
                AblationFlag::NoInterestChange
            }
            EventKind::RevenueSurprise { .. } => AblationFlag::NoFinancialInfo,
            EventKind::ReportRelease => AblationFlag::NoFinancialStatement,
        }
    }
}

/// Corporate loan cost moves 6% → 4.5% on easing and 4.5% → 5% on the hike;
/// personal rates are scaled by the same ratios.
pub const EASING_RATIO: (i64, i64) = (45, 60);
pub const HIKE_RATIO: (i64, i64) = (50, 45);

pub fn scale_table(terms: &[Rate], (num, den): (i64, i64)) -> Vec<Rate> {
    terms.iter().map(|r| r.scaled(num, den)).collect()
}

/// Easing on day 78, the hike together with both revenue surprises on day
/// 210. Events beyond `num_days` are dropped.
pub fn default_timeline(terms: &[LoanTerm], num_days: Day) -> Vec<MarketEvent> {
    let base: Vec<Rate> = terms.iter().map(|t| t.annual_rate).collect();
    let eased = scale_table(&base, EASING_RATIO);
    let hiked = scale_table(&eased, HIKE_RATIO);
    vec![
        MarketEvent { day: 78, kind: EventKind::MonetaryEasing { rates: eased } },
        MarketEvent { day: 210, kind: EventKind::InterestRateHike { rates: hiked } },
        MarketEvent { day: 210, kind: EventKind::RevenueSurprise { stock: StockId::A, surprise_pct: -3.0 } },
        MarketEvent { day: 210, kind: EventKind::RevenueSurprise { stock: StockId::B, surprise_pct: 2.0 } },
    ]
    .into_iter()
    .filter(|e| e.day <= num_days)
    .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NewsKind {
    Report,
    Surprise,
    Macro,
}

/// A line of market information shown to agents on the day it appears.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewsItem {
    pub kind: NewsKind,
    pub stock: Option<StockId>,
    pub text: String,
    /// −1 negative, 0 neutral, +1 positive.
    pub tone: i8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventOutcome {
    Applied,
    Suppressed,
    AlreadyApplied,
}

/// Market-wide mutable state touched by events.
#[derive(Clone, Debug)]
pub struct MarketState {
    pub day: Day,
    pub loan_rates: Vec<Rate>,
    pub news: Vec<NewsItem>,
    pub ablations: AblationSet,
    reports: ReportLibrary,
    applied: BTreeSet<(Day, usize)>,
}

impl MarketState {
    pub fn new(terms: &[LoanTerm], ablations: AblationSet, reports: ReportLibrary) -> Self {
        MarketState {
            day: 0,
            loan_rates: terms.iter().map(|t| t.annual_rate).collect(),
            news: Vec::new(),
            ablations,
            reports,
            applied: BTreeSet::new(),
        }
    }

    /// Moves to `day`, clearing the previous day's news.
    pub fn begin_day(&mut self, day: Day) {
        self.day = day;
        self.news.clear();
    }

    pub fn reports(&self) -> &ReportLibrary {
        &self.reports
    }

    /// Loan terms priced off the current rate table.
    pub fn current_terms(&self, terms: &[LoanTerm]) -> Vec<LoanTerm> {
        terms
            .iter()
            .zip(&self.loan_rates)
            .map(|(t, &r)| LoanTerm { term_months: t.term_months, annual_rate: r })
            .collect()
    }
}

fn format_pct(pct: f64) -> String {
    let abs = pct.abs();
    if abs.fract() == 0.0 {
        format!("{abs:.0}%")
    } else {
        format!("{abs}%")
    }
}

fn rate_list(rates: &[Rate]) -> String {
    rates
        .iter()
        .enumerate()
        .map(|(i, r)| format!("{r} ({} month)", i + 1))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Applies `event` (identified by its timeline index) on the current day.
///
/// Rate events replace the loan-rate table (existing contracts keep their
/// issuance rate) and announce the change unless financial information is
/// ablated. Surprises and reports add news items. Applying the same
/// `(day, index)` twice is a no-op.
pub fn apply_event(state: &mut MarketState, index: usize, event: &MarketEvent) -> EventOutcome {
    debug_assert_eq!(event.day, state.day, "event applied on the wrong day");
    if state.ablations.contains(&event.suppressed_by()) {
        return EventOutcome::Suppressed;
    }
    if !state.applied.insert((event.day, index)) {
        return EventOutcome::AlreadyApplied;
    }
    let info_visible = !state.ablations.contains(&AblationFlag::NoFinancialInfo);
    match &event.kind {
        EventKind::MonetaryEasing { rates } => {
            state.loan_rates = rates.clone();
            if info_visible {
                state.news.push(NewsItem {
                    kind: NewsKind::Macro,
                    stock: None,
                    text: format!(
                        "Monetary easing: the government cut the reserve requirement ratio and corporate loan costs fell from 6% to 4.5%. Personal loan rates are now {}.",
                        rate_list(rates)
                    ),
                    tone: 1,
                });
            }
        }
        EventKind::InterestRateHike { rates } => {
            state.loan_rates = rates.clone();
            if info_visible {
                state.news.push(NewsItem {
                    kind: NewsKind::Macro,
                    stock: None,
                    text: format!(
                        "Interest rate hike: the government raised rates and shrank its balance sheet; corporate loan costs rose from 4.5% to 5%. Personal loan rates are now {}.",
                        rate_list(rates)
                    ),
                    tone: -1,
                });
            }
        }
        EventKind::RevenueSurprise { stock, surprise_pct } => {
            let direction = if *surprise_pct < 0.0 { "below" } else { "above" };
            state.news.push(NewsItem {
                kind: NewsKind::Surprise,
                stock: Some(*stock),
                text: format!(
                    "{} expects quarterly revenue to be {} {direction} expectations due to special events in the quarter.",
                    stock.company(),
                    format_pct(*surprise_pct)
                ),
                tone: if *surprise_pct < 0.0 { -1 } else if *surprise_pct > 0.0 { 1 } else { 0 },
            });
        }
        EventKind::ReportRelease => {
            if let Ok(released) = state.reports.release(event.day) {
                for r in released {
                    state.news.push(NewsItem {
                        kind: NewsKind::Report,
                        stock: Some(r.stock),
                        text: r.text,
                        tone: r.tone,
                    });
                }
            }
        }
    }
    EventOutcome::Applied
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calendar::credit::default_loan_terms;

    fn state(flags: &[AblationFlag]) -> MarketState {
        MarketState::new(
            &default_loan_terms(),
            flags.iter().copied().collect(),
            ReportLibrary::builtin(),
        )
    }

    #[test]
    fn default_tables_scale_exactly() {
        let tl = default_timeline(&default_loan_terms(), 264);
        let EventKind::MonetaryEasing { rates } = &tl[0].kind else { panic!() };
        assert_eq!(rates, &vec![Rate::from_units(2_025_000), Rate::from_bps(225), Rate::from_units(2_475_000)]);
        let EventKind::InterestRateHike { rates } = &tl[1].kind else { panic!() };
        assert_eq!(rates, &vec![Rate::from_bps(225), Rate::from_bps(250), Rate::from_bps(275)]);
        assert!(default_timeline(&default_loan_terms(), 10).is_empty());
    }

    #[test]
    fn easing_replaces_table_for_new_loans_only() {
        let mut s = state(&[]);
        s.begin_day(78);
        let terms = default_loan_terms();
        let tl = default_timeline(&terms, 264);
        let before = crate::calendar::LoanContract::issue(0, 0, crate::money::Money::from_units(100), terms[0], 1);
        assert_eq!(apply_event(&mut s, 0, &tl[0]), EventOutcome::Applied);
        assert_eq!(s.current_terms(&terms)[0].annual_rate, Rate::from_units(2_025_000));
        assert_eq!(before.rate_at_issuance, Rate::from_bps(270));
        assert_eq!(s.news.len(), 1);
    }

    #[test]
    fn surprise_line() {
        let mut s = state(&[]);
        s.begin_day(210);
        let ev = MarketEvent { day: 210, kind: EventKind::RevenueSurprise { stock: StockId::A, surprise_pct: -3.0 } };
        apply_event(&mut s, 2, &ev);
        assert!(s.news[0].text.contains("3% below expectations"), "{}", s.news[0].text);
        assert!(s.news[0].text.starts_with("Company A"));
        assert_eq!(s.news[0].tone, -1);
    }

    #[test]
    fn ablated_events_leave_state_unchanged() {
        let terms = default_loan_terms();
        let tl = default_timeline(&terms, 264);
        let mut s = state(&[AblationFlag::NoInterestChange]);
        s.begin_day(78);
        let rates = s.loan_rates.clone();
        assert_eq!(apply_event(&mut s, 0, &tl[0]), EventOutcome::Suppressed);
        assert_eq!(s.loan_rates, rates);
        assert!(s.news.is_empty());

        let mut s = state(&[AblationFlag::NoFinancialInfo]);
        s.begin_day(210);
        assert_eq!(apply_event(&mut s, 2, &tl[2]), EventOutcome::Suppressed);
        // rate events still apply but are not announced
        assert_eq!(apply_event(&mut s, 1, &tl[1]), EventOutcome::Applied);
        assert!(s.news.is_empty());
    }

    #[test]
    fn idempotent_per_day_and_index() {
        let terms = default_loan_terms();
        let tl = default_timeline(&terms, 264);
        let mut s = state(&[]);
        s.begin_day(210);
        apply_event(&mut s, 3, &tl[3]);
        let snapshot = (s.loan_rates.clone(), s.news.clone());
        assert_eq!(apply_event(&mut s, 3, &tl[3]), EventOutcome::AlreadyApplied);
        assert_eq!((s.loan_rates.clone(), s.news.clone()), snapshot);
    }
}
