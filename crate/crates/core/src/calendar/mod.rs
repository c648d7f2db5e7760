//! Trading calendar, credit, fees, events and reports.
//!
//! A month is 22 trading days and a quarter 66; loans mature after
//! `22 × term_months` days and pay simple interest on month-end days.

mod credit;
mod events;
mod fees;
mod reports;

use std::collections::BTreeMap;

use thiserror::Error;

pub use credit::{
    bankruptcy_check, default_loan_terms, interest_due, repay_matured, Bankruptcy,
    LiquidationFill, LoanContract, LoanTerm,
};
pub use events::{
    apply_event, default_timeline, scale_table, EventKind, EventOutcome, MarketEvent,
    MarketState, NewsItem, NewsKind, EASING_RATIO, HIKE_RATIO,
};
pub use fees::{incremental_fee, transaction_fee, FeeSchedule};
pub use reports::{Report, ReportLibrary};

use crate::types::Day;

pub const TRADING_DAYS_PER_MONTH: Day = 22;
pub const TRADING_DAYS_PER_QUARTER: Day = 66;
pub const TRADING_DAYS_PER_YEAR: Day = 264;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CalendarError {
    #[error("fee requested for zero shares")]
    ZeroShares,
    #[error("day {0} is not a month-end day")]
    NotMonthEnd(Day),
    #[error("day {0} is not a report day")]
    NotReportDay(Day),
}

#[derive(Clone, Debug)]
pub struct Calendar {
    num_days: Day,
    month_end_days: Vec<Day>,
    quarter_starts: Vec<Day>,
    report_days: Vec<Day>,
    event_days: BTreeMap<Day, Vec<(usize, MarketEvent)>>,
}

impl Calendar {
    pub fn new(num_days: Day, report_days: &[Day]) -> Self {
        let month_end_days = (1..=num_days / TRADING_DAYS_PER_MONTH)
            .map(|k| k * TRADING_DAYS_PER_MONTH)
            .collect();
        let quarter_starts = (0..4)
            .map(|q| 1 + q * TRADING_DAYS_PER_QUARTER)
            .filter(|&d| d <= num_days)
            .collect();
        let mut report_days = report_days.to_vec();
        report_days.sort_unstable();
        report_days.dedup();
        Calendar { num_days, month_end_days, quarter_starts, report_days, event_days: BTreeMap::new() }
    }

    pub fn with_events(mut self, timeline: &[MarketEvent]) -> Self {
        for (i, ev) in timeline.iter().enumerate() {
            self.event_days.entry(ev.day).or_default().push((i, ev.clone()));
        }
        self
    }

    pub fn num_days(&self) -> Day {
        self.num_days
    }

    pub fn month_end_days(&self) -> &[Day] {
        &self.month_end_days
    }

    pub fn quarter_starts(&self) -> &[Day] {
        &self.quarter_starts
    }

    pub fn report_days(&self) -> &[Day] {
        &self.report_days
    }

    pub fn is_month_end(&self, day: Day) -> bool {
        day.is_multiple_of(TRADING_DAYS_PER_MONTH) && day >= 1 && day <= self.num_days
    }

    /// Day 1 (opening narrative) and every configured report day.
    pub fn is_report_day(&self, day: Day) -> bool {
        day == 1 || self.report_days.binary_search(&day).is_ok()
    }

    /// Timeline events scheduled for `day`, with their timeline index.
    pub fn events_on(&self, day: Day) -> &[(usize, MarketEvent)] {
        self.event_days.get(&day).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Report texts for both companies on a report day.
    pub fn release_report(&self, library: &ReportLibrary, day: Day) -> Result<Vec<Report>, CalendarError> {
        if !self.is_report_day(day) {
            return Err(CalendarError::NotReportDay(day));
        }
        library.release(day)
    }
}
