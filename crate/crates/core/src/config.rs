//! Run configuration.
//!
//! Configs are TOML files (or JSON, selected by a `.json` extension) whose
//! keys are the field names of [`SimConfig`]. Every key except `seed` is
//! optional. Absent keys take the full-scale defaults (200 agents, 264
//! days, 3 sessions); defaults that are calendar-dependent (report days, the
//! event timeline) are truncated to `num_days`, while explicitly given
//! out-of-calendar days are a validation error. `SimConfig::to_canonical_json`
//! gives the equivalent JSON form.
//!
//! The environment variable `SIM_SEED` overrides the seed of a loaded file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agents::PolicyTable;
use crate::calendar::{
    default_loan_terms, default_timeline, FeeSchedule, LoanTerm, MarketEvent,
    TRADING_DAYS_PER_YEAR,
};
use crate::money::{Money, Rate};
use crate::types::{AblationSet, AgentBackend, Day, PerStock};

pub const SEED_ENV: &str = "SIM_SEED";
pub const DEFAULT_REPORT_DAYS: [Day; 4] = [12, 78, 144, 210];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid `{field}`: {message}")]
    Invalid { field: String, message: String },
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field: field.into(), message: message.into() }
}

/// Serialized as `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "[Money; 2]", into = "[Money; 2]")]
pub struct AssetRange {
    pub lo: Money,
    pub hi: Money,
}

impl From<[Money; 2]> for AssetRange {
    fn from([lo, hi]: [Money; 2]) -> Self {
        AssetRange { lo, hi }
    }
}

impl From<AssetRange> for [Money; 2] {
    fn from(r: AssetRange) -> Self {
        [r.lo, r.hi]
    }
}

/// When agents see the book they decide against.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecisionTiming {
    /// Each agent decides at its turn, seeing the live session book.
    #[default]
    Live,
    /// All contexts are frozen at session open (showing the previous
    /// session's closing book) and evaluated concurrently.
    Batch,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// 20 agents, 10 days.
    Desk,
    /// 200 agents, 10 days (30 decision rounds).
    Rq3Short,
    /// 200 agents, 154 days.
    Rq3Long,
    /// 200 agents, the full 264-day year.
    FullYear,
}

impl Preset {
    pub fn shape(self) -> (usize, Day) {
        match self {
            Preset::Desk => (20, 10),
            Preset::Rq3Short => (200, 10),
            Preset::Rq3Long => (200, 154),
            Preset::FullYear => (200, TRADING_DAYS_PER_YEAR),
        }
    }
}

impl std::str::FromStr for Preset {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "desk" => Ok(Preset::Desk),
            "rq3-short" => Ok(Preset::Rq3Short),
            "rq3-long" => Ok(Preset::Rq3Long),
            "full-year" => Ok(Preset::FullYear),
            _ => Err(format!("unknown preset `{s}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LlmSettings {
    /// Chat-completions URL; falls back to `STOCKAGENT_LLM_ENDPOINT`.
    pub endpoint: Option<String>,
    pub model: String,
    /// Name of the environment variable holding the API key.
    pub api_key_env: String,
    pub temperature: f64,
    pub max_tokens: u32,
    pub max_attempts: u32,
    pub in_flight: usize,
    pub backoff_ms: u64,
    pub wall_budget_ms: u64,
    pub timeout_ms: u64,
}

impl Default for LlmSettings {
    fn default() -> Self {
        LlmSettings {
            endpoint: None,
            model: "gpt-3.5-turbo-0125".into(),
            api_key_env: "STOCKAGENT_LLM_API_KEY".into(),
            temperature: 0.7,
            max_tokens: 512,
            max_attempts: 3,
            in_flight: 8,
            backoff_ms: 500,
            wall_budget_ms: 60_000,
            timeout_ms: 30_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub seed: u64,
    pub num_agents: usize,
    pub num_days: Day,
    pub sessions_per_day: u32,
    pub initial_prices: PerStock<Money>,
    pub asset_range: AssetRange,
    /// Fraction of initial wealth held as stock, split evenly by value.
    pub initial_stock_fraction: Rate,
    /// Upper bound of the initial liability as a fraction of wealth.
    pub max_initial_liability: Rate,
    pub fee_schedule: FeeSchedule,
    pub loan_terms: Vec<LoanTerm>,
    pub event_timeline: Vec<MarketEvent>,
    pub report_days: Vec<Day>,
    pub ablations: AblationSet,
    pub agent_backend: AgentBackend,
    pub strict_coincide: bool,
    pub decision_timing: DecisionTiming,
    pub policy: PolicyTable,
    pub llm: LlmSettings,
    pub report_dir: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    seed: Option<u64>,
    preset: Option<Preset>,
    num_agents: Option<usize>,
    num_days: Option<Day>,
    sessions_per_day: Option<u32>,
    initial_prices: Option<PerStock<Money>>,
    asset_range: Option<AssetRange>,
    initial_stock_fraction: Option<Rate>,
    max_initial_liability: Option<Rate>,
    fee_schedule: Option<FeeSchedule>,
    loan_terms: Option<Vec<LoanTerm>>,
    event_timeline: Option<Vec<MarketEvent>>,
    report_days: Option<Vec<Day>>,
    ablations: Option<AblationSet>,
    agent_backend: Option<AgentBackend>,
    strict_coincide: Option<bool>,
    decision_timing: Option<DecisionTiming>,
    policy: Option<PolicyTable>,
    llm: Option<LlmSettings>,
    report_dir: Option<PathBuf>,
}

impl SimConfig {
    /// Full-scale defaults.
    pub fn with_seed(seed: u64) -> Self {
        SimConfig::shaped(seed, 200, TRADING_DAYS_PER_YEAR)
    }

    pub fn preset(preset: Preset, seed: u64) -> Self {
        let (agents, days) = preset.shape();
        SimConfig::shaped(seed, agents, days)
    }

    fn shaped(seed: u64, num_agents: usize, num_days: Day) -> Self {
        let loan_terms = default_loan_terms();
        SimConfig {
            seed,
            num_agents,
            num_days,
            sessions_per_day: 3,
            // midpoints of the day-1 ideal price bounds
            initial_prices: PerStock::new(Money::from_cents(2679), Money::from_cents(4223)),
            asset_range: AssetRange { lo: Money::from_units(100_000), hi: Money::from_units(5_000_000) },
            initial_stock_fraction: Rate::from_ratio(1, 2),
            max_initial_liability: Rate::from_ratio(1, 2),
            fee_schedule: FeeSchedule::default(),
            event_timeline: default_timeline(&loan_terms, num_days),
            loan_terms,
            report_days: DEFAULT_REPORT_DAYS.iter().copied().filter(|&d| d <= num_days).collect(),
            ablations: AblationSet::new(),
            agent_backend: AgentBackend::Scripted,
            strict_coincide: false,
            decision_timing: DecisionTiming::Live,
            policy: PolicyTable::default(),
            llm: LlmSettings::default(),
            report_dir: None,
        }
    }

    /// Re-derives calendar-dependent defaults after changing `num_days`.
    pub fn set_num_days(&mut self, num_days: Day) {
        self.num_days = num_days;
        self.report_days = DEFAULT_REPORT_DAYS.iter().copied().filter(|&d| d <= num_days).collect();
        self.event_timeline = default_timeline(&self.loan_terms, num_days);
    }

    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let file: ConfigFile = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        Self::resolve(file)
    }

    pub fn from_json_str(text: &str) -> Result<Self, ConfigError> {
        let file: ConfigFile =
            serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        Self::resolve(file)
    }

    fn resolve(f: ConfigFile) -> Result<Self, ConfigError> {
        let seed = f.seed.unwrap_or(0);
        let mut cfg = match f.preset {
            Some(p) => SimConfig::preset(p, seed),
            None => SimConfig::with_seed(seed),
        };
        if let Some(v) = f.num_agents {
            cfg.num_agents = v;
        }
        if let Some(v) = f.num_days {
            cfg.num_days = v;
        }
        if let Some(v) = f.loan_terms {
            cfg.loan_terms = v;
        }
        cfg.report_days = match f.report_days {
            Some(v) => v,
            None => DEFAULT_REPORT_DAYS.iter().copied().filter(|&d| d <= cfg.num_days).collect(),
        };
        cfg.event_timeline = match f.event_timeline {
            Some(v) => v,
            None => default_timeline(&cfg.loan_terms, cfg.num_days),
        };
        if let Some(v) = f.sessions_per_day {
            cfg.sessions_per_day = v;
        }
        if let Some(v) = f.initial_prices {
            cfg.initial_prices = v;
        }
        if let Some(v) = f.asset_range {
            cfg.asset_range = v;
        }
        if let Some(v) = f.initial_stock_fraction {
            cfg.initial_stock_fraction = v;
        }
        if let Some(v) = f.max_initial_liability {
            cfg.max_initial_liability = v;
        }
        if let Some(v) = f.fee_schedule {
            cfg.fee_schedule = v;
        }
        if let Some(v) = f.ablations {
            cfg.ablations = v;
        }
        if let Some(v) = f.agent_backend {
            cfg.agent_backend = v;
        }
        if let Some(v) = f.strict_coincide {
            cfg.strict_coincide = v;
        }
        if let Some(v) = f.decision_timing {
            cfg.decision_timing = v;
        }
        if let Some(v) = f.policy {
            cfg.policy = v;
        }
        if let Some(v) = f.llm {
            cfg.llm = v;
        }
        cfg.report_dir = f.report_dir;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.num_agents == 0 {
            return Err(invalid("num_agents", "must be positive"));
        }
        if self.num_days == 0 || self.num_days > TRADING_DAYS_PER_YEAR {
            return Err(invalid("num_days", format!("must be in 1..={TRADING_DAYS_PER_YEAR}")));
        }
        if self.sessions_per_day == 0 {
            return Err(invalid("sessions_per_day", "must be at least 1"));
        }
        if self.asset_range.lo > self.asset_range.hi {
            return Err(invalid("asset_range", "lower bound exceeds upper bound"));
        }
        if !self.asset_range.lo.is_positive() {
            return Err(invalid("asset_range", "bounds must be positive"));
        }
        for (s, p) in self.initial_prices.iter() {
            if !p.is_positive() {
                return Err(invalid(format!("initial_prices.{s}"), "must be positive"));
            }
        }
        for (name, r) in [
            ("initial_stock_fraction", self.initial_stock_fraction),
            ("max_initial_liability", self.max_initial_liability),
        ] {
            if r < Rate::ZERO || r > Rate::ONE {
                return Err(invalid(name, "must be a fraction in [0, 1]"));
            }
        }
        let fees = &self.fee_schedule;
        if !fees.per_share.is_positive() {
            return Err(invalid("fee_schedule.per_share", "must be positive"));
        }
        if fees.min_fee > fees.max_fee || fees.min_fee.is_negative() {
            return Err(invalid("fee_schedule", "need 0 <= min_fee <= max_fee"));
        }
        if self.loan_terms.len() != 3 {
            return Err(invalid("loan_terms", "exactly three loan terms are required"));
        }
        for (i, t) in self.loan_terms.iter().enumerate() {
            if !(1..=3).contains(&t.term_months) {
                return Err(invalid(format!("loan_terms[{i}].term_months"), "must be 1, 2 or 3"));
            }
            if !t.annual_rate.is_positive() {
                return Err(invalid(format!("loan_terms[{i}].annual_rate"), "must be positive"));
            }
        }
        for (i, d) in self.report_days.iter().enumerate() {
            if *d < 1 || *d > self.num_days {
                return Err(invalid(
                    format!("report_days[{i}]"),
                    format!("day {d} outside 1..={}", self.num_days),
                ));
            }
        }
        for (i, ev) in self.event_timeline.iter().enumerate() {
            if ev.day < 1 || ev.day > self.num_days {
                return Err(invalid(
                    format!("event_timeline[{i}].day"),
                    format!("day {} outside 1..={}", ev.day, self.num_days),
                ));
            }
            if let crate::calendar::EventKind::MonetaryEasing { rates }
            | crate::calendar::EventKind::InterestRateHike { rates } = &ev.kind
            {
                if rates.len() != self.loan_terms.len() || rates.iter().any(|r| !r.is_positive()) {
                    return Err(invalid(
                        format!("event_timeline[{i}].rates"),
                        "need one positive rate per loan term",
                    ));
                }
            }
        }
        self.policy.validate().map_err(|m| invalid("policy", m))?;
        if self.llm.max_attempts == 0 {
            return Err(invalid("llm.max_attempts", "must be at least 1"));
        }
        if self.llm.in_flight == 0 {
            return Err(invalid("llm.in_flight", "must be at least 1"));
        }
        Ok(())
    }

    /// Applies a `SIM_SEED`-style override value.
    pub fn apply_seed_override(&mut self, value: Option<&str>) -> Result<(), ConfigError> {
        if let Some(v) = value {
            self.seed = v
                .trim()
                .parse()
                .map_err(|_| invalid(SEED_ENV, format!("`{v}` is not a 64-bit unsigned integer")))?;
        }
        Ok(())
    }

    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// Reads, parses, validates, and applies the `SIM_SEED` override.
pub fn load_config(path: &Path) -> Result<SimConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
    let mut cfg = if path.extension().is_some_and(|e| e == "json") {
        SimConfig::from_json_str(&text)?
    } else {
        SimConfig::from_toml_str(&text)?
    };
    cfg.apply_seed_override(std::env::var(SEED_ENV).ok().as_deref())?;
    Ok(cfg)
}
