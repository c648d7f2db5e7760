//! Small domain enums shared across the crate.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Index, IndexMut};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub type AgentId = u32;
pub type Day = u32;

/// One of the two listed stocks. B is the newly listed one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum StockId {
    A,
    B,
}

impl StockId {
    pub const ALL: [StockId; 2] = [StockId::A, StockId::B];

    pub fn company(self) -> &'static str {
        match self {
            StockId::A => "Company A",
            StockId::B => "Company B",
        }
    }

    pub fn other(self) -> StockId {
        match self {
            StockId::A => StockId::B,
            StockId::B => StockId::A,
        }
    }
}

impl fmt::Display for StockId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StockId::A => "A",
            StockId::B => "B",
        })
    }
}

impl FromStr for StockId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "A" | "a" => Ok(StockId::A),
            "B" | "b" => Ok(StockId::B),
            other => Err(format!("unknown stock `{other}`")),
        }
    }
}

/// A value for each stock, serialized as `{"A": .., "B": ..}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PerStock<T> {
    #[serde(rename = "A")]
    pub a: T,
    #[serde(rename = "B")]
    pub b: T,
}

impl<T> PerStock<T> {
    pub fn new(a: T, b: T) -> Self {
        PerStock { a, b }
    }

    pub fn from_fn(mut f: impl FnMut(StockId) -> T) -> Self {
        PerStock { a: f(StockId::A), b: f(StockId::B) }
    }

    pub fn map<U>(&self, mut f: impl FnMut(StockId, &T) -> U) -> PerStock<U> {
        PerStock { a: f(StockId::A, &self.a), b: f(StockId::B, &self.b) }
    }

    pub fn iter(&self) -> impl Iterator<Item = (StockId, &T)> {
        [(StockId::A, &self.a), (StockId::B, &self.b)].into_iter()
    }
}

impl<T> Index<StockId> for PerStock<T> {
    type Output = T;
    fn index(&self, s: StockId) -> &T {
        match s {
            StockId::A => &self.a,
            StockId::B => &self.b,
        }
    }
}

impl<T> IndexMut<StockId> for PerStock<T> {
    fn index_mut(&mut self, s: StockId) -> &mut T {
        match s {
            StockId::A => &mut self.a,
            StockId::B => &mut self.b,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Personality {
    Conservative,
    Aggressive,
    Balanced,
    GrowthOriented,
}

impl Personality {
    pub const ALL: [Personality; 4] = [
        Personality::Conservative,
        Personality::Aggressive,
        Personality::Balanced,
        Personality::GrowthOriented,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Personality::Conservative => "Conservative",
            Personality::Aggressive => "Aggressive",
            Personality::Balanced => "Balanced",
            Personality::GrowthOriented => "Growth-Oriented",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Buy,
    Sell,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Buy => Side::Sell,
            Side::Sell => Side::Buy,
        }
    }
}

/// Removes one information or credit channel from a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AblationFlag {
    NoFinancialInfo,
    NoBbs,
    #[serde(rename = "no-statement")]
    NoFinancialStatement,
    NoLoan,
    NoInterestChange,
}

impl AblationFlag {
    pub const ALL: [AblationFlag; 5] = [
        AblationFlag::NoFinancialInfo,
        AblationFlag::NoBbs,
        AblationFlag::NoFinancialStatement,
        AblationFlag::NoLoan,
        AblationFlag::NoInterestChange,
    ];

    pub fn cli_name(self) -> &'static str {
        match self {
            AblationFlag::NoFinancialInfo => "no-financial-info",
            AblationFlag::NoBbs => "no-bbs",
            AblationFlag::NoFinancialStatement => "no-statement",
            AblationFlag::NoLoan => "no-loan",
            AblationFlag::NoInterestChange => "no-interest-change",
        }
    }
}

impl FromStr for AblationFlag {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AblationFlag::ALL
            .into_iter()
            .find(|f| f.cli_name() == s)
            .ok_or_else(|| format!("unknown ablation `{s}`"))
    }
}

pub type AblationSet = BTreeSet<AblationFlag>;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AgentBackend {
    #[default]
    Scripted,
    LlmGateway,
}

/// `(day, session)` coordinate. Session 0 marks the pre- and post-trading
/// phases; trading sessions are numbered from 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SessionId {
    pub day: Day,
    pub session: u32,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn per_stock_serializes_with_letters() {
        let p = PerStock::new(1, 2);
        assert_eq!(serde_json::to_string(&p).unwrap(), r#"{"A":1,"B":2}"#);
        assert_eq!(p[StockId::B], 2);
    }

    #[test]
    fn ablation_names_roundtrip() {
        for f in AblationFlag::ALL {
            assert_eq!(f.cli_name().parse::<AblationFlag>().unwrap(), f);
            let json = serde_json::to_string(&f).unwrap();
            assert_eq!(json, format!("\"{}\"", f.cli_name()));
        }
        assert!("no-such".parse::<AblationFlag>().is_err());
    }
}
