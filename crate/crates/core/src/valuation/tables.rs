//! Built-in company valuation tables.
//!
//! Three CSV files under `fixtures/valuation/`:
//!
//! - `companies.csv`: share counts, IPO fees, the currency unit of the table
//!   figures, capital weights and cost of equity per company.
//! - `columns.csv`: one row per (company, day, band) with the five
//!   growth-period cash flows, the year-6 flow `fv`, the cost of debt in
//!   force for that column, the growth rate and the published value.
//! - `ideal_prices.csv`: the published per-share bounds per (company, day).
//!
//! A column's discount rate is its WACC from the company's weights, its
//! cost of equity and the column's cost of debt.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{
    fcff_raw, per_share, wacc, DebtPv, FcffInputs, ShareParams, ValuationError, WaccInputs,
};
use crate::money::Money;
use crate::types::{Day, StockId};

const COMPANIES: &str = include_str!("../../fixtures/valuation/companies.csv");
const COLUMNS: &str = include_str!("../../fixtures/valuation/columns.csv");
const IDEAL: &str = include_str!("../../fixtures/valuation/ideal_prices.csv");

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Band {
    Central,
    Upper,
    Lower,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompanyParams {
    pub company: StockId,
    pub total_shares: u64,
    pub listed_shares: u64,
    pub ipo_fees: Money,
    pub value_unit: u32,
    pub equity_weight: f64,
    pub debt_weight: f64,
    pub ke: f64,
}

impl CompanyParams {
    pub fn share_params(&self) -> ShareParams {
        ShareParams {
            listed_shares: self.listed_shares,
            total_shares: self.total_shares,
            ipo_fees: self.ipo_fees,
            value_unit: self.value_unit,
        }
    }

    pub fn wacc(&self, kd: f64) -> Result<f64, ValuationError> {
        wacc(&WaccInputs { ke: self.ke, kd, equity_weight: self.equity_weight, debt_weight: self.debt_weight })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValuationColumn {
    pub company: StockId,
    pub day: Day,
    pub band: Band,
    pub fcf1: Money,
    pub fcf2: Money,
    pub fcf3: Money,
    pub fcf4: Money,
    pub fcf5: Money,
    pub fv: Money,
    pub kd: f64,
    pub g: f64,
    pub reported: Money,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdealPriceRow {
    pub company: StockId,
    pub day: Day,
    pub upper: Money,
    pub lower: Money,
}

#[derive(Clone, Debug)]
pub struct ValuationTables {
    pub companies: BTreeMap<StockId, CompanyParams>,
    pub columns: Vec<ValuationColumn>,
    pub ideal_prices: Vec<IdealPriceRow>,
}

/// One recomputed valuation cell next to its published value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Reproduction {
    pub company: StockId,
    pub day: Day,
    pub band: Band,
    pub wacc: f64,
    pub computed: f64,
    pub reported: Money,
}

impl Reproduction {
    pub fn relative_error(&self) -> f64 {
        (self.computed - self.reported.to_f64()) / self.reported.to_f64()
    }
}

/// Recomputed per-share bounds next to the published ones.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PriceReproduction {
    pub company: StockId,
    pub day: Day,
    pub upper: f64,
    pub lower: f64,
    pub reported_upper: Money,
    pub reported_lower: Money,
    /// Upper/lower ratio of the computed prices.
    pub price_ratio: f64,
    /// Upper/lower ratio of the published total values.
    pub value_ratio: f64,
}

fn read<T: for<'de> Deserialize<'de>>(name: &str, text: &str) -> Result<Vec<T>, ValuationError> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<Result<Vec<T>, _>>()
        .map_err(|e| ValuationError::Fixture(format!("{name}: {e}")))
}

pub fn builtin_tables() -> ValuationTables {
    ValuationTables::parse(COMPANIES, COLUMNS, IDEAL).expect("builtin valuation fixtures parse")
}

impl ValuationTables {
    pub fn parse(companies: &str, columns: &str, ideal: &str) -> Result<Self, ValuationError> {
        let companies = read::<CompanyParams>("companies.csv", companies)?
            .into_iter()
            .map(|c| (c.company, c))
            .collect();
        Ok(ValuationTables {
            companies,
            columns: read("columns.csv", columns)?,
            ideal_prices: read("ideal_prices.csv", ideal)?,
        })
    }

    pub fn column(&self, company: StockId, day: Day, band: Band) -> Option<&ValuationColumn> {
        self.columns.iter().find(|c| c.company == company && c.day == day && c.band == band)
    }

    pub fn fcff_inputs(&self, col: &ValuationColumn) -> Result<FcffInputs, ValuationError> {
        let params = self.params(col.company)?;
        Ok(FcffInputs {
            fcf: vec![col.fcf1, col.fcf2, col.fcf3, col.fcf4, col.fcf5],
            fv: col.fv,
            wacc: params.wacc(col.kd)?,
            g: col.g,
        })
    }

    fn params(&self, company: StockId) -> Result<&CompanyParams, ValuationError> {
        self.companies
            .get(&company)
            .ok_or_else(|| ValuationError::Fixture(format!("no parameters for company {company}")))
    }

    /// Every valuation cell recomputed.
    pub fn reproduce_values(&self) -> Result<Vec<Reproduction>, ValuationError> {
        self.columns
            .iter()
            .map(|col| {
                let inputs = self.fcff_inputs(col)?;
                Ok(Reproduction {
                    company: col.company,
                    day: col.day,
                    band: col.band,
                    wacc: inputs.wacc,
                    computed: fcff_raw(&inputs)?,
                    reported: col.reported,
                })
            })
            .collect()
    }

    /// Per-share bounds for every published ideal-price row. Debt takes the
    /// company's debt weight of the total value.
    pub fn reproduce_prices(&self) -> Result<Vec<PriceReproduction>, ValuationError> {
        self.ideal_prices
            .iter()
            .map(|row| {
                let params = self.params(row.company)?;
                let col = |band| {
                    self.column(row.company, row.day, band).ok_or_else(|| {
                        ValuationError::Fixture(format!("missing {band:?} column for {} day {}", row.company, row.day))
                    })
                };
                let (up, lo) = (col(Band::Upper)?, col(Band::Lower)?);
                let debt = DebtPv::ShareOfValue(params.debt_weight);
                let share = params.share_params();
                let upper = per_share(fcff_raw(&self.fcff_inputs(up)?)?, &share, debt)?;
                let lower = per_share(fcff_raw(&self.fcff_inputs(lo)?)?, &share, debt)?;
                Ok(PriceReproduction {
                    company: row.company,
                    day: row.day,
                    upper,
                    lower,
                    reported_upper: row.upper,
                    reported_lower: row.lower,
                    price_ratio: upper / lower,
                    value_ratio: up.reported.to_f64() / lo.reported.to_f64(),
                })
            })
            .collect()
    }
}
