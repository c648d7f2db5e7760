//! Discounted free-cash-flow valuation and ideal price bounds.
//!
//! Cash flows and values are [`Money`]; discounting runs in `f64` and
//! rounds to the cent only at the result.

pub mod tables;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use tables::{
    builtin_tables, Band, CompanyParams, IdealPriceRow, PriceReproduction, Reproduction,
    ValuationColumn, ValuationTables,
};

use crate::money::Money;

#[derive(Debug, Error, PartialEq)]
pub enum ValuationError {
    #[error("capital weights sum to {0}, not 1")]
    Weights(f64),
    #[error("wacc {wacc} must exceed growth {g}")]
    GrowthAtOrAboveWacc { wacc: f64, g: f64 },
    #[error("debt capital must be positive")]
    NonPositiveDebt,
    #[error("listed shares must be positive and at most total shares")]
    Shares,
    #[error("cash-flow columns out of order: need lower <= central <= upper")]
    Ordering,
    #[error("empty cash-flow series")]
    Empty,
    #[error("fixture: {0}")]
    Fixture(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaccInputs {
    pub ke: f64,
    pub kd: f64,
    pub equity_weight: f64,
    pub debt_weight: f64,
}

pub fn wacc(inputs: &WaccInputs) -> Result<f64, ValuationError> {
    let sum = inputs.equity_weight + inputs.debt_weight;
    if (sum - 1.0).abs() > 1e-9 || inputs.equity_weight < 0.0 || inputs.debt_weight < 0.0 {
        return Err(ValuationError::Weights(sum));
    }
    Ok(inputs.ke * inputs.equity_weight + inputs.kd * inputs.debt_weight)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapmInputs {
    pub rf: f64,
    pub rm: f64,
    pub beta: f64,
}

/// Cost of equity: `rf + β(rm − rf)`.
pub fn capm_ke(inputs: &CapmInputs) -> f64 {
    inputs.rf + inputs.beta * (inputs.rm - inputs.rf)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DebtCostInputs {
    pub sd: Money,
    pub ld: Money,
    pub sr: f64,
    pub lr: f64,
    /// Bond adjustment factor.
    pub af: f64,
    pub tr: f64,
    pub d: Money,
}

/// `((sd·sr + ld·lr) / d) · af · (1 − tr)`.
pub fn cost_of_debt(inputs: &DebtCostInputs) -> Result<f64, ValuationError> {
    if !inputs.d.is_positive() {
        return Err(ValuationError::NonPositiveDebt);
    }
    let weighted = inputs.sd.to_f64() * inputs.sr + inputs.ld.to_f64() * inputs.lr;
    Ok(weighted / inputs.d.to_f64() * inputs.af * (1.0 - inputs.tr))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FcffInputs {
    /// Growth-period cash flows for years `1..=n`.
    pub fcf: Vec<Money>,
    /// Cash flow of year `n + 1`, the base of the terminal perpetuity.
    pub fv: Money,
    pub wacc: f64,
    pub g: f64,
}

fn fcff_raw(inputs: &FcffInputs) -> Result<f64, ValuationError> {
    if inputs.wacc <= inputs.g {
        return Err(ValuationError::GrowthAtOrAboveWacc { wacc: inputs.wacc, g: inputs.g });
    }
    if inputs.fcf.is_empty() {
        return Err(ValuationError::Empty);
    }
    let base = 1.0 + inputs.wacc;
    let growth: f64 = inputs
        .fcf
        .iter()
        .enumerate()
        .map(|(t, cf)| cf.to_f64() / base.powi(t as i32 + 1))
        .sum();
    let n = inputs.fcf.len() as i32;
    let terminal = inputs.fv.to_f64() / (inputs.wacc - inputs.g) / base.powi(n);
    Ok(growth + terminal)
}

/// Present value of the growth-period flows plus the growing perpetuity
/// `fv / (wacc − g)` discounted back `n` years.
pub fn fcff_total_value(inputs: &FcffInputs) -> Result<Money, ValuationError> {
    fcff_raw(inputs).and_then(to_money)
}

fn to_money(v: f64) -> Result<Money, ValuationError> {
    Money::from_f64(v).map_err(|e| ValuationError::Fixture(e.to_string()))
}

pub fn equity_value(total: Money, debt_pv: Money) -> Money {
    total - debt_pv
}

/// `((listed / total) × equity + fees) / listed`, per share.
pub fn ipo_price(listed_shares: u64, total_shares: u64, equity: Money, ipo_fees: Money) -> Result<Money, ValuationError> {
    ipo_price_raw(listed_shares, total_shares, equity.to_f64(), ipo_fees.to_f64()).and_then(to_money)
}

fn ipo_price_raw(listed: u64, total: u64, equity: f64, fees: f64) -> Result<f64, ValuationError> {
    if listed == 0 || listed > total {
        return Err(ValuationError::Shares);
    }
    let listed = listed as f64;
    Ok((listed / total as f64 * equity + fees) / listed)
}

/// How much of a valuation is owed to debt holders.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DebtPv {
    Fixed(Money),
    /// A fraction of the total value, for firms quoted by capital weights.
    ShareOfValue(f64),
}

impl DebtPv {
    fn of(self, total: f64) -> f64 {
        match self {
            DebtPv::Fixed(m) => m.to_f64(),
            DebtPv::ShareOfValue(w) => w * total,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShareParams {
    pub listed_shares: u64,
    pub total_shares: u64,
    pub ipo_fees: Money,
    /// Currency units per unit of the valuation figures.
    pub value_unit: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundColumns {
    pub central: FcffInputs,
    pub upper: FcffInputs,
    pub lower: FcffInputs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PriceBounds {
    pub upper: Money,
    pub lower: Money,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValuationResult {
    pub total_market_value: Money,
    pub equity_value: Money,
    pub price_per_share: Money,
    pub total_bounds: (Money, Money),
    pub price_bounds: PriceBounds,
}

fn per_share(total: f64, share: &ShareParams, debt_pv: DebtPv) -> Result<f64, ValuationError> {
    let equity = total - debt_pv.of(total);
    let fees = share.ipo_fees.to_f64();
    ipo_price_raw(share.listed_shares, share.total_shares, equity * f64::from(share.value_unit), fees)
}

/// Upper and lower per-share prices from the bound columns. With a fixed
/// debt and share split the price ratio equals the valuation ratio.
pub fn ideal_price_bounds(columns: &BoundColumns, share: &ShareParams, debt_pv: DebtPv) -> Result<PriceBounds, ValuationError> {
    Ok(value_columns(columns, share, debt_pv)?.price_bounds)
}

/// Central value, equity and price together with both bounds.
pub fn value_columns(columns: &BoundColumns, share: &ShareParams, debt_pv: DebtPv) -> Result<ValuationResult, ValuationError> {
    let c = fcff_raw(&columns.central)?;
    let u = fcff_raw(&columns.upper)?;
    let l = fcff_raw(&columns.lower)?;
    if !(l <= c && c <= u) {
        return Err(ValuationError::Ordering);
    }
    let central_price = per_share(c, share, debt_pv)?;
    Ok(ValuationResult {
        total_market_value: to_money(c)?,
        equity_value: to_money(c - debt_pv.of(c))?,
        price_per_share: to_money(central_price)?,
        total_bounds: (to_money(l)?, to_money(u)?),
        price_bounds: PriceBounds {
            upper: to_money(per_share(u, share, debt_pv)?)?,
            lower: to_money(per_share(l, share, debt_pv)?)?,
        },
    })
}
