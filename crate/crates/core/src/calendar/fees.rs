use serde::{Deserialize, Serialize};

use super::CalendarError;
use crate::money::{Money, Rate};

/// Per-share purchase fee clamped to `[min_fee, max_fee]` per purchase.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeeSchedule {
    pub per_share: Rate,
    pub min_fee: Money,
    pub max_fee: Money,
}

impl Default for FeeSchedule {
    fn default() -> Self {
        FeeSchedule {
            per_share: Rate::from_units(500_000),
            min_fee: Money::from_units(1),
            max_fee: Money::from_cents(595),
        }
    }
}

pub fn transaction_fee(schedule: &FeeSchedule, shares: u64) -> Result<Money, CalendarError> {
    if shares < 1 {
        return Err(CalendarError::ZeroShares);
    }
    Ok(schedule
        .per_share
        .per_unit_total(shares)
        .clamp(schedule.min_fee, schedule.max_fee))
}

/// Fee owed for a fill of `quantity` shares when the same purchase order has
/// already filled `filled_before` shares. The fills of one order together
/// pay exactly `transaction_fee(total filled)`.
pub fn incremental_fee(schedule: &FeeSchedule, filled_before: u64, quantity: u64) -> Money {
    let after = transaction_fee(schedule, filled_before + quantity).unwrap_or(Money::ZERO);
    let before = if filled_before == 0 {
        Money::ZERO
    } else {
        transaction_fee(schedule, filled_before).unwrap_or(Money::ZERO)
    };
    after - before
}
