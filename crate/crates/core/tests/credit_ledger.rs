use std::collections::BTreeMap;

use stockagent_core::calendar::{default_loan_terms, interest_due, Calendar, LoanContract};
use stockagent_core::rng::RngStream;
use stockagent_core::Money;

// Per-loan accumulator: each loan pays its rounded monthly amount on every
// multiple of 22 strictly after issue and no later than maturity.
fn accumulated(loans: &[LoanContract], num_days: u32) -> i64 {
    loans
        .iter()
        .map(|l| {
            let monthly = (l.principal.cents() as i128 * l.rate_at_issuance.units() as i128 * 2 + 12 * 100_000_000)
                / (2 * 12 * 100_000_000);
            let months = (1..=num_days).filter(|d| d % 22 == 0 && *d > l.start_day && *d <= l.maturity_day).count();
            monthly as i64 * months as i64
        })
        .sum()
}

#[test]
fn total_interest_matches_accumulator() {
    let cal = Calendar::new(264, &[]);
    let terms = default_loan_terms();
    for seed in 0..20u64 {
        let mut rng = RngStream::derive(seed, &[99]);
        let loans: Vec<LoanContract> = (0..40)
            .map(|i| {
                let principal = Money::from_cents(rng.between(100_000, 500_000_000));
                let term = terms[rng.below(3) as usize];
                let start = rng.below(200) as u32;
                LoanContract::issue(i, (i % 7) as u32, principal, term, start)
            })
            .collect();
        let mut per_agent: BTreeMap<u32, Money> = BTreeMap::new();
        for &d in cal.month_end_days() {
            for (agent, due) in interest_due(&cal, &loans, d).unwrap() {
                *per_agent.entry(agent).or_default() += due;
            }
        }
        let total: i64 = per_agent.values().map(|m| m.cents()).sum();
        assert_eq!(total, accumulated(&loans, 264), "seed {seed}");
    }
}
