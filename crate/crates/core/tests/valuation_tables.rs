use stockagent_core::valuation::tables::{builtin_tables, Band};
use stockagent_core::valuation::{wacc, WaccInputs};
use stockagent_core::StockId;

// Discounted cash flow written out independently of the library.
fn dcf(fcf: &[f64], fv: f64, w: f64, g: f64) -> f64 {
    let mut pv = 0.0;
    let mut factor = 1.0;
    for f in fcf {
        factor *= 1.0 + w;
        pv += f / factor;
    }
    pv + fv / (w - g) / factor
}

#[test]
fn day_one_cells_within_five_basis_points() {
    let t = builtin_tables();
    for (stock, w, reported) in [(StockId::A, 0.0885, 56379.29), (StockId::B, 0.0879, 45357.95)] {
        let col = t.column(stock, 1, Band::Central).unwrap();
        let fcf: Vec<f64> = [col.fcf1, col.fcf2, col.fcf3, col.fcf4, col.fcf5].iter().map(|m| m.to_f64()).collect();
        let oracle = dcf(&fcf, col.fv.to_f64(), w, col.g);
        assert!(((oracle - reported) / reported).abs() < 5e-4, "{stock} oracle {oracle}");
        let rep = t
            .reproduce_values()
            .unwrap()
            .into_iter()
            .find(|r| r.company == stock && r.day == 1 && r.band == Band::Central)
            .unwrap();
        assert!((rep.computed - oracle).abs() < 1e-6);
        assert!(rep.relative_error().abs() < 5e-4);
    }
}

#[test]
fn every_central_cell_within_half_percent() {
    let reps = builtin_tables().reproduce_values().unwrap();
    let central: Vec<_> = reps.iter().filter(|r| r.band == Band::Central).collect();
    assert_eq!(central.len(), 10);
    for r in central {
        assert!(r.relative_error().abs() < 5e-3, "{} day {}: {:.4}%", r.company, r.day, 100.0 * r.relative_error());
    }
}

#[test]
fn every_bound_cell_reproduces() {
    let t = builtin_tables();
    for r in t.reproduce_values().unwrap() {
        if r.company == StockId::A && r.day == 144 && r.band == Band::Upper {
            // The published value of this cell implies a discount rate of
            // 8.775% while its published per-share price implies 8.80%. The
            // fixture keeps the price-consistent rate; the value still
            // reproduces at the other one.
            let col = t.column(StockId::A, 144, Band::Upper).unwrap();
            let fcf: Vec<f64> = [col.fcf1, col.fcf2, col.fcf3, col.fcf4, col.fcf5].iter().map(|m| m.to_f64()).collect();
            let at_value_rate = dcf(&fcf, col.fv.to_f64(), 0.08775, col.g);
            assert!((at_value_rate / r.reported.to_f64() - 1.0).abs() < 5e-4);
            continue;
        }
        assert!(r.relative_error().abs() < 5e-3, "{} day {} {:?}", r.company, r.day, r.band);
    }
}

#[test]
fn printed_waccs() {
    let a = wacc(&WaccInputs { ke: 0.09, kd: 0.06, equity_weight: 0.95, debt_weight: 0.05 }).unwrap();
    let b = wacc(&WaccInputs { ke: 0.09, kd: 0.06, equity_weight: 0.93, debt_weight: 0.07 }).unwrap();
    assert!((a * 100.0 - 8.85).abs() < 0.005);
    assert!((b * 100.0 - 8.79).abs() < 0.005);
}

#[test]
fn price_ratio_tracks_value_ratio() {
    let t = builtin_tables();
    let prices = t.reproduce_prices().unwrap();
    for (stock, pu, pl, vu, vl) in [
        (StockId::A, 27.33f64, 26.24, 57545.93, 55233.23),
        (StockId::B, 44.16, 40.29, 47480.03, 43317.66),
    ] {
        let p = prices.iter().find(|p| p.company == stock && p.day == 1).unwrap();
        assert!((p.price_ratio / (vu / vl) - 1.0).abs() < 1e-3);
        assert!(((pu / pl) / (vu / vl) - 1.0).abs() < 1e-3, "published ratios for {stock}");
        assert!((p.value_ratio - vu / vl).abs() < 1e-12);
    }
}

#[test]
fn ideal_prices_match_published_rows() {
    for p in builtin_tables().reproduce_prices().unwrap() {
        assert!((p.upper - p.reported_upper.to_f64()).abs() < 0.01, "{} day {} upper {}", p.company, p.day, p.upper);
        assert!((p.lower - p.reported_lower.to_f64()).abs() < 0.01, "{} day {} lower {}", p.company, p.day, p.lower);
    }
}
