//! The prompt templates, one text file each.

use serde::{Deserialize, Serialize};

use crate::render::{render, RenderError, Vars};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemplateName {
    Background,
    LastdayForumAndStock,
    LoanType,
    DecideIfLoan,
    LoanRetry,
    DecideBuyStock,
    BuyStockRetry,
    FirstDayFinancialReport,
    SeasonalFinancialReport,
    PostMessage,
    NextDayEstimate,
}

impl TemplateName {
    pub const ALL: [TemplateName; 11] = [
        TemplateName::Background,
        TemplateName::LastdayForumAndStock,
        TemplateName::LoanType,
        TemplateName::DecideIfLoan,
        TemplateName::LoanRetry,
        TemplateName::DecideBuyStock,
        TemplateName::BuyStockRetry,
        TemplateName::FirstDayFinancialReport,
        TemplateName::SeasonalFinancialReport,
        TemplateName::PostMessage,
        TemplateName::NextDayEstimate,
    ];

    pub fn body(self) -> &'static str {
        let raw = match self {
            TemplateName::Background => include_str!("../templates/background.txt"),
            TemplateName::LastdayForumAndStock => include_str!("../templates/lastday_forum_and_stock.txt"),
            TemplateName::LoanType => include_str!("../templates/loan_type.txt"),
            TemplateName::DecideIfLoan => include_str!("../templates/decide_if_loan.txt"),
            TemplateName::LoanRetry => include_str!("../templates/loan_retry.txt"),
            TemplateName::DecideBuyStock => include_str!("../templates/decide_buy_stock.txt"),
            TemplateName::BuyStockRetry => include_str!("../templates/buy_stock_retry.txt"),
            TemplateName::FirstDayFinancialReport => include_str!("../templates/first_day_financial_report.txt"),
            TemplateName::SeasonalFinancialReport => include_str!("../templates/seasonal_financial_report.txt"),
            TemplateName::PostMessage => include_str!("../templates/post_message.txt"),
            TemplateName::NextDayEstimate => include_str!("../templates/next_day_estimate.txt"),
        };
        raw.trim_end()
    }

    pub fn render(self, vars: &Vars) -> Result<String, RenderError> {
        render(self.body(), vars)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::render::placeholders;

    fn names(t: TemplateName) -> Vec<String> {
        placeholders(t.body()).unwrap().into_iter().collect()
    }

    #[test]
    fn placeholder_sets() {
        use TemplateName::*;
        let expect: &[(TemplateName, &[&str])] = &[
            (Background, &[]),
            (LastdayForumAndStock, &["lastday_forum_message", "stock_a_price", "stock_b_price"]),
            (LoanType, &["loan_rate1", "loan_rate2", "loan_rate3", "loan_term1", "loan_term2", "loan_term3"]),
            (DecideIfLoan, &["cash", "date", "debt", "loan_types", "max_loan", "stock_a", "stock_a_price", "stock_b", "stock_b_price"]),
            (LoanRetry, &["fail_response"]),
            (
                DecideBuyStock,
                &["cash", "date", "stock_a", "stock_a_deals", "stock_a_price", "stock_b", "stock_b_deals", "stock_b_price", "time"],
            ),
            (BuyStockRetry, &["fail_response"]),
            (FirstDayFinancialReport, &[]),
            (SeasonalFinancialReport, &["stock_a_report", "stock_b_report"]),
            (PostMessage, &[]),
            (NextDayEstimate, &[]),
        ];
        assert_eq!(expect.len(), TemplateName::ALL.len());
        for (t, want) in expect {
            assert_eq!(names(*t), *want, "{t:?}");
        }
    }

    #[test]
    fn schema_examples_unescape() {
        let out = TemplateName::DecideBuyStock
            .render(
                &[
                    ("time", "2"),
                    ("date", "3"),
                    ("stock_a_price", "30.00"),
                    ("stock_b_price", "40.00"),
                    ("stock_a_deals", "none"),
                    ("stock_b_deals", "none"),
                    ("stock_a", "0"),
                    ("stock_b", "0"),
                    ("cash", "1000.00"),
                ]
                .into_iter()
                .map(|(k, v)| (k, v.to_string()))
                .collect(),
            )
            .unwrap();
        assert!(out.contains("the 2 trading session on the 3 day"));
        assert!(out.contains(r#"{"action_type" : "no"}"#));
        assert!(!out.contains("{{"));
    }

    #[test]
    fn every_template_renders_without_braces_left() {
        for t in TemplateName::ALL {
            let vars: Vars = placeholders(t.body())
                .unwrap()
                .into_iter()
                .map(|n| (&*n.leak(), "x".to_string()))
                .collect();
            let out = t.render(&vars).unwrap();
            assert!(!out.contains("{{") && !out.contains("}}"), "{t:?}");
            for n in placeholders(t.body()).unwrap() {
                assert!(!out.contains(&format!("{{{n}}}")), "{t:?} left {n}");
            }
        }
    }
}
