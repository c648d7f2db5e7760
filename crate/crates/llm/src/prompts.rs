//! Prompt text for each decision, assembled from a decision context.

use stockagent_core::agents::DecisionContext;
use stockagent_core::calendar::NewsKind;
use stockagent_core::exchange::BookSummary;
use stockagent_core::{Side, StockId};

use crate::render::{RenderError, Vars};
use crate::templates::TemplateName;

fn vars<const N: usize>(pairs: [(&'static str, String); N]) -> Vars {
    pairs.into_iter().collect()
}

pub fn background() -> &'static str {
    TemplateName::Background.body()
}

/// Open orders of one stock, best price first.
pub fn format_book(book: &BookSummary) -> String {
    let side = |levels: &[(stockagent_core::Money, u64)]| {
        if levels.is_empty() {
            "none".to_string()
        } else {
            levels.iter().map(|(p, q)| format!("{q} shares at {p}")).collect::<Vec<_>>().join(", ")
        }
    };
    if book.bids.is_empty() && book.asks.is_empty() {
        return "no open orders".into();
    }
    format!("buy orders: {}; sell orders: {}", side(&book.bids), side(&book.asks))
}

/// Reports, market news and yesterday's close with the forum, as far as
/// the context's ablations leave them in.
pub fn briefing(ctx: &DecisionContext) -> Result<String, RenderError> {
    let mut parts = Vec::new();
    let reports: Vec<_> = ctx.news.iter().filter(|n| n.kind == NewsKind::Report).collect();
    if !reports.is_empty() {
        if ctx.day == 1 {
            parts.push(TemplateName::FirstDayFinancialReport.render(&Vars::new())?);
        } else {
            let text = |s: StockId| {
                reports
                    .iter()
                    .find(|n| n.stock == Some(s))
                    .map_or_else(|| "no report this quarter".to_string(), |n| n.text.clone())
            };
            parts.push(TemplateName::SeasonalFinancialReport.render(&vars([
                ("stock_a_report", text(StockId::A)),
                ("stock_b_report", text(StockId::B)),
            ]))?);
        }
    }
    for n in ctx.news.iter().filter(|n| n.kind != NewsKind::Report) {
        parts.push(format!("Market news: {}", n.text));
    }
    let forum = ctx.forum.iter().map(|p| format!("\"{p}\"")).collect::<Vec<_>>().join("; ");
    parts.push(TemplateName::LastdayForumAndStock.render(&vars([
        ("stock_a_price", ctx.prev_close.a.to_string()),
        ("stock_b_price", ctx.prev_close.b.to_string()),
        ("lastday_forum_message", forum),
    ]))?);
    Ok(parts.join("\n\n"))
}

pub fn trade_prompt(ctx: &DecisionContext) -> Result<String, RenderError> {
    let body = TemplateName::DecideBuyStock.render(&vars([
        ("time", ctx.session.to_string()),
        ("date", ctx.day.to_string()),
        ("stock_a_price", ctx.prices.a.to_string()),
        ("stock_b_price", ctx.prices.b.to_string()),
        ("stock_a_deals", format_book(&ctx.book.a)),
        ("stock_b_deals", format_book(&ctx.book.b)),
        ("stock_a", ctx.agent.holdings.a.to_string()),
        ("stock_b", ctx.agent.holdings.b.to_string()),
        ("cash", ctx.agent.cash.to_string()),
    ]))?;
    Ok(format!("{}\n\n{body}", briefing(ctx)?))
}

pub fn trade_retry(reason: &str) -> String {
    TemplateName::BuyStockRetry
        .render(&vars([("fail_response", reason.to_string())]))
        .expect("retry template has one placeholder")
}

fn term_label(months: u32) -> String {
    if months == 1 {
        "1 month".into()
    } else {
        format!("{months} months")
    }
}

pub fn loan_types(ctx: &DecisionContext) -> Result<String, RenderError> {
    let mut v = Vars::new();
    const TERMS: [&str; 3] = ["loan_term1", "loan_term2", "loan_term3"];
    const RATES: [&str; 3] = ["loan_rate1", "loan_rate2", "loan_rate3"];
    for (i, t) in ctx.loan_terms.iter().take(3).enumerate() {
        v.insert(TERMS[i], term_label(t.term_months));
        v.insert(RATES[i], t.annual_rate.to_string());
    }
    TemplateName::LoanType.render(&v)
}

pub fn loan_prompt(ctx: &DecisionContext) -> Result<String, RenderError> {
    let body = TemplateName::DecideIfLoan.render(&vars([
        ("date", ctx.day.to_string()),
        ("stock_a_price", ctx.prices.a.to_string()),
        ("stock_b_price", ctx.prices.b.to_string()),
        ("stock_a", ctx.agent.holdings.a.to_string()),
        ("stock_b", ctx.agent.holdings.b.to_string()),
        ("cash", ctx.agent.cash.to_string()),
        ("debt", ctx.agent.outstanding_debt().to_string()),
        ("max_loan", ctx.max_new_loan.to_string()),
        ("loan_types", loan_types(ctx)?),
    ]))?;
    Ok(format!("{}\n\n{body}", briefing(ctx)?))
}

pub fn loan_retry(reason: &str) -> String {
    TemplateName::LoanRetry
        .render(&vars([("fail_response", reason.to_string())]))
        .expect("retry template has one placeholder")
}

/// What happened to the agent today, for the end-of-day prompts.
pub fn day_summary(ctx: &DecisionContext) -> String {
    let fills = if ctx.own_fills.is_empty() {
        "made no trades".to_string()
    } else {
        ctx.own_fills
            .iter()
            .map(|f| {
                let verb = if f.side == Side::Buy { "bought" } else { "sold" };
                format!("{verb} {} shares of stock {} at {} in session {}", f.quantity, f.stock, f.price, f.session)
            })
            .collect::<Vec<_>>()
            .join(", ")
    };
    format!(
        "The trading of day {} is closed. Company A closed at {} and Company B at {}. Today you {fills}. You now hold {} shares of Company A, {} shares of Company B and {} yuan in cash.",
        ctx.day, ctx.prices.a, ctx.prices.b, ctx.agent.holdings.a, ctx.agent.holdings.b, ctx.agent.cash
    )
}

pub fn estimate_prompt(ctx: &DecisionContext) -> Result<String, RenderError> {
    Ok(format!("{}\n\n{}\n\n{}", briefing(ctx)?, day_summary(ctx), TemplateName::NextDayEstimate.render(&Vars::new())?))
}

pub fn estimate_retry(reason: &str) -> String {
    format!(
        "The following questions appeared in the format you last answered: {reason}.\n{}\nPlease answer again.",
        TemplateName::NextDayEstimate.render(&Vars::new()).expect("no placeholders")
    )
}

pub fn post_prompt(ctx: &DecisionContext) -> Result<String, RenderError> {
    Ok(format!("{}\n\n{}\n\n{}", briefing(ctx)?, day_summary(ctx), TemplateName::PostMessage.render(&Vars::new())?))
}

pub fn post_retry(reason: &str) -> String {
    format!("The following questions appeared in your last answer: {reason}. {}", TemplateName::PostMessage.body())
}

pub const FORUM_SENTENCE: &str = "Posts by other traders on the forum";
