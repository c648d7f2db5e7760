//! Lenient extraction of the JSON answers models return.
//!
//! Models wrap JSON in prose or code fences and copy the prompt's example
//! literally, bare keys included. The extractor takes the first balanced
//! object, quotes bare keys when strict parsing fails, and the schema checks
//! then produce a short reason suitable for the retry prompt.

use serde_json::{Map, Value};
use stockagent_core::agents::{ActionDecision, LoanDecision, NextDayEstimate};
use stockagent_core::{Money, StockId};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct ParseFailure(pub String);

fn fail<T>(reason: impl Into<String>) -> Result<T, ParseFailure> {
    Err(ParseFailure(reason.into()))
}

/// Byte range of the first balanced `{...}` in `text`, skipping braces
/// inside string literals.
fn first_object(text: &str) -> Option<&str> {
    let start = text.find('{')?;
    let (mut depth, mut in_str, mut escaped) = (0usize, false, false);
    for (i, c) in text[start..].char_indices() {
        if in_str {
            match c {
                _ if escaped => escaped = false,
                '\\' => escaped = true,
                '"' => in_str = false,
                _ => {}
            }
            continue;
        }
        match c {
            '"' => in_str = true,
            '{' => depth += 1,
            '}' => {
                depth -= 1;
                if depth == 0 {
                    return Some(&text[start..start + i + 1]);
                }
            }
            _ => {}
        }
    }
    None
}

/// Wraps identifier keys that directly follow `{` or `,` in quotes.
fn quote_bare_keys(obj: &str) -> String {
    let mut out = String::with_capacity(obj.len() + 16);
    let mut chars = obj.chars().peekable();
    let mut in_str = false;
    let mut expect_key = false;
    while let Some(c) = chars.next() {
        if in_str {
            out.push(c);
            if c == '\\' {
                if let Some(n) = chars.next() {
                    out.push(n);
                }
            } else if c == '"' {
                in_str = false;
            }
            continue;
        }
        match c {
            '"' => {
                in_str = true;
                expect_key = false;
                out.push(c);
            }
            '{' | ',' => {
                expect_key = true;
                out.push(c);
            }
            c if expect_key && (c.is_ascii_alphabetic() || c == '_') => {
                let mut key = String::from(c);
                while let Some(&n) = chars.peek() {
                    if n.is_ascii_alphanumeric() || n == '_' {
                        key.push(n);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push('"');
                out.push_str(&key);
                out.push('"');
                expect_key = false;
            }
            c if c.is_whitespace() => out.push(c),
            _ => {
                expect_key = false;
                out.push(c);
            }
        }
    }
    out
}

/// The first JSON object in `text`.
pub fn extract_object(text: &str) -> Result<Map<String, Value>, ParseFailure> {
    let Some(raw) = first_object(text) else {
        return fail("no JSON object found in the answer");
    };
    let value = serde_json::from_str::<Value>(raw)
        .or_else(|_| serde_json::from_str::<Value>(&quote_bare_keys(raw)))
        .map_err(|e| ParseFailure(format!("the answer is not valid JSON ({e})")))?;
    match value {
        Value::Object(map) => Ok(map),
        _ => fail("the answer is not a JSON object"),
    }
}

fn field<'a>(map: &'a Map<String, Value>, key: &str) -> Result<&'a Value, ParseFailure> {
    map.get(key).ok_or_else(|| ParseFailure(format!("missing field \"{key}\"")))
}

fn text_field(map: &Map<String, Value>, key: &str) -> Result<String, ParseFailure> {
    match field(map, key)? {
        Value::String(s) => Ok(s.trim().to_ascii_lowercase()),
        other => fail(format!("\"{key}\" must be a string, got {other}")),
    }
}

fn number(value: &Value, key: &str) -> Result<f64, ParseFailure> {
    let n = match value {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => s.trim().parse::<f64>().ok(),
        _ => None,
    };
    match n {
        Some(x) if x.is_finite() => Ok(x),
        _ => fail(format!("\"{key}\" must be a number, got {value}")),
    }
}

fn integer(value: &Value, key: &str) -> Result<i64, ParseFailure> {
    if let Some(i) = value.as_i64() {
        return Ok(i);
    }
    let x = number(value, key)?;
    if x.fract() != 0.0 || x.abs() > 1e15 {
        return fail(format!("\"{key}\" must be an integer, got {value}"));
    }
    Ok(x as i64)
}

fn money(value: &Value, key: &str) -> Result<Money, ParseFailure> {
    if let Value::String(s) = value {
        if let Ok(m) = s.trim().parse::<Money>() {
            return Ok(m);
        }
    }
    Money::from_f64(number(value, key)?).map_err(|_| ParseFailure(format!("\"{key}\" is out of range")))
}

fn stock(map: &Map<String, Value>) -> Result<StockId, ParseFailure> {
    match text_field(map, "stock")?.as_str() {
        "a" => Ok(StockId::A),
        "b" => Ok(StockId::B),
        other => fail(format!("unknown stock \"{}\", use \"A\" or \"B\"", other.to_ascii_uppercase())),
    }
}

/// A trade decision. The amount keeps its sign so the secretary can name
/// the problem; prices are rounded to cents.
pub fn parse_action(text: &str) -> Result<ActionDecision, ParseFailure> {
    let map = extract_object(text)?;
    let kind = text_field(&map, "action_type")?;
    if kind == "no" {
        return Ok(ActionDecision::No);
    }
    if kind != "buy" && kind != "sell" {
        return fail(format!("unknown action_type \"{kind}\", use \"buy\", \"sell\" or \"no\""));
    }
    let stock = stock(&map)?;
    let amount = integer(field(&map, "amount")?, "amount")?;
    let price = money(field(&map, "price")?, "price")?;
    Ok(if kind == "buy" {
        ActionDecision::Buy { stock, amount, price }
    } else {
        ActionDecision::Sell { stock, amount, price }
    })
}

fn yes_no(map: &Map<String, Value>, key: &str) -> Result<bool, ParseFailure> {
    match field(map, key)? {
        Value::Bool(b) => Ok(*b),
        Value::String(s) => match s.trim().to_ascii_lowercase().as_str() {
            "yes" => Ok(true),
            "no" => Ok(false),
            other => fail(format!("\"{key}\" must be \"yes\" or \"no\", got \"{other}\"")),
        },
        other => fail(format!("\"{key}\" must be \"yes\" or \"no\", got {other}")),
    }
}

pub fn parse_loan(text: &str) -> Result<LoanDecision, ParseFailure> {
    let map = extract_object(text)?;
    if !yes_no(&map, "loan")? {
        return Ok(LoanDecision::none());
    }
    let term = integer(field(&map, "loan_type")?, "loan_type")?;
    if term < 0 {
        return fail(format!("unknown loan_type {term}"));
    }
    Ok(LoanDecision {
        take_loan: true,
        term_index: term as usize,
        amount: money(field(&map, "amount")?, "amount")?,
    })
}

pub fn parse_estimate(text: &str) -> Result<NextDayEstimate, ParseFailure> {
    let map = extract_object(text)?;
    Ok(NextDayEstimate {
        buy_a: yes_no(&map, "buy_A")?,
        buy_b: yes_no(&map, "buy_B")?,
        sell_a: yes_no(&map, "sell_A")?,
        sell_b: yes_no(&map, "sell_B")?,
        loan: yes_no(&map, "loan")?,
    })
}

/// A forum post: the answer with surrounding whitespace and quotes removed.
pub fn parse_post(text: &str) -> Result<String, ParseFailure> {
    let t = text.trim().trim_matches('"').trim();
    if t.is_empty() {
        return fail("the post is empty");
    }
    Ok(t.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(s: &str) -> Money {
        s.parse().unwrap()
    }

    #[test]
    fn prompt_examples() {
        assert_eq!(
            parse_action(r#"{"action_type": "buy", "stock": "A", "amount": 100, "price": 30}"#).unwrap(),
            ActionDecision::Buy { stock: StockId::A, amount: 100, price: m("30") }
        );
        assert_eq!(parse_action(r#"{"action_type" : "no"}"#).unwrap(), ActionDecision::No);
        assert_eq!(
            parse_action(r#"{"action_type":"sell", "stock": "B", amount: 100, price: 30}"#).unwrap(),
            ActionDecision::Sell { stock: StockId::B, amount: 100, price: m("30") }
        );
    }

    #[test]
    fn unknown_stock() {
        let e = parse_action(r#"{"action_type": "buy", "stock": "C", "amount": 1, "price": 1}"#).unwrap_err();
        assert!(e.0.contains("unknown stock"), "{e}");
    }

    #[test]
    fn prose_and_fences() {
        let text = "Sure! Here is my decision:\n```json\n{\"action_type\": \"sell\", \"stock\": \"b\", \"amount\": \"20\", \"price\": 41.237}\n```\nGood luck {not json}";
        assert_eq!(
            parse_action(text).unwrap(),
            ActionDecision::Sell { stock: StockId::B, amount: 20, price: m("41.24") }
        );
    }

    #[test]
    fn braces_inside_strings() {
        let text = r#"{"action_type": "no", "note": "a } inside"} trailing"#;
        assert_eq!(parse_action(text).unwrap(), ActionDecision::No);
    }

    #[test]
    fn failure_reasons() {
        let cases = [
            ("nothing here", "no JSON object"),
            (r#"{"action_type": "hold"}"#, "unknown action_type"),
            (r#"{"action_type": "buy", "stock": "A", "price": 3}"#, "missing field \"amount\""),
            (r#"{"action_type": "buy", "stock": "A", "amount": 1.5, "price": 3}"#, "must be an integer"),
            (r#"{"action_type": "buy", "stock": "A", "amount": 1, "price": "cheap"}"#, "must be a number"),
            ("{action_type: buy}", "not valid JSON"),
        ];
        for (text, want) in cases {
            let e = parse_action(text).unwrap_err();
            assert!(e.0.contains(want), "{text}: {e}");
        }
    }

    #[test]
    fn negative_amount_survives_parsing() {
        let d = parse_action(r#"{"action_type": "buy", "stock": "A", "amount": -5, "price": 3}"#).unwrap();
        assert_eq!(d.terms().unwrap().1, -5);
    }

    #[test]
    fn loans() {
        assert_eq!(parse_loan(r#"{"loan": "no"}"#).unwrap(), LoanDecision::none());
        assert_eq!(
            parse_loan(r#"{"loan": "yes", "loan_type": 2, "amount": 1000}"#).unwrap(),
            LoanDecision { take_loan: true, term_index: 2, amount: m("1000") }
        );
        assert!(parse_loan(r#"{"loan": "maybe"}"#).is_err());
        assert!(parse_loan(r#"{"loan": "yes", "amount": 5}"#).unwrap_err().0.contains("loan_type"));
    }

    #[test]
    fn estimates() {
        let e = parse_estimate(r#"{"buy_A": "yes", "buy_B": "no", "sell_A": "yes", "sell_B": "no", "loan": "yes"}"#).unwrap();
        assert!(e.buy_a && !e.buy_b && e.sell_a && !e.sell_b && e.loan);
        assert!(parse_estimate(r#"{"buy_A": "yes"}"#).is_err());
    }

    #[test]
    fn posts() {
        assert_eq!(parse_post("  \"Buy the dip on B.\" \n").unwrap(), "Buy the dip on B.");
        assert!(parse_post("  ").is_err());
    }
}
