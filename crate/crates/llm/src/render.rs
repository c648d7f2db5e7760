//! Placeholder substitution for prompt templates.
//!
//! `{name}` is replaced by the value of `name`. `{{` and `}}` are literal
//! braces. `{#name}...{/name}` is an optional section: it renders only
//! when `name` has a non-empty value, so an ablated field leaves no dangling
//! sentence behind.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("no value for placeholder `{0}`")]
    Missing(String),
    #[error("malformed template near byte {0}")]
    Malformed(usize),
    #[error("section `{0}` is not closed")]
    Unclosed(String),
}

pub type Vars = BTreeMap<&'static str, String>;

#[derive(Debug, PartialEq, Eq)]
enum Token<'a> {
    Text(&'a str),
    Brace(char),
    Field(&'a str),
    Open(&'a str),
    Close(&'a str),
}

fn tokenize(body: &str) -> Result<Vec<Token<'_>>, RenderError> {
    let mut out = Vec::new();
    let bytes = body.as_bytes();
    let (mut i, mut start) = (0, 0);
    while i < bytes.len() {
        match bytes[i] {
            b'{' | b'}' if bytes.get(i + 1) == Some(&bytes[i]) => {
                out.push(Token::Text(&body[start..i]));
                out.push(Token::Brace(bytes[i] as char));
                i += 2;
                start = i;
            }
            b'{' => {
                out.push(Token::Text(&body[start..i]));
                let end = body[i..].find('}').ok_or(RenderError::Malformed(i))? + i;
                let inner = &body[i + 1..end];
                let (tok, name) = match inner.as_bytes().first() {
                    Some(b'#') => (Token::Open(&inner[1..]), &inner[1..]),
                    Some(b'/') => (Token::Close(&inner[1..]), &inner[1..]),
                    _ => (Token::Field(inner), inner),
                };
                if name.is_empty() || !name.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_') {
                    return Err(RenderError::Malformed(i));
                }
                out.push(tok);
                i = end + 1;
                start = i;
            }
            b'}' => return Err(RenderError::Malformed(i)),
            _ => i += 1,
        }
    }
    out.push(Token::Text(&body[start..]));
    Ok(out)
}

/// Every placeholder and section name in `body`.
pub fn placeholders(body: &str) -> Result<BTreeSet<String>, RenderError> {
    Ok(tokenize(body)?
        .into_iter()
        .filter_map(|t| match t {
            Token::Field(n) | Token::Open(n) => Some(n.to_string()),
            _ => None,
        })
        .collect())
}

pub fn render(body: &str, vars: &Vars) -> Result<String, RenderError> {
    let mut out = String::with_capacity(body.len() + 256);
    // open sections with whether each one renders
    let mut open: Vec<(&str, bool)> = Vec::new();
    for tok in tokenize(body)? {
        let active = open.last().is_none_or(|&(_, on)| on);
        match tok {
            Token::Open(name) => {
                let on = active && !vars.get(name).ok_or_else(|| RenderError::Missing(name.into()))?.is_empty();
                open.push((name, on));
            }
            Token::Close(name) => {
                if open.pop().map(|(n, _)| n) != Some(name) {
                    return Err(RenderError::Unclosed(name.into()));
                }
            }
            _ if !active => {}
            Token::Text(t) => out.push_str(t),
            Token::Brace(c) => out.push(c),
            Token::Field(name) => out.push_str(vars.get(name).ok_or_else(|| RenderError::Missing(name.into()))?),
        }
    }
    if let Some((name, _)) = open.pop() {
        return Err(RenderError::Unclosed(name.into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars(pairs: &[(&'static str, &str)]) -> Vars {
        pairs.iter().map(|(k, v)| (*k, v.to_string())).collect()
    }

    #[test]
    fn substitutes_and_unescapes() {
        let out = render(r#"price {p}: {{"a": 1}}"#, &vars(&[("p", "30.00")])).unwrap();
        assert_eq!(out, r#"price 30.00: {"a": 1}"#);
    }

    #[test]
    fn missing_value_is_an_error() {
        assert_eq!(render("x {p}", &Vars::new()), Err(RenderError::Missing("p".into())));
    }

    #[test]
    fn sections_follow_their_value() {
        let body = "before.{#f} Forum: {f}.{/f} after";
        assert_eq!(render(body, &vars(&[("f", "hi")])).unwrap(), "before. Forum: hi. after");
        assert_eq!(render(body, &vars(&[("f", "")])).unwrap(), "before. after");
    }

    #[test]
    fn skipped_section_may_reference_absent_values() {
        let body = "{#f}{f} and {g}{/f}!";
        assert_eq!(render(body, &vars(&[("f", "")])).unwrap(), "!");
    }

    #[test]
    fn nested_sections() {
        let body = "{#a}A{#b}B{/b}a{/a}.";
        assert_eq!(render(body, &vars(&[("a", "1"), ("b", "")])).unwrap(), "Aa.");
        assert_eq!(render(body, &vars(&[("a", ""), ("b", "1")])).unwrap(), ".");
        assert_eq!(render(body, &vars(&[("a", "1"), ("b", "1")])).unwrap(), "ABa.");
    }

    #[test]
    fn malformed_templates() {
        assert!(matches!(render("a } b", &Vars::new()), Err(RenderError::Malformed(_))));
        assert!(matches!(render("a {b", &Vars::new()), Err(RenderError::Malformed(_))));
        assert!(matches!(render("{#a}x", &vars(&[("a", "1")])), Err(RenderError::Unclosed(_))));
    }

    #[test]
    fn placeholder_listing() {
        let names = placeholders("{a} {{b}} {#c}{d}{/c}").unwrap();
        assert_eq!(names.into_iter().collect::<Vec<_>>(), ["a", "c", "d"]);
    }
}
