//! Grammar text format.
//!
//! ```text
//! # comment
//! start: S
//! S -> a S b | a b ;
//! A -> call_[i] A ret_[i] | eps
//! ```
//!
//! `X?` is an optional symbol and expands into two alternatives. A token is a
//! non-terminal iff it occurs as a left-hand side somewhere in the file.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::{Cfg, GrammarError, Production, Symbol};

#[derive(Clone, Debug)]
struct Token {
    base: String,
    var: Option<String>,
    optional: bool,
}

impl Token {
    fn key(&self) -> (&str, Option<&str>) {
        (&self.base, self.var.as_deref())
    }
}

struct RawRule {
    lhs: Token,
    alternatives: Vec<Vec<Token>>,
}

fn syntax(line: usize, message: impl Into<String>) -> GrammarError {
    GrammarError::Syntax { line, message: message.into() }
}

fn parse_token(raw: &str, line: usize) -> Result<Token, GrammarError> {
    let (body, optional) = match raw.strip_suffix('?') {
        Some(b) => (b, true),
        None => (raw, false),
    };
    if body.is_empty() || body.contains('?') {
        return Err(syntax(line, format!("malformed symbol `{raw}`")));
    }
    if body == "->" {
        return Err(syntax(line, "unexpected `->`"));
    }
    let (base, var) = match body.find("_[") {
        Some(pos) => {
            let rest = &body[pos + 2..];
            let var = rest
                .strip_suffix(']')
                .ok_or_else(|| syntax(line, format!("unterminated index in `{raw}`")))?;
            if var.is_empty() || !var.chars().all(|c| c.is_alphanumeric() || c == '_') {
                return Err(syntax(line, format!("bad index variable in `{raw}`")));
            }
            (&body[..pos], Some(var.to_string()))
        }
        None => (body, None),
    };
    if base.is_empty() || base.contains(['[', ']']) {
        return Err(syntax(line, format!("malformed symbol `{raw}`")));
    }
    Ok(Token { base: base.to_string(), var, optional })
}

/// Expands optional tokens into every with/without combination.
fn expand_optional(alt: &[Token]) -> Vec<Vec<Token>> {
    let mut out: Vec<Vec<Token>> = vec![Vec::new()];
    for tok in alt {
        let mut plain = tok.clone();
        plain.optional = false;
        if tok.optional {
            let mut next = Vec::with_capacity(out.len() * 2);
            for prefix in &out {
                let mut with = prefix.clone();
                with.push(plain.clone());
                next.push(with);
                next.push(prefix.clone());
            }
            out = next;
        } else {
            for prefix in &mut out {
                prefix.push(plain.clone());
            }
        }
    }
    out
}

pub fn parse_grammar(text: &str) -> Result<Cfg, GrammarError> {
    let mut rules: Vec<RawRule> = Vec::new();
    let mut start: Option<(Token, usize)> = None;

    for (n, raw_line) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("start:") {
            if start.is_some() {
                return Err(syntax(line_no, "duplicate start directive"));
            }
            let mut toks = rest.split_whitespace();
            let name = toks.next().ok_or_else(|| syntax(line_no, "start directive without symbol"))?;
            if toks.next().is_some() {
                return Err(syntax(line_no, "start directive takes one symbol"));
            }
            let tok = parse_token(name, line_no)?;
            if tok.optional {
                return Err(syntax(line_no, "start symbol cannot be optional"));
            }
            start = Some((tok, line_no));
            continue;
        }
        let (lhs_text, rhs_text) =
            line.split_once("->").ok_or_else(|| syntax(line_no, "expected `->`"))?;
        let mut lhs_toks = lhs_text.split_whitespace();
        let lhs_raw = lhs_toks.next().ok_or_else(|| syntax(line_no, "missing left-hand side"))?;
        if lhs_toks.next().is_some() {
            return Err(syntax(line_no, "left-hand side must be a single symbol"));
        }
        let lhs = parse_token(lhs_raw, line_no)?;
        if lhs.optional || lhs.base == "eps" {
            return Err(syntax(line_no, format!("invalid left-hand side `{lhs_raw}`")));
        }
        let rhs_text = rhs_text.trim_end();
        let rhs_text = rhs_text.strip_suffix(';').unwrap_or(rhs_text);
        if rhs_text.contains(';') {
            return Err(syntax(line_no, "`;` may only end a rule"));
        }
        let mut alternatives = Vec::new();
        for alt in rhs_text.split('|') {
            let mut toks = Vec::new();
            for raw in alt.split_whitespace() {
                if raw == "eps" {
                    continue;
                }
                toks.push(parse_token(raw, line_no)?);
            }
            alternatives.extend(expand_optional(&toks));
        }
        rules.push(RawRule { lhs, alternatives });
    }

    if rules.is_empty() {
        return Err(GrammarError::Empty);
    }

    let lhs_keys: BTreeSet<(String, Option<String>)> =
        rules.iter().map(|r| (r.lhs.base.clone(), r.lhs.var.clone())).collect();
    let is_nonterminal = |t: &Token| {
        let (b, v) = t.key();
        lhs_keys.contains(&(b.to_string(), v.map(ToString::to_string)))
    };
    let to_symbol = |t: &Token| {
        let s = if is_nonterminal(t) {
            Symbol::nonterminal(t.base.clone())
        } else {
            Symbol::terminal(t.base.clone())
        };
        match &t.var {
            Some(v) => s.with_var(v.clone()),
            None => s,
        }
    };

    let mut productions = Vec::new();
    for rule in &rules {
        let lhs = to_symbol(&rule.lhs);
        for alt in &rule.alternatives {
            productions.push(Production::new(lhs.clone(), alt.iter().map(to_symbol).collect()));
        }
    }

    let start = match start {
        Some((tok, line)) => {
            if !is_nonterminal(&tok) {
                return Err(GrammarError::Syntax {
                    line,
                    message: format!("start symbol `{}` has no productions", tok.base),
                });
            }
            Some(to_symbol(&tok))
        }
        None => None,
    };
    Cfg::new(productions, start)
}
