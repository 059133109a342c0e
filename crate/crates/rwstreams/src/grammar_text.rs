//! Text form of grammars: one production per line, start first,
//! `N3: N1 N1 97`. Nonterminals are `N<id>`, terminals decimal numbers.

use rwstreams_core::grammar::{GSym, Grammar};
use rwstreams_core::{Error, Result};

pub fn parse_grammar(text: &str, sigma: u32) -> Result<Grammar> {
    let bad = |line: usize, msg: String| Error::Format(format!("line {}: {msg}", line + 1));
    let mut rules: Vec<Option<Vec<GSym>>> = Vec::new();
    let mut start = None;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (head, rhs) = line
            .split_once(':')
            .ok_or_else(|| bad(i, "missing ':'".into()))?;
        let id = parse_nonterminal(head.trim()).ok_or_else(|| bad(i, format!("bad nonterminal {head:?}")))?;
        let mut body = Vec::new();
        for tok in rhs.split_whitespace() {
            let sym = match parse_nonterminal(tok) {
                Some(b) => GSym::N(b),
                None => GSym::T(tok.parse().map_err(|_| bad(i, format!("bad symbol {tok:?}")))?),
            };
            body.push(sym);
        }
        let slot = id as usize;
        if slot >= rules.len() {
            rules.resize(slot + 1, None);
        }
        if rules[slot].replace(body).is_some() {
            return Err(bad(i, format!("N{id} defined twice")));
        }
        start.get_or_insert(id);
    }
    let start = start.ok_or_else(|| Error::Format("no productions".into()))?;
    let productions = rules
        .into_iter()
        .enumerate()
        .map(|(a, r)| r.ok_or_else(|| Error::Format(format!("N{a} is never defined"))))
        .collect::<Result<Vec<_>>>()?;
    let g = Grammar {
        productions,
        start,
        sigma,
    };
    g.validate().map_err(|e| match e {
        Error::InvalidInput(msg) => Error::Format(msg),
        e => e,
    })?;
    Ok(g)
}

fn parse_nonterminal(tok: &str) -> Option<u32> {
    tok.strip_prefix('N')?.parse().ok()
}
