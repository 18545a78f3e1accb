//! Line format for points and arcs:
//!
//! ```text
//! point N=3 u=1/4 tail=L
//! point N=0 u=2/3 tail=FIX
//! point N=2 u=3/5 tail=IT:L(RL)
//! arc N=3 a=1/10 b=2/5 tail=L
//! ```

use std::collections::HashMap;

use super::{Arc, LimitPoint, Symbol, TailRule};
use crate::error::{Error, Result};
use crate::num::Scalar;
use crate::tentmap::TentMap;

fn fields<'a>(line: &'a str, kind: &str) -> Result<HashMap<&'a str, &'a str>> {
    let mut tokens = line.split_whitespace();
    if tokens.next() != Some(kind) {
        return Err(Error::Parse(format!(
            "expected a line starting with {kind:?}: {line:?}"
        )));
    }
    let mut out = HashMap::new();
    for tok in tokens {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got {tok:?}")))?;
        if out.insert(k, v).is_some() {
            return Err(Error::Parse(format!("duplicate key {k:?}")));
        }
    }
    Ok(out)
}

fn get<'a>(map: &HashMap<&'a str, &'a str>, key: &str) -> Result<&'a str> {
    map.get(key)
        .copied()
        .ok_or_else(|| Error::Parse(format!("missing {key}=")))
}

fn symbols(word: &str) -> Result<Vec<Symbol>> {
    word.chars()
        .map(|c| match c {
            'L' => Ok(Symbol::L),
            'R' => Ok(Symbol::R),
            _ => Err(Error::Parse(format!("bad tail symbol {c:?}"))),
        })
        .collect()
}

pub(crate) fn parse_tail(text: &str) -> Result<TailRule> {
    match text {
        "L" => Ok(TailRule::Left),
        "FIX" => Ok(TailRule::Fixed),
        _ => {
            let word = text
                .strip_prefix("IT:")
                .ok_or_else(|| Error::Parse(format!("unknown tail {text:?}")))?;
            let (prefix, rest) = word
                .split_once('(')
                .ok_or_else(|| Error::Parse(format!("tail word needs a (cycle): {text:?}")))?;
            let cycle = rest
                .strip_suffix(')')
                .ok_or_else(|| Error::Parse(format!("unterminated cycle in {text:?}")))?;
            TailRule::itinerary(symbols(prefix)?, symbols(cycle)?)
        }
    }
}

fn parse_level(text: &str) -> Result<usize> {
    text.parse()
        .map_err(|_| Error::Parse(format!("bad level {text:?}")))
}

/// Parses and validates a `point …` line.
pub fn parse_point<S: Scalar>(map: &TentMap<S>, line: &str) -> Result<LimitPoint<S>> {
    let f = fields(line, "point")?;
    let level = parse_level(get(&f, "N")?)?;
    let anchor = S::parse_str(get(&f, "u")?)?;
    let tail = parse_tail(get(&f, "tail")?)?;
    LimitPoint::new(map, level, anchor, tail)
}

/// Parses and validates an `arc …` line.
pub fn parse_arc<S: Scalar>(map: &TentMap<S>, line: &str) -> Result<Arc<S>> {
    let f = fields(line, "arc")?;
    let level = parse_level(get(&f, "N")?)?;
    let lo = S::parse_str(get(&f, "a")?)?;
    let hi = S::parse_str(get(&f, "b")?)?;
    let tail = parse_tail(get(&f, "tail")?)?;
    Arc::new(map, level, lo, hi, tail)
}
