//! Plain-text series files.
//!
//! ```text
//! M 1
//! L 1
//! K 3
//! -1 1/1
//! 1 196884/1
//! ```
//!
//! Each coefficient line is a numerator `n` followed by the power-basis
//! coordinates of the coefficient in `Q(ζ_L)`, or by a single rational when
//! the coefficient is rational, or by a full `L=...` number. `K exact` marks a
//! series known to all orders.

use std::fmt::Write as _;

use crate::cyclotomic::{euler_phi, parse_rational, CycNum, Rational};

use super::{PuiseuxSeries, SeriesError, EXACT};

fn perr(line: usize, column: usize, message: impl Into<String>) -> SeriesError {
    SeriesError::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// 1-based column of the token starting at byte `offset`.
fn col(raw: &str, tok: &str) -> usize {
    tok.as_ptr() as usize - raw.as_ptr() as usize + 1
}

fn header<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    key: &str,
    last: usize,
) -> Result<(usize, &'a str, &'a str), SeriesError> {
    for (no, raw) in lines.by_ref() {
        let body = raw.split('#').next().unwrap_or("");
        let mut toks = body.split_whitespace();
        let Some(k) = toks.next() else { continue };
        if k != key {
            return Err(perr(no, col(raw, k), format!("expected `{key}` header")));
        }
        let v = toks
            .next()
            .ok_or_else(|| perr(no, raw.len() + 1, format!("missing value after `{key}`")))?;
        if let Some(extra) = toks.next() {
            return Err(perr(no, col(raw, extra), "unexpected trailing token"));
        }
        return Ok((no, raw, v));
    }
    Err(perr(last + 1, 1, format!("missing `{key}` header")))
}

fn positive(no: usize, raw: &str, v: &str, what: &str) -> Result<u32, SeriesError> {
    match v.parse::<u32>() {
        Ok(x) if x >= 1 => Ok(x),
        _ => Err(perr(no, col(raw, v), format!("{what} must be a positive integer"))),
    }
}

/// Parses a series file. Blank lines and `#` comments are ignored.
pub fn parse_series(src: &str) -> Result<PuiseuxSeries, SeriesError> {
    let last = src.lines().count();
    let mut lines = src.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (no, raw, v) = header(&mut lines, "M", last)?;
    let m = positive(no, raw, v, "exponent denominator")?;
    let (no, raw, v) = header(&mut lines, "L", last)?;
    let l = positive(no, raw, v, "conductor")?;
    let (no, raw, v) = header(&mut lines, "K", last)?;
    let k = if v == "exact" {
        EXACT
    } else {
        v.parse::<i64>()
            .ok()
            .filter(|k| k.abs() < EXACT / 4)
            .ok_or_else(|| perr(no, col(raw, v), "precision must be an integer or `exact`"))?
    };
    let phi = euler_phi(l as u64) as usize;
    let mut terms = Vec::new();
    let mut prev: Option<i64> = None;
    for (no, raw) in lines {
        let body = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = body.split_whitespace().collect();
        let Some(&first) = toks.first() else { continue };
        let n: i64 = first
            .parse()
            .map_err(|_| perr(no, col(raw, first), "expected an integer exponent numerator"))?;
        if prev.is_some_and(|p| n <= p) {
            return Err(perr(no, col(raw, first), "exponent numerators must be strictly increasing"));
        }
        if n > k {
            return Err(perr(no, col(raw, first), "coefficient lies above the precision K"));
        }
        prev = Some(n);
        let rest = &toks[1..];
        let Some(&head) = rest.first() else {
            return Err(perr(no, raw.len() + 1, "missing coefficient"));
        };
        let c = if head.starts_with("L=") {
            let start = col(raw, head) - 1;
            raw[start..].split('#').next().unwrap_or("").trim().parse::<CycNum>().map_err(|e| {
                perr(no, start + 1, e.to_string())
            })?
        } else {
            let mut coords = Vec::with_capacity(rest.len());
            for t in rest {
                coords.push(
                    parse_rational(t).ok_or_else(|| perr(no, col(raw, t), format!("bad rational `{t}`")))?,
                );
            }
            if coords.len() == 1 {
                CycNum::from_rational(coords.pop().unwrap())
            } else if coords.len() == phi {
                CycNum::from_raw(l, coords)
            } else {
                return Err(perr(
                    no,
                    col(raw, rest[0]),
                    format!("expected 1 or {phi} coordinates for L={l}, found {}", coords.len()),
                ));
            }
        };
        if l % c.conductor() != 0 {
            return Err(perr(
                no,
                col(raw, head),
                format!("coefficient has conductor {} not dividing L={l}", c.conductor()),
            ));
        }
        terms.push((n, c));
    }
    Ok(PuiseuxSeries::new(m, terms, k))
}

/// Serializes a series; rational coefficients are written as one `n/d`,
/// others as `φ(L)` coordinates over the series conductor.
pub fn write_series(s: &PuiseuxSeries) -> String {
    let l = s.conductor();
    let mut out = String::new();
    let _ = writeln!(out, "M {}", s.denom());
    let _ = writeln!(out, "L {l}");
    if s.is_exact() {
        let _ = writeln!(out, "K exact");
    } else {
        let _ = writeln!(out, "K {}", s.precision_num());
    }
    for (n, c) in s.terms() {
        let _ = write!(out, "{n}");
        match c.as_rational() {
            Some(r) => {
                let _ = write!(out, " {}", fmt_q(r));
            }
            None => {
                for x in c.embed_raw(l) {
                    let _ = write!(out, " {}", fmt_q(&x));
                }
            }
        }
        out.push('\n');
    }
    out
}

fn fmt_q(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}
