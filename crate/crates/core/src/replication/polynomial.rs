use std::fmt;

use num_traits::{One, Signed};

use crate::cyclotomic::{parse_rational, CycNum, Rational};
use crate::qseries::{PuiseuxSeries, SeriesError};

/// Univariate polynomial with cyclotomic coefficients, lowest degree first.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    coeffs: Vec<CycNum>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<CycNum>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    /// `x^n`.
    pub fn monomial(n: usize) -> Self {
        let mut c = vec![CycNum::zero(); n + 1];
        c[n] = CycNum::one();
        Polynomial { coeffs: c }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| CycNum::from_int(c)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[CycNum] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> CycNum {
        self.coeffs.get(i).cloned().unwrap_or_else(CycNum::zero)
    }

    pub fn leading(&self) -> Option<&CycNum> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| c.is_one())
    }

    /// Horner evaluation on a series.
    pub fn eval_series(&self, f: &PuiseuxSeries) -> PuiseuxSeries {
        let mut acc = PuiseuxSeries::zero(crate::qseries::EXACT);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(f).add(&PuiseuxSeries::constant(c.clone()));
        }
        acc
    }

    pub fn eval(&self, x: &CycNum) -> CycNum {
        let mut acc = CycNum::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }
}

impl Polynomial {
    /// Parses the form written by `Display`, e.g. `x^3 - 590652*x - 64481280`.
    /// Errors carry 1-based line and column positions.
    pub fn parse(src: &str) -> Result<Self, SeriesError> {
        let lines: Vec<(usize, &str)> = src
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("")))
            .filter(|(_, l)| !l.trim().is_empty())
            .collect();
        match lines.as_slice() {
            [] => Err(perr(1, 1, "empty polynomial")),
            [(no, raw)] => parse_line(*no, raw),
            [_, (no, _), ..] => Err(perr(*no, 1, "a polynomial occupies one line")),
        }
    }
}

fn perr(line: usize, column: usize, message: impl Into<String>) -> SeriesError {
    SeriesError::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn parse_line(no: usize, raw: &str) -> Result<Polynomial, SeriesError> {
    let b = raw.as_bytes();
    let mut i = 0;
    let skip = |i: &mut usize| {
        while *i < b.len() && b[*i] == b' ' {
            *i += 1;
        }
    };
    let mut coeffs: Vec<CycNum> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    let mut first = true;
    loop {
        skip(&mut i);
        if i >= b.len() {
            if first {
                return Err(perr(no, i + 1, "empty polynomial"));
            }
            break;
        }
        let mut neg = false;
        if first {
            if b[i] == b'-' {
                neg = true;
                i += 1;
            }
        } else {
            match b[i] {
                b'+' => {}
                b'-' => neg = true,
                _ => return Err(perr(no, i + 1, "expected `+` or `-`")),
            }
            i += 1;
            skip(&mut i);
        }
        first = false;
        let start = i;
        let coeff = if i < b.len() && b[i] == b'(' {
            let close = raw[i..].find(')').map(|k| i + k).ok_or_else(|| perr(no, i + 1, "unclosed `(`"))?;
            let c: CycNum = raw[i + 1..close]
                .parse()
                .map_err(|e| perr(no, i + 2, format!("{e}")))?;
            i = close + 1;
            Some(c)
        } else if i < b.len() && (b[i].is_ascii_digit()) {
            while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'/') {
                i += 1;
            }
            let r = parse_rational(&raw[start..i]).ok_or_else(|| perr(no, start + 1, "bad rational"))?;
            Some(CycNum::from_rational(r))
        } else {
            None
        };
        let has_mono = match coeff {
            Some(_) if i < b.len() && b[i] == b'*' => {
                i += 1;
                true
            }
            Some(_) => false,
            None => true,
        };
        let mut degree = 0usize;
        if has_mono {
            if i >= b.len() || b[i] != b'x' {
                return Err(perr(no, i + 1, "expected `x`"));
            }
            i += 1;
            degree = 1;
            if i < b.len() && b[i] == b'^' {
                i += 1;
                let ds = i;
                while i < b.len() && b[i].is_ascii_digit() {
                    i += 1;
                }
                degree = raw[ds..i].parse().map_err(|_| perr(no, ds + 1, "bad exponent"))?;
            }
        }
        if !seen.insert(degree) {
            return Err(perr(no, start + 1, format!("repeated degree {degree}")));
        }
        let mut c = coeff.unwrap_or_else(CycNum::one);
        if neg {
            c = c.neg();
        }
        if coeffs.len() <= degree {
            coeffs.resize(degree + 1, CycNum::zero());
        }
        coeffs[degree] = c;
        if i < b.len() && b[i] != b' ' {
            return Err(perr(no, i + 1, "unexpected character"));
        }
    }
    Ok(Polynomial::new(coeffs))
}

/// Writes `c·x^k` terms from the top degree down, e.g. `x^2 - 393768`.
/// Irrational coefficients appear as `(L=.. ..)*x^k`.
pub(crate) fn write_terms(
    f: &mut fmt::Formatter<'_>,
    terms: impl Iterator<Item = (CycNum, String)>,
) -> fmt::Result {
    let mut first = true;
    for (c, mono) in terms {
        if c.is_zero() {
            continue;
        }
        let (neg, body) = match c.as_rational() {
            Some(r) => {
                let neg = r.is_negative();
                let a: Rational = r.abs();
                let num = if a.is_integer() {
                    a.numer().to_string()
                } else {
                    format!("{}/{}", a.numer(), a.denom())
                };
                let body = if mono.is_empty() {
                    num
                } else if a.is_one() {
                    mono.clone()
                } else {
                    format!("{num}*{mono}")
                };
                (neg, body)
            }
            None => {
                let body = if mono.is_empty() {
                    format!("({c})")
                } else {
                    format!("({c})*{mono}")
                };
                (false, body)
            }
        };
        match (first, neg) {
            (true, true) => write!(f, "-{body}")?,
            (true, false) => write!(f, "{body}")?,
            (false, true) => write!(f, " - {body}")?,
            (false, false) => write!(f, " + {body}")?,
        }
        first = false;
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

pub(crate) fn power_name(var: &str, k: usize) -> String {
    match k {
        0 => String::new(),
        1 => var.to_string(),
        _ => format!("{var}^{k}"),
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .map(|(k, c)| (c.clone(), power_name("x", k)));
        write_terms(f, terms)
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
