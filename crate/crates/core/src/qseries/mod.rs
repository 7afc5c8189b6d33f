//! Truncated Puiseux series in `q^{1/M}` and bivariate series in `(p, q)`.
//!
//! A series records the exponent window on which its coefficients are
//! guaranteed: every coefficient of `q^{n/M}` with `n <= K` is exact, and
//! nothing is claimed above `K`. Operations compute the window of their result
//! from the windows and valuations of their inputs.

mod bivariate;
mod text;

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::cyclotomic::{CycNum, CycSum, Rational};

pub use bivariate::BiSeries;
pub use text::{parse_series, write_series};

/// Rational exponent of `q`.
pub type Exponent = Rational64;

/// Precision numerator used for series known exactly.
pub const EXACT: i64 = i64::MAX / 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

pub(crate) fn sat_add(a: i64, b: i64) -> i64 {
    if a >= EXACT / 2 || b >= EXACT / 2 {
        EXACT
    } else {
        a + b
    }
}

fn sat_mul(a: i64, s: i64) -> i64 {
    if a >= EXACT / 2 {
        EXACT
    } else {
        a.checked_mul(s).expect("precision overflow")
    }
}

pub(crate) fn is_exact(k: i64) -> bool {
    k >= EXACT / 2
}

fn lcm(a: u32, b: u32) -> u32 {
    a / a.gcd(&b) * b
}

/// A truncated Laurent series in `q^{1/M}` with cyclotomic coefficients.
#[derive(Clone)]
pub struct PuiseuxSeries {
    denom: u32,
    coeffs: BTreeMap<i64, CycNum>,
    prec: i64,
}

impl PuiseuxSeries {
    /// Builds a series from `(numerator, coefficient)` terms; zero coefficients
    /// and terms above the window are dropped, repeated keys are summed.
    pub fn new<I>(denom: u32, terms: I, prec: i64) -> Self
    where
        I: IntoIterator<Item = (i64, CycNum)>,
    {
        assert!(denom >= 1, "exponent denominator must be positive");
        let mut coeffs: BTreeMap<i64, CycNum> = BTreeMap::new();
        for (n, c) in terms {
            if n > prec {
                continue;
            }
            let slot = coeffs.entry(n).or_insert_with(CycNum::zero);
            *slot += &c;
        }
        coeffs.retain(|_, c| !c.is_zero());
        PuiseuxSeries {
            denom,
            coeffs,
            prec,
        }
    }

    /// Integer-exponent series `Σ c_n q^n` from a dense list starting at `start`.
    pub fn from_dense<I, C>(start: i64, values: I, prec: i64) -> Self
    where
        I: IntoIterator<Item = C>,
        C: Into<CycNum>,
    {
        Self::new(
            1,
            values
                .into_iter()
                .enumerate()
                .map(|(i, c)| (start + i as i64, c.into())),
            prec,
        )
    }

    pub fn zero(prec: i64) -> Self {
        Self::new(1, std::iter::empty(), prec)
    }

    pub fn constant(c: CycNum) -> Self {
        Self::new(1, [(0, c)], EXACT)
    }

    pub fn one() -> Self {
        Self::constant(CycNum::one())
    }

    /// `c · q^{n/M}`, known exactly.
    pub fn monomial(c: CycNum, n: i64, denom: u32) -> Self {
        Self::new(denom, [(n, c)], EXACT)
    }

    pub fn denom(&self) -> u32 {
        self.denom
    }

    /// Window numerator `K` relative to [`denom`](Self::denom).
    pub fn precision_num(&self) -> i64 {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        is_exact(self.prec)
    }

    /// Largest exponent with guaranteed coefficient, `None` when exact.
    pub fn precision(&self) -> Option<Exponent> {
        (!self.is_exact()).then(|| Exponent::new(self.prec, self.denom as i64))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Stored terms as `(numerator, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &CycNum)> + '_ {
        self.coeffs.iter().map(|(&n, c)| (n, c))
    }

    pub fn iter(&self) -> impl Iterator<Item = (Exponent, &CycNum)> + '_ {
        let d = self.denom as i64;
        self.coeffs.iter().map(move |(&n, c)| (Exponent::new(n, d), c))
    }

    /// Coefficient at a numerator key (zero if absent), or `None` beyond the window.
    pub fn coeff_num(&self, n: i64) -> Option<CycNum> {
        if n > self.prec {
            return None;
        }
        Some(self.coeffs.get(&n).cloned().unwrap_or_else(CycNum::zero))
    }

    /// Coefficient of `q^e`, `None` beyond the window.
    pub fn coeff(&self, e: Exponent) -> Option<CycNum> {
        let scaled = e * Exponent::from_integer(self.denom as i64);
        if !scaled.is_integer() {
            return self.in_window(e).then(CycNum::zero);
        }
        self.coeff_num(scaled.to_integer())
    }

    pub fn in_window(&self, e: Exponent) -> bool {
        self.is_exact() || e * Exponent::from_integer(self.denom as i64) <= Exponent::from_integer(self.prec)
    }

    /// Smallest stored numerator key.
    pub fn valuation_num(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn valuation(&self) -> Option<Exponent> {
        self.valuation_num()
            .map(|n| Exponent::new(n, self.denom as i64))
    }

    /// Leading exponent and coefficient.
    pub fn leading(&self) -> Option<(Exponent, &CycNum)> {
        self.iter().next()
    }

    /// Least common multiple of the coefficient conductors.
    pub fn conductor(&self) -> u32 {
        self.coeffs.values().fold(1, |l, c| lcm(l, c.conductor()))
    }

    /// The same series written over the denominator `denom`, a multiple of the
    /// current one.
    pub fn rescale(&self, denom: u32) -> Self {
        assert!(denom % self.denom == 0, "new denominator must be a multiple");
        let s = (denom / self.denom) as i64;
        if s == 1 {
            return self.clone();
        }
        PuiseuxSeries {
            denom,
            coeffs: self.coeffs.iter().map(|(&n, c)| (n * s, c.clone())).collect(),
            prec: sat_mul(self.prec, s),
        }
    }

    /// Smallest denominator compatible with the stored terms. The window is
    /// floored onto the coarser grid.
    pub fn reduced(&self) -> Self {
        let mut g = self.denom as i64;
        for &n in self.coeffs.keys() {
            g = g.gcd(&n);
            if g == 1 {
                return self.clone();
            }
        }
        if g == 1 {
            return self.clone();
        }
        PuiseuxSeries {
            denom: (self.denom as i64 / g) as u32,
            coeffs: self.coeffs.iter().map(|(&n, c)| (n / g, c.clone())).collect(),
            prec: if self.is_exact() {
                EXACT
            } else {
                Integer::div_floor(&self.prec, &g)
            },
        }
    }

    /// Drops everything above numerator `k`.
    pub fn truncate(&self, k: i64) -> Self {
        let k = k.min(self.prec);
        PuiseuxSeries {
            denom: self.denom,
            coeffs: self
                .coeffs
                .range(..=k)
                .map(|(&n, c)| (n, c.clone()))
                .collect(),
            prec: k,
        }
    }

    /// Drops everything above exponent `e` (floored onto this grid).
    pub fn truncate_exp(&self, e: Exponent) -> Self {
        let k = (e * Exponent::from_integer(self.denom as i64)).floor().to_integer();
        self.truncate(k)
    }

    fn aligned(a: &Self, b: &Self) -> (Self, Self) {
        let d = lcm(a.denom, b.denom);
        (a.rescale(d), b.rescale(d))
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = Self::aligned(self, other);
        let prec = a.prec.min(b.prec);
        let mut coeffs = a.coeffs;
        coeffs.retain(|&n, _| n <= prec);
        for (n, c) in b.coeffs.range(..=prec) {
            match coeffs.get_mut(n) {
                Some(slot) => {
                    *slot += c;
                    if slot.is_zero() {
                        coeffs.remove(n);
                    }
                }
                None => {
                    coeffs.insert(*n, c.clone());
                }
            }
        }
        PuiseuxSeries {
            denom: a.denom,
            coeffs,
            prec,
        }
    }

    pub fn neg(&self) -> Self {
        PuiseuxSeries {
            denom: self.denom,
            coeffs: self.coeffs.iter().map(|(&n, c)| (n, c.neg())).collect(),
            prec: self.prec,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &CycNum) -> Self {
        if s.is_zero() {
            return PuiseuxSeries {
                denom: self.denom,
                coeffs: BTreeMap::new(),
                prec: self.prec,
            };
        }
        PuiseuxSeries {
            denom: self.denom,
            coeffs: self.coeffs.iter().map(|(&n, c)| (n, c * s)).collect(),
            prec: self.prec,
        }
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        self.scale(&CycNum::from_rational(r.clone()))
    }

    /// Multiplies by `q^{n/M}` (`M` = current denominator).
    pub fn shift(&self, n: i64) -> Self {
        PuiseuxSeries {
            denom: self.denom,
            coeffs: self.coeffs.iter().map(|(&k, c)| (k + n, c.clone())).collect(),
            prec: sat_add(self.prec, n),
        }
    }

    /// Lower bound on the true valuation used for precision bookkeeping: the
    /// smallest stored key, or just past the window when nothing is stored.
    fn valuation_bound(&self) -> i64 {
        self.valuation_num().unwrap_or_else(|| sat_add(self.prec, 1))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = Self::aligned(self, other);
        let prec = sat_add(a.prec, b.valuation_bound()).min(sat_add(b.prec, a.valuation_bound()));
        let conductor = lcm(a.conductor(), b.conductor());
        let mut acc: BTreeMap<i64, CycSum> = BTreeMap::new();
        for (&i, x) in &a.coeffs {
            for (&j, y) in &b.coeffs {
                if i + j > prec {
                    break;
                }
                acc.entry(i + j)
                    .or_insert_with(|| CycSum::new(conductor))
                    .add_product(x, y);
            }
        }
        PuiseuxSeries::new(
            a.denom,
            acc.into_iter().map(|(n, s)| (n, s.finish())),
            prec,
        )
    }

    pub fn pow(&self, n: u64) -> Self {
        let mut base = self.clone();
        let mut acc = PuiseuxSeries::one();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Realises `τ ↦ (aτ + b)/d`: each term `c q^{n/M}` becomes
    /// `c · e(nb/(Md)) · q^{na/(Md)}`.
    pub fn substitute(&self, a: u32, b: i64, d: u32) -> Self {
        assert!(a >= 1 && d >= 1, "scale factors must be positive");
        let md = self.denom * d;
        let terms = self.coeffs.iter().map(|(&n, c)| {
            let phase = CycNum::root(md, n * b);
            (n * a as i64, c * &phase)
        });
        PuiseuxSeries::new(md, terms, sat_mul(self.prec, a as i64)).reduced()
    }

    /// Formal logarithm of a series `1 + O(q^{1/M})`.
    pub fn log(&self) -> Result<Self, SeriesError> {
        if self.valuation_num().is_some_and(|v| v < 0) {
            return Err(SeriesError::Domain("log needs no negative exponents".into()));
        }
        if self.prec < 0 {
            return Err(SeriesError::Inconclusive("constant term outside the window".into()));
        }
        if !self.coeffs.get(&0).is_some_and(|c| c.is_one()) {
            return Err(SeriesError::Domain("log needs constant term 1".into()));
        }
        if self.is_exact() {
            if self.coeffs.len() == 1 {
                return Ok(PuiseuxSeries::zero(EXACT));
            }
            return Err(SeriesError::Domain(
                "log of an exact non-constant series has no finite window".into(),
            ));
        }
        let k = self.prec;
        let a = |n: i64| self.coeffs.get(&n);
        let conductor = self.conductor();
        let mut out: Vec<CycNum> = vec![CycNum::zero(); (k + 1).max(1) as usize];
        for n in 1..=k {
            // n L_n = n a_n - Σ_{j<n} j L_j a_{n-j}
            let mut s = CycSum::new(conductor);
            if let Some(an) = a(n) {
                s.add(&an.scale(&Rational::from_integer(n.into())));
            }
            for j in 1..n {
                if out[j as usize].is_zero() {
                    continue;
                }
                if let Some(x) = a(n - j) {
                    s.add_product(&out[j as usize].scale(&Rational::from_integer((-j).into())), x);
                }
            }
            out[n as usize] = s.finish().scale(&Rational::new(1.into(), n.into()));
        }
        Ok(PuiseuxSeries::new(
            self.denom,
            out.into_iter().enumerate().map(|(i, c)| (i as i64, c)),
            k,
        ))
    }

    /// Formal exponential of a series with strictly positive valuation.
    pub fn exp(&self) -> Result<Self, SeriesError> {
        if self.valuation_num().is_some_and(|v| v <= 0) {
            return Err(SeriesError::Domain("exp needs strictly positive valuation".into()));
        }
        if self.is_empty() {
            return Ok(PuiseuxSeries::new(1, [(0, CycNum::one())], self.prec.max(0)));
        }
        if self.is_exact() {
            return Err(SeriesError::Domain(
                "exp of an exact non-zero series has no finite window".into(),
            ));
        }
        let k = self.prec;
        let conductor = self.conductor();
        let mut out: Vec<CycNum> = vec![CycNum::zero(); (k + 1).max(1) as usize];
        out[0] = CycNum::one();
        for n in 1..=k {
            // n e_n = Σ_{j=1}^{n} j u_j e_{n-j}
            let mut s = CycSum::new(conductor);
            for (&j, u) in self.coeffs.range(1..=n) {
                let e = &out[(n - j) as usize];
                if !e.is_zero() {
                    s.add_product(&u.scale(&Rational::from_integer(j.into())), e);
                }
            }
            out[n as usize] = s.finish().scale(&Rational::new(1.into(), n.into()));
        }
        Ok(PuiseuxSeries::new(
            self.denom,
            out.into_iter().enumerate().map(|(i, c)| (i as i64, c)),
            k,
        ))
    }

    /// Compares two series on their common window. Returns the first exponent
    /// where they differ, if any.
    pub fn first_difference(&self, other: &Self) -> Option<Exponent> {
        let (a, b) = Self::aligned(self, other);
        let prec = a.prec.min(b.prec);
        let keys: std::collections::BTreeSet<i64> = a
            .coeffs
            .range(..=prec)
            .map(|(&k, _)| k)
            .chain(b.coeffs.range(..=prec).map(|(&k, _)| k))
            .collect();
        keys.into_iter()
            .find(|k| a.coeffs.get(k) != b.coeffs.get(k))
            .map(|k| Exponent::new(k, a.denom as i64))
    }

    /// Common window of two series, `None` when both are exact.
    pub fn common_window(&self, other: &Self) -> Option<Exponent> {
        match (self.precision(), other.precision()) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (Some(x), None) | (None, Some(x)) => Some(x),
            (None, None) => None,
        }
    }

    /// Evaluates the coefficients at a complex value of `q^{1/M}`; used by
    /// floating cross-checks only.
    pub fn eval_complex(&self, t: (f64, f64)) -> (f64, f64) {
        let (mut re, mut im) = (0.0, 0.0);
        let (r, th) = ((t.0 * t.0 + t.1 * t.1).sqrt(), t.1.atan2(t.0));
        for (&n, c) in &self.coeffs {
            let (cr, ci) = c.to_complex();
            let mag = r.powi(n as i32);
            let (pr, pi) = (mag * (n as f64 * th).cos(), mag * (n as f64 * th).sin());
            re += cr * pr - ci * pi;
            im += cr * pi + ci * pr;
        }
        (re, im)
    }
}

/// Equality of the represented truncated series: same window and the same
/// coefficient at every rational exponent.
impl PartialEq for PuiseuxSeries {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = Self::aligned(self, other);
        let same_prec = (a.is_exact() && b.is_exact()) || a.prec == b.prec;
        same_prec && a.coeffs == b.coeffs
    }
}

impl fmt::Debug for PuiseuxSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.iter() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if e.is_zero() {
                write!(f, "{c:?}")?;
            } else {
                write!(f, "{c:?}*q^{e}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        match self.precision() {
            Some(p) => write!(f, " + O(q^>{p})"),
            None => Ok(()),
        }
    }
}

impl std::ops::Add for &PuiseuxSeries {
    type Output = PuiseuxSeries;
    fn add(self, rhs: Self) -> PuiseuxSeries {
        PuiseuxSeries::add(self, rhs)
    }
}

impl std::ops::Sub for &PuiseuxSeries {
    type Output = PuiseuxSeries;
    fn sub(self, rhs: Self) -> PuiseuxSeries {
        PuiseuxSeries::sub(self, rhs)
    }
}

impl std::ops::Mul for &PuiseuxSeries {
    type Output = PuiseuxSeries;
    fn mul(self, rhs: Self) -> PuiseuxSeries {
        PuiseuxSeries::mul(self, rhs)
    }
}

impl std::ops::Neg for &PuiseuxSeries {
    type Output = PuiseuxSeries;
    fn neg(self) -> PuiseuxSeries {
        PuiseuxSeries::neg(self)
    }
}

/// Whether `e` is an integer multiple of `step`.
#[allow(dead_code)]
pub(crate) fn is_multiple(e: Exponent, step: Exponent) -> bool {
    !step.is_zero() && (e / step).is_integer()
}

#[allow(dead_code)]
pub(crate) fn exponent_to_string(e: Exponent) -> String {
    if e.is_integer() {
        e.to_integer().to_string()
    } else {
        format!("{}/{}", e.numer(), e.denom())
    }
}

#[allow(dead_code)]
pub(crate) fn one_exp() -> Exponent {
    Exponent::one()
}

#[cfg(test)]
mod tests;
