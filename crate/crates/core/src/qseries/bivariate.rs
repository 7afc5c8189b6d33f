//! Bivariate series stored as layers in `p`: the coefficient of `p^{m/M_p}` is
//! a [`PuiseuxSeries`] in `q` carrying its own window. Layers with key up to
//! the `p`-window that are not stored are exactly zero.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;

use crate::cyclotomic::{CycNum, Rational};

use super::{is_exact, sat_add, Exponent, PuiseuxSeries, SeriesError, EXACT};

#[derive(Clone)]
pub struct BiSeries {
    p_denom: u32,
    layers: BTreeMap<i64, PuiseuxSeries>,
    p_prec: i64,
}

fn exact_zero() -> PuiseuxSeries {
    PuiseuxSeries::zero(EXACT)
}

impl BiSeries {
    /// Builds from `(p-numerator, layer)` pairs. Layers above `p_prec` are
    /// dropped; exactly-zero layers are not stored.
    pub fn new<I>(p_denom: u32, layers: I, p_prec: i64) -> Self
    where
        I: IntoIterator<Item = (i64, PuiseuxSeries)>,
    {
        assert!(p_denom >= 1);
        let mut out = BiSeries {
            p_denom,
            layers: BTreeMap::new(),
            p_prec,
        };
        for (m, s) in layers {
            if m > p_prec {
                continue;
            }
            let merged = match out.layers.remove(&m) {
                Some(prev) => prev.add(&s),
                None => s,
            };
            out.insert(m, merged);
        }
        out
    }

    fn insert(&mut self, m: i64, s: PuiseuxSeries) {
        if !(s.is_zero() && s.is_exact()) {
            self.layers.insert(m, s);
        }
    }

    pub fn one() -> Self {
        BiSeries::new(1, [(0, PuiseuxSeries::one())], EXACT)
    }

    /// The series `(f(p) − f(q)) / (p^{-1} − q^{-1})` for
    /// `f = q^{-1} + a_0 + Σ_{k≥1} a_k q^k`, by the telescoping identity
    /// `(p^k − q^k)/(p^{-1} − q^{-1}) = −pq Σ_{i+j=k−1} p^i q^j`.
    ///
    /// With `f` known through `q^K`, the coefficient of `p^m q^n` is
    /// `−a_{m+n−1}` for `m, n ≥ 1`, known whenever `m + n ≤ K + 1`.
    pub fn difference_quotient(f: &PuiseuxSeries) -> Result<Self, SeriesError> {
        let f = f.reduced();
        if f.denom() != 1 {
            return Err(SeriesError::Domain("difference quotient needs integral exponents".into()));
        }
        if f.valuation_num() != Some(-1) || !f.coeff_num(-1).is_some_and(|c| c.is_one()) {
            return Err(SeriesError::Domain("series must start with q^-1".into()));
        }
        if f.is_exact() {
            let top = f.terms().last().map(|(n, _)| n).unwrap_or(0);
            return Ok(Self::quotient_layers(&f, top.max(0), true));
        }
        let k = f.precision_num();
        if k < 1 {
            return Err(SeriesError::Inconclusive("need at least one coefficient a_1".into()));
        }
        Ok(Self::quotient_layers(&f, k, false))
    }

    fn quotient_layers(f: &PuiseuxSeries, k: i64, exact: bool) -> Self {
        let a = |i: i64| f.coeff_num(i).unwrap_or_else(CycNum::zero);
        let mut layers = vec![(0, PuiseuxSeries::one())];
        for m in 1..=k {
            let top = k + 1 - m;
            let terms = (1..=top).map(|n| (n, a(m + n - 1).neg()));
            layers.push((m, PuiseuxSeries::new(1, terms, if exact { EXACT } else { top })));
        }
        BiSeries::new(1, layers, if exact { EXACT } else { k })
    }

    pub fn p_denom(&self) -> u32 {
        self.p_denom
    }

    /// `p`-window numerator.
    pub fn p_precision_num(&self) -> i64 {
        self.p_prec
    }

    pub fn is_p_exact(&self) -> bool {
        is_exact(self.p_prec)
    }

    /// Layer at numerator `m`: `None` beyond the window, exact zero if absent.
    pub fn layer(&self, m: i64) -> Option<PuiseuxSeries> {
        if m > self.p_prec {
            return None;
        }
        Some(self.layers.get(&m).cloned().unwrap_or_else(exact_zero))
    }

    /// Stored layers.
    pub fn layers(&self) -> impl Iterator<Item = (i64, &PuiseuxSeries)> + '_ {
        self.layers.iter().map(|(&m, s)| (m, s))
    }

    /// Coefficient of `p^{m/M_p} q^e`, `None` outside the window.
    pub fn coeff(&self, m: i64, e: Exponent) -> Option<CycNum> {
        let layer = self.layer(m)?;
        layer.coeff(e)
    }

    /// Coefficient of `p^m q^n` for integer exponents.
    pub fn coeff_int(&self, m: i64, n: i64) -> Option<CycNum> {
        let scaled = m.checked_mul(self.p_denom as i64)?;
        self.coeff(scaled, Exponent::from_integer(n))
    }

    fn valuation_bound(&self) -> i64 {
        self.layers
            .keys()
            .next()
            .copied()
            .unwrap_or_else(|| sat_add(self.p_prec, 1))
    }

    fn rescale(&self, p_denom: u32) -> Self {
        assert!(p_denom % self.p_denom == 0);
        let s = (p_denom / self.p_denom) as i64;
        if s == 1 {
            return self.clone();
        }
        BiSeries {
            p_denom,
            layers: self.layers.iter().map(|(&m, l)| (m * s, l.clone())).collect(),
            p_prec: if self.is_p_exact() { EXACT } else { self.p_prec * s },
        }
    }

    fn aligned(a: &Self, b: &Self) -> (Self, Self) {
        let d = a.p_denom / a.p_denom.gcd(&b.p_denom) * b.p_denom;
        (a.rescale(d), b.rescale(d))
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = Self::aligned(self, other);
        let prec = a.p_prec.min(b.p_prec);
        let mut out = BiSeries {
            p_denom: a.p_denom,
            layers: BTreeMap::new(),
            p_prec: prec,
        };
        let keys: std::collections::BTreeSet<i64> = a
            .layers
            .keys()
            .chain(b.layers.keys())
            .copied()
            .filter(|&m| m <= prec)
            .collect();
        for m in keys {
            let s = a.layer(m).unwrap().add(&b.layer(m).unwrap());
            out.insert(m, s);
        }
        out
    }

    pub fn neg(&self) -> Self {
        BiSeries {
            p_denom: self.p_denom,
            layers: self.layers.iter().map(|(&m, l)| (m, l.neg())).collect(),
            p_prec: self.p_prec,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &CycNum) -> Self {
        BiSeries::new(
            self.p_denom,
            self.layers.iter().map(|(&m, l)| (m, l.scale(c))),
            self.p_prec,
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = Self::aligned(self, other);
        let prec = sat_add(a.p_prec, b.valuation_bound()).min(sat_add(b.p_prec, a.valuation_bound()));
        let mut acc: BTreeMap<i64, PuiseuxSeries> = BTreeMap::new();
        for (&i, x) in &a.layers {
            for (&j, y) in &b.layers {
                if i + j > prec {
                    break;
                }
                let t = x.mul(y);
                let slot = acc.entry(i + j).or_insert_with(exact_zero);
                *slot = slot.add(&t);
            }
        }
        BiSeries::new(a.p_denom, acc, prec)
    }

    /// Drops every layer above `p`-numerator `p`.
    pub fn truncate_p(&self, p: i64) -> Self {
        let p = p.min(self.p_prec);
        BiSeries {
            p_denom: self.p_denom,
            layers: self.layers.range(..=p).map(|(&m, l)| (m, l.clone())).collect(),
            p_prec: p,
        }
    }

    /// Realises `p ↦ p^i, q ↦ q^i`.
    pub fn substitute_powers(&self, i: u32) -> Self {
        assert!(i >= 1);
        BiSeries {
            p_denom: self.p_denom,
            layers: self
                .layers
                .iter()
                .map(|(&m, l)| (m * i as i64, l.substitute(i, 0, 1)))
                .collect(),
            p_prec: if self.is_p_exact() {
                EXACT
            } else {
                self.p_prec * i as i64
            },
        }
    }

    /// Logarithm of a series whose `p^0` layer is exactly 1 and which has no
    /// negative `p`-exponents. Uses the recursion on the `p`-grading
    /// `L_m = A_m − (1/m) Σ_{0<i<m} i L_i A_{m−i}`.
    pub fn log(&self) -> Result<Self, SeriesError> {
        if self.layers.keys().next().is_some_and(|&m| m < 0) {
            return Err(SeriesError::Domain("log needs no negative p-exponents".into()));
        }
        let unit = self.layers.get(&0);
        if !unit.is_some_and(|l| l.is_exact() && l.len() == 1 && l.coeff_num(0).is_some_and(|c| c.is_one())) {
            return Err(SeriesError::Domain("log needs p^0 layer equal to 1".into()));
        }
        let top = self.finite_top("log")?;
        let mut out: Vec<PuiseuxSeries> = vec![exact_zero(); (top + 1) as usize];
        for m in 1..=top {
            let mut s = self.layer(m).unwrap();
            let mut corr = exact_zero();
            for (&i, a) in self.layers.range(1..m) {
                let j = m - i;
                let l = &out[j as usize];
                if l.is_zero() && l.is_exact() {
                    continue;
                }
                corr = corr.add(&l.mul(a).scale_rational(&Rational::from_integer(j.into())));
            }
            if !(corr.is_zero() && corr.is_exact()) {
                s = s.sub(&corr.scale_rational(&Rational::new(1.into(), m.into())));
            }
            out[m as usize] = s;
        }
        Ok(BiSeries::new(
            self.p_denom,
            out.into_iter().enumerate().map(|(i, l)| (i as i64, l)),
            self.p_prec,
        ))
    }

    /// Exponential of a series with only positive `p`-exponents:
    /// `E_m = (1/m) Σ_{0<i≤m} i U_i E_{m−i}`.
    pub fn exp(&self) -> Result<Self, SeriesError> {
        if self.layers.keys().next().is_some_and(|&m| m <= 0) {
            return Err(SeriesError::Domain("exp needs strictly positive p-valuation".into()));
        }
        if self.layers.is_empty() {
            let mut one = BiSeries::one();
            one.p_prec = self.p_prec.max(0);
            one.p_denom = self.p_denom;
            return Ok(one);
        }
        let top = self.finite_top("exp")?;
        let mut out: Vec<PuiseuxSeries> = vec![exact_zero(); (top + 1) as usize];
        out[0] = PuiseuxSeries::one();
        for m in 1..=top {
            let mut s = exact_zero();
            for (&i, u) in self.layers.range(1..=m) {
                let e = &out[(m - i) as usize];
                if e.is_zero() && e.is_exact() {
                    continue;
                }
                s = s.add(&u.mul(e).scale_rational(&Rational::from_integer(i.into())));
            }
            out[m as usize] = s.scale_rational(&Rational::new(1.into(), m.into()));
        }
        Ok(BiSeries::new(
            self.p_denom,
            out.into_iter().enumerate().map(|(i, l)| (i as i64, l)),
            self.p_prec,
        ))
    }

    fn finite_top(&self, what: &str) -> Result<i64, SeriesError> {
        if self.is_p_exact() {
            if self.layers.keys().all(|&m| m == 0) && what == "log" {
                return Ok(0);
            }
            return Err(SeriesError::Domain(format!(
                "{what} of a series exact in p has no finite window"
            )));
        }
        Ok(self.p_prec.max(0))
    }

    /// First bidegree (ordered by `p`, then `q`) where the two series differ
    /// on their common window.
    pub fn first_difference(&self, other: &Self) -> Option<(Exponent, Exponent)> {
        let (a, b) = Self::aligned(self, other);
        let prec = a.p_prec.min(b.p_prec);
        let keys: std::collections::BTreeSet<i64> = a
            .layers
            .keys()
            .chain(b.layers.keys())
            .copied()
            .filter(|&m| m <= prec)
            .collect();
        for m in keys {
            if let Some(e) = a.layer(m).unwrap().first_difference(&b.layer(m).unwrap()) {
                return Some((Exponent::new(m, a.p_denom as i64), e));
            }
        }
        None
    }
}

impl PartialEq for BiSeries {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = Self::aligned(self, other);
        let same = (a.is_p_exact() && b.is_p_exact()) || a.p_prec == b.p_prec;
        same && a.layers.len() == b.layers.len()
            && a.layers.iter().zip(&b.layers).all(|(x, y)| x == y)
    }
}

impl fmt::Debug for BiSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut d = f.debug_map();
        for (&m, l) in &self.layers {
            d.entry(&Exponent::new(m, self.p_denom as i64), l);
        }
        d.finish()?;
        if !self.is_p_exact() {
            write!(f, " + O(p^>{})", Exponent::new(self.p_prec, self.p_denom as i64))?;
        }
        Ok(())
    }
}
