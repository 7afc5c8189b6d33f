//! Hecke-monicity, equivariant modular equations and classification of the
//! leading behaviour of a series.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::cyclotomic::CycNum;
use crate::groups::{CommutingPair, GroupError};
use crate::hecke::{hecke_apply, HeckeError, PairFunction};
use crate::qseries::{Exponent, PuiseuxSeries, SeriesError, EXACT};
use crate::replication::{power_name, write_terms, Polynomial};
use crate::Verdict;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonicError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    /// The `k`-th elementary symmetric function of the roots is not a
    /// polynomial in `f` (first residual at `q^exponent`).
    #[error("not monic: e_{k} leaves a residual at q^{exponent}")]
    NotMonic { k: usize, exponent: Exponent },
    #[error(transparent)]
    Hecke(#[from] HeckeError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Result of fitting `S = P(F)`.
#[derive(Debug, Clone)]
pub struct MonicityReport {
    pub verdict: Verdict,
    pub polynomial: Polynomial,
    pub first_failure: Option<Exponent>,
    /// Exponents below this bound were compared; `None` when both sides are exact.
    pub window: Option<Exponent>,
}

/// Leading exponent `c < 0` and coefficient of `F`.
fn pole(f: &PuiseuxSeries) -> Result<(Exponent, CycNum), MonicError> {
    match f.leading() {
        Some((c, z)) if c.is_negative() => Ok((c, z.clone())),
        _ => Err(MonicError::Domain("series has no pole at infinity".into())),
    }
}

fn powers(f: &PuiseuxSeries, n: usize) -> Vec<PuiseuxSeries> {
    let mut out = vec![PuiseuxSeries::one()];
    for k in 1..=n {
        let next = out[k - 1].mul(f);
        out.push(next);
    }
    out
}

/// Peels `b_k F^k` off `S` for `k = top, …, 0`, reading `b_k` at `q^{kc}`.
fn peel(s: &PuiseuxSeries, pw: &[PuiseuxSeries], c: Exponent, zeta: &CycNum) -> Result<(Vec<CycNum>, PuiseuxSeries), MonicError> {
    let top = pw.len() - 1;
    let mut coeffs = vec![CycNum::zero(); top + 1];
    let mut r = s.clone();
    for k in (0..=top).rev() {
        let e = c * Exponent::from_integer(k as i64);
        let v = r
            .coeff(e)
            .ok_or_else(|| MonicError::Inconclusive(format!("coefficient of q^{e} is beyond the window")))?;
        if v.is_zero() {
            continue;
        }
        let b = v.checked_div(&zeta.pow(k as u64)).expect("nonzero leading coefficient");
        r = r.sub(&pw[k].scale(&b));
        coeffs[k] = b;
    }
    Ok((coeffs, r))
}

/// Fits `S = F^n + b_{n−1} F^{n−1} + … + b_0` and verifies it across the
/// common window.
pub fn fit_monic(s: &PuiseuxSeries, f: &PuiseuxSeries, n: usize) -> Result<MonicityReport, MonicError> {
    let (c, zeta) = pole(f)?;
    let pw = powers(f, n);
    let top = c * Exponent::from_integer(n as i64);
    let window = s.common_window(&pw[n]);
    if window.is_some_and(|w| w < top) {
        return Err(MonicError::Inconclusive("empty window".into()));
    }
    let (coeffs, residual) = peel(s, &pw, c, &zeta)?;
    let polynomial = Polynomial::new(coeffs.clone());
    let window = s.common_window(&polynomial.eval_series(f));
    // anything below q^{nc} is a failure too, and peel never touches it
    let below = s.leading().filter(|(e, _)| *e < top).map(|(e, _)| e);
    let first_failure = below.or_else(|| residual.iter().find(|(_, v)| !v.is_zero()).map(|(e, _)| e));
    let verdict = if coeffs[n].is_one() && first_failure.is_none() {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    let first_failure = match (verdict, first_failure) {
        (Verdict::Fail, None) => Some(top),
        (_, x) => x,
    };
    Ok(MonicityReport {
        verdict,
        polynomial,
        first_failure,
        window,
    })
}

/// Expresses `S` as a polynomial in `F` of degree at most `floor(v(S)/c)`.
/// Returns the polynomial and the first nonzero residual exponent, if any.
pub fn fit_polynomial(s: &PuiseuxSeries, f: &PuiseuxSeries) -> Result<(Polynomial, Option<Exponent>), MonicError> {
    let (c, zeta) = pole(f)?;
    let top = match s.valuation() {
        Some(v) if v < Exponent::zero() => (v / c).floor().to_integer().max(0) as usize,
        _ => 0,
    };
    let pw = powers(f, top);
    let (coeffs, residual) = peel(s, &pw, c, &zeta)?;
    let first = residual.iter().find(|(_, v)| !v.is_zero()).map(|(e, _)| e);
    Ok((Polynomial::new(coeffs), first))
}

/// `fit_monic(n·T_n f(pair), f(pair), n)` for every `n` in the range.
pub fn weak_monicity_check<F: PairFunction + ?Sized>(
    f: &F,
    pair: CommutingPair,
    ns: impl IntoIterator<Item = u64>,
) -> Result<Vec<MonicityReport>, MonicError> {
    let base = f.eval(pair)?;
    ns.into_iter()
        .map(|n| {
            let s = hecke_apply(f, n, pair)?;
            fit_monic(&s, &base, n as usize)
        })
        .collect()
}

/// Polynomial in `x` and `y`, stored as `(i, j) ↦ coefficient of x^i y^j`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct BivariatePolynomial {
    coeffs: BTreeMap<(usize, usize), CycNum>,
}

impl BivariatePolynomial {
    pub fn new(coeffs: impl IntoIterator<Item = ((usize, usize), CycNum)>) -> Self {
        let coeffs = coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        BivariatePolynomial { coeffs }
    }

    pub fn coeff(&self, i: usize, j: usize) -> CycNum {
        self.coeffs.get(&(i, j)).cloned().unwrap_or_else(CycNum::zero)
    }

    pub fn coeffs(&self) -> &BTreeMap<(usize, usize), CycNum> {
        &self.coeffs
    }

    pub fn x_degree(&self) -> Option<usize> {
        self.coeffs.keys().map(|k| k.0).max()
    }

    pub fn y_degree(&self) -> Option<usize> {
        self.coeffs.keys().map(|k| k.1).max()
    }

    /// Monic in `x`: the `x`-leading coefficient is the constant 1.
    pub fn is_monic_in_x(&self) -> bool {
        let Some(d) = self.x_degree() else { return false };
        self.coeffs.iter().filter(|((i, _), _)| *i == d).map(|(k, c)| (*k, c)).eq([((d, 0), &CycNum::one())])
    }

    /// `F(x, y)` on series.
    pub fn eval(&self, x: &PuiseuxSeries, y: &PuiseuxSeries) -> PuiseuxSeries {
        let dx = self.x_degree().unwrap_or(0);
        let dy = self.y_degree().unwrap_or(0);
        let xp = powers(x, dx);
        let yp = powers(y, dy);
        let mut acc = PuiseuxSeries::zero(EXACT);
        for (&(i, j), c) in &self.coeffs {
            acc = acc.add(&xp[i].mul(&yp[j]).scale(c));
        }
        acc
    }

    /// `F(y, x)`.
    pub fn swapped(&self) -> Self {
        BivariatePolynomial {
            coeffs: self.coeffs.iter().map(|(&(i, j), c)| ((j, i), c.clone())).collect(),
        }
    }

    /// One `i j <cycnum>` line per nonzero coefficient.
    pub fn to_text(&self) -> String {
        self.coeffs.iter().map(|((i, j), c)| format!("{i} {j} {c}\n")).collect()
    }

    pub fn parse(src: &str) -> Result<Self, SeriesError> {
        let mut coeffs = BTreeMap::new();
        for (ln, line) in src.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |column: usize, message: &str| SeriesError::Parse {
                line: ln + 1,
                column,
                message: message.to_string(),
            };
            let mut parts = line.splitn(3, char::is_whitespace);
            let i = parts.next().and_then(|t| t.parse::<usize>().ok()).ok_or_else(|| err(1, "expected x exponent"))?;
            let j = parts.next().and_then(|t| t.parse::<usize>().ok()).ok_or_else(|| err(1, "expected y exponent"))?;
            let rest = parts.next().ok_or_else(|| err(line.len() + 1, "expected coefficient"))?.trim();
            let c: CycNum = rest.parse().map_err(|_| err(line.len() - rest.len() + 1, "bad coefficient"))?;
            if !c.is_zero() {
                coeffs.insert((i, j), c);
            }
        }
        Ok(BivariatePolynomial { coeffs })
    }
}

impl fmt::Display for BivariatePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.coeffs.iter().rev().map(|(&(i, j), c)| {
            let mono = [power_name("x", i), power_name("y", j)]
                .into_iter()
                .filter(|s| !s.is_empty())
                .collect::<Vec<_>>()
                .join("*");
            (c.clone(), mono)
        });
        write_terms(f, terms)
    }
}

impl fmt::Debug for BivariatePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// The `p + 1` series `f(g^d, g^{-b} h^a, (aτ + b)/d)`, `ad = p`.
pub fn modular_roots<F: PairFunction + ?Sized>(f: &F, pair: CommutingPair, p: u64) -> Result<Vec<PuiseuxSeries>, MonicError> {
    let g = f.group();
    let mut roots = Vec::new();
    for (a, d) in [(p, 1), (1, p)] {
        for b in 0..d as i64 {
            let target = CommutingPair {
                g: g.pow(pair.g, d as i64),
                h: g.mul(g.pow(pair.g, -b), g.pow(pair.h, a as i64)),
            };
            roots.push(f.eval(target)?.substitute(a as u32, b, d as u32).reduced());
        }
    }
    Ok(roots)
}

/// `F_p(x, y) = Π (x − r_i)` over the roots of [`modular_roots`], with each
/// elementary symmetric function rewritten as a polynomial in `y = f(g, h)`.
pub fn modular_equation<F: PairFunction + ?Sized>(f: &F, pair: CommutingPair, p: u64) -> Result<BivariatePolynomial, MonicError> {
    if p < 2 || !(2..p).take_while(|d| d * d <= p).all(|d| p % d != 0) {
        return Err(MonicError::Domain(format!("{p} is not prime")));
    }
    let group = f.group();
    if group.pow(pair.g, p as i64) != pair.g || group.pow(pair.h, p as i64) != pair.h {
        return Err(MonicError::Domain(format!("g^{p} = g and h^{p} = h are required")));
    }
    let y = f.eval(pair)?;
    let roots = modular_roots(f, pair, p)?;
    // elementary symmetric functions e_0 … e_{p+1}
    let mut e = vec![PuiseuxSeries::one()];
    for r in &roots {
        let mut next = e.clone();
        next.push(PuiseuxSeries::zero(EXACT));
        for k in 1..next.len() {
            next[k] = e.get(k).cloned().unwrap_or_else(|| PuiseuxSeries::zero(EXACT)).add(&e[k - 1].mul(r));
        }
        e = next;
    }
    let deg = roots.len();
    let mut coeffs = BTreeMap::new();
    for (k, ek) in e.iter().enumerate() {
        let (poly, residual) = fit_polynomial(ek, &y)?;
        if let Some(exponent) = residual {
            return Err(MonicError::NotMonic { k, exponent });
        }
        for (j, c) in poly.coeffs().iter().enumerate() {
            let c = if k % 2 == 1 { c.neg() } else { c.clone() };
            coeffs.insert((deg - k, j), c);
        }
    }
    Ok(BivariatePolynomial::new(coeffs))
}

/// `F(x, y) = F(y, x)`.
pub fn symmetry_check(f: &BivariatePolynomial) -> Verdict {
    if f.swapped() == *f {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

/// Shape of the pole of a series `ζ q^{C/|g|} + …`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeadingBehavior {
    pub zeta: CycNum,
    /// `C`, when the leading exponent times `|g|` is an integer.
    pub c: Option<i64>,
    /// `(order, k)` with `ζ = e(k/order)`, when `ζ` is a root of unity.
    pub root: Option<(u64, i64)>,
    /// `ζ^{2N} = 1`.
    pub root_ok: bool,
    /// `ζ^N = 1`, the sharper bound that applies when `N` is even.
    pub root_divides_n: bool,
    /// Every stored exponent is an integer multiple of the leading one.
    pub support_ok: bool,
    /// First exponent violating the support condition.
    pub support_witness: Option<Exponent>,
}

impl LeadingBehavior {
    pub fn verdict(&self) -> Verdict {
        if self.c.is_some() && self.root_ok && self.support_ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// Classifies the leading term of `f` for an element `g` of order
/// `g_order` and an `N` with `g^N = h^N = 1`.
pub fn leading_behavior(f: &PuiseuxSeries, g_order: u64, n: u64) -> Result<LeadingBehavior, MonicError> {
    let (e, zeta) = pole(f)?;
    let ce = e * Exponent::from_integer(g_order as i64);
    let c = ce.is_integer().then(|| ce.to_integer());
    let root_ok = zeta.classify_root_of_unity_bounded(2 * n).is_some();
    let root_divides_n = zeta.classify_root_of_unity_bounded(n).is_some();
    let support_witness = f
        .iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(x, _)| x)
        .find(|x| !(*x / e).is_integer());
    Ok(LeadingBehavior {
        root: zeta.classify_root_of_unity(),
        zeta,
        c,
        root_ok,
        root_divides_n,
        support_ok: support_witness.is_none(),
        support_witness,
    })
}

/// Outcome of [`trig_type_detect`]. After `τ ↦ aτ + b` the series reads
/// `q^{-1} + a_0 + ζ q`.
#[derive(Debug, Clone)]
pub struct TrigReport {
    /// `Pass`: trigonometric type. `Inconclusive`: consistent with it on a
    /// finite window.
    pub verdict: Verdict,
    pub zeta: Option<CycNum>,
    pub a0: Option<CycNum>,
    pub transform: Option<(Exponent, Exponent)>,
    pub reason: String,
}

impl TrigReport {
    fn no(reason: impl Into<String>) -> Self {
        TrigReport {
            verdict: Verdict::Fail,
            zeta: None,
            a0: None,
            transform: None,
            reason: reason.into(),
        }
    }
}

/// Whether `f` becomes `q^{-1} + a_0 + ζ q` (`ζ` zero or a root of unity)
/// after some `τ ↦ aτ + b`.
///
/// With leading term `c_e q^e`, `a = −1/e` is forced, and `b` must satisfy
/// `e(be)·c_e = 1`, so `c_e` has to be a root of unity. The `q^{-e}`
/// coefficient then becomes `c_e c_{−e}` whatever `b` is chosen.
pub fn trig_type_detect(f: &PuiseuxSeries) -> TrigReport {
    let Some((e, lead)) = f.leading() else {
        return TrigReport::no("zero series");
    };
    if !e.is_negative() {
        return TrigReport::no("no pole at infinity");
    }
    let Some((order, k)) = lead.classify_root_of_unity() else {
        return TrigReport::no("leading coefficient is not a root of unity");
    };
    let extra = f
        .iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(x, _)| x)
        .find(|x| *x != e && !x.is_zero() && *x != -e);
    if let Some(x) = extra {
        return TrigReport::no(format!("term at q^{x}"));
    }
    let Some(top) = f.coeff(-e) else {
        return TrigReport {
            verdict: Verdict::Inconclusive,
            zeta: None,
            a0: f.coeff(Exponent::zero()),
            transform: None,
            reason: format!("window ends before q^{}", -e),
        };
    };
    let zeta = &top * lead;
    if !zeta.is_zero() && zeta.classify_root_of_unity().is_none() {
        return TrigReport::no(format!("coefficient {zeta} is neither zero nor a root of unity"));
    }
    let a = -e.recip();
    // e(b·e) = lead^{-1} = e(−k/order)
    let b = Exponent::new(-k, order as i64) / e;
    let verdict = if f.is_exact() { Verdict::Pass } else { Verdict::Inconclusive };
    TrigReport {
        verdict,
        zeta: Some(zeta),
        a0: f.coeff(Exponent::zero()),
        transform: Some((a, b)),
        reason: if f.is_exact() {
            "exact match".into()
        } else {
            "consistent on the stored window".into()
        },
    }
}
