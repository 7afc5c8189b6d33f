//! Character data for a graded family of modules `V^{i, r/N}_{k/N}` with an
//! action of `h`, the partition functions `Z(g^k, g^l h^m, τ)` built from it,
//! and the twisted denominator identity
//!
//! `p^{-1} + Σ_m A_m p^m − Σ_n B_n q^n = p^{-1} exp(−Σ_{i>0} Σ_{m>0,n} T_i(m, n) p^{im} q^{in} / i)`
//!
//! with `A_m = Tr(h|V^{1,−1/N}_{1−1/N}) Tr(h|V^{m,1/N}_{1+m/N})`,
//! `B_n = Tr(h|V^{1,n}_{1+n})` and `T_i(m, n) = Tr(h^i|V^{m,n}_{1+mn})`.

use std::collections::BTreeMap;

use num_integer::Integer;
use thiserror::Error;

use crate::cyclotomic::{CycNum, Rational};
use crate::groups::{CommutingPair, GroupTable};
use crate::hecke::{HeckeError, PairFunction};
use crate::monic::{weak_monicity_check, MonicError, MonicityReport};
use crate::qseries::{BiSeries, Exponent, PuiseuxSeries, SeriesError, EXACT};
use crate::Verdict;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DenominatorError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error(transparent)]
    Monic(#[from] MonicError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Traces `Tr(h^e | V^{i, r/N}_{k/N})`, keyed by `(i mod N, r mod N, k, e mod ord h)`.
///
/// Entries are known for `k ≤ k_max`; anything not stored is zero. The
/// `g`-eigenvalue `e(r/N)` forces `k ≡ i·r (mod N)` on nonzero entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleCharacterData {
    n: u32,
    h_order: u32,
    k_max: i64,
    p_max: i64,
    traces: BTreeMap<(u32, u32, i64, u32), CycNum>,
}

impl ModuleCharacterData {
    pub fn new(n: u32, h_order: u32, k_max: i64, p_max: i64) -> Result<Self, DenominatorError> {
        if n == 0 || h_order == 0 {
            return Err(DenominatorError::Domain("N and the order of h must be positive".into()));
        }
        Ok(ModuleCharacterData {
            n,
            h_order,
            k_max,
            p_max,
            traces: BTreeMap::new(),
        })
    }

    /// Data for `N = 1` whose `h^e`-traces are the coefficients of
    /// `series[e − 1]` (`V_{1+n}` carrying the `q^n` coefficient).
    pub fn from_series(series: &[PuiseuxSeries], p_max: i64) -> Result<Self, DenominatorError> {
        if series.is_empty() {
            return Err(DenominatorError::Domain("at least one series is required".into()));
        }
        let mut k_max = i64::MAX;
        for s in series {
            if s.reduced().denom() != 1 {
                return Err(DenominatorError::Domain("series must have integral exponents".into()));
            }
            if !s.is_exact() {
                k_max = k_max.min(1 + s.precision_num() / s.denom() as i64);
            }
        }
        if k_max == i64::MAX {
            k_max = series.iter().filter_map(|s| s.reduced().terms().last().map(|(n, _)| n + 1)).max().unwrap_or(0);
        }
        let mut data = Self::new(1, series.len() as u32, k_max, p_max)?;
        for (e, s) in series.iter().enumerate() {
            for (n, c) in s.reduced().terms() {
                if n < k_max {
                    data.insert(0, 0, n + 1, e as u64 + 1, c.clone())?;
                }
            }
        }
        Ok(data)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn h_order(&self) -> u32 {
        self.h_order
    }

    pub fn k_max(&self) -> i64 {
        self.k_max
    }

    pub fn p_max(&self) -> i64 {
        self.p_max
    }

    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    fn key(&self, i: i64, r: i64, k: i64, e: u64) -> (u32, u32, i64, u32) {
        let n = self.n as i64;
        (
            i.mod_floor(&n) as u32,
            r.mod_floor(&n) as u32,
            k,
            (e % self.h_order as u64) as u32,
        )
    }

    pub fn insert(&mut self, i: i64, r: i64, k: i64, e: u64, value: CycNum) -> Result<(), DenominatorError> {
        if k > self.k_max {
            return Err(DenominatorError::Domain(format!("grading {k} exceeds the bound {}", self.k_max)));
        }
        if (k - i * r).rem_euclid(self.n as i64) != 0 && !value.is_zero() {
            return Err(DenominatorError::Domain(format!(
                "g acts by e({r}/{}) on sector {i}, so grading {k}/{} is impossible",
                self.n, self.n
            )));
        }
        let key = self.key(i, r, k, e);
        if value.is_zero() {
            self.traces.remove(&key);
        } else {
            self.traces.insert(key, value);
        }
        Ok(())
    }

    /// `Tr(h^e | V^{i, r/N}_{k/N})`, `None` above the grading bound.
    pub fn trace(&self, i: i64, r: i64, k: i64, e: u64) -> Option<CycNum> {
        if k > self.k_max {
            return None;
        }
        Some(self.traces.get(&self.key(i, r, k, e)).cloned().unwrap_or_else(CycNum::zero))
    }

    pub fn entries(&self) -> impl Iterator<Item = ((u32, u32, i64, u32), &CycNum)> + '_ {
        self.traces.iter().map(|(&k, v)| (k, v))
    }

    /// Copy with every power's traces replaced by those of the identity.
    pub fn dimensions_only(&self) -> Self {
        let mut out = Self {
            traces: BTreeMap::new(),
            ..self.clone()
        };
        for (&(i, r, k, e), v) in &self.traces {
            if e == 0 {
                for p in 0..self.h_order {
                    out.traces.insert((i, r, k, p), v.clone());
                }
            }
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "N {}\norders h={}\nkmax {}\npmax {}\n",
            self.n, self.h_order, self.k_max, self.p_max
        );
        for (&(i, r, k, e), v) in &self.traces {
            let e = if e == 0 { self.h_order } else { e };
            s.push_str(&format!("{i} {r} {k} {e} {v}\n"));
        }
        s
    }

    pub fn parse(src: &str) -> Result<Self, DenominatorError> {
        let mut header: BTreeMap<&str, i64> = BTreeMap::new();
        let mut rows = Vec::new();
        for (ln, raw) in src.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |column: usize, message: String| DenominatorError::Parse {
                line: ln + 1,
                column,
                message,
            };
            let indent = raw.len() - raw.trim_start().len();
            let (word, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            let col = indent + line.len() - rest.len() + 1;
            match word {
                "N" | "kmax" | "pmax" => {
                    let v = rest.parse().map_err(|_| err(col, format!("expected an integer after {word}")))?;
                    header.insert(word, v);
                }
                "orders" => {
                    let v = rest
                        .strip_prefix("h=")
                        .and_then(|x| x.trim().parse().ok())
                        .ok_or_else(|| err(col, "expected h=<order>".into()))?;
                    header.insert("h", v);
                }
                _ => {
                    let mut fields = Vec::new();
                    let mut rem = line;
                    for _ in 0..4 {
                        let t = rem.trim_start();
                        let start = line.len() - t.len();
                        let (tok, after) = t.split_once(char::is_whitespace).unwrap_or((t, ""));
                        let v: i64 = tok
                            .parse()
                            .map_err(|_| err(indent + start + 1, format!("expected an integer, found {tok:?}")))?;
                        fields.push(v);
                        rem = after;
                    }
                    let t = rem.trim();
                    if t.is_empty() {
                        return Err(err(indent + line.len() + 1, "missing trace value".into()));
                    }
                    let c: CycNum = t
                        .parse()
                        .map_err(|e| err(indent + line.len() - t.len() + 1, format!("bad trace value: {e}")))?;
                    rows.push((ln + 1, fields, c));
                }
            }
        }
        let get = |k: &str| {
            header.get(k).copied().ok_or_else(|| DenominatorError::Parse {
                line: 1,
                column: 1,
                message: format!("missing header {k}"),
            })
        };
        let mut data = Self::new(get("N")? as u32, get("h")? as u32, get("kmax")?, get("pmax")?)?;
        for (line, f, c) in rows {
            if f[3] < 1 {
                return Err(DenominatorError::Parse {
                    line,
                    column: 1,
                    message: "power of h must be positive".into(),
                });
            }
            data.insert(f[0], f[1], f[2], f[3] as u64, c).map_err(|e| DenominatorError::Parse {
                line,
                column: 1,
                message: e.to_string(),
            })?;
        }
        Ok(data)
    }
}

/// The homology-side slices for one power of `h`.
#[derive(Debug, Clone)]
pub struct FrickeSideData {
    /// `Tr(h^e | V^{1,−1/N}_{1−1/N})`.
    pub pole: CycNum,
    /// `Σ_n Tr(h^e | V^{1,n}_{1+n}) q^n`.
    pub h1: PuiseuxSeries,
    /// `A_m` for `m = 1 … p_deg`.
    pub h2: Vec<CycNum>,
}

/// Slices for `h^e` through `p`-degree `p_deg`. Requires the pole slice to
/// be one-dimensional.
pub fn fricke_side(data: &ModuleCharacterData, e: u64, p_deg: i64) -> Result<FrickeSideData, DenominatorError> {
    let n = data.n as i64;
    let dim = data.trace(1, -1, n - 1, data.h_order as u64).unwrap_or_else(CycNum::zero);
    if !dim.is_one() {
        return Err(DenominatorError::Domain(format!(
            "the pole slice must be one-dimensional, its dimension is {dim}"
        )));
    }
    let pole = data.trace(1, -1, n - 1, e).expect("pole slice is within bounds");
    let h1 = orbifold_partition(data, 1, 0, e as i64);
    if p_deg > data.p_max {
        return Err(DenominatorError::Inconclusive(format!("data covers p-degree {} only", data.p_max)));
    }
    let h2 = (1..=p_deg)
        .map(|m| {
            data.trace(m, 1, n + m, e)
                .map(|t| &pole * &t)
                .ok_or_else(|| DenominatorError::Inconclusive(format!("trace at grading {} not available", n + m)))
        })
        .collect::<Result<_, _>>()?;
    Ok(FrickeSideData { pole, h1, h2 })
}

/// `Z(g^k, g^l h^m, τ) = Σ_n Σ_{r: n ∈ kr/N + Z} Tr(g^l h^m | V^{k,r/N}_{1+n}) q^n`,
/// with `g` acting on `V^{k,r/N}` by `e(r/N)`.
pub fn orbifold_partition(data: &ModuleCharacterData, k: i64, l: i64, m: i64) -> PuiseuxSeries {
    let n = data.n as i64;
    let e = m.rem_euclid(data.h_order as i64) as u32;
    let sector = k.rem_euclid(n) as u32;
    let mut terms: BTreeMap<i64, CycNum> = BTreeMap::new();
    for (&(i, r, grading, pe), v) in &data.traces {
        if i != sector || pe != e {
            continue;
        }
        // q^{grading/N − 1}
        let exponent = grading - n;
        let phase = CycNum::root(data.n, l * r as i64);
        let t = terms.entry(exponent).or_insert_with(CycNum::zero);
        *t = &*t + &(&phase * v);
    }
    PuiseuxSeries::new(data.n, terms, data.k_max - n)
}

/// Outcome of one denominator identity check.
#[derive(Debug, Clone)]
pub struct DenominatorReport {
    /// The identity was checked for `h^power`.
    pub power: u64,
    pub verdict: Verdict,
    /// `p`-degree and `q`-exponent bounds requested.
    pub window: (i64, Exponent),
    /// First differing bidegree `(m, n)`, as the coefficient of `p^m q^n`.
    pub first_mismatch: Option<(Exponent, Exponent)>,
    pub reason: String,
}

/// `p` times the left side, through `p`-degree `p_top`.
pub fn lhs_series(data: &ModuleCharacterData, e: u64, p_top: i64) -> Result<BiSeries, DenominatorError> {
    let side = fricke_side(data, e, p_top - 1)?;
    let mut layers = vec![(0, PuiseuxSeries::one()), (1, side.h1.neg())];
    for (m, a) in side.h2.iter().enumerate() {
        layers.push((m as i64 + 2, PuiseuxSeries::new(data.n, [(0, a.clone())], EXACT)));
    }
    Ok(BiSeries::new(1, layers, p_top))
}

/// `exp(−Σ_{i>0} Σ_{m>0,n} Tr(h^{ei}|V^{m,n}_{1+mn}) p^{im} q^{in} / i)`
/// through `p`-degree `p_top`.
pub fn rhs_series(data: &ModuleCharacterData, e: u64, p_top: i64) -> Result<BiSeries, DenominatorError> {
    let n = data.n as i64;
    let mut layers = Vec::new();
    for top in 1..=p_top {
        let mut terms: BTreeMap<i64, CycNum> = BTreeMap::new();
        let mut prec = EXACT;
        for m in (1..=top).filter(|m| top % m == 0) {
            let i = top / m;
            let pe = ((e * i as u64) % data.h_order as u64) as u32;
            let sector = (m % n) as u32;
            // q^{nn/N} with grading N + m·nn
            prec = prec.min(i * Integer::div_floor(&(data.k_max - n), &m));
            for (&(s, r, grading, p), v) in &data.traces {
                if s != sector || p != pe || (grading - n) % m != 0 {
                    continue;
                }
                let nn = (grading - n) / m;
                if (nn - r as i64).rem_euclid(n) != 0 {
                    continue;
                }
                let w = v.scale(&Rational::new((-1).into(), i.into()));
                let t = terms.entry(i * nn).or_insert_with(CycNum::zero);
                *t = &*t + &w;
            }
        }
        layers.push((top, PuiseuxSeries::new(data.n, terms, prec)));
    }
    Ok(BiSeries::new(1, layers, p_top).exp()?)
}

/// Checks the identity (multiplied by `p`) for each `h^e`, `e` in `powers`,
/// through `p`-degree `p_deg` and `q`-exponent `q_top` of the original
/// identity.
pub fn denominator_verify(
    data: &ModuleCharacterData,
    powers: impl IntoIterator<Item = u64>,
    p_deg: i64,
    q_top: Exponent,
) -> Result<Vec<DenominatorReport>, DenominatorError> {
    let p_top = p_deg + 1;
    powers
        .into_iter()
        .map(|e| {
            let report = |verdict, first_mismatch, reason: String| DenominatorReport {
                power: e,
                verdict,
                window: (p_deg, q_top),
                first_mismatch,
                reason,
            };
            let lhs = match lhs_series(data, e, p_top) {
                Err(DenominatorError::Inconclusive(msg)) => return Ok(report(Verdict::Inconclusive, None, msg)),
                other => other?,
            };
            let rhs = rhs_series(data, e, p_top)?;
            // differences above q_top in a low layer must not hide one inside the window higher up
            for m in 0..=p_top {
                let (l, r) = (lhs.layer(m).expect("in window"), rhs.layer(m).expect("in window"));
                if let Some(q) = l.truncate_exp(q_top).first_difference(&r.truncate_exp(q_top)) {
                    let m = Exponent::from_integer(m - 1);
                    return Ok(report(Verdict::Fail, Some((m, q)), format!("sides differ at p^{m} q^{q}")));
                }
            }
            for m in 0..=p_top {
                let (l, r) = (lhs.layer(m).expect("in window"), rhs.layer(m).expect("in window"));
                if l.common_window(&r).is_some_and(|w| w < q_top) {
                    return Ok(report(
                        Verdict::Inconclusive,
                        None,
                        format!("p-degree {} is only known through q^{}", m - 1, l.common_window(&r).unwrap()),
                    ));
                }
            }
            Ok(report(Verdict::Pass, None, "identity holds on the window".into()))
        })
        .collect()
}

/// `Z` as a function on commuting pairs of `Z/N × Z/ord(h)`, with
/// `g = (1, 0)` and `h = (0, 1)`. Only pairs whose first entry is a power
/// of `g` are defined.
pub struct OrbifoldFamily<'a> {
    data: &'a ModuleCharacterData,
    group: GroupTable,
}

impl<'a> OrbifoldFamily<'a> {
    pub fn new(data: &'a ModuleCharacterData) -> Self {
        let group = GroupTable::direct_product(
            &GroupTable::cyclic(data.n as usize),
            &GroupTable::cyclic(data.h_order as usize),
        );
        OrbifoldFamily { data, group }
    }

    fn element(&self, gp: i64, hp: i64) -> usize {
        let (n, o) = (self.data.n as i64, self.data.h_order as i64);
        (gp.rem_euclid(n) * o + hp.rem_euclid(o)) as usize
    }

    /// The pair `(g^k, g^l h^m)`.
    pub fn pair(&self, k: i64, l: i64, m: i64) -> CommutingPair {
        CommutingPair {
            g: self.element(k, 0),
            h: self.element(l, m),
        }
    }
}

impl PairFunction for OrbifoldFamily<'_> {
    fn group(&self) -> &GroupTable {
        &self.group
    }

    fn eval(&self, pair: CommutingPair) -> Result<PuiseuxSeries, HeckeError> {
        let o = self.data.h_order as usize;
        if pair.g % o != 0 {
            return Err(HeckeError::Incomplete(pair));
        }
        let k = (pair.g / o) as i64;
        let (l, m) = ((pair.h / o) as i64, (pair.h % o) as i64);
        Ok(orbifold_partition(self.data, k, l, m))
    }
}

/// Weak Hecke-monicity of `Z` at `(g^k, g^l h^m)` for each `n`.
pub fn fricke_monicity_suite(
    data: &ModuleCharacterData,
    (k, l, m): (i64, i64, i64),
    ns: impl IntoIterator<Item = u64>,
) -> Result<Vec<MonicityReport>, DenominatorError> {
    let fam = OrbifoldFamily::new(data);
    Ok(weak_monicity_check(&fam, fam.pair(k, l, m), ns)?)
}

#[cfg(test)]
mod tests;
