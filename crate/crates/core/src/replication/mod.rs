//! Replication: Faber polynomials, the coefficients `H_{m,n}` of
//!
//! `log((f(p) − f(q)) / (p^{-1} − q^{-1})) = −Σ H_{m,n} p^m q^n`,
//!
//! replicates `f^{(t)}` defined by `H_{m,n} = Σ_{t|(m,n)} (1/t) a^{(t)}_{mn/t²}`,
//! and the replicability checks built on them.

mod extend;
mod polynomial;

use std::collections::BTreeMap;

use num_integer::Integer;
use thiserror::Error;

use crate::cyclotomic::{CycNum, Rational};
use crate::groups::{CommutingPair, GroupTable};
use crate::hecke::{divisors, EquivariantFamily, HeckeError};
use crate::qseries::{BiSeries, PuiseuxSeries, SeriesError};
use crate::Verdict;

pub use extend::{extend_from_partial, extend_with_bound, ExtendOutcome};
pub use polynomial::Polynomial;
pub(crate) use polynomial::{power_name, write_terms};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplicationError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("not replicable: H_({m},{n}) disagrees with the replicates")]
    NotReplicable { m: u64, n: u64 },
    #[error("inconsistent at index {index} (replicate {s}, equation H_({m},{n}))")]
    Inconsistent { s: u64, m: u64, n: u64, index: u64 },
    #[error("coefficient {index} of replicate {s} is not determined")]
    Underdetermined { s: u64, index: u64 },
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Hecke(#[from] HeckeError),
}

fn inconclusive(msg: impl Into<String>) -> ReplicationError {
    ReplicationError::Inconclusive(msg.into())
}

/// Checks `f = q^{-1} + Σ_{k>0} a_k q^k` and returns it over denominator 1.
pub fn check_normalized(f: &PuiseuxSeries) -> Result<PuiseuxSeries, ReplicationError> {
    let f = f.reduced();
    if f.denom() != 1 {
        return Err(ReplicationError::Domain("exponents must be integers".into()));
    }
    if f.valuation_num() != Some(-1) || !f.coeff_num(-1).is_some_and(|c| c.is_one()) {
        return Err(ReplicationError::Domain("series must begin with q^-1".into()));
    }
    if f.coeff_num(0).is_some_and(|c| !c.is_zero()) {
        return Err(ReplicationError::Domain(
            "constant term must vanish (use normalize to subtract it)".into(),
        ));
    }
    Ok(f)
}

/// Removes the constant term, returning it alongside the shifted series.
pub fn normalize(f: &PuiseuxSeries) -> (PuiseuxSeries, CycNum) {
    let a0 = f.coeff(0.into()).unwrap_or_else(CycNum::zero);
    (f.sub(&PuiseuxSeries::constant(a0.clone())), a0)
}

/// Largest index `K` with `a_K` known (`None` for exact series).
fn window(f: &PuiseuxSeries) -> Option<i64> {
    (!f.is_exact()).then(|| f.precision_num())
}

/// The monic `Φ_n` with `Φ_n(f) = q^{-n} + O(q)`, by eliminating the
/// principal parts of `f^n, f^{n−1}, …, f^0` from the top down.
pub fn faber(f: &PuiseuxSeries, n: usize) -> Result<Polynomial, ReplicationError> {
    let f = check_normalized(f)?;
    if n == 0 {
        return Ok(Polynomial::monomial(0));
    }
    if let Some(k) = window(&f) {
        if k < n as i64 - 1 {
            return Err(inconclusive(format!("Φ_{n} needs coefficients through q^{}, have q^{k}", n - 1)));
        }
    }
    let mut powers = vec![PuiseuxSeries::one()];
    for i in 1..=n {
        let next = powers[i - 1].mul(&f);
        powers.push(next);
    }
    let mut coeffs = vec![CycNum::zero(); n + 1];
    coeffs[n] = CycNum::one();
    let mut s = powers[n].clone();
    for k in (0..n).rev() {
        let c = s.coeff_num(-(k as i64)).expect("window covers the principal part");
        if !c.is_zero() {
            s = s.sub(&powers[k].scale(&c));
            coeffs[k] = c.neg();
        }
    }
    Ok(Polynomial::new(coeffs))
}

/// Values `H_{m,n}`, symmetric in `(m, n)`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HTable {
    values: BTreeMap<(u64, u64), CycNum>,
}

impl HTable {
    pub fn get(&self, m: u64, n: u64) -> Option<&CycNum> {
        self.values.get(&(m.min(n), m.max(n)))
    }

    pub fn set(&mut self, m: u64, n: u64, v: CycNum) {
        self.values.insert((m.min(n), m.max(n)), v);
    }

    /// Whether every `H_{m,n}` with `m, n ≤ size` is present.
    pub fn covers_box(&self, size: u64) -> bool {
        (1..=size).all(|m| (m..=size).all(|n| self.values.contains_key(&(m, n))))
    }

    /// Cells with `m ≤ n`.
    pub fn iter(&self) -> impl Iterator<Item = ((u64, u64), &CycNum)> + '_ {
        self.values.iter().map(|(&k, v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `log` of the difference quotient restricted to `p`-degree `≤ rows`.
fn log_quotient(f: &PuiseuxSeries, rows: Option<i64>) -> Result<BiSeries, ReplicationError> {
    let f = check_normalized(f)?;
    if f.is_exact() {
        return Err(ReplicationError::Domain("bivarial transform needs a finite window".into()));
    }
    let mut dq = BiSeries::difference_quotient(&f)?;
    if let Some(r) = rows {
        dq = dq.truncate_p(r);
    }
    Ok(dq.log()?)
}

fn table_from_log(log: &BiSeries, keep: impl Fn(u64, u64) -> bool) -> HTable {
    let mut t = HTable::default();
    for (m, layer) in log.layers() {
        if m < 1 {
            continue;
        }
        let top = layer.precision_num();
        for n in 1..=top {
            if keep(m as u64, n as u64) {
                let v = layer.coeff_num(n).expect("inside window").neg();
                t.set(m as u64, n as u64, v);
            }
        }
    }
    t
}

/// `H_{m,n}` for `m, n ≤ size`. Needs `a_k` through `k = 2·size − 1`.
pub fn bivarial(f: &PuiseuxSeries, size: u64) -> Result<HTable, ReplicationError> {
    let f = check_normalized(f)?;
    let k = window(&f).unwrap_or(2 * size as i64);
    if k < 2 * size as i64 - 1 {
        return Err(inconclusive(format!(
            "H up to {size} needs coefficients through q^{}, have q^{k}",
            2 * size - 1
        )));
    }
    let f = f.truncate(2 * size as i64 - 1);
    let log = log_quotient(&f, Some(size as i64))?;
    Ok(table_from_log(&log, |m, n| m <= size && n <= size))
}

/// Every `H_{m,n}` with `m ≤ rows` that the window determines
/// (`m + n ≤ K + 1`), together with the symmetric entries.
pub fn bivarial_rows(f: &PuiseuxSeries, rows: u64) -> Result<HTable, ReplicationError> {
    let log = log_quotient(f, Some(rows as i64))?;
    Ok(table_from_log(&log, |m, _| m <= rows))
}

/// Coefficient-by-coefficient check of `Φ_n(f) = q^{-n} + n Σ_m H_{m,n} q^m`.
#[derive(Debug, Clone)]
pub struct FaberReport {
    pub verdict: Verdict,
    pub n: u64,
    pub checked: u64,
    pub first_mismatch: Option<u64>,
}

pub fn faber_h_consistency(f: &PuiseuxSeries, n: u64, size: u64) -> Result<FaberReport, ReplicationError> {
    let f = check_normalized(f)?;
    let k = window(&f).ok_or_else(|| ReplicationError::Domain("needs a finite window".into()))?;
    if k < (size + n) as i64 - 1 {
        return Err(inconclusive(format!("need coefficients through q^{}", size + n - 1)));
    }
    let table = bivarial_rows(&f, n)?;
    faber_h_consistency_with(&f, n, size, &table)
}

/// As [`faber_h_consistency`], against a supplied table.
pub fn faber_h_consistency_with(
    f: &PuiseuxSeries,
    n: u64,
    size: u64,
    table: &HTable,
) -> Result<FaberReport, ReplicationError> {
    let f = check_normalized(f)?;
    let phi = faber(&f, n as usize)?.eval_series(&f);
    if phi.precision().is_some_and(|p| p < (size as i64).into()) {
        return Err(inconclusive(format!("Φ_{n}(f) is known only below q^{size}")));
    }
    let scale = CycNum::from_int(n as i64);
    for e in -(n as i64)..=0 {
        let want = if e == -(n as i64) { CycNum::one() } else { CycNum::zero() };
        if phi.coeff(e.into()) != Some(want) {
            return Ok(FaberReport {
                verdict: Verdict::Fail,
                n,
                checked: 0,
                first_mismatch: None,
            });
        }
    }
    for m in 1..=size {
        let h = table
            .get(m, n)
            .ok_or_else(|| inconclusive(format!("H_({m},{n}) not available")))?;
        if phi.coeff((m as i64).into()).expect("window checked") != &scale * h {
            return Ok(FaberReport {
                verdict: Verdict::Fail,
                n,
                checked: m - 1,
                first_mismatch: Some(m),
            });
        }
    }
    Ok(FaberReport {
        verdict: Verdict::Pass,
        n,
        checked: size,
        first_mismatch: None,
    })
}

/// A normalized series and its replicates `f^{(t)}`; `f^{(1)} = f`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateSet {
    pub replicates: BTreeMap<u64, PuiseuxSeries>,
}

impl ReplicateSet {
    pub fn base(&self) -> &PuiseuxSeries {
        &self.replicates[&1]
    }

    pub fn get(&self, t: u64) -> Option<&PuiseuxSeries> {
        self.replicates.get(&t)
    }
}

fn series_from_coeffs(a: &[CycNum]) -> PuiseuxSeries {
    // a[k] is the coefficient of q^k, a[0] unused
    let terms = std::iter::once((-1, CycNum::one())).chain(a.iter().enumerate().skip(1).map(|(k, c)| (k as i64, c.clone())));
    PuiseuxSeries::new(1, terms, a.len() as i64 - 1)
}

/// Replicates `f^{(t)}` for `t ≤ T`, each known as far as the window of `f`
/// allows, capped at index `max_index`. Every available `H_{m,n}` with
/// `m ≤ T` is then re-derived from the replicates; a disagreement means
/// `f` is not replicable.
pub fn extract_replicates(f: &PuiseuxSeries, t_max: u64, max_index: u64) -> Result<ReplicateSet, ReplicationError> {
    let mut f = check_normalized(f)?;
    if f.is_exact() {
        // a finite window reaching replicate index min(max_index, 16)
        let idx = max_index.min(16) as i64;
        f = f.truncate((t_max * t_max) as i64 * idx + t_max as i64);
    }
    let k = window(&f).expect("finite window");
    if k < 1 {
        return Err(inconclusive("no coefficients beyond q^-1"));
    }
    let table = bivarial_rows(&f, t_max)?;
    let mut coeffs: BTreeMap<u64, Vec<CycNum>> = BTreeMap::new();
    let base: Vec<CycNum> = (0..=k)
        .map(|i| f.coeff_num(i).expect("inside window"))
        .collect();
    coeffs.insert(1, base);
    for t in 2..=t_max {
        let mut a = vec![CycNum::zero()];
        for idx in 1u64.. {
            if idx > max_index {
                break;
            }
            let Some(h) = table.get(t, t * idx) else { break };
            let mut acc = h.clone();
            let mut ok = true;
            for s in divisors(t).into_iter().filter(|&s| s < t) {
                match coeffs[&s].get((t * t * idx / (s * s)) as usize) {
                    Some(v) => acc = &acc - &v.scale(&Rational::new(1.into(), (s as i64).into())),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                break;
            }
            a.push(acc.scale(&Rational::from_integer((t as i64).into())));
        }
        if a.len() < 2 {
            return Err(inconclusive(format!("window too short for replicate {t}")));
        }
        coeffs.insert(t, a);
    }
    // independence: every available H_{m,n} with m ≤ T must match the replicates
    for ((m, n), h) in table.iter() {
        if m > t_max {
            continue;
        }
        if let Some(v) = h_from_replicates(&coeffs, m, n) {
            if &v != h {
                return Err(ReplicationError::NotReplicable { m, n });
            }
        }
    }
    let mut replicates = BTreeMap::new();
    for (t, a) in &coeffs {
        let cap = (max_index as usize).saturating_add(1).min(a.len());
        replicates.insert(*t, series_from_coeffs(&a[..cap]));
    }
    Ok(ReplicateSet { replicates })
}

fn h_from_replicates(coeffs: &BTreeMap<u64, Vec<CycNum>>, m: u64, n: u64) -> Option<CycNum> {
    let mut acc = CycNum::zero();
    for t in divisors(m.gcd(&n)) {
        let v = coeffs.get(&t)?.get((m * n / (t * t)) as usize)?;
        acc = &acc + &v.scale(&Rational::new(1.into(), (t as i64).into()));
    }
    Some(acc)
}

/// Result of a replicability check.
#[derive(Debug, Clone)]
pub struct ReplicabilityReport {
    pub verdict: Verdict,
    pub size: u64,
    /// `((m, n), (m', n'))` with equal `gcd` and product but different `H`.
    pub witness: Option<((u64, u64), (u64, u64))>,
}

/// `H_{m,n}` depends only on `gcd(m, n)` and `mn` on the box `m, n ≤ size`.
pub fn replicability_check(f: &PuiseuxSeries, size: u64) -> Result<ReplicabilityReport, ReplicationError> {
    let table = bivarial(f, size)?;
    Ok(replicability_of_table(&table, size))
}

pub fn replicability_of_table(table: &HTable, size: u64) -> ReplicabilityReport {
    let mut seen: BTreeMap<(u64, u64), ((u64, u64), &CycNum)> = BTreeMap::new();
    let mut cells: Vec<(u64, u64)> = (1..=size).flat_map(|m| (m..=size).map(move |n| (m, n))).collect();
    cells.sort_by_key(|&(m, n)| (m * n, m));
    for (m, n) in cells {
        let Some(h) = table.get(m, n) else { continue };
        let key = (m.gcd(&n), m * n);
        match seen.get(&key) {
            Some((first, v)) if *v != h => {
                return ReplicabilityReport {
                    verdict: Verdict::Fail,
                    size,
                    witness: Some((*first, (m, n))),
                }
            }
            Some(_) => {}
            None => {
                seen.insert(key, ((m, n), h));
            }
        }
    }
    ReplicabilityReport {
        verdict: Verdict::Pass,
        size,
        witness: None,
    }
}

/// One finding of the complete-replicability check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CompleteFinding {
    /// The base series is not replicable on the requested box.
    BaseNotReplicable { witness: ((u64, u64), (u64, u64)) },
    /// `f^{(t)}` is not replicable on the box it determines.
    ReplicateNotReplicable { t: u64, size: u64, witness: Option<((u64, u64), (u64, u64))> },
    /// The `s`-th replicate of `f^{(t)}` differs from `f^{(st)}` at `q^index`.
    ChainMismatch { t: u64, s: u64, index: i64 },
    /// Not enough coefficients to check `f^{(t)}`.
    ShortWindow { t: u64 },
}

#[derive(Debug, Clone)]
pub struct CompleteReport {
    pub verdict: Verdict,
    pub findings: Vec<CompleteFinding>,
    /// Box used for each replicate.
    pub boxes: BTreeMap<u64, u64>,
}

/// `f` is replicable on the `size` box, every `f^{(t)}` with `t ≤ T` is
/// replicable on the box its window supports (at most `size`), and
/// `(f^{(t)})^{(s)} = f^{(st)}` wherever both are known.
pub fn complete_replicability_check(f: &PuiseuxSeries, t_max: u64, size: u64) -> Result<CompleteReport, ReplicationError> {
    let f = check_normalized(f)?;
    let base = replicability_check(&f, size)?;
    let mut findings = Vec::new();
    let mut boxes = BTreeMap::from([(1, size)]);
    if let Some(w) = base.witness {
        findings.push(CompleteFinding::BaseNotReplicable { witness: w });
        return Ok(CompleteReport {
            verdict: Verdict::Fail,
            findings,
            boxes,
        });
    }
    let reps = match extract_replicates(&f, t_max, u64::MAX / 4) {
        Ok(r) => r,
        Err(ReplicationError::NotReplicable { m, n }) => {
            findings.push(CompleteFinding::BaseNotReplicable { witness: ((m, n), (m, n)) });
            return Ok(CompleteReport {
                verdict: Verdict::Fail,
                findings,
                boxes,
            });
        }
        Err(e) => return Err(e),
    };
    let mut inconclusive = false;
    for t in 2..=t_max {
        let ft = &reps.replicates[&t];
        let kt = ft.precision_num().max(0) as u64;
        let bt = ((kt + 1) / 2).min(size);
        if bt < 2 {
            findings.push(CompleteFinding::ShortWindow { t });
            inconclusive = true;
            continue;
        }
        boxes.insert(t, bt);
        let rep = replicability_check(ft, bt)?;
        if rep.verdict == Verdict::Fail {
            findings.push(CompleteFinding::ReplicateNotReplicable { t, size: bt, witness: rep.witness });
            continue;
        }
        let s_max = t_max / t;
        if s_max < 2 {
            continue;
        }
        match extract_replicates(ft, s_max, u64::MAX / 4) {
            Ok(sub) => {
                for s in 2..=s_max {
                    if let Some(e) = sub.replicates[&s].first_difference(&reps.replicates[&(s * t)]) {
                        findings.push(CompleteFinding::ChainMismatch { t, s, index: e.to_integer() });
                    }
                }
            }
            Err(ReplicationError::NotReplicable { m, n }) => findings.push(CompleteFinding::ReplicateNotReplicable {
                t,
                size: bt,
                witness: Some(((m, n), (m, n))),
            }),
            Err(ReplicationError::Inconclusive(_)) => {
                findings.push(CompleteFinding::ShortWindow { t });
                inconclusive = true;
            }
            Err(e) => return Err(e),
        }
    }
    let failed = findings.iter().any(|f| !matches!(f, CompleteFinding::ShortWindow { .. }));
    let verdict = if failed {
        Verdict::Fail
    } else if inconclusive {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };
    Ok(CompleteReport { verdict, findings, boxes })
}

/// The family on `Z/N` with `f(1, g^m, τ) = f^{(m)}`, defined on the pairs
/// with trivial first entry.
pub fn replicates_to_family(set: &ReplicateSet, order: u64) -> Result<EquivariantFamily, ReplicationError> {
    if order == 0 {
        return Err(ReplicationError::Domain("order must be positive".into()));
    }
    for (&t, s) in &set.replicates {
        if let Some(other) = set.replicates.get(&(t + order)) {
            if s.first_difference(other).is_some() {
                return Err(ReplicationError::Domain(format!(
                    "replicates {t} and {} differ, so the order is not {order}",
                    t + order
                )));
            }
        }
    }
    let group = GroupTable::cyclic(order as usize);
    let mut fam = EquivariantFamily::new(group);
    for m in 0..order {
        let t = if m == 0 { order } else { m };
        let s = set
            .replicates
            .get(&t)
            .ok_or_else(|| ReplicationError::Domain(format!("replicate {t} missing")))?;
        fam.insert(CommutingPair { g: 0, h: m as usize }, s.clone())?;
    }
    Ok(fam)
}

/// Inverse of [`replicates_to_family`]: reads `f^{(m)} = f(1, g^m)` for
/// `1 ≤ m ≤ N` off a family on `Z/N`.
pub fn family_to_replicates(fam: &EquivariantFamily) -> Result<ReplicateSet, ReplicationError> {
    let n = fam.group().order() as u64;
    let mut replicates = BTreeMap::new();
    for m in 1..=n {
        let s = fam.get(CommutingPair { g: 0, h: (m % n) as usize })?;
        replicates.insert(m, s);
    }
    Ok(ReplicateSet { replicates })
}

#[cfg(test)]
mod tests;
