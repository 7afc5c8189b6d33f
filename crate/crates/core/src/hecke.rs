//! Equivariant Hecke operators on families of series indexed by commuting
//! pairs, and the brute-force isogeny enumeration used to cross-check them.
//!
//! All operators return `n·T_n`, which keeps coefficients in the ring
//! generated by the input:
//!
//! `n·T_n f(g, h, τ) = Σ_{ad=n, 0≤b<d} f(g^d, g^{-b} h^a, (aτ + b)/d)`.

use std::collections::HashMap;

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cyclotomic::{CycNum, Rational};
use crate::groups::{pair_canonicalize, translation_stabilizer, CanonMode, CommutingPair, GroupError, GroupTable};
use crate::qseries::{Exponent, PuiseuxSeries, SeriesError};
use crate::Verdict;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HeckeError {
    #[error("incomplete family: no entry for pair ({}, {})", .0.g, .0.h)]
    Incomplete(CommutingPair),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Anything that assigns a series to each commuting pair.
pub trait PairFunction {
    fn group(&self) -> &GroupTable;
    fn eval(&self, pair: CommutingPair) -> Result<PuiseuxSeries, HeckeError>;
}

/// A function on commuting pairs that is invariant under simultaneous
/// conjugation and satisfies `f(g, g^k h, τ) = f(g, h, τ + k)`. Values are
/// stored once per class; lookups of other representatives apply the phase.
#[derive(Clone, Debug)]
pub struct EquivariantFamily {
    group: GroupTable,
    table: HashMap<CommutingPair, PuiseuxSeries>,
}

impl EquivariantFamily {
    pub fn new(group: GroupTable) -> Self {
        EquivariantFamily {
            group,
            table: HashMap::new(),
        }
    }

    /// Family on the trivial group.
    pub fn trivial(f: PuiseuxSeries) -> Self {
        let mut fam = Self::new(GroupTable::cyclic(1));
        fam.insert(CommutingPair { g: 0, h: 0 }, f).expect("trivial family");
        fam
    }

    /// Records `f(pair, τ)`. The series must live in `q^{1/|g|}` and be
    /// compatible with every translation fixing the pair's class.
    pub fn insert(&mut self, pair: CommutingPair, f: PuiseuxSeries) -> Result<(), HeckeError> {
        let pair = CommutingPair::new(&self.group, pair.g, pair.h)?;
        let order = self.group.elem_order(pair.g);
        let f = f.reduced();
        if order % f.denom() as u64 != 0 {
            return Err(SeriesError::Domain(format!(
                "exponents in 1/{} for an element of order {order}",
                f.denom()
            ))
            .into());
        }
        let j0 = translation_stabilizer(&self.group, pair) as i64;
        let bad = f.terms().find(|(n, _)| {
            let m = f.denom() as i64;
            (n * j0) % m != 0
        });
        if let Some((n, _)) = bad {
            return Err(SeriesError::Domain(format!(
                "term q^{} is not invariant under the translation by {j0} fixing the pair",
                Exponent::new(n, f.denom() as i64)
            ))
            .into());
        }
        let (canon, k) = pair_canonicalize(&self.group, pair, CanonMode::Translation);
        // f(pair, τ) = f(canon, τ + k), so f(canon, τ) = f(pair, τ − k)
        let stored = if k == 0 { f } else { f.substitute(1, -k, 1) };
        self.table.insert(canon, stored);
        Ok(())
    }

    pub fn group(&self) -> &GroupTable {
        &self.group
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// Stored class representatives and their series, sorted by pair.
    pub fn entries(&self) -> Vec<(CommutingPair, &PuiseuxSeries)> {
        let mut v: Vec<_> = self.table.iter().map(|(p, s)| (*p, s)).collect();
        v.sort_by_key(|(p, _)| *p);
        v
    }

    pub fn get(&self, pair: CommutingPair) -> Result<PuiseuxSeries, HeckeError> {
        let (canon, k) = pair_canonicalize(&self.group, pair, CanonMode::Translation);
        let s = self.table.get(&canon).ok_or(HeckeError::Incomplete(canon))?;
        Ok(if k == 0 { s.clone() } else { s.substitute(1, k, 1) })
    }

    /// Applies `op` to every stored series.
    pub fn map(&self, op: impl Fn(&PuiseuxSeries) -> PuiseuxSeries) -> Self {
        EquivariantFamily {
            group: self.group.clone(),
            table: self.table.iter().map(|(p, s)| (*p, op(s))).collect(),
        }
    }

    /// `α·self + β·other` on the classes present in both.
    pub fn combine(&self, alpha: &CycNum, other: &Self, beta: &CycNum) -> Self {
        let table = self
            .table
            .iter()
            .filter_map(|(p, s)| other.table.get(p).map(|t| (*p, s.scale(alpha).add(&t.scale(beta)))))
            .collect();
        EquivariantFamily {
            group: self.group.clone(),
            table,
        }
    }

    /// A reproducible random family on every class: coefficients from a fixed
    /// small cyclotomic set on the exponent window `[−2, top]`.
    pub fn random(group: &GroupTable, seed: u64, top: i64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let palette = random_palette();
        let mut fam = Self::new(group.clone());
        let mut reps: Vec<CommutingPair> = group
            .commuting_pairs()
            .into_iter()
            .map(|p| pair_canonicalize(group, p, CanonMode::Translation).0)
            .collect();
        reps.sort();
        reps.dedup();
        for rep in reps {
            let m = group.elem_order(rep.g) as i64;
            let j0 = translation_stabilizer(group, rep) as i64;
            let terms: Vec<(i64, CycNum)> = (-2 * m..=top * m)
                .filter(|n| (n * j0) % m == 0)
                .map(|n| (n, palette[rng.gen_range(0..palette.len())].clone()))
                .collect();
            let s = PuiseuxSeries::new(m as u32, terms, top * m);
            fam.insert(rep, s).expect("random family respects stabilizers");
        }
        fam
    }
}

fn random_palette() -> Vec<CycNum> {
    vec![
        CycNum::zero(),
        CycNum::one(),
        CycNum::from_int(-1),
        CycNum::from_int(2),
        CycNum::from_int(-3),
        CycNum::root(3, 1),
        CycNum::root(4, 1),
        CycNum::from_frac(1, 2),
        &CycNum::one() + &CycNum::root(8, 1),
    ]
}

impl PairFunction for EquivariantFamily {
    fn group(&self) -> &GroupTable {
        &self.group
    }

    fn eval(&self, pair: CommutingPair) -> Result<PuiseuxSeries, HeckeError> {
        self.get(pair)
    }
}

/// `n·T_n f`, evaluated lazily on demand.
pub struct HeckeImage<'a, F: PairFunction> {
    pub inner: &'a F,
    pub n: u64,
}

impl<F: PairFunction> PairFunction for HeckeImage<'_, F> {
    fn group(&self) -> &GroupTable {
        self.inner.group()
    }

    fn eval(&self, pair: CommutingPair) -> Result<PuiseuxSeries, HeckeError> {
        hecke_apply(self.inner, self.n, pair)
    }
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut v: Vec<u64> = (1..=n).take_while(|d| d * d <= n).filter(|d| n % d == 0).collect();
    let big: Vec<u64> = v.iter().rev().map(|d| n / d).filter(|&e| e * e != n).collect();
    v.extend(big);
    v
}

/// `n·T_n f(g, h, τ)`.
pub fn hecke_apply<F: PairFunction + ?Sized>(f: &F, n: u64, pair: CommutingPair) -> Result<PuiseuxSeries, HeckeError> {
    assert!(n >= 1, "Hecke index must be positive");
    let group = f.group();
    let mut acc: Option<PuiseuxSeries> = None;
    for d in divisors(n) {
        let a = n / d;
        for b in 0..d as i64 {
            let g = group.pow(pair.g, d as i64);
            let h = group.mul(group.pow(pair.g, -b), group.pow(pair.h, a as i64));
            let term = f.eval(CommutingPair { g, h })?.substitute(a as u32, b, d as u32);
            acc = Some(match acc {
                None => term,
                Some(s) => s.add(&term),
            });
        }
    }
    Ok(acc.expect("at least one isogeny").reduced())
}

/// Outcome of comparing two series on their common window.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub verdict: Verdict,
    pub window: Option<Exponent>,
    pub first_mismatch: Option<Exponent>,
    pub lhs: PuiseuxSeries,
    pub rhs: PuiseuxSeries,
}

impl Comparison {
    pub fn new(lhs: PuiseuxSeries, rhs: PuiseuxSeries) -> Self {
        let window = lhs.common_window(&rhs);
        let empty = match (window, lhs.valuation().min(rhs.valuation())) {
            (Some(w), Some(v)) => w < v,
            (Some(w), None) => w < Exponent::from_integer(0) && lhs.is_zero() && rhs.is_zero(),
            _ => false,
        };
        let first_mismatch = lhs.first_difference(&rhs);
        let verdict = if first_mismatch.is_some() {
            Verdict::Fail
        } else if empty {
            Verdict::Inconclusive
        } else {
            Verdict::Pass
        };
        Comparison {
            verdict,
            window,
            first_mismatch,
            lhs,
            rhs,
        }
    }
}

/// Checks `km·T_k T_m f(g, h) = Σ_{t | (k, m)} t · (km/t²)T_{km/t²} f(g^t, h^t)`.
pub fn hecke_compose_check<F: PairFunction>(f: &F, k: u64, m: u64, pair: CommutingPair) -> Result<Comparison, HeckeError> {
    let lhs = hecke_apply(&HeckeImage { inner: f, n: m }, k, pair)?;
    let group = f.group();
    let mut rhs: Option<PuiseuxSeries> = None;
    for t in divisors(k.gcd(&m)) {
        let p = CommutingPair {
            g: group.pow(pair.g, t as i64),
            h: group.pow(pair.h, t as i64),
        };
        let term = hecke_apply(f, k * m / (t * t), p)?.scale_rational(&Rational::from_integer(t.into()));
        rhs = Some(match rhs {
            None => term,
            Some(s) => s.add(&term),
        });
    }
    let cmp = Comparison::new(lhs, rhs.expect("t = 1 always divides"));
    if cmp.verdict == Verdict::Inconclusive {
        return Err(HeckeError::Inconclusive("empty common precision window".into()));
    }
    Ok(cmp)
}

/// A sublattice of index `n`: the isogeny with source basis `(−d, aτ + b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Isogeny {
    pub a: u64,
    pub b: u64,
    pub d: u64,
    pub primitive: bool,
}

#[derive(Debug, Clone)]
pub struct IsogenyList {
    pub n: u64,
    pub triples: Vec<Isogeny>,
}

impl IsogenyList {
    pub fn total(&self) -> usize {
        self.triples.len()
    }

    pub fn primitive(&self) -> usize {
        self.triples.iter().filter(|t| t.primitive).count()
    }
}

/// Every `(a, b, d)` with `ad = n`, `0 ≤ b < d`, flagging `gcd(a, b, d) = 1`.
pub fn isogeny_oracle(n: u64) -> IsogenyList {
    assert!(n >= 1);
    let mut triples = Vec::new();
    for a in 1..=n {
        if n % a != 0 {
            continue;
        }
        let d = n / a;
        for b in 0..d {
            triples.push(Isogeny {
                a,
                b,
                d,
                primitive: a.gcd(&b).gcd(&d) == 1,
            });
        }
    }
    IsogenyList { n, triples }
}

/// Both sides of the composition identity summed over explicit isogeny
/// triples: the left side over composites `(aa', a'b + b'd, dd')` of a
/// degree-`m` isogeny after a degree-`k` one, the right over
/// `t·(A, B, D)` for `t | (k, m)` and `(A, B, D)` of degree `km/t²`,
/// each weighted by `t`.
pub fn compose_by_isogenies<F: PairFunction>(
    f: &F,
    k: u64,
    m: u64,
    pair: CommutingPair,
) -> Result<(PuiseuxSeries, PuiseuxSeries), HeckeError> {
    let group = f.group();
    let eval_triple = |a: u64, b: i64, d: u64| -> Result<PuiseuxSeries, HeckeError> {
        let g = group.pow(pair.g, d as i64);
        let h = group.mul(group.pow(pair.g, -b), group.pow(pair.h, a as i64));
        Ok(f.eval(CommutingPair { g, h })?.substitute(a as u32, b, d as u32))
    };
    let mut lhs: Option<PuiseuxSeries> = None;
    for outer in isogeny_oracle(k).triples {
        for inner in isogeny_oracle(m).triples {
            let a = outer.a * inner.a;
            let b = (inner.a * outer.b + inner.b * outer.d) as i64;
            let d = outer.d * inner.d;
            let term = eval_triple(a, b, d)?;
            lhs = Some(lhs.map_or(term.clone(), |s| s.add(&term)));
        }
    }
    let mut rhs: Option<PuiseuxSeries> = None;
    for t in divisors(k.gcd(&m)) {
        for iso in isogeny_oracle(k * m / (t * t)).triples {
            let term = eval_triple(t * iso.a, (t * iso.b) as i64, t * iso.d)?
                .scale_rational(&Rational::from_integer(t.into()));
            rhs = Some(rhs.map_or(term.clone(), |s| s.add(&term)));
        }
    }
    Ok((lhs.unwrap(), rhs.unwrap()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn int(n: i64) -> CycNum {
        CycNum::from_int(n)
    }

    #[test]
    fn isogeny_counts() {
        assert_eq!(isogeny_oracle(4).total(), 7);
        let six = isogeny_oracle(6);
        assert_eq!((six.total(), six.primitive()), (12, 12));
        assert_eq!(isogeny_oracle(1).triples, vec![Isogeny { a: 1, b: 0, d: 1, primitive: true }]);
        // 4: the triple (2, 0, 2) is the only imprimitive one
        assert_eq!(isogeny_oracle(4).primitive(), 6);
    }

    #[test]
    fn identity_operator() {
        let f = EquivariantFamily::random(&GroupTable::cyclic(4), 3, 4);
        for p in f.group().commuting_pairs() {
            assert_eq!(hecke_apply(&f, 1, p).unwrap(), f.get(p).unwrap());
        }
    }

    #[test]
    fn pole_only_family_is_monic_power() {
        // q^-1 on every component: Σ_b e(−b/d) kills the d > 1 terms for prime n
        let g = GroupTable::cyclic(5);
        let mut fam = EquivariantFamily::new(g.clone());
        for p in g.commuting_pairs() {
            fam.insert(p, PuiseuxSeries::monomial(int(1), -1, 1)).unwrap();
        }
        for n in [2u64, 3] {
            let pair = CommutingPair { g: 0, h: 1 };
            let out = hecke_apply(&fam, n, pair).unwrap();
            assert_eq!(out, PuiseuxSeries::monomial(int(1), -(n as i64), 1));
        }
    }

    #[test]
    fn lookup_applies_translation_phase() {
        let g = GroupTable::cyclic(3);
        let mut fam = EquivariantFamily::new(g.clone());
        let s = PuiseuxSeries::new(3, [(-1, int(1)), (2, int(5))], 6);
        fam.insert(CommutingPair { g: 1, h: 0 }, s.clone()).unwrap();
        // f(g, g h, τ) = f(g, h, τ + 1)
        let shifted = fam.get(CommutingPair { g: 1, h: 1 }).unwrap();
        assert_eq!(shifted, s.substitute(1, 1, 1));
        assert!(matches!(
            fam.get(CommutingPair { g: 2, h: 0 }),
            Err(HeckeError::Incomplete(_))
        ));
    }

    #[test]
    fn incompatible_exponents_rejected() {
        let mut fam = EquivariantFamily::new(GroupTable::cyclic(2));
        let bad = PuiseuxSeries::new(3, [(1, int(1))], 3);
        assert!(fam.insert(CommutingPair { g: 1, h: 0 }, bad).is_err());
    }

    #[test]
    fn coprime_composition_is_single_operator() {
        let f = EquivariantFamily::random(&GroupTable::symmetric3(), 9, 6);
        for p in f.group().commuting_pairs() {
            let cmp = hecke_compose_check(&f, 2, 3, p).unwrap();
            assert_eq!(cmp.verdict, Verdict::Pass);
            let direct = hecke_apply(&f, 6, p).unwrap();
            assert_eq!(cmp.rhs, direct);
        }
    }

    #[test]
    fn composition_on_z4() {
        let g = GroupTable::cyclic(4);
        for seed in 0..3 {
            let f = EquivariantFamily::random(&g, seed, 8);
            for p in g.commuting_pairs() {
                let cmp = hecke_compose_check(&f, 2, 2, p).unwrap();
                assert_eq!(cmp.verdict, Verdict::Pass, "{p:?}");
                let (l, r) = compose_by_isogenies(&f, 2, 2, p).unwrap();
                assert_eq!(l.first_difference(&cmp.lhs), None);
                assert_eq!(r.first_difference(&cmp.rhs), None);
            }
        }
    }

    /// Adds a perturbation when one exact pair is queried, ignoring the
    /// equivariance that the family normally enforces.
    struct Corrupted<'a> {
        inner: &'a EquivariantFamily,
        at: CommutingPair,
        exponent: i64,
    }

    impl PairFunction for Corrupted<'_> {
        fn group(&self) -> &GroupTable {
            self.inner.group()
        }
        fn eval(&self, pair: CommutingPair) -> Result<PuiseuxSeries, HeckeError> {
            let s = self.inner.get(pair)?;
            if pair != self.at {
                return Ok(s);
            }
            let m = s.denom();
            Ok(s.add(&PuiseuxSeries::new(m, [(self.exponent * m as i64, int(1))], s.precision_num())))
        }
    }

    #[test]
    fn corrupted_family_is_located() {
        let g = GroupTable::cyclic(4);
        let f = EquivariantFamily::random(&g, 1, 8);
        let pair = CommutingPair { g: 1, h: 0 };
        let mut located = 0;
        for at in g.commuting_pairs() {
            let bad = Corrupted { inner: &f, at, exponent: 1 };
            let cmp = hecke_compose_check(&bad, 2, 2, pair).unwrap();
            if cmp.verdict == Verdict::Fail {
                assert!(cmp.first_mismatch.is_some());
                located += 1;
            }
        }
        assert!(located > 0);
    }

    #[test]
    fn trivial_group_is_classical() {
        let f = PuiseuxSeries::new(1, (-1..=30).map(|n| (n, int(n * n - 3 * n + 1))), 30);
        let fam = EquivariantFamily::trivial(f.clone());
        let c = |k: i64| f.coeff_num(k).unwrap();
        let id = CommutingPair { g: 0, h: 0 };
        for n in 1..=6u64 {
            let out = hecke_apply(&fam, n, id).unwrap();
            // coefficient of q^m is Σ_{a | (m, n)} (n/a) c(mn/a²)
            let top = (30 / n as i64).min(out.precision().unwrap().floor().to_integer());
            for m in -(n as i64)..=top {
                let mut want = CycNum::zero();
                for a in divisors(n) {
                    let a = a as i64;
                    if m % a == 0 {
                        let idx = m * n as i64 / (a * a);
                        want += &(&c(idx) * &int(n as i64 / a));
                    }
                }
                assert_eq!(out.coeff(Exponent::from_integer(m)).unwrap(), want, "n={n} m={m}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn linearity(s1 in 0u64..1000, s2 in 0u64..1000, n in 1u64..5) {
            let g = GroupTable::cyclic(3);
            let f1 = EquivariantFamily::random(&g, s1, 5);
            let f2 = EquivariantFamily::random(&g, s2, 5);
            let (alpha, beta) = (CycNum::from_int(2), CycNum::root(3, 1));
            let combo = f1.combine(&alpha, &f2, &beta);
            for p in g.commuting_pairs() {
                let lhs = hecke_apply(&combo, n, p).unwrap();
                let rhs = hecke_apply(&f1, n, p).unwrap().scale(&alpha).add(&hecke_apply(&f2, n, p).unwrap().scale(&beta));
                prop_assert_eq!(lhs, rhs);
            }
        }

        #[test]
        fn representative_independence(seed in 0u64..1000, n in 1u64..7) {
            let g = GroupTable::symmetric3();
            let f = EquivariantFamily::random(&g, seed, 5);
            for p in g.commuting_pairs() {
                for d in divisors(n) {
                    let a = n / d;
                    for b in 0..d as i64 {
                        let term = |b: i64| {
                            let gg = g.pow(p.g, d as i64);
                            let hh = g.mul(g.pow(p.g, -b), g.pow(p.h, a as i64));
                            f.get(CommutingPair { g: gg, h: hh }).unwrap().substitute(a as u32, b, d as u32)
                        };
                        prop_assert_eq!(term(b), term(b + d as i64));
                    }
                }
            }
        }
    }
}
