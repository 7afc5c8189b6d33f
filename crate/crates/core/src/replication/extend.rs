//! Recovering a completely replicable series from a few coefficients of its
//! power-of-two replicates.
//!
//! For `m, n ≥ 2` with `gcd(m, n)` a power of two, the replicate `f^{(s)}`
//! satisfies
//!
//! `H^{(s)}_{m,n} = Σ_{t | (m,n)} (1/t) a^{(st)}_{mn/t²}`,
//!
//! where `H^{(s)}_{m,n} = a^{(s)}_{m+n−1} + C^{(s)}_{m,n}` and `C` involves only
//! `a^{(s)}_k` with `k ≤ m + n − 3`. Unknowns therefore appear linearly at
//! `a^{(s)}_{m+n−1}` and at every right-hand term. Equations are swept in
//! increasing `mn` until nothing changes: one unknown is solved for, zero
//! unknowns is a consistency check.

use std::collections::{BTreeMap, HashMap};

use num_integer::Integer;

use crate::cyclotomic::{CycNum, CycSum, Rational};
use crate::hecke::divisors;

use super::{series_from_coeffs, ReplicateSet, ReplicationError};

struct Replicate {
    a: Vec<Option<CycNum>>,
    /// `L_{m,n}` cells of `log` of the difference quotient, keyed `m ≤ n`.
    cells: HashMap<(usize, usize), CycNum>,
}

impl Replicate {
    fn coeff(&self, k: usize) -> Option<&CycNum> {
        self.a.get(k).and_then(Option::as_ref)
    }

    fn prefix_known(&self, upto: usize) -> bool {
        (1..=upto).all(|k| self.coeff(k).is_some())
    }

    /// Coefficient of `p^i q^j` in the quotient minus one: `−a_{i+j−1}`.
    fn quotient(&self, i: usize, j: usize) -> CycNum {
        self.coeff(i + j - 1).expect("prefix checked").neg()
    }

    /// `C_{m,n} = (1/m) Σ_{0<i<m, 0<j<n} i L_{i,j} E_{m−i,n−j}`.
    fn correction(&mut self, m: usize, n: usize) -> CycNum {
        let mut terms = Vec::new();
        for i in 1..m {
            for j in 1..n {
                let l = self.cell(i, j);
                let e = self.quotient(m - i, n - j);
                if !l.is_zero() && !e.is_zero() {
                    terms.push((l.scale(&Rational::from_integer((i as i64).into())), e));
                }
            }
        }
        let conductor = terms
            .iter()
            .fold(1u32, |c, (x, y)| c.lcm(&x.conductor()).lcm(&y.conductor()));
        let mut acc = CycSum::new(conductor);
        for (x, y) in &terms {
            acc.add_product(x, y);
        }
        acc.finish().scale(&Rational::new(1.into(), (m as i64).into()))
    }

    /// `L_{m,n} = E_{m,n} − C_{m,n}`; needs `a` through `m + n − 1`.
    fn cell(&mut self, m: usize, n: usize) -> CycNum {
        let key = (m.min(n), m.max(n));
        if let Some(v) = self.cells.get(&key) {
            return v.clone();
        }
        let (m, n) = key;
        let v = &self.quotient(m, n) - &self.correction(m, n);
        self.cells.insert(key, v.clone());
        v
    }
}

struct Equation {
    s: u64,
    m: usize,
    n: usize,
    /// `(t, index)` for every right-hand term `(1/t) a^{(st)}_{index}`.
    rhs: Vec<(u64, usize)>,
}

/// Result of [`extend_from_partial`].
#[derive(Debug, Clone)]
pub struct ExtendOutcome {
    pub replicates: ReplicateSet,
    /// Fully determined equations that were verified.
    pub checks: usize,
}

/// Extends the power-of-two replicates given by their first coefficients
/// (`partials[t][k]` is `a^{(t)}_k`, index 0 ignored) to `a_1 … a_target`,
/// working with unknowns up to index `3·target`.
pub fn extend_from_partial(
    partials: &BTreeMap<u64, Vec<CycNum>>,
    target: usize,
) -> Result<ExtendOutcome, ReplicationError> {
    extend_with_bound(partials, target, 3 * target)
}

pub fn extend_with_bound(
    partials: &BTreeMap<u64, Vec<CycNum>>,
    target: usize,
    bound: usize,
) -> Result<ExtendOutcome, ReplicationError> {
    if !partials.contains_key(&1) {
        return Err(ReplicationError::Domain("the base series (t = 1) is required".into()));
    }
    if let Some(t) = partials.keys().find(|t| !t.is_power_of_two()) {
        return Err(ReplicationError::Domain(format!("replicate index {t} is not a power of two")));
    }
    let bound = bound.max(target);
    let mut reps: BTreeMap<u64, Replicate> = partials
        .iter()
        .map(|(&t, given)| {
            let mut a = vec![None; bound + 1];
            for (k, c) in given.iter().enumerate().skip(1).take(bound) {
                a[k] = Some(c.clone());
            }
            (t, Replicate { a, cells: HashMap::new() })
        })
        .collect();

    let mut equations = Vec::new();
    for &s in reps.keys() {
        for m in 2..=bound {
            for n in m..=bound / m {
                let g = m.gcd(&n) as u64;
                if !g.is_power_of_two() || !reps.contains_key(&(s * g)) {
                    continue;
                }
                let rhs = divisors(g).into_iter().map(|t| (t, m * n / (t * t) as usize)).collect();
                equations.push(Equation { s, m, n, rhs });
            }
        }
    }
    equations.sort_by_key(|e| (e.m * e.n, e.s, e.m));

    let mut done = vec![false; equations.len()];
    let mut checks = 0;
    loop {
        let mut progress = false;
        for (idx, eq) in equations.iter().enumerate() {
            if done[idx] {
                continue;
            }
            let lin = eq.m + eq.n - 1;
            {
                let r = &reps[&eq.s];
                if !r.prefix_known(lin - 2) {
                    continue;
                }
            }
            let mut unknown: Vec<(u64, usize, Rational)> = Vec::new();
            let r = &reps[&eq.s];
            let lin_known = r.coeff(lin).cloned();
            if lin_known.is_none() {
                unknown.push((eq.s, lin, Rational::from_integer(1.into())));
            }
            let mut rhs_sum = CycNum::zero();
            for &(t, k) in &eq.rhs {
                let w = Rational::new(1.into(), (t as i64).into());
                match reps[&(eq.s * t)].coeff(k) {
                    Some(v) => rhs_sum = &rhs_sum + &v.scale(&w),
                    None => unknown.push((eq.s * t, k, -w)),
                }
            }
            // coincident unknowns cannot happen: lin < mn and replicates differ for t > 1
            if unknown.len() > 1 {
                continue;
            }
            let c = reps.get_mut(&eq.s).unwrap().correction(eq.m, eq.n);
            // residual = a_lin + C − Σ (1/t) a^{(st)}; zero when consistent
            let mut residual = &c - &rhs_sum;
            if let Some(v) = &lin_known {
                residual = &residual + v;
            }
            done[idx] = true;
            progress = true;
            match unknown.pop() {
                None => {
                    if !residual.is_zero() {
                        return Err(ReplicationError::Inconsistent {
                            s: eq.s,
                            m: eq.m as u64,
                            n: eq.n as u64,
                            index: (eq.m * eq.n) as u64,
                        });
                    }
                    checks += 1;
                }
                Some((t, k, w)) => {
                    let value = residual.neg().scale(&(Rational::from_integer(1.into()) / w));
                    reps.get_mut(&t).unwrap().a[k] = Some(value);
                }
            }
        }
        if !progress {
            break;
        }
    }

    let mut replicates = BTreeMap::new();
    for (&t, r) in &reps {
        let mut a = vec![CycNum::zero()];
        for k in 1..=target {
            match r.coeff(k) {
                Some(v) => a.push(v.clone()),
                None if t == 1 => {
                    return Err(ReplicationError::Underdetermined { s: 1, index: k as u64 })
                }
                None => break,
            }
        }
        replicates.insert(t, series_from_coeffs(&a));
    }
    Ok(ExtendOutcome {
        replicates: ReplicateSet { replicates },
        checks,
    })
}
