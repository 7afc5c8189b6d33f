//! Exact arithmetic in cyclotomic fields `Q(ζ_L)`.
//!
//! An element is stored in the power basis `1, z, …, z^{φ(L)-1}` with
//! `z = e(1/L)`, reduced modulo the `L`-th cyclotomic polynomial. Every value
//! carries the smallest conductor whose field contains it, so two equal field
//! elements always have identical representations.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CycError {
    #[error("division by zero in Q(zeta_{0})")]
    DivisionByZero(u32),
    #[error("malformed cyclotomic number `{0}`: {1}")]
    Parse(String, String),
}

/// Per-conductor tables, built once and shared.
struct Conductor {
    modulus: u32,
    phi: usize,
    /// `z^j mod Φ_L` for `0 <= j < L`, each of length `phi`.
    powers: Vec<Vec<i64>>,
    /// One entry per prime divisor of the conductor.
    descents: Vec<Descent>,
}

/// Data for recognising elements of `Q(ζ_{L/p}) ⊂ Q(ζ_L)`.
struct Descent {
    sub: u32,
    /// `sub_phi` rows of the embedding matrix that form an invertible block.
    pivots: Vec<usize>,
    /// Inverse of that block, `sub_phi × sub_phi`.
    inverse: Vec<Vec<Rational>>,
    /// Column `k` is `ζ_sub^k` written in the basis of `Q(ζ_L)`.
    embed: Vec<Vec<i64>>,
}

fn registry() -> &'static RwLock<HashMap<u32, Arc<Conductor>>> {
    static REG: OnceLock<RwLock<HashMap<u32, Arc<Conductor>>>> = OnceLock::new();
    REG.get_or_init(|| RwLock::new(HashMap::new()))
}

fn cyclo_registry() -> &'static RwLock<HashMap<u32, Arc<Vec<i64>>>> {
    static REG: OnceLock<RwLock<HashMap<u32, Arc<Vec<i64>>>>> = OnceLock::new();
    REG.get_or_init(|| RwLock::new(HashMap::new()))
}

pub fn euler_phi(n: u64) -> u64 {
    let mut n = n;
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

pub fn prime_divisors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut n = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Coefficients of the `n`-th cyclotomic polynomial, lowest degree first.
pub fn cyclotomic_polynomial(n: u32) -> Arc<Vec<i64>> {
    if let Some(p) = cyclo_registry().read().unwrap().get(&n) {
        return p.clone();
    }
    // x^n - 1 divided by every Φ_d with d | n, d < n.
    let mut poly = vec![0i64; n as usize + 1];
    poly[0] = -1;
    poly[n as usize] = 1;
    for d in 1..n {
        if n % d == 0 {
            let divisor = cyclotomic_polynomial(d);
            poly = exact_div_monic(&poly, &divisor);
        }
    }
    let poly = Arc::new(poly);
    cyclo_registry().write().unwrap().insert(n, poly.clone());
    poly
}

fn exact_div_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dn = den.len() - 1;
    let qn = num.len() - 1 - dn;
    let mut quot = vec![0i64; qn + 1];
    for i in (0..=qn).rev() {
        let c = rem[i + dn];
        quot[i] = c;
        if c != 0 {
            for (j, &dc) in den.iter().enumerate() {
                rem[i + j] -= c * dc;
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quot
}

fn conductor(l: u32) -> Arc<Conductor> {
    if let Some(c) = registry().read().unwrap().get(&l) {
        return c.clone();
    }
    let built = Arc::new(build_conductor(l));
    registry().write().unwrap().entry(l).or_insert(built).clone()
}

fn build_conductor(l: u32) -> Conductor {
    let cyclo = cyclotomic_polynomial(l);
    let phi = cyclo.len() - 1;
    let mut powers = Vec::with_capacity(l as usize);
    let mut cur = vec![0i64; phi];
    cur[0] = 1;
    for _ in 0..l {
        powers.push(cur.clone());
        // multiply by z and reduce
        let top = cur[phi - 1];
        let mut next = vec![0i64; phi];
        for i in (1..phi).rev() {
            next[i] = cur[i - 1];
        }
        if top != 0 {
            for i in 0..phi {
                next[i] -= top * cyclo[i];
            }
        }
        cur = next;
    }
    let descents = prime_divisors(l as u64)
        .into_iter()
        .map(|p| build_descent(l, p as u32, &powers, phi))
        .collect();
    Conductor {
        modulus: l,
        phi,
        powers,
        descents,
    }
}

fn build_descent(l: u32, p: u32, powers: &[Vec<i64>], phi: usize) -> Descent {
    let sub = l / p;
    let sub_phi = euler_phi(sub as u64) as usize;
    let embed: Vec<Vec<i64>> = (0..sub_phi)
        .map(|k| powers[(k * p as usize) % l as usize].clone())
        .collect();
    // Row-reduce the transpose to find independent rows of the phi × sub_phi matrix.
    let mut rows: Vec<Vec<Rational>> = (0..phi)
        .map(|r| {
            (0..sub_phi)
                .map(|c| Rational::from_integer(BigInt::from(embed[c][r])))
                .collect()
        })
        .collect();
    let mut pivots = Vec::new();
    let mut basis: Vec<(usize, Vec<Rational>)> = Vec::new();
    for (r, row) in rows.iter_mut().enumerate() {
        let mut v = row.clone();
        for (pc, b) in &basis {
            if !v[*pc].is_zero() {
                let f = v[*pc].clone() / b[*pc].clone();
                for c in 0..sub_phi {
                    v[c] -= f.clone() * b[c].clone();
                }
            }
        }
        if let Some(pc) = v.iter().position(|x| !x.is_zero()) {
            basis.push((pc, v));
            pivots.push(r);
            if pivots.len() == sub_phi {
                break;
            }
        }
    }
    assert_eq!(pivots.len(), sub_phi, "embedding of Q(zeta_{sub}) is not injective");
    let block: Vec<Vec<Rational>> = pivots
        .iter()
        .map(|&r| {
            (0..sub_phi)
                .map(|c| Rational::from_integer(BigInt::from(embed[c][r])))
                .collect()
        })
        .collect();
    let inverse = invert_matrix(block).expect("pivot block is invertible");
    Descent {
        sub,
        pivots,
        inverse,
        embed,
    }
}

/// Gauss-Jordan inverse over the rationals; `None` if singular.
pub(crate) fn invert_matrix(mut a: Vec<Vec<Rational>>) -> Option<Vec<Vec<Rational>>> {
    let n = a.len();
    let mut inv: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let p = a[col][col].clone();
        for j in 0..n {
            a[col][j] /= p.clone();
            inv[col][j] /= p.clone();
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in 0..n {
                    let t = f.clone() * a[col][j].clone();
                    a[r][j] -= t;
                    let t = f.clone() * inv[col][j].clone();
                    inv[r][j] -= t;
                }
            }
        }
    }
    Some(inv)
}

fn lcm(a: u32, b: u32) -> u32 {
    a / a.gcd(&b) * b
}

/// An exact element of a cyclotomic field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycNum {
    conductor: u32,
    coeffs: Vec<Rational>,
}

impl CycNum {
    pub fn zero() -> Self {
        Self::from_rational(Rational::zero())
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_rational(r: Rational) -> Self {
        CycNum {
            conductor: 1,
            coeffs: vec![r],
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Self::from_rational(Rational::from_integer(n))
    }

    pub fn from_frac(n: i64, d: i64) -> Self {
        Self::from_rational(Rational::new(BigInt::from(n), BigInt::from(d)))
    }

    /// `e(k/L)`, canonically reduced.
    pub fn root(l: u32, k: i64) -> Self {
        assert!(l >= 1, "conductor must be positive");
        let k = k.rem_euclid(l as i64) as u32;
        let g = k.gcd(&l);
        let (l, k) = if k == 0 { (1, 0) } else { (l / g, k / g) };
        let c = conductor(l);
        let coeffs = c.powers[k as usize]
            .iter()
            .map(|&x| Rational::from_integer(BigInt::from(x)))
            .collect();
        Self::from_raw(l, coeffs)
    }

    /// Builds an element from power-basis coordinates in `Q(ζ_L)` and reduces
    /// it to its minimal conductor.
    pub fn from_raw(l: u32, coeffs: Vec<Rational>) -> Self {
        let c = conductor(l);
        assert_eq!(coeffs.len(), c.phi, "coefficient vector must have length phi(L)");
        let mut out = CycNum {
            conductor: l,
            coeffs,
        };
        out.minimize();
        out
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.conductor == 1 && self.coeffs[0].is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.conductor == 1 && self.coeffs[0].is_one()
    }

    /// The rational value, if this element lies in `Q`.
    pub fn as_rational(&self) -> Option<&Rational> {
        (self.conductor == 1).then(|| &self.coeffs[0])
    }

    /// Coordinates in `Q(ζ_L)` for a multiple `L` of the conductor.
    pub fn embed_raw(&self, l: u32) -> Vec<Rational> {
        assert!(l % self.conductor == 0, "target conductor must be a multiple");
        if l == self.conductor {
            return self.coeffs.clone();
        }
        let c = conductor(l);
        let step = (l / self.conductor) as usize;
        let mut out = vec![Rational::zero(); c.phi];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let pw = &c.powers[(i * step) % l as usize];
            for (o, &x) in out.iter_mut().zip(pw) {
                if x != 0 {
                    *o += a * Rational::from_integer(BigInt::from(x));
                }
            }
        }
        out
    }

    fn minimize(&mut self) {
        if self.conductor == 1 {
            return;
        }
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            let r = self.coeffs[0].clone();
            self.conductor = 1;
            self.coeffs = vec![r];
            return;
        }
        'outer: loop {
            if self.conductor == 1 {
                return;
            }
            let c = conductor(self.conductor);
            for d in &c.descents {
                if let Some(sub) = try_descend(&self.coeffs, d) {
                    self.conductor = d.sub;
                    self.coeffs = sub;
                    continue 'outer;
                }
            }
            return;
        }
    }

    pub fn neg(&self) -> Self {
        CycNum {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        CycNum {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    pub fn add_ref(&self, other: &Self) -> Self {
        if self.conductor == 1 && other.conductor == 1 {
            return Self::from_rational(&self.coeffs[0] + &other.coeffs[0]);
        }
        let l = lcm(self.conductor, other.conductor);
        let mut a = self.embed_raw(l);
        for (x, y) in a.iter_mut().zip(other.embed_raw(l)) {
            *x += y;
        }
        Self::from_raw(l, a)
    }

    pub fn sub_ref(&self, other: &Self) -> Self {
        self.add_ref(&other.neg())
    }

    pub fn mul_ref(&self, other: &Self) -> Self {
        if self.conductor == 1 {
            return other.scale(&self.coeffs[0]);
        }
        if other.conductor == 1 {
            return self.scale(&other.coeffs[0]);
        }
        let l = lcm(self.conductor, other.conductor);
        let a = self.embed_raw(l);
        let b = other.embed_raw(l);
        Self::from_raw(l, raw_mul(l, &a, &b))
    }

    pub fn inv(&self) -> Result<Self, CycError> {
        if self.is_zero() {
            return Err(CycError::DivisionByZero(self.conductor));
        }
        if self.conductor == 1 {
            return Ok(Self::from_rational(self.coeffs[0].recip()));
        }
        let l = self.conductor;
        let c = conductor(l);
        let phi = c.phi;
        // Column j of the multiplication-by-self matrix is self * z^j.
        let mut mat = vec![vec![Rational::zero(); phi]; phi];
        for j in 0..phi {
            let mut zj = vec![Rational::zero(); phi];
            zj[j] = Rational::one();
            let col = raw_mul(l, &self.coeffs, &zj);
            for i in 0..phi {
                mat[i][j] = col[i].clone();
            }
        }
        let inv = invert_matrix(mat).ok_or(CycError::DivisionByZero(l))?;
        let coeffs = (0..phi).map(|i| inv[i][0].clone()).collect();
        Ok(Self::from_raw(l, coeffs))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, CycError> {
        Ok(self.mul_ref(&other.inv()?))
    }

    pub fn pow(&self, mut n: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul_ref(&base);
            }
        }
        acc
    }

    pub fn pow_i64(&self, n: i64) -> Result<Self, CycError> {
        if n >= 0 {
            Ok(self.pow(n as u64))
        } else {
            Ok(self.inv()?.pow(n.unsigned_abs()))
        }
    }

    /// `Some((n, k))` with `self = e(k/n)`, `gcd(k, n) = 1`, when `self` is a
    /// root of unity.
    ///
    /// Roots of unity in `Q(ζ_L)` (minimal `L`) have order dividing `lcm(2, L)`,
    /// so the search is exhaustive.
    pub fn classify_root_of_unity(&self) -> Option<(u64, i64)> {
        let w = lcm(2, self.conductor) as u64;
        self.classify_root_of_unity_bounded(w)
    }

    /// As [`classify_root_of_unity`](Self::classify_root_of_unity) but only
    /// considering orders dividing `bound`.
    pub fn classify_root_of_unity_bounded(&self, bound: u64) -> Option<(u64, i64)> {
        if self.is_zero() || bound == 0 {
            return None;
        }
        if !self.pow(bound).is_one() {
            return None;
        }
        let order = (1..=bound)
            .filter(|d| bound % d == 0)
            .find(|&d| self.pow(d).is_one())?;
        if order == 1 {
            return Some((1, 0));
        }
        (1..order as i64)
            .filter(|k| k.gcd(&(order as i64)) == 1)
            .find(|&k| CycNum::root(order as u32, k) == *self)
            .map(|k| (order, k))
    }

    /// Image under the embedding `z ↦ e^{2πi/L}`.
    pub fn to_complex(&self) -> (f64, f64) {
        let l = self.conductor as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (k, c) in self.coeffs.iter().enumerate() {
            let v = c.to_f64().unwrap_or(f64::NAN);
            let ang = 2.0 * std::f64::consts::PI * k as f64 / l;
            re += v * ang.cos();
            im += v * ang.sin();
        }
        (re, im)
    }

    /// Galois conjugate `ζ ↦ ζ^a` for `a` coprime to the conductor.
    pub fn galois(&self, a: i64) -> Self {
        let l = self.conductor;
        if l == 1 {
            return self.clone();
        }
        let a = a.rem_euclid(l as i64) as usize;
        assert_eq!(a.gcd(&(l as usize)), 1, "exponent must be coprime to the conductor");
        let c = conductor(l);
        let mut out = vec![Rational::zero(); c.phi];
        for (i, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (o, &p) in out.iter_mut().zip(&c.powers[(i * a) % l as usize]) {
                if p != 0 {
                    *o += x * Rational::from_integer(BigInt::from(p));
                }
            }
        }
        Self::from_raw(l, out)
    }
}

fn try_descend(coeffs: &[Rational], d: &Descent) -> Option<Vec<Rational>> {
    let n = d.pivots.len();
    let picked: Vec<&Rational> = d.pivots.iter().map(|&r| &coeffs[r]).collect();
    let sub: Vec<Rational> = (0..n)
        .map(|i| {
            let mut s = Rational::zero();
            for (j, p) in picked.iter().enumerate() {
                if !p.is_zero() && !d.inverse[i][j].is_zero() {
                    s += *p * &d.inverse[i][j];
                }
            }
            s
        })
        .collect();
    for (r, target) in coeffs.iter().enumerate() {
        let mut s = Rational::zero();
        for (k, v) in sub.iter().enumerate() {
            let e = d.embed[k][r];
            if e != 0 && !v.is_zero() {
                s += v * Rational::from_integer(BigInt::from(e));
            }
        }
        if &s != target {
            return None;
        }
    }
    Some(sub)
}

/// Product of two coordinate vectors in `Q(ζ_L)`, reduced.
pub(crate) fn raw_mul(l: u32, a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let c = conductor(l);
    let phi = c.phi;
    let mut full = vec![Rational::zero(); 2 * phi - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                full[i + j] += x * y;
            }
        }
    }
    let mut out = vec![Rational::zero(); phi];
    for (k, v) in full.into_iter().enumerate() {
        if v.is_zero() {
            continue;
        }
        if k < phi {
            out[k] += v;
        } else {
            for (o, &p) in out.iter_mut().zip(&c.powers[k % c.modulus as usize]) {
                if p != 0 {
                    *o += &v * Rational::from_integer(BigInt::from(p));
                }
            }
        }
    }
    out
}

/// Sums many cyclotomic numbers at a fixed conductor, reducing only once.
#[derive(Clone)]
pub struct CycSum {
    conductor: u32,
    acc: Vec<Rational>,
}

impl CycSum {
    pub fn new(conductor_: u32) -> Self {
        let c = conductor(conductor_);
        CycSum {
            conductor: conductor_,
            acc: vec![Rational::zero(); c.phi],
        }
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn add(&mut self, x: &CycNum) {
        if x.is_zero() {
            return;
        }
        if x.conductor == 1 {
            self.acc[0] += &x.coeffs[0];
            return;
        }
        for (a, b) in self.acc.iter_mut().zip(x.embed_raw(self.conductor)) {
            *a += b;
        }
    }

    /// Adds `x * y`.
    pub fn add_product(&mut self, x: &CycNum, y: &CycNum) {
        if x.is_zero() || y.is_zero() {
            return;
        }
        if x.conductor == 1 && y.conductor == 1 {
            self.acc[0] += &x.coeffs[0] * &y.coeffs[0];
            return;
        }
        if x.conductor == 1 || y.conductor == 1 {
            self.add(&x.mul_ref(y));
            return;
        }
        let l = self.conductor;
        let prod = raw_mul(l, &x.embed_raw(l), &y.embed_raw(l));
        for (a, b) in self.acc.iter_mut().zip(prod) {
            *a += b;
        }
    }

    pub fn finish(self) -> CycNum {
        CycNum::from_raw(self.conductor, self.acc)
    }
}

impl Default for CycNum {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for CycNum {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl From<BigInt> for CycNum {
    fn from(n: BigInt) -> Self {
        Self::from_bigint(n)
    }
}

impl From<Rational> for CycNum {
    fn from(r: Rational) -> Self {
        Self::from_rational(r)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $inner:ident) => {
        impl $tr<&CycNum> for &CycNum {
            type Output = CycNum;
            fn $m(self, rhs: &CycNum) -> CycNum {
                self.$inner(rhs)
            }
        }
        impl $tr<CycNum> for CycNum {
            type Output = CycNum;
            fn $m(self, rhs: CycNum) -> CycNum {
                self.$inner(&rhs)
            }
        }
        impl $tr<&CycNum> for CycNum {
            type Output = CycNum;
            fn $m(self, rhs: &CycNum) -> CycNum {
                self.$inner(rhs)
            }
        }
        impl $tr<CycNum> for &CycNum {
            type Output = CycNum;
            fn $m(self, rhs: CycNum) -> CycNum {
                self.$inner(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, add_ref);
forward_binop!(Sub, sub, sub_ref);
forward_binop!(Mul, mul, mul_ref);

impl Div<&CycNum> for &CycNum {
    type Output = CycNum;
    /// Panics on division by zero; use [`CycNum::checked_div`] to handle it.
    fn div(self, rhs: &CycNum) -> CycNum {
        self.checked_div(rhs).expect("division by zero")
    }
}

impl Neg for CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        CycNum::neg(&self)
    }
}

impl Neg for &CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        CycNum::neg(self)
    }
}

impl AddAssign<&CycNum> for CycNum {
    fn add_assign(&mut self, rhs: &CycNum) {
        *self = self.add_ref(rhs);
    }
}

impl SubAssign<&CycNum> for CycNum {
    fn sub_assign(&mut self, rhs: &CycNum) {
        *self = self.sub_ref(rhs);
    }
}

impl MulAssign<&CycNum> for CycNum {
    fn mul_assign(&mut self, rhs: &CycNum) {
        *self = self.mul_ref(rhs);
    }
}

pub(crate) fn fmt_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub(crate) fn parse_rational(s: &str) -> Option<Rational> {
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.parse().ok()?;
            let d: BigInt = d.parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => Some(Rational::from_integer(s.parse().ok()?)),
    }
}

/// Textual form: `L=<conductor>` followed by the power-basis coordinates as
/// `n/d` rationals.
impl fmt::Display for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L={}", self.conductor)?;
        for c in &self.coeffs {
            write!(f, " {}", fmt_rational(c))?;
        }
        Ok(())
    }
}

impl fmt::Debug for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.as_rational() {
            if r.is_integer() {
                return write!(f, "{}", r.numer());
            }
            return write!(f, "{}", fmt_rational(r));
        }
        write!(f, "[{}]", self)
    }
}

impl FromStr for CycNum {
    type Err = CycError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |m: &str| CycError::Parse(s.to_string(), m.to_string());
        let mut toks = s.split_whitespace();
        let head = toks.next().ok_or_else(|| err("empty"))?;
        let l: u32 = head
            .strip_prefix("L=")
            .ok_or_else(|| err("expected `L=<conductor>`"))?
            .parse()
            .map_err(|_| err("bad conductor"))?;
        if l == 0 {
            return Err(err("conductor must be positive"));
        }
        let coeffs = toks
            .map(|t| parse_rational(t).ok_or_else(|| err(&format!("bad rational `{t}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        let phi = euler_phi(l as u64) as usize;
        if coeffs.len() != phi {
            return Err(err(&format!("expected {phi} coefficients for L={l}")));
        }
        Ok(CycNum::from_raw(l, coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(*cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(*cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(*cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(*cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
        let p105 = cyclotomic_polynomial(105);
        assert_eq!(p105.len() - 1, 48);
        assert!(p105.contains(&-2));
    }

    #[test]
    fn make_root_examples() {
        assert_eq!(CycNum::root(1, 0), CycNum::one());
        assert_eq!(CycNum::root(4, 2), CycNum::from_int(-1));
        assert_eq!(CycNum::root(3, 1) + CycNum::root(3, 2), CycNum::from_int(-1));
        assert_eq!(CycNum::root(6, 2), CycNum::root(3, 1));
        assert_eq!(CycNum::root(12, 9), CycNum::root(4, 3));
        assert_eq!(CycNum::root(5, -1), CycNum::root(5, 4));
        for l in 1..=30u32 {
            for k in 0..l as i64 {
                assert!(CycNum::root(l, k).pow(l as u64).is_one());
            }
        }
    }

    #[test]
    fn arithmetic_examples() {
        let i = CycNum::root(4, 1);
        assert_eq!(&i * &i, CycNum::from_int(-1));
        let z = CycNum::root(6, 1);
        assert!((&z - &z).is_zero());
        let w = CycNum::root(3, 1);
        let w2 = CycNum::root(3, 2);
        assert_eq!((CycNum::one() + w) * (CycNum::one() + w2), CycNum::one());
    }

    #[test]
    fn conductor_is_minimal() {
        // ζ_8 + ζ_8^7 = √2 lives in Q(ζ_8) and no smaller field
        let s = CycNum::root(8, 1) + CycNum::root(8, 7);
        assert_eq!(s.conductor(), 8);
        assert_eq!(&s * &s, CycNum::from_int(2));
        // ζ_12 * ζ_12^3 = ζ_3
        let x = CycNum::root(12, 1) * CycNum::root(12, 3);
        assert_eq!(x.conductor(), 3);
        // ζ_15^5 + ζ_15^10 = -1
        assert_eq!(CycNum::root(15, 5) + CycNum::root(15, 10), CycNum::from_int(-1));
        // √-3 = ζ_3 - ζ_3^2 has conductor 3
        let r = CycNum::root(3, 1) - CycNum::root(3, 2);
        assert_eq!(r.conductor(), 3);
        assert_eq!(&r * &r, CycNum::from_int(-3));
    }

    #[test]
    fn division() {
        let a = CycNum::one() + CycNum::root(5, 1);
        let b = a.inv().unwrap();
        assert!((a.mul_ref(&b)).is_one());
        assert_eq!(CycNum::zero().inv(), Err(CycError::DivisionByZero(1)));
        let x = CycNum::root(7, 3) + CycNum::from_frac(1, 3);
        let y = CycNum::root(4, 1) - CycNum::from_int(2);
        let q = x.checked_div(&y).unwrap();
        assert_eq!(q * y, x);
    }

    #[test]
    fn classify_examples() {
        assert_eq!(CycNum::one().classify_root_of_unity(), Some((1, 0)));
        assert_eq!(CycNum::from_int(-1).classify_root_of_unity(), Some((2, 1)));
        assert_eq!(CycNum::from_int(2).classify_root_of_unity(), None);
        assert_eq!(CycNum::zero().classify_root_of_unity(), None);
        assert_eq!(CycNum::root(12, 5).classify_root_of_unity(), Some((12, 5)));
        // -ζ_3 = ζ_6^5 has order 6
        assert_eq!(CycNum::root(3, 1).neg().classify_root_of_unity(), Some((6, 5)));
        let s = CycNum::root(8, 1) + CycNum::root(8, 7);
        assert_eq!(s.classify_root_of_unity(), None);
        // a^n = 1 tests with a too-small bound miss the root
        assert_eq!(CycNum::root(12, 5).classify_root_of_unity_bounded(6), None);
    }

    #[test]
    fn text_round_trip() {
        let x = CycNum::root(12, 5).scale(&Rational::new(3.into(), 7.into())) + CycNum::from_int(4);
        let s = x.to_string();
        assert_eq!(s.parse::<CycNum>().unwrap(), x);
        assert_eq!("L=1 196884".parse::<CycNum>().unwrap(), CycNum::from_int(196884));
        // non-canonical conductor in text is reduced
        assert_eq!("L=6 0/1 1/1".parse::<CycNum>().unwrap(), CycNum::root(6, 1));
        assert!("L=4 1".parse::<CycNum>().is_err());
        assert!("196884".parse::<CycNum>().is_err());
        assert!("L=1 1/0".parse::<CycNum>().is_err());
    }

    #[test]
    fn galois_conjugation() {
        let z = CycNum::root(5, 1);
        assert_eq!(z.galois(2), CycNum::root(5, 2));
        let s = CycNum::root(8, 1) + CycNum::root(8, 7);
        assert_eq!(s.galois(3), s.neg());
    }

    fn close(a: (f64, f64), b: (f64, f64)) -> bool {
        (a.0 - b.0).abs() < 1e-9 && (a.1 - b.1).abs() < 1e-9
    }

    fn arb_cyc() -> impl Strategy<Value = CycNum> {
        let conductors = prop::sample::select(vec![1u32, 3, 4, 5, 6, 8, 12]);
        (conductors, prop::collection::vec((-3i64..=3, 1i64..=3), 1..4), 0i64..24).prop_map(
            |(l, terms, shift)| {
                let mut acc = CycNum::zero();
                for (i, (n, d)) in terms.into_iter().enumerate() {
                    acc += &(CycNum::root(l, shift + i as i64) * CycNum::from_frac(n, d));
                }
                acc
            },
        )
    }

    proptest! {
        #[test]
        fn complex_embedding_commutes(a in arb_cyc(), b in arb_cyc()) {
            let (ar, ai) = a.to_complex();
            let (br, bi) = b.to_complex();
            prop_assert!(close((&a + &b).to_complex(), (ar + br, ai + bi)));
            prop_assert!(close((&a - &b).to_complex(), (ar - br, ai - bi)));
            prop_assert!(close((&a * &b).to_complex(), (ar * br - ai * bi, ar * bi + ai * br)));
            if !b.is_zero() {
                let n = br * br + bi * bi;
                let q = a.checked_div(&b).unwrap().to_complex();
                prop_assert!(close(q, ((ar * br + ai * bi) / n, (ai * br - ar * bi) / n)));
            }
        }

        #[test]
        fn root_depends_only_on_fraction(l in 1u32..40, k in -60i64..60, m in 1u32..4) {
            prop_assert_eq!(CycNum::root(l, k), CycNum::root(l * m, k * m as i64));
            prop_assert_eq!(CycNum::root(l, k), CycNum::root(l, k + l as i64));
        }

        #[test]
        fn equality_is_representation_equality(a in arb_cyc(), b in arb_cyc()) {
            let diff = &a - &b;
            prop_assert_eq!(diff.is_zero(), a == b);
            let round = (&a + &b) - &b;
            prop_assert_eq!(round.conductor(), a.conductor());
            prop_assert_eq!(round.coeffs(), a.coeffs());
        }
    }
}
