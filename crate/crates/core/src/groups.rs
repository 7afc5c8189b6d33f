//! Finite groups given by multiplication tables, commuting pairs and the right
//! action of `SL2(Z)` on them.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("not a group: {0}")]
    Axiom(String),
    #[error("domain error: {0}")]
    Domain(String),
}

fn perr(line: usize, column: usize, message: impl Into<String>) -> GroupError {
    GroupError::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// A finite group with elements `0..order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupTable {
    table: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
    orders: Vec<u64>,
}

impl GroupTable {
    /// Validates a multiplication table (`table[x][y] = x·y`).
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self, GroupError> {
        let n = table.len();
        if n == 0 {
            return Err(GroupError::Axiom("empty table".into()));
        }
        for (x, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(GroupError::Axiom(format!("row {x} has {} entries, expected {n}", row.len())));
            }
            if let Some(&bad) = row.iter().find(|&&y| y >= n) {
                return Err(GroupError::Axiom(format!("entry {bad} in row {x} is out of range")));
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or_else(|| GroupError::Axiom("no identity element".into()))?;
        let mut inverse = vec![usize::MAX; n];
        for x in 0..n {
            let y = (0..n)
                .find(|&y| table[x][y] == identity)
                .ok_or_else(|| GroupError::Axiom(format!("element {x} has no inverse")))?;
            if table[y][x] != identity {
                return Err(GroupError::Axiom(format!("inverse of {x} is one-sided")));
            }
            inverse[x] = y;
        }
        check_associative(&table)?;
        let orders = (0..n)
            .map(|x| {
                let (mut y, mut k) = (x, 1u64);
                while y != identity {
                    y = table[y][x];
                    k += 1;
                }
                k
            })
            .collect();
        Ok(GroupTable {
            table,
            identity,
            inverse,
            orders,
        })
    }

    /// The group generated by permutations of `0..degree` (images listed).
    /// The identity gets index 0; the rest follow in breadth-first order.
    pub fn from_permutations(gens: &[Vec<usize>]) -> Result<Self, GroupError> {
        let degree = gens.iter().map(Vec::len).max().unwrap_or(1).max(1);
        let mut padded = Vec::new();
        for g in gens {
            let mut p: Vec<usize> = (0..degree).collect();
            p[..g.len()].copy_from_slice(g);
            let mut seen = vec![false; degree];
            for &i in &p {
                if i >= degree || seen[i] {
                    return Err(GroupError::Domain("generator is not a permutation".into()));
                }
                seen[i] = true;
            }
            padded.push(p);
        }
        let id: Vec<usize> = (0..degree).collect();
        let mut elems = vec![id.clone()];
        let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(id, 0)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in &padded {
                let prod = compose(&elems[i], g);
                if !index.contains_key(&prod) {
                    index.insert(prod.clone(), elems.len());
                    queue.push_back(elems.len());
                    elems.push(prod);
                }
            }
        }
        let table = elems
            .iter()
            .map(|x| elems.iter().map(|y| index[&compose(x, y)]).collect())
            .collect();
        Self::from_table(table)
    }

    /// `Z/n` with `k` the residue `k`.
    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1);
        Self::from_table((0..n).map(|x| (0..n).map(|y| (x + y) % n).collect()).collect()).unwrap()
    }

    /// `S_3` acting on three points.
    pub fn symmetric3() -> Self {
        Self::from_permutations(&[vec![1, 2, 0], vec![1, 0, 2]]).unwrap()
    }

    /// Dihedral group of order 8, symmetries of a square.
    pub fn dihedral8() -> Self {
        Self::from_permutations(&[vec![1, 2, 3, 0], vec![0, 3, 2, 1]]).unwrap()
    }

    /// Quaternion group, as the regular representation on itself.
    pub fn quaternion8() -> Self {
        // generators i = (0 2 1 3)(4 6 5 7), j = (0 4 1 5)(2 7 3 6) on ±1, ±i, ±j, ±k
        Self::from_permutations(&[vec![2, 3, 1, 0, 6, 7, 5, 4], vec![4, 5, 7, 6, 1, 0, 2, 3]]).unwrap()
    }

    /// `A × B`, with `(a, b)` at index `a·|B| + b`.
    pub fn direct_product(a: &Self, b: &Self) -> Self {
        let (na, nb) = (a.order(), b.order());
        let table = (0..na * nb)
            .map(|x| {
                (0..na * nb)
                    .map(|y| a.mul(x / nb, y / nb) * nb + b.mul(x % nb, y % nb))
                    .collect()
            })
            .collect();
        Self::from_table(table).unwrap()
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.table[x][y]
    }

    pub fn inv(&self, x: usize) -> usize {
        self.inverse[x]
    }

    pub fn elem_order(&self, x: usize) -> u64 {
        self.orders[x]
    }

    pub fn pow(&self, x: usize, e: i64) -> usize {
        let e = e.rem_euclid(self.orders[x] as i64);
        let mut acc = self.identity;
        for _ in 0..e {
            acc = self.table[acc][x];
        }
        acc
    }

    /// `x g x^{-1}`.
    pub fn conj(&self, x: usize, g: usize) -> usize {
        self.mul(self.mul(x, g), self.inverse[x])
    }

    pub fn commute(&self, x: usize, y: usize) -> bool {
        self.mul(x, y) == self.mul(y, x)
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order()
    }

    /// All commuting pairs in lexicographic order.
    pub fn commuting_pairs(&self) -> Vec<CommutingPair> {
        let mut out = Vec::new();
        for g in self.elements() {
            for h in self.elements() {
                if self.commute(g, h) {
                    out.push(CommutingPair { g, h });
                }
            }
        }
        out
    }

    /// Parses either a table file (`order N` then `N` rows) or a list of
    /// `perm` lines in cycle notation.
    pub fn parse(src: &str) -> Result<Self, GroupError> {
        let lines: Vec<(usize, &str)> = src
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("")))
            .filter(|(_, l)| !l.trim().is_empty())
            .collect();
        let Some(&(no, first)) = lines.first() else {
            return Err(perr(1, 1, "empty group file"));
        };
        if first.trim_start().starts_with("perm") {
            let mut gens = Vec::new();
            for &(no, raw) in &lines {
                gens.push(parse_perm_line(no, raw)?);
            }
            return Self::from_permutations(&gens);
        }
        let toks: Vec<&str> = first.split_whitespace().collect();
        if toks.first() != Some(&"order") {
            return Err(perr(no, column(first, toks[0]), "expected `order N` or `perm` lines"));
        }
        let n: usize = toks
            .get(1)
            .and_then(|t| t.parse().ok())
            .filter(|&n| n >= 1)
            .ok_or_else(|| perr(no, first.len() + 1, "order must be a positive integer"))?;
        let rows = &lines[1..];
        if rows.len() != n {
            let (line, _) = rows.get(n).copied().unwrap_or((lines.last().unwrap().0 + 1, ""));
            return Err(perr(line, 1, format!("expected {n} table rows, found {}", rows.len())));
        }
        let mut table = Vec::with_capacity(n);
        for &(no, raw) in rows {
            let toks: Vec<&str> = raw.split_whitespace().collect();
            if toks.len() != n {
                return Err(perr(no, 1, format!("expected {n} entries, found {}", toks.len())));
            }
            let mut row = Vec::with_capacity(n);
            for t in toks {
                let v: usize = t
                    .parse()
                    .ok()
                    .filter(|&v| v < n)
                    .ok_or_else(|| perr(no, column(raw, t), format!("entry `{t}` is not in 0..{n}")))?;
                row.push(v);
            }
            table.push(row);
        }
        Self::from_table(table)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("order {}\n", self.order());
        for row in &self.table {
            let line: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }
}

fn column(raw: &str, tok: &str) -> usize {
    tok.as_ptr() as usize - raw.as_ptr() as usize + 1
}

fn compose(x: &[usize], y: &[usize]) -> Vec<usize> {
    // apply x first, then y
    x.iter().map(|&i| y[i]).collect()
}

fn parse_perm_line(no: usize, raw: &str) -> Result<Vec<usize>, GroupError> {
    let body = raw.trim_start();
    let start = raw.len() - body.len();
    let rest = body
        .strip_prefix("perm")
        .ok_or_else(|| perr(no, start + 1, "expected `perm`"))?;
    let offset = start + 4;
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    let mut current: Option<Vec<usize>> = None;
    let mut num = String::new();
    let mut num_col = 0;
    for (i, ch) in rest.char_indices() {
        let col = offset + i + 1;
        if ch.is_ascii_digit() {
            if num.is_empty() {
                num_col = col;
            }
            num.push(ch);
            continue;
        }
        if !num.is_empty() {
            let cyc = current.as_mut().ok_or_else(|| perr(no, num_col, "point outside a cycle"))?;
            cyc.push(num.parse().map_err(|_| perr(no, num_col, "bad point"))?);
            num.clear();
        }
        match ch {
            '(' if current.is_none() => current = Some(Vec::new()),
            ')' if current.is_some() => cycles.push(current.take().unwrap()),
            ',' | ' ' | '\t' => {}
            _ => return Err(perr(no, col, format!("unexpected `{ch}`"))),
        }
    }
    if !num.is_empty() || current.is_some() {
        return Err(perr(no, raw.len() + 1, "unterminated cycle"));
    }
    let degree = cycles.iter().flatten().max().map_or(1, |&m| m + 1);
    let mut perm: Vec<usize> = (0..degree).collect();
    let mut seen = vec![false; degree];
    for cyc in &cycles {
        for (k, &p) in cyc.iter().enumerate() {
            if seen[p] {
                return Err(perr(no, offset + 1, format!("point {p} repeated")));
            }
            seen[p] = true;
            perm[p] = cyc[(k + 1) % cyc.len()];
        }
    }
    Ok(perm)
}

fn check_associative(table: &[Vec<usize>]) -> Result<(), GroupError> {
    let n = table.len();
    let check = |x: usize, y: usize, z: usize| {
        if table[table[x][y]][z] != table[x][table[y][z]] {
            Err(GroupError::Axiom(format!("({x}·{y})·{z} differs from {x}·({y}·{z})")))
        } else {
            Ok(())
        }
    };
    if n <= 256 {
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    check(x, y, z)?;
                }
            }
        }
    } else {
        // exhaustive checking is cubic; sample deterministically instead
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        for _ in 0..4_000_000 {
            check(rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n))?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CommutingPair {
    pub g: usize,
    pub h: usize,
}

impl CommutingPair {
    pub fn new(group: &GroupTable, g: usize, h: usize) -> Result<Self, GroupError> {
        if g >= group.order() || h >= group.order() {
            return Err(GroupError::Domain(format!("({g},{h}) is not a pair of group elements")));
        }
        if !group.commute(g, h) {
            return Err(GroupError::Domain(format!("{g} and {h} do not commute")));
        }
        Ok(CommutingPair { g, h })
    }

    pub fn conj(&self, group: &GroupTable, x: usize) -> Self {
        CommutingPair {
            g: group.conj(x, self.g),
            h: group.conj(x, self.h),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IntMatrix2 {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl IntMatrix2 {
    pub const IDENTITY: Self = IntMatrix2 { a: 1, b: 0, c: 0, d: 1 };
    pub const S: Self = IntMatrix2 { a: 0, b: -1, c: 1, d: 0 };
    pub const T: Self = IntMatrix2 { a: 1, b: 1, c: 0, d: 1 };

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        IntMatrix2 { a, b, c, d }
    }

    pub fn det(&self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    pub fn mul(&self, o: &Self) -> Self {
        IntMatrix2 {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }
}

/// Right action `(g, h)·(a b; c d) = (g^a h^c, g^b h^d)`.
pub fn sl2_act(group: &GroupTable, pair: CommutingPair, m: &IntMatrix2) -> Result<CommutingPair, GroupError> {
    if m.det() != 1 {
        return Err(GroupError::Domain(format!("matrix has determinant {}", m.det())));
    }
    if !group.commute(pair.g, pair.h) {
        return Err(GroupError::Domain("pair does not commute".into()));
    }
    let (g, h) = (pair.g, pair.h);
    Ok(CommutingPair {
        g: group.mul(group.pow(g, m.a), group.pow(h, m.c)),
        h: group.mul(group.pow(g, m.b), group.pow(h, m.d)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CanonMode {
    /// Simultaneous conjugation only.
    Conjugation,
    /// Simultaneous conjugation and `(g, h) ~ (g, g h)`.
    Translation,
}

/// Lexicographically least pair in the orbit under the allowed moves.
///
/// In translation mode the offset `k` satisfies `f(g, h, τ) = f(c, τ + k)`
/// for the returned representative `c`, so a coefficient of `q^ν` picks up
/// the phase `e(νk)`. Conjugation-only mode always returns offset 0.
pub fn pair_canonicalize(group: &GroupTable, pair: CommutingPair, mode: CanonMode) -> (CommutingPair, i64) {
    let shifts = match mode {
        CanonMode::Conjugation => 1,
        CanonMode::Translation => group.elem_order(pair.g) as i64,
    };
    let mut best = (pair, 0i64);
    let mut hj = pair.h;
    for j in 0..shifts {
        let moved = CommutingPair { g: pair.g, h: hj };
        for x in group.elements() {
            let c = moved.conj(group, x);
            if c < best.0 {
                best = (c, j);
            }
        }
        hj = group.mul(pair.g, hj);
    }
    let n = group.elem_order(pair.g) as i64;
    (best.0, (-best.1).rem_euclid(n))
}

/// Generator `j0` of the translations `j` (mod `|g|`) for which some
/// conjugate of `(g, g^j h)` equals `(g, h)`. A function on the pair must be
/// invariant under `τ ↦ τ + j0`.
pub fn translation_stabilizer(group: &GroupTable, pair: CommutingPair) -> u64 {
    let n = group.elem_order(pair.g);
    let mut acc = n;
    let mut hj = pair.h;
    for j in 0..n {
        let moved = CommutingPair { g: pair.g, h: hj };
        if group.elements().any(|x| moved.conj(group, x) == pair) {
            acc = acc.gcd(&j);
        }
        hj = group.mul(pair.g, hj);
    }
    acc
}

/// Simultaneous-conjugacy classes of commuting pairs, grouped into
/// `SL2(Z)`-orbits.
#[derive(Debug, Clone)]
pub struct Components {
    /// Each class lists its pairs in increasing order; the first is the
    /// representative. Classes are sorted by representative.
    pub classes: Vec<Vec<CommutingPair>>,
    /// Partition of class indices into orbits.
    pub orbits: Vec<Vec<usize>>,
}

pub fn enumerate_components(group: &GroupTable) -> Components {
    let pairs = group.commuting_pairs();
    let mut class_of: HashMap<CommutingPair, usize> = HashMap::new();
    let mut classes: Vec<Vec<CommutingPair>> = Vec::new();
    for &p in &pairs {
        if class_of.contains_key(&p) {
            continue;
        }
        let members: BTreeSet<CommutingPair> = group.elements().map(|x| p.conj(group, x)).collect();
        for &m in &members {
            class_of.insert(m, classes.len());
        }
        classes.push(members.into_iter().collect());
    }
    let mut orbit_of = vec![usize::MAX; classes.len()];
    let mut orbits = Vec::new();
    for start in 0..classes.len() {
        if orbit_of[start] != usize::MAX {
            continue;
        }
        let id = orbits.len();
        let mut members = vec![start];
        orbit_of[start] = id;
        let mut queue = VecDeque::from([start]);
        while let Some(c) = queue.pop_front() {
            let rep = classes[c][0];
            for m in [IntMatrix2::S, IntMatrix2::T] {
                let next = class_of[&sl2_act(group, rep, &m).unwrap()];
                if orbit_of[next] == usize::MAX {
                    orbit_of[next] = id;
                    members.push(next);
                    queue.push_back(next);
                }
            }
        }
        members.sort_unstable();
        orbits.push(members);
    }
    Components { classes, orbits }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn builtin_groups() {
        assert_eq!(GroupTable::cyclic(6).order(), 6);
        let s3 = GroupTable::symmetric3();
        assert_eq!(s3.order(), 6);
        assert_eq!(s3.elements().filter(|&x| s3.elem_order(x) == 2).count(), 3);
        let d8 = GroupTable::dihedral8();
        assert_eq!(d8.elements().filter(|&x| d8.elem_order(x) == 2).count(), 5);
        let q8 = GroupTable::quaternion8();
        assert_eq!(q8.order(), 8);
        assert_eq!(q8.elements().filter(|&x| q8.elem_order(x) == 2).count(), 1);
        assert_eq!(q8.elements().filter(|&x| q8.elem_order(x) == 4).count(), 6);
    }

    #[test]
    fn rejects_non_groups() {
        assert!(GroupTable::from_table(vec![vec![0, 1], vec![1, 1]]).is_err());
        assert!(GroupTable::from_table(vec![vec![0, 1], vec![0]]).is_err());
    }

    #[test]
    fn parses_files() {
        let z3 = GroupTable::parse("order 3\n0 1 2\n1 2 0\n2 0 1\n").unwrap();
        assert_eq!(z3, GroupTable::cyclic(3));
        assert_eq!(GroupTable::parse(&GroupTable::symmetric3().to_text()).unwrap(), GroupTable::symmetric3());
        let s3 = GroupTable::parse("perm (0 1 2)\nperm (0 1)\n").unwrap();
        assert_eq!(s3.order(), 6);
        match GroupTable::parse("order 2\n0 1\n1 7\n") {
            Err(GroupError::Parse { line, column, .. }) => assert_eq!((line, column), (3, 3)),
            other => panic!("{other:?}"),
        }
        match GroupTable::parse("perm (0 1]\n") {
            Err(GroupError::Parse { line, column, .. }) => assert_eq!((line, column), (1, 10)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn action_examples() {
        let g = GroupTable::symmetric3();
        let pair = g.commuting_pairs().into_iter().find(|p| p.g != 0 && p.h != 0 && p.g != p.h).unwrap();
        assert_eq!(sl2_act(&g, pair, &IntMatrix2::IDENTITY).unwrap(), pair);
        let s = sl2_act(&g, pair, &IntMatrix2::S).unwrap();
        assert_eq!(s, CommutingPair { g: pair.h, h: g.inv(pair.g) });
        let s2 = sl2_act(&g, pair, &IntMatrix2::S.mul(&IntMatrix2::S)).unwrap();
        assert_eq!(s2, CommutingPair { g: g.inv(pair.g), h: g.inv(pair.h) });
        assert!(sl2_act(&g, pair, &IntMatrix2::new(2, 0, 0, 1)).is_err());
    }

    #[test]
    fn canonicalize_examples() {
        let g = GroupTable::cyclic(5);
        let id = CommutingPair { g: 0, h: 0 };
        assert_eq!(pair_canonicalize(&g, id, CanonMode::Translation), (id, 0));
        let base = CommutingPair { g: 2, h: 0 };
        let shifted = CommutingPair { g: 2, h: g.mul(2, 0) };
        let (c, k) = pair_canonicalize(&g, shifted, CanonMode::Translation);
        let (c0, k0) = pair_canonicalize(&g, base, CanonMode::Translation);
        assert_eq!(c, c0);
        assert_eq!(k0, 0);
        assert_eq!(k, 1);

        let z2 = GroupTable::cyclic(2);
        let classes: BTreeSet<_> = z2
            .commuting_pairs()
            .into_iter()
            .map(|p| pair_canonicalize(&z2, p, CanonMode::Conjugation).0)
            .collect();
        assert_eq!(classes.len(), 4);
    }

    #[test]
    fn translation_offsets_compose() {
        // f(g, g^k h) = f(g, h, τ + k): offsets of (g, g h) and (g, h) differ by 1
        let s3 = GroupTable::symmetric3();
        for p in s3.commuting_pairs() {
            let n = s3.elem_order(p.g) as i64;
            let j0 = translation_stabilizer(&s3, p) as i64;
            let (c, k) = pair_canonicalize(&s3, p, CanonMode::Translation);
            let q = CommutingPair { g: p.g, h: s3.mul(p.g, p.h) };
            let (c2, k2) = pair_canonicalize(&s3, q, CanonMode::Translation);
            assert_eq!(c, c2);
            assert_eq!((k2 - k - 1).rem_euclid(n) % j0, 0);
        }
    }

    #[test]
    fn component_counts() {
        assert_eq!(enumerate_components(&GroupTable::cyclic(2)).classes.len(), 4);
        for n in 1..=6 {
            assert_eq!(enumerate_components(&GroupTable::cyclic(n)).classes.len(), n * n);
        }
        let s3 = enumerate_components(&GroupTable::symmetric3());
        assert_eq!(s3.classes.len(), 8);
        // orbits of S3: the trivial pair, pairs in a 3-cycle subgroup, pairs in an involution subgroup
        assert_eq!(s3.orbits.len(), 3);
        let total: usize = s3.classes.iter().map(Vec::len).sum();
        assert_eq!(total, GroupTable::symmetric3().commuting_pairs().len());
    }

    fn group_by_index(i: usize) -> GroupTable {
        match i {
            0 => GroupTable::cyclic(4),
            1 => GroupTable::symmetric3(),
            2 => GroupTable::dihedral8(),
            3 => GroupTable::quaternion8(),
            _ => GroupTable::direct_product(&GroupTable::cyclic(2), &GroupTable::cyclic(4)),
        }
    }

    fn unimodular() -> impl Strategy<Value = IntMatrix2> {
        prop::collection::vec((any::<bool>(), -3i64..=3), 0..5).prop_map(|word| {
            word.into_iter().fold(IntMatrix2::IDENTITY, |acc, (s, e)| {
                let t = IntMatrix2::new(1, e, 0, 1);
                let m = if s { IntMatrix2::S.mul(&t) } else { t };
                acc.mul(&m)
            })
        })
    }

    proptest! {
        #[test]
        fn action_law(gi in 0usize..5, seed in any::<u64>(), a in unimodular(), b in unimodular()) {
            let g = group_by_index(gi);
            let pairs = g.commuting_pairs();
            let p = pairs[(seed % pairs.len() as u64) as usize];
            let lhs = sl2_act(&g, p, &a.mul(&b)).unwrap();
            let rhs = sl2_act(&g, sl2_act(&g, p, &a).unwrap(), &b).unwrap();
            prop_assert_eq!(lhs, rhs);
            prop_assert!(g.commute(lhs.g, lhs.h));
            let x = (seed / 7 % g.order() as u64) as usize;
            prop_assert_eq!(sl2_act(&g, p.conj(&g, x), &a).unwrap(), sl2_act(&g, p, &a).unwrap().conj(&g, x));
        }

        #[test]
        fn canonical_is_idempotent_and_orbit_constant(gi in 0usize..5, seed in any::<u64>()) {
            let g = group_by_index(gi);
            let pairs = g.commuting_pairs();
            let p = pairs[(seed % pairs.len() as u64) as usize];
            for mode in [CanonMode::Conjugation, CanonMode::Translation] {
                let (c, _) = pair_canonicalize(&g, p, mode);
                prop_assert_eq!(pair_canonicalize(&g, c, mode).0, c);
                let x = (seed / 11 % g.order() as u64) as usize;
                prop_assert_eq!(pair_canonicalize(&g, p.conj(&g, x), mode).0, c);
            }
            let q = CommutingPair { g: p.g, h: g.mul(p.g, p.h) };
            prop_assert_eq!(pair_canonicalize(&g, q, CanonMode::Translation).0,
                pair_canonicalize(&g, p, CanonMode::Translation).0);
        }
    }
}
