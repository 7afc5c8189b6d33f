//! Reference computations that share no code with the main crate: the
//! q-expansions of `J = E4³/Δ − 744` (from divisor sums and the eta product)
//! and of the eta quotient for the class 2B, Faber polynomials of `J`, the
//! product formula for `J(p) − J(q)`, and the level-2 modular polynomial
//! from a resultant.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// `σ_k(n)`.
pub fn sigma(k: u32, n: u64) -> BigInt {
    let mut s = BigInt::zero();
    for d in 1..=n {
        if n % d == 0 {
            s += BigInt::from(d).pow(k);
        }
    }
    s
}

fn mul_trunc(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// Power-series inverse of a series with constant term ±1.
fn inverse_unit(a: &[BigInt], len: usize) -> Vec<BigInt> {
    assert!(a[0].abs().is_one());
    let mut inv = vec![BigInt::zero(); len];
    inv[0] = a[0].clone();
    for n in 1..len {
        let mut s = BigInt::zero();
        for k in 1..=n.min(a.len() - 1) {
            s += &a[k] * &inv[n - k];
        }
        inv[n] = -(&a[0] * s);
    }
    inv
}

/// Coefficients `c_0 … c_n` of `J = q^{-1} + Σ c_k q^k`, with `c_0 = 0`.
pub fn j_coefficients(n: usize) -> Vec<BigInt> {
    // Δ/q = ∏ (1 − q^k)^24 and E4 = 1 + 240 Σ σ3(k) q^k, through q^{n+1}
    let len = n + 2;
    let mut e4 = vec![BigInt::one(); 1];
    e4.extend((1..len).map(|k| BigInt::from(240) * sigma(3, k as u64)));
    let mut eta24 = vec![BigInt::zero(); len];
    eta24[0] = BigInt::one();
    for k in 1..len {
        for _ in 0..24 {
            for i in (k..len).rev() {
                let v = eta24[i - k].clone();
                eta24[i] -= v;
            }
        }
    }
    let e4_cubed = mul_trunc(&mul_trunc(&e4, &e4, len), &e4, len);
    // q·j = E4³ / (Δ/q)
    let qj = mul_trunc(&e4_cubed, &inverse_unit(&eta24, len), len);
    // qj[i] is the coefficient of q^{i-1} in j
    let mut out: Vec<BigInt> = (1..len).map(|i| qj[i].clone()).collect();
    out[0] -= 744;
    out
}

/// Coefficients `c_0 … c_n` of `q^{-1} ∏_{k>0} (1 + q^k)^{-24} + 24`, the
/// series attached to the class 2B, with `c_0 = 0`.
pub fn t2b_coefficients(n: usize) -> Vec<BigInt> {
    let len = n + 2;
    let mut prod = vec![BigInt::zero(); len];
    prod[0] = BigInt::one();
    for k in 1..len {
        for _ in 0..24 {
            for i in (k..len).rev() {
                let v = prod[i - k].clone();
                prod[i] += v;
            }
        }
    }
    let inv = inverse_unit(&prod, len);
    let mut out: Vec<BigInt> = (1..len).map(|i| inv[i].clone()).collect();
    out[0] += 24;
    out
}

/// `Φ_n(J)` for the Faber polynomial `Φ_n`, by eliminating principal parts
/// of `J^n, J^{n−1}, …` with integer vectors. `out[e + n]` is the
/// coefficient of `q^e` for `−n ≤ e ≤ top`.
pub fn faber_of_j(n: usize, top: usize) -> Vec<BigInt> {
    let c = j_coefficients(top + n);
    let width = top + n + 1;
    // j[e + 1] is the coefficient of q^e
    let mut j = vec![BigInt::zero(); width + 1];
    j[0] = BigInt::one();
    for (i, v) in c.iter().enumerate().take(width) {
        j[i + 1] = v.clone();
    }
    // powers[k][e + k] is the coefficient of q^e in J^k
    let mut powers: Vec<Vec<BigInt>> = vec![{
        let mut v = vec![BigInt::zero(); width];
        v[0] = BigInt::one();
        v
    }];
    for k in 1..=n {
        let prev = &powers[k - 1];
        let mut next = vec![BigInt::zero(); width];
        for (a, x) in prev.iter().enumerate() {
            for (b, y) in j.iter().enumerate() {
                if a + b < width {
                    next[a + b] += x * y;
                }
            }
        }
        powers.push(next);
    }
    let at = |k: usize, e: i64| -> BigInt {
        let idx = e + k as i64;
        if idx < 0 || idx as usize >= width {
            BigInt::zero()
        } else {
            powers[k][idx as usize].clone()
        }
    };
    let mut out: Vec<BigInt> = (0..width).map(|i| at(n, i as i64 - n as i64)).collect();
    for k in (0..n).rev() {
        let coef = out[n - k].clone();
        for (i, o) in out.iter_mut().enumerate() {
            *o -= &coef * at(k, i as i64 - n as i64);
        }
    }
    out
}

/// Generalized binomial coefficient `C(e, k)` for any integer `e`.
fn binomial(e: &BigInt, k: usize) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= e - BigInt::from(i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

/// Both sides of `p·(f(p) − f(q)) = ∏_{m>0, n} (1 − p^m q^n)^{c(mn)}` for
/// `f = Σ c(n) q^n` with `c(−1) = 1`, expanded directly as products of
/// binomial series. `c[n + 1]` is `c(n)`. Returns the first `(m, n)`
/// (ordered by `m`, then `n`) with `m ≤ p_max + 1`, `n ≤ q_max` where they
/// differ, with `m` reduced by one to index `f(p) − f(q)` itself.
pub fn product_formula_mismatch(c: &[BigInt], p_max: usize, q_max: i64) -> Option<(usize, i64)> {
    let coeff = |n: i64| -> BigInt {
        if n < -1 || (n + 1) as usize >= c.len() {
            BigInt::zero()
        } else {
            c[(n + 1) as usize].clone()
        }
    };
    let p_top = p_max + 1;
    // each p-degree lowers q by at most one, so keep q up to q_max + p_top
    let q_hi = q_max + p_top as i64;
    let q_lo = -(p_top as i64);
    let width = (q_hi - q_lo + 1) as usize;
    let idx = |q: i64| (q - q_lo) as usize;
    let mut prod = vec![vec![BigInt::zero(); width]; p_top + 1];
    prod[0][idx(0)] = BigInt::one();
    for m in 1..=p_top {
        for n in -1..=q_hi {
            let e = coeff(m as i64 * n);
            if e.is_zero() {
                continue;
            }
            let mut next = vec![vec![BigInt::zero(); width]; p_top + 1];
            for (pa, row) in prod.iter().enumerate() {
                for (qa, x) in row.iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    let mut k = 0usize;
                    while pa + k * m <= p_top {
                        let q = qa as i64 + q_lo + k as i64 * n;
                        if q > q_hi {
                            break;
                        }
                        if q >= q_lo {
                            let mut b = binomial(&e, k);
                            if k % 2 == 1 {
                                b = -b;
                            }
                            next[pa + k * m][idx(q)] += x * b;
                        }
                        k += 1;
                    }
                }
            }
            prod = next;
        }
    }
    let mut lhs = vec![vec![BigInt::zero(); width]; p_top + 1];
    lhs[0][idx(0)] = BigInt::one();
    for n in -1..=q_hi {
        lhs[1][idx(n)] -= coeff(n);
    }
    for m in 1..p_top {
        lhs[m + 1][idx(0)] += coeff(m as i64);
    }
    for m in 0..=p_top {
        for q in q_lo..=q_max {
            if lhs[m][idx(q)] != prod[m][idx(q)] {
                return Some((m.saturating_sub(1), q));
            }
        }
    }
    None
}

/// Sylvester resultant of two univariate integer polynomials (lowest
/// degree first), by fraction-free Bareiss elimination.
pub fn resultant(f: &[BigInt], g: &[BigInt]) -> BigInt {
    let (m, n) = (f.len() - 1, g.len() - 1);
    let size = m + n;
    let mut mat = vec![vec![BigInt::zero(); size]; size];
    for r in 0..n {
        for (i, c) in f.iter().rev().enumerate() {
            mat[r][r + i] = c.clone();
        }
    }
    for r in 0..m {
        for (i, c) in g.iter().rev().enumerate() {
            mat[n + r][r + i] = c.clone();
        }
    }
    bareiss_det(mat)
}

fn bareiss_det(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v.div_floor(&prev);
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

fn poly_pow(base: &[BigInt], e: usize) -> Vec<BigInt> {
    let mut acc = vec![BigInt::one()];
    for _ in 0..e {
        let mut next = vec![BigInt::zero(); acc.len() + base.len() - 1];
        for (i, x) in acc.iter().enumerate() {
            for (j, y) in base.iter().enumerate() {
                next[i + j] += x * y;
            }
        }
        acc = next;
    }
    acc
}

/// `Φ_2(X, Y)` as `coeffs[i][j]` for `X^i Y^j`, from
/// `j(τ) = (t + 256)³/t²`, `j(2τ) = (t + 16)³/t` and
/// `Φ_2 = ±Res_t(X t² − (t + 256)³, Y t − (t + 16)³)`, recovered by
/// interpolation on a 4 × 4 grid.
pub fn modular_polynomial_2() -> Vec<Vec<BigInt>> {
    let cube256 = poly_pow(&[BigInt::from(256), BigInt::one()], 3);
    let cube16 = poly_pow(&[BigInt::from(16), BigInt::one()], 3);
    let eval = |x: i64, y: i64| {
        let mut f: Vec<BigInt> = cube256.iter().map(|c| -c).collect();
        f[2] += x;
        let mut g: Vec<BigInt> = cube16.iter().map(|c| -c).collect();
        g[1] += y;
        resultant(&f, &g)
    };
    let pts: Vec<i64> = (0..4).collect();
    let values: Vec<Vec<BigRational>> = pts
        .iter()
        .map(|&x| pts.iter().map(|&y| BigRational::from_integer(eval(x, y))).collect())
        .collect();
    // interpolate in Y for each X, then in X for each Y-coefficient
    let by_y: Vec<Vec<BigRational>> = values.iter().map(|row| interpolate(&pts, row)).collect();
    let mut coeffs = vec![vec![BigRational::zero(); 4]; 4];
    for j in 0..4 {
        let column: Vec<BigRational> = by_y.iter().map(|r| r[j].clone()).collect();
        let cx = interpolate(&pts, &column);
        for i in 0..4 {
            coeffs[i][j] = cx[i].clone();
        }
    }
    let lead = coeffs[3][0].clone();
    coeffs
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|c| {
                    let v = c / &lead;
                    assert!(v.is_integer());
                    v.to_integer()
                })
                .collect()
        })
        .collect()
}

/// Coefficients (lowest first) of the polynomial through `(xs[i], ys[i])`.
fn interpolate(xs: &[i64], ys: &[BigRational]) -> Vec<BigRational> {
    let n = xs.len();
    let mut out = vec![BigRational::zero(); n];
    for i in 0..n {
        let mut basis = vec![BigRational::one()];
        let mut denom = BigRational::one();
        for j in 0..n {
            if i == j {
                continue;
            }
            let mut next = vec![BigRational::zero(); basis.len() + 1];
            for (k, c) in basis.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= c * BigRational::from_integer(xs[j].into());
            }
            basis = next;
            denom *= BigRational::from_integer((xs[i] - xs[j]).into());
        }
        for (k, c) in basis.iter().enumerate() {
            out[k] += c * &ys[i] / &denom;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_j_coefficients() {
        let c = j_coefficients(5);
        let want = [0i64, 196884, 21493760, 864299970, 20245856256, 333202640600];
        for (k, w) in want.iter().enumerate() {
            assert_eq!(c[k], BigInt::from(*w), "c_{k}");
        }
    }

    #[test]
    fn first_t2b_coefficients() {
        let c = t2b_coefficients(5);
        let want = [0i64, 276, -2048, 11202, -49152, 184024];
        for (k, w) in want.iter().enumerate() {
            assert_eq!(c[k], BigInt::from(*w), "c_{k}");
        }
    }

    #[test]
    fn faber_two() {
        let f = faber_of_j(2, 3);
        // J² − 393768 = q^{-2} + 2·21493760 q + …
        assert_eq!(f[0], BigInt::one());
        assert_eq!(f[1], BigInt::zero());
        assert_eq!(f[2], BigInt::zero());
        assert_eq!(f[3], BigInt::from(2 * 21493760i64));
    }

    #[test]
    fn j_satisfies_the_product_formula() {
        let c: Vec<BigInt> = std::iter::once(BigInt::one()).chain(j_coefficients(40)).collect();
        assert_eq!(product_formula_mismatch(&c, 4, 4), None);
        let mut bad = c.clone();
        bad[4] += 1;
        assert_eq!(product_formula_mismatch(&bad, 4, 4), Some((1, 2)));
    }

    #[test]
    fn phi2_is_classical() {
        let p = modular_polynomial_2();
        let b = |v: i64| BigInt::from(v);
        assert_eq!(p[3][0], b(1));
        assert_eq!(p[0][3], b(1));
        assert_eq!(p[2][2], b(-1));
        assert_eq!(p[2][1], b(1488));
        assert_eq!(p[1][1], b(40773375));
        assert_eq!(p[2][0], b(-162000));
        assert_eq!(p[1][0], b(8748000000));
        assert_eq!(p[0][0], b(-157464000000000));
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(p[i][j], p[j][i]);
            }
        }
    }
}
