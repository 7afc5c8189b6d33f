use super::*;
use proptest::prelude::*;

fn int(n: i64) -> CycNum {
    CycNum::from_int(n)
}

fn frac(n: i64, d: i64) -> CycNum {
    CycNum::from_frac(n, d)
}

fn qinv() -> PuiseuxSeries {
    PuiseuxSeries::monomial(int(1), -1, 1)
}

#[test]
fn arithmetic_examples() {
    assert_eq!(qinv().mul(&qinv()), PuiseuxSeries::monomial(int(1), -2, 1));

    let j = PuiseuxSeries::new(1, [(-1, int(1)), (1, int(196884))], 1);
    let sum = j.add(&qinv().neg());
    assert_eq!(sum, PuiseuxSeries::new(1, [(1, int(196884))], 1));

    let a = PuiseuxSeries::new(1, [(0, int(1)), (1, int(1))], 5);
    let b = PuiseuxSeries::new(1, [(0, int(1)), (1, int(-1))], 3);
    let p = a.mul(&b);
    assert_eq!(p, PuiseuxSeries::new(1, [(0, int(1)), (2, int(-1))], 3));
}

#[test]
fn product_window_accounts_for_poles() {
    // (q^-1 + O(q^2)) * (q^-1 + O(q^2)) is known only through q^1
    let a = PuiseuxSeries::new(1, [(-1, int(1))], 2);
    assert_eq!(a.mul(&a).precision_num(), 1);
}

#[test]
fn pow_examples() {
    assert_eq!(qinv().pow(3), PuiseuxSeries::monomial(int(1), -3, 1));
    assert_eq!(qinv().pow(0), PuiseuxSeries::one());
    let f = PuiseuxSeries::new(1, [(-1, int(1)), (1, int(7))], EXACT);
    let sq = f.pow(2);
    assert_eq!(sq, PuiseuxSeries::new(1, [(-2, int(1)), (0, int(14)), (2, int(49))], EXACT));
}

#[test]
fn substitution_examples() {
    assert_eq!(qinv().substitute(1, 0, 1), qinv());
    let half = qinv().substitute(1, 1, 2);
    assert_eq!(half, PuiseuxSeries::monomial(int(-1), -1, 2));
    assert_eq!(qinv().substitute(2, 0, 1), PuiseuxSeries::monomial(int(1), -2, 1));
}

#[test]
fn substitution_window_scales() {
    let f = PuiseuxSeries::new(1, [(-1, int(1)), (1, int(3)), (2, int(5))], 4);
    let g = f.substitute(1, 1, 3);
    assert_eq!(g.precision(), Some(Exponent::new(4, 3)));
    assert_eq!(g.coeff(Exponent::new(1, 3)), Some(&CycNum::root(3, 1) * &int(3)));
    let h = f.substitute(3, 0, 1);
    assert_eq!(h.precision(), Some(Exponent::from_integer(12)));
}

#[test]
fn log_exp_examples() {
    assert!(PuiseuxSeries::one().log().unwrap().is_zero());

    let one_minus_q = PuiseuxSeries::new(1, [(0, int(1)), (1, int(-1))], 6);
    let l = one_minus_q.log().unwrap();
    for n in 1..=6 {
        assert_eq!(l.coeff_num(n), Some(frac(-1, n)));
    }
    assert_eq!(l.coeff_num(7), None);

    let q = PuiseuxSeries::new(1, [(1, int(1))], 3);
    let e = q.exp().unwrap();
    assert_eq!(
        e,
        PuiseuxSeries::new(1, [(0, int(1)), (1, int(1)), (2, frac(1, 2)), (3, frac(1, 6))], 3)
    );
}

#[test]
fn log_exp_domain_errors() {
    let bad = PuiseuxSeries::new(1, [(0, int(2))], 4);
    assert!(matches!(bad.log(), Err(SeriesError::Domain(_))));
    let pole = PuiseuxSeries::new(1, [(-1, int(1)), (0, int(1))], 4);
    assert!(matches!(pole.log(), Err(SeriesError::Domain(_))));
    let constant = PuiseuxSeries::new(1, [(0, int(1)), (1, int(1))], 4);
    assert!(matches!(constant.exp(), Err(SeriesError::Domain(_))));
}

#[test]
fn fractional_log_exp() {
    let f = PuiseuxSeries::new(3, [(0, int(1)), (1, CycNum::root(3, 1)), (4, int(2))], 9);
    let back = f.log().unwrap().exp().unwrap();
    assert_eq!(back, f);
}

#[test]
fn text_round_trip() {
    let f = PuiseuxSeries::new(
        2,
        [(-2, int(1)), (1, CycNum::root(4, 1)), (3, frac(-5, 7))],
        6,
    );
    let text = write_series(&f);
    assert!(text.starts_with("M 2\nL 4\nK 6\n"));
    assert_eq!(parse_series(&text).unwrap(), f);

    let exact = PuiseuxSeries::monomial(int(1), -1, 1);
    assert_eq!(parse_series(&write_series(&exact)).unwrap(), exact);
}

#[test]
fn text_accepts_short_forms() {
    let src = "M 1\nL 3\nK 2\n# comment\n-1 1\n1 L=3 0/1 1/1\n2 1/2 0\n";
    let f = parse_series(src).unwrap();
    assert_eq!(f.coeff_num(1), Some(CycNum::root(3, 1)));
    assert_eq!(f.coeff_num(2), Some(frac(1, 2)));
}

#[test]
fn text_errors_have_positions() {
    let cases = [
        ("M 0\nL 1\nK 1\n", 1, 3),
        ("M 1\nL 1\nK 1\n1 1\n0 1\n", 5, 1),
        ("M 1\nL 1\nK 1\n2 1\n", 4, 1),
        ("M 1\nL 1\nK 3\n1 x\n", 4, 3),
        ("M 1\nK 1\n", 2, 1),
        ("M 1\nL 3\nK 3\n1 1 2 3\n", 4, 3),
    ];
    for (src, line, column) in cases {
        match parse_series(src) {
            Err(SeriesError::Parse { line: l, column: c, .. }) => {
                assert_eq!((l, c), (line, column), "{src:?}")
            }
            other => panic!("expected parse error for {src:?}, got {other:?}"),
        }
    }
}

#[test]
fn biseries_examples() {
    // (p^-1 − q^-1)(−pq) = p − q
    let lhs = BiSeries::new(
        1,
        [(-1, PuiseuxSeries::one()), (0, qinv().neg())],
        EXACT,
    );
    let mpq = BiSeries::new(1, [(1, PuiseuxSeries::monomial(int(-1), 1, 1))], EXACT);
    let expected = BiSeries::new(
        1,
        [
            (0, PuiseuxSeries::monomial(int(-1), 1, 1)),
            (1, PuiseuxSeries::one()),
        ],
        EXACT,
    );
    assert_eq!(lhs.mul(&mpq), expected);

    let one_minus_pq = BiSeries::new(
        1,
        [
            (0, PuiseuxSeries::one()),
            (1, PuiseuxSeries::monomial(int(-1), 1, 1)),
        ],
        6,
    );
    let l = one_minus_pq.log().unwrap();
    for m in 1..=6 {
        for n in 0..=8 {
            let want = if m == n { frac(-1, m) } else { int(0) };
            assert_eq!(l.coeff_int(m, n), Some(want));
        }
    }
}

#[test]
fn difference_quotient_example() {
    let f = PuiseuxSeries::new(1, [(-1, int(1)), (1, int(11))], EXACT);
    let dq = BiSeries::difference_quotient(&f).unwrap();
    let expected = BiSeries::new(
        1,
        [
            (0, PuiseuxSeries::one()),
            (1, PuiseuxSeries::monomial(int(-11), 1, 1)),
        ],
        EXACT,
    );
    assert_eq!(dq, expected);
}

#[test]
fn difference_quotient_matches_product() {
    // (p^-1 − q^-1) · D = f(p) − f(q), checked where both sides are known
    let f = PuiseuxSeries::new(1, [(-1, int(1)), (1, int(3)), (2, int(-2)), (3, int(5)), (5, int(1))], 6);
    let dq = BiSeries::difference_quotient(&f).unwrap();
    let a = |k: i64| f.coeff_num(k).unwrap_or_else(CycNum::zero);
    for m in 0..=5i64 {
        for n in 0..=5i64 {
            if m + n > 6 {
                continue;
            }
            // coefficient of p^{m-1} q^n minus p^m q^{n-1} in the product
            let d = |i: i64, j: i64| {
                if i < 0 || j < 0 {
                    CycNum::zero()
                } else {
                    dq.coeff_int(i, j).unwrap()
                }
            };
            let lhs = d(m + 1, n) - d(m, n + 1);
            let rhs = if n == 0 && m != 0 {
                a(m)
            } else if m == 0 && n != 0 {
                a(n).neg()
            } else {
                CycNum::zero()
            };
            assert_eq!(lhs, rhs, "m={m} n={n}");
        }
    }
}

#[test]
fn biseries_exp_inverts_log() {
    let f = PuiseuxSeries::new(1, [(-1, int(1)), (1, int(2)), (2, int(-1)), (3, int(4)), (4, int(3))], 8);
    let dq = BiSeries::difference_quotient(&f).unwrap();
    let back = dq.log().unwrap().exp().unwrap();
    assert_eq!(back.first_difference(&dq), None);
    assert_eq!(back.p_precision_num(), dq.p_precision_num());
}

#[test]
fn substitute_powers_scales_bidegrees() {
    let b = BiSeries::new(
        1,
        [(1, PuiseuxSeries::new(1, [(2, int(3))], 4))],
        3,
    );
    let s = b.substitute_powers(2);
    assert_eq!(s.coeff_int(2, 4), Some(int(3)));
    assert_eq!(s.p_precision_num(), 6);
    assert_eq!(s.layer(2).unwrap().precision_num(), 8);
}

fn small_cyc() -> impl Strategy<Value = CycNum> {
    (-3i64..=3, 0u32..4, -2i64..=2).prop_map(|(a, which, b)| {
        let l = [1u32, 3, 4, 6][which as usize];
        &int(a) + &(&CycNum::root(l, 1) * &int(b))
    })
}

fn series(min: i64, len: usize) -> impl Strategy<Value = PuiseuxSeries> {
    (1u32..=3, prop::collection::vec(small_cyc(), len), 0i64..6).prop_map(move |(m, cs, extra)| {
        let k = min + len as i64 + extra;
        PuiseuxSeries::new(m, cs.into_iter().enumerate().map(|(i, c)| (min + i as i64, c)), k)
    })
}

fn unit_series() -> impl Strategy<Value = PuiseuxSeries> {
    (1u32..=3, prop::collection::vec(small_cyc(), 6), 3i64..9).prop_map(|(m, cs, k)| {
        PuiseuxSeries::new(
            m,
            std::iter::once((0, int(1))).chain(cs.into_iter().enumerate().map(|(i, c)| (i as i64 + 1, c))),
            k,
        )
    })
}

/// Perturbs every coefficient strictly above the window.
fn perturb(s: &PuiseuxSeries) -> PuiseuxSeries {
    let k = s.precision_num();
    let wider = PuiseuxSeries::new(s.denom(), s.terms().map(|(n, c)| (n, c.clone())), k + 5);
    let noise = PuiseuxSeries::new(s.denom(), (k + 1..=k + 5).map(|n| (n, int(n * 7 - 3))), k + 5);
    wider.add(&noise)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ring_laws(a in series(-2, 5), b in series(-1, 5), c in series(0, 5)) {
        // windows may differ by the valuation bound; coefficients must agree on the common one
        prop_assert_eq!(a.mul(&b).mul(&c).first_difference(&a.mul(&b.mul(&c))), None);
        prop_assert_eq!(a.mul(&b.add(&c)).first_difference(&a.mul(&b).add(&a.mul(&c))), None);
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.add(&b).sub(&b).first_difference(&a), None);
    }

    #[test]
    fn precision_soundness(a in series(-2, 5), b in series(-1, 5)) {
        let (pa, pb) = (perturb(&a), perturb(&b));
        let prod = a.mul(&b);
        let noisy = pa.mul(&pb).truncate(prod.precision_num() * (pa.denom() as i64) / (prod.denom() as i64));
        prop_assert_eq!(prod.first_difference(&noisy), None);
        let sum = a.add(&b);
        prop_assert_eq!(sum.first_difference(&pa.add(&pb)), None);
        let sub = a.substitute(2, 1, 3);
        prop_assert_eq!(sub.first_difference(&pa.substitute(2, 1, 3)), None);
    }

    #[test]
    fn log_precision_soundness(u in unit_series()) {
        let l = u.log().unwrap();
        prop_assert_eq!(l.first_difference(&perturb(&u).log().unwrap()), None);
    }

    #[test]
    fn exp_log_inverse(u in unit_series()) {
        let l = u.log().unwrap();
        prop_assert_eq!(l.exp().unwrap(), u.clone());
        let back = l.exp().unwrap().log().unwrap();
        prop_assert_eq!(back, l);
    }

    #[test]
    fn coset_independence(a in series(-3, 6), sa in 1u32..4, b in -4i64..4, d in 1u32..4) {
        // a series in q^{1/M} is invariant under τ ↦ τ + M
        let step = (a.denom() * d) as i64;
        prop_assert_eq!(a.substitute(sa, b, d), a.substitute(sa, b + step, d));
        let integral = a.substitute(a.denom(), 0, 1);
        prop_assert_eq!(integral.substitute(sa, b, d), integral.substitute(sa, b + d as i64, d));
    }

    #[test]
    fn text_round_trips(a in series(-3, 6)) {
        prop_assert_eq!(parse_series(&write_series(&a)).unwrap(), a);
    }
}
