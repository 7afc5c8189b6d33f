use num_bigint::BigInt;

use super::*;
use crate::replication::faber;

fn series(c: Vec<BigInt>) -> PuiseuxSeries {
    let k = c.len() as i64 - 1;
    let terms = std::iter::once((-1, CycNum::one()))
        .chain(c.into_iter().enumerate().skip(1).map(|(i, v)| (i as i64, CycNum::from_bigint(v))));
    PuiseuxSeries::new(1, terms, k)
}

fn j_series(k: usize) -> PuiseuxSeries {
    series(moonshine_oracle::j_coefficients(k))
}

fn j_data(k: usize) -> ModuleCharacterData {
    ModuleCharacterData::from_series(&[j_series(k)], 10).unwrap()
}

/// `h` of class 2B: `Tr(h) ↔ T_2B`, `Tr(h²) ↔ J`.
fn t2b_data(k: usize) -> ModuleCharacterData {
    let t2b = series(moonshine_oracle::t2b_coefficients(k));
    ModuleCharacterData::from_series(&[t2b, j_series(k)], 10).unwrap()
}

fn single_entry(n: u32) -> ModuleCharacterData {
    let mut d = ModuleCharacterData::new(n, 1, 8 * n as i64, 4).unwrap();
    d.insert(1, -1, n as i64 - 1, 1, CycNum::one()).unwrap();
    d
}

#[test]
fn orbifold_examples() {
    for n in [1, 2, 3] {
        let z = orbifold_partition(&single_entry(n), 1, 0, 1);
        assert_eq!(z.reduced().terms().map(|(k, c)| (k, c.clone())).collect::<Vec<_>>(), vec![(-1, CycNum::one())]);
        assert_eq!(z.leading().unwrap().0, Exponent::new(-1, n as i64));
    }
    let j = j_series(30);
    let z = orbifold_partition(&j_data(30), 0, 0, 0);
    assert_eq!(z.first_difference(&j), None);
    assert_eq!(z.precision(), Some(30.into()));
    let empty = ModuleCharacterData::new(2, 1, 5, 1).unwrap();
    assert!(orbifold_partition(&empty, 1, 0, 0).is_zero());
}

#[test]
fn g_eigenvalue_phases() {
    // V^{1, 1/3} at grading 4/3 ↦ q^{1/3}; g acts by e(1/3)
    let mut d = ModuleCharacterData::new(3, 1, 9, 2).unwrap();
    d.insert(1, 1, 4, 1, CycNum::from_int(5)).unwrap();
    let z = orbifold_partition(&d, 1, 1, 0);
    assert_eq!(z.coeff(Exponent::new(1, 3)), Some(CycNum::from_int(5).mul_ref(&CycNum::root(3, 1))));
    assert!(matches!(d.insert(1, 1, 5, 1, CycNum::one()), Err(DenominatorError::Domain(_))));
    assert!(matches!(d.insert(1, 1, 10, 1, CycNum::one()), Err(DenominatorError::Domain(_))));
}

#[test]
fn j_satisfies_the_denominator_identity() {
    let d = ModuleCharacterData::from_series(&[j_series(80)], 8).unwrap();
    let r = denominator_verify(&d, [1], 8, 8.into()).unwrap();
    assert_eq!(r[0].verdict, Verdict::Pass, "{}", r[0].reason);
}

#[test]
fn perturbed_dimension_is_located() {
    let j = j_series(80);
    let bumped = j.add(&PuiseuxSeries::new(1, [(3, CycNum::one())], EXACT));
    let d = ModuleCharacterData::from_series(&[bumped], 8).unwrap();
    let r = denominator_verify(&d, [1], 8, 8.into()).unwrap();
    assert_eq!(r[0].verdict, Verdict::Fail);
    // the p^0 row is a tautology; c(3) next meets c(−1) in the p q^2 cell
    assert_eq!(r[0].first_mismatch, Some((1.into(), 2.into())));
}

#[test]
fn mismatch_above_the_window_does_not_mask_one_inside() {
    // c(20) first shows at p q^10 (outside q ≤ 8) and then at p^3 q^5
    let j = j_series(80);
    let bumped = j.add(&PuiseuxSeries::new(1, [(20, CycNum::one())], EXACT));
    let d = ModuleCharacterData::from_series(&[bumped], 8).unwrap();
    let r = denominator_verify(&d, [1], 8, 8.into()).unwrap();
    assert_eq!(r[0].verdict, Verdict::Fail);
    assert_eq!(r[0].first_mismatch, Some((3.into(), 5.into())));
}

#[test]
fn window_beyond_data_is_inconclusive() {
    let d = ModuleCharacterData::from_series(&[j_series(30)], 8).unwrap();
    let r = denominator_verify(&d, [1], 8, 8.into()).unwrap();
    assert_eq!(r[0].verdict, Verdict::Inconclusive);
    let d = ModuleCharacterData::from_series(&[j_series(80)], 4).unwrap();
    let r = denominator_verify(&d, [1], 8, 8.into()).unwrap();
    assert_eq!(r[0].verdict, Verdict::Inconclusive);
}

#[test]
fn toy_data_gives_a_one_term_identity() {
    for n in [1, 2, 5] {
        let d = single_entry(n);
        let lhs = lhs_series(&d, 1, 3).unwrap();
        let want = BiSeries::new(
            1,
            [
                (0, PuiseuxSeries::one()),
                (1, PuiseuxSeries::new(n, [(-1, CycNum::from_int(-1))], 2 * n as i64)),
            ],
            3,
        );
        assert_eq!(lhs.first_difference(&want), None);
        let r = denominator_verify(&d, [1], 2, 1.into()).unwrap();
        assert_eq!(r[0].verdict, Verdict::Pass, "N = {n}: {}", r[0].reason);
    }
}

#[test]
fn twisted_identity_for_2b() {
    let d = ModuleCharacterData::from_series(
        &[series(moonshine_oracle::t2b_coefficients(60)), j_series(60)],
        6,
    )
    .unwrap();
    let r = denominator_verify(&d, [1, 2], 6, 6.into()).unwrap();
    for x in &r {
        assert_eq!(x.verdict, Verdict::Pass, "h^{}: {}", x.power, x.reason);
    }
    // swapping the power maps breaks it
    let d = ModuleCharacterData::from_series(
        &[series(moonshine_oracle::t2b_coefficients(60)), series(moonshine_oracle::t2b_coefficients(60))],
        6,
    )
    .unwrap();
    assert_eq!(denominator_verify(&d, [1], 6, 6.into()).unwrap()[0].verdict, Verdict::Fail);
}

#[test]
fn adams_operations_act_trivially_on_dimensions() {
    let d = t2b_data(40);
    let a = rhs_series(&d, 2, 4).unwrap();
    let b = rhs_series(&d.dimensions_only(), 1, 4).unwrap();
    assert_eq!(a.first_difference(&b), None);
}

#[test]
fn pole_trace_is_the_leading_coefficient() {
    for d in [j_data(20), t2b_data(20), single_entry(3)] {
        for e in 1..=d.h_order() as u64 {
            let side = fricke_side(&d, e, 1).unwrap();
            let z = orbifold_partition(&d, 1, 0, e as i64);
            let (lead, c) = z.leading().unwrap();
            assert_eq!(lead, Exponent::new(-1, d.n() as i64));
            assert_eq!(c, &side.pole);
            assert!(!c.is_zero());
        }
    }
    let mut bad = ModuleCharacterData::new(1, 1, 4, 1).unwrap();
    bad.insert(0, 0, 0, 1, CycNum::from_int(2)).unwrap();
    assert!(matches!(fricke_side(&bad, 1, 1), Err(DenominatorError::Domain(_))));
}

#[test]
fn identity_implies_monicity() {
    let j = j_series(60);
    let d = ModuleCharacterData::from_series(&[j.clone()], 8).unwrap();
    let reports = fricke_monicity_suite(&d, (1, 0, 1), 1..=8).unwrap();
    for (n, r) in (1..=8).zip(&reports) {
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.polynomial, faber(&j, n).unwrap());
    }
    let d = t2b_data(60);
    assert!(denominator_verify(&d, [1, 2], 4, 4.into()).unwrap().iter().all(|r| r.verdict == Verdict::Pass));
    for r in fricke_monicity_suite(&d, (1, 0, 1), 1..=8).unwrap() {
        assert_eq!(r.verdict, Verdict::Pass);
    }
    let d = single_entry(1);
    for (n, r) in (1..=5).zip(fricke_monicity_suite(&d, (1, 0, 1), 1..=5).unwrap()) {
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.polynomial, crate::replication::Polynomial::monomial(n));
    }
}

#[test]
fn broken_identity_breaks_monicity() {
    let j = j_series(60);
    let bumped = j.add(&PuiseuxSeries::new(1, [(3, CycNum::one())], EXACT));
    let d = ModuleCharacterData::from_series(&[bumped], 8).unwrap();
    assert_eq!(denominator_verify(&d, [1], 4, 4.into()).unwrap()[0].verdict, Verdict::Fail);
    let reports = fricke_monicity_suite(&d, (1, 0, 1), 1..=6).unwrap();
    assert!(reports.iter().any(|r| r.verdict == Verdict::Fail));
}

#[test]
fn text_round_trip_and_errors() {
    let d = t2b_data(12);
    let back = ModuleCharacterData::parse(&d.to_text()).unwrap();
    assert_eq!(back, d);
    let src = "N 2\norders h=1\nkmax 4\npmax 2\n1 1 x 1 3\n";
    match ModuleCharacterData::parse(src) {
        Err(DenominatorError::Parse { line: 5, column: 5, .. }) => {}
        other => panic!("{other:?}"),
    }
    match ModuleCharacterData::parse("N 2\norders h=1\nkmax 4\n") {
        Err(DenominatorError::Parse { message, .. }) => assert!(message.contains("pmax")),
        other => panic!("{other:?}"),
    }
    match ModuleCharacterData::parse("N 2\norders h=1\nkmax 4\npmax 1\n1 1 2 1 1\n") {
        Err(DenominatorError::Parse { line: 5, .. }) => {}
        other => panic!("{other:?}"),
    }
}
