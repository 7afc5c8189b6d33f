use std::collections::BTreeMap;

use super::*;
use crate::hecke::hecke_apply;
use crate::qseries::EXACT;

fn j_series(k: usize) -> PuiseuxSeries {
    let c = moonshine_oracle::j_coefficients(k);
    let terms = std::iter::once((-1, CycNum::one()))
        .chain(c.into_iter().enumerate().skip(1).map(|(i, v)| (i as i64, CycNum::from_bigint(v))));
    PuiseuxSeries::new(1, terms, k as i64)
}

/// `−J(τ + 1/2)`.
fn twisted_j(k: usize) -> PuiseuxSeries {
    let c = moonshine_oracle::j_coefficients(k);
    let terms = std::iter::once((-1, CycNum::one())).chain(c.into_iter().enumerate().skip(1).map(|(i, v)| {
        let v = if i % 2 == 0 { -v } else { v };
        (i as i64, CycNum::from_bigint(v))
    }));
    PuiseuxSeries::new(1, terms, k as i64)
}

use moonshine_oracle::faber_of_j as faber_of_j_oracle;

#[test]
fn faber_of_j() {
    let j = j_series(10);
    assert_eq!(faber(&j, 1).unwrap().to_string(), "x");
    assert_eq!(faber(&j, 2).unwrap().to_string(), "x^2 - 393768");
    assert_eq!(faber(&j, 3).unwrap().to_string(), "x^3 - 590652*x - 64481280");
}

#[test]
fn faber_needs_window() {
    assert!(matches!(faber(&j_series(1), 3), Err(ReplicationError::Inconclusive(_))));
    let not_normalized = PuiseuxSeries::new(1, [(-1, CycNum::from_int(2))], 3);
    assert!(matches!(faber(&not_normalized, 2), Err(ReplicationError::Domain(_))));
}

#[test]
fn faber_matches_integer_oracle() {
    let j = j_series(14);
    for n in 1..=5 {
        let phi = faber(&j, n).unwrap().eval_series(&j);
        let oracle = faber_of_j_oracle(n, 8);
        for e in -(n as i64)..=8 {
            let want = CycNum::from_bigint(oracle[(e + n as i64) as usize].clone());
            assert_eq!(phi.coeff(e.into()), Some(want), "Φ_{n}(J) at q^{e}");
        }
    }
}

#[test]
fn bivarial_of_j() {
    let j = j_series(23);
    let h = bivarial(&j, 12).unwrap();
    assert!(h.covers_box(12));
    assert_eq!(h.get(1, 1), Some(&CycNum::from_int(196884)));
    assert_eq!(h.get(2, 1), Some(&CycNum::from_int(21493760)));
    let c = moonshine_oracle::j_coefficients(12);
    for m in 1..=12u64 {
        assert_eq!(h.get(m, 1), Some(&CycNum::from_bigint(c[m as usize].clone())));
        for n in 1..=12u64 {
            assert_eq!(h.get(m, n), h.get(n, m));
        }
    }
    // n H_{m,n} is the q^m coefficient of Φ_n(J)
    for n in 1..=4usize {
        let oracle = faber_of_j_oracle(n, 12);
        for m in 1..=12u64 {
            let want = CycNum::from_bigint(oracle[m as usize + n].clone());
            assert_eq!(&h.get(m, n as u64).unwrap().scale(&Rational::from_integer((n as i64).into())), &want);
        }
    }
    assert!(matches!(bivarial(&j_series(20), 12), Err(ReplicationError::Inconclusive(_))));
}

#[test]
fn faber_and_h_agree() {
    let j = j_series(20);
    for n in 1..=4 {
        let r = faber_h_consistency(&j, n, 10).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
    }
    let mut table = bivarial(&j, 10).unwrap();
    table.set(5, 2, CycNum::from_int(1));
    let r = faber_h_consistency_with(&j, 2, 10, &table).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    assert_eq!(r.first_mismatch, Some(5));
}

#[test]
fn j_is_replicable_and_its_own_replicate() {
    let j = j_series(100);
    let r = replicability_check(&j, 12).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    let reps = extract_replicates(&j, 4, 8).unwrap();
    for t in 1..=4 {
        let rt = reps.get(t).unwrap();
        assert!(rt.precision_num() >= 2, "replicate {t}");
        assert_eq!(rt.first_difference(&j), None, "replicate {t}");
    }
    let c = complete_replicability_check(&j, 4, 12).unwrap();
    assert_eq!(c.verdict, Verdict::Pass, "{:?}", c.findings);
}

#[test]
fn perturbed_j_is_not_replicable() {
    let j = j_series(23);
    let bumped = j.add(&PuiseuxSeries::new(1, [(5, CycNum::one())], EXACT));
    let r = replicability_check(&bumped, 12).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    let ((m1, n1), (m2, n2)) = r.witness.unwrap();
    assert_eq!(m1.gcd(&n1), m2.gcd(&n2));
    assert_eq!(m1 * n1, m2 * n2);
}

#[test]
fn q_inverse_is_completely_replicable() {
    let f = PuiseuxSeries::monomial(CycNum::one(), -1, 1);
    for n in 1..=6 {
        assert_eq!(faber(&f, n).unwrap(), Polynomial::monomial(n));
    }
    let c = complete_replicability_check(&f, 4, 8).unwrap();
    assert_eq!(c.verdict, Verdict::Pass, "{:?}", c.findings);
    let reps = extract_replicates(&f, 3, 5).unwrap();
    assert_eq!(reps.get(3).unwrap().first_difference(&f), None);
}

#[test]
fn twisted_j_is_replicable_but_not_completely() {
    let f = twisted_j(40);
    assert_eq!(replicability_check(&f, 8).unwrap().verdict, Verdict::Pass);
    let c = complete_replicability_check(&f, 4, 8).unwrap();
    assert_eq!(c.verdict, Verdict::Fail);
    assert!(c
        .findings
        .iter()
        .any(|x| matches!(x, CompleteFinding::ReplicateNotReplicable { t: 2, .. })));
}

#[test]
fn extend_from_seven_coefficients() {
    let j = moonshine_oracle::j_coefficients(20);
    let first: Vec<CycNum> = j.iter().take(8).cloned().map(CycNum::from_bigint).collect();
    let partials: BTreeMap<u64, Vec<CycNum>> = [1u64, 2, 4, 8].into_iter().map(|t| (t, first.clone())).collect();
    let out = extend_from_partial(&partials, 20).unwrap();
    assert!(out.checks > 0);
    let base = out.replicates.base();
    for k in 1..=20usize {
        assert_eq!(base.coeff_num(k as i64), Some(CycNum::from_bigint(j[k].clone())), "a_{k}");
    }

    let mut bad = partials.clone();
    for v in bad.values_mut() {
        v[7] = &v[7] + &CycNum::one();
    }
    match extend_from_partial(&bad, 20) {
        Err(ReplicationError::Inconsistent { index, .. }) => assert_eq!(index, 12),
        other => panic!("corruption not detected: {other:?}"),
    }
}

#[test]
fn extend_rejects_bad_keys() {
    let p: BTreeMap<u64, Vec<CycNum>> = [(3u64, vec![CycNum::zero(); 4])].into_iter().collect();
    assert!(matches!(extend_from_partial(&p, 5), Err(ReplicationError::Domain(_))));
}

#[test]
fn replicates_give_an_equivariant_family() {
    let j = j_series(30);
    let reps = extract_replicates(&j, 1, 30).unwrap();
    let fam = replicates_to_family(&reps, 1).unwrap();
    let pair = CommutingPair { g: 0, h: 0 };
    for n in 2..=5u64 {
        let lhs = hecke_apply(&fam, n, pair).unwrap();
        let phi = faber(&j, n as usize).unwrap().eval_series(&j);
        assert_eq!(lhs.first_difference(&phi), None, "n = {n}");
        assert!(lhs.precision().unwrap() >= 5.into());
    }
    let back = family_to_replicates(&fam).unwrap();
    assert_eq!(back.base().first_difference(&j), None);
}
