use heightlab::heights::{weil_height_digits, AlgebraicNumber};
use heightlab::numeric::IntPoly;
use heightlab::radical::{radical_height, RadicalScalar};
use heightlab::towers::{build_tower, certify_level, distinct_fields_check, generator_clears_target, remark_bound};
use proptest::prelude::*;
use rug::{Integer, Rational};

fn height(p: &IntPoly) -> f64 {
    weil_height_digits(&AlgebraicNumber::from_minpoly(p.clone()).unwrap(), 30).unwrap().to_f64()
}

/// Minimal polynomial of the reciprocal, with positive leading coefficient.
fn reversed(p: &IntPoly) -> IntPoly {
    let r = IntPoly::new(p.coeffs().iter().rev().cloned().collect());
    if r.leading() < 0 {
        r.neg()
    } else {
        r
    }
}

#[test]
fn conjugates_share_a_height() {
    let p = IntPoly::from_i64s(&[-2, 0, -3, 1]);
    let hs: Vec<f64> =
        AlgebraicNumber::conjugates(&p).unwrap().iter().map(|a| weil_height_digits(a, 30).unwrap().to_f64()).collect();
    assert_eq!(hs.len(), 3);
    assert!(hs.iter().all(|h| (h - hs[0]).abs() < 1e-25));
}

#[test]
fn towers_clear_their_targets_at_every_level() {
    for (c, sched) in [(0.5, vec![2, 3]), (2f64.ln(), vec![3, 2, 2]), (1.2, vec![5])] {
        let t = build_tower(-1.0, c, sched.len(), &sched, 0).unwrap();
        for i in 1..=sched.len() {
            assert!(generator_clears_target(&t, i).unwrap());
            assert!(remark_bound(&t, i, 128).unwrap().to_f64() < c);
            assert!(certify_level(&t, i, 30).unwrap().passed());
        }
    }
    let a = build_tower(-1.0, 0.7, 2, &[2, 2], 0).unwrap();
    let b = build_tower(-1.0, 0.7, 2, &[2, 2], 1).unwrap();
    assert!(distinct_fields_check(&a, &b));
    assert!(!distinct_fields_check(&a, &a));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn inversion_preserves_height(c in proptest::collection::vec(-9i64..=9, 3..6)) {
        let p = IntPoly::from_i64s(&c);
        prop_assume!(p.degree() >= 1 && p.coeff(0) != 0);
        let Ok(a) = AlgebraicNumber::from_minpoly(p.clone()) else { return Ok(()) };
        let h = weil_height_digits(&a, 30).unwrap().to_f64();
        prop_assert!((h - height(&reversed(&p))).abs() < 1e-20);
    }

    #[test]
    fn powers_scale_the_closed_form(n in 1i64..=5, d in 1i64..=6, p in prop::sample::select(vec![2, 3, 5, 7]), k in -4i64..=4) {
        let a = RadicalScalar::from_exponents([(Integer::from(p), Rational::from((n, d)))]);
        let ak = a.pow(&Rational::from(k));
        let lhs = radical_height(&ak);
        let rhs = radical_height(&a).scale(&Rational::from(k.abs()));
        prop_assert_eq!(lhs, rhs);
    }
}
