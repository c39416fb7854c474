use heightlab::cm::{
    class_number, delta, faltings_local_term, fundamental_discriminants, hilbert_class_poly, j_invariant,
    reduced_forms, theta_null, Discriminant,
};
use heightlab::numeric::{poly_roots, BigComplex, BigFloat};
use proptest::prelude::*;
use rug::ops::Pow;
use rug::Float;

/// Kronecker symbol `(d / n)` for `n > 0`.
fn kronecker(d: i64, mut n: i64) -> i64 {
    let mut res = 1;
    while n % 2 == 0 {
        n /= 2;
        match d.rem_euclid(8) {
            1 | 7 => {}
            3 | 5 => res = -res,
            _ => return 0,
        }
    }
    // Jacobi symbol (d mod n / n)
    let mut a = d.rem_euclid(n);
    let mut m = n;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(m % 8, 3 | 5) {
                res = -res;
            }
        }
        std::mem::swap(&mut a, &mut m);
        if a % 4 == 3 && m % 4 == 3 {
            res = -res;
        }
        a %= m;
    }
    if m == 1 {
        res
    } else {
        0
    }
}

/// Dirichlet's formula `h = -(w / 2|D|) Σ_{a<|D|} χ(a) a`.
fn dirichlet_class_number(d: i64) -> i64 {
    let m = -d;
    let w = match d {
        -3 => 6,
        -4 => 4,
        _ => 2,
    };
    let s: i64 = (1..m).map(|a| kronecker(d, a) * a).sum();
    -w * s / (2 * m)
}

#[test]
fn class_numbers_match_dirichlet_formula() {
    for d in fundamental_discriminants(1000) {
        assert_eq!(class_number(&d) as i64, dirichlet_class_number(d.value()), "D = {d}");
    }
}

/// Reduces an arbitrary positive definite form by the classical algorithm.
fn reduce(mut a: i64, mut b: i64, mut c: i64) -> (i64, i64, i64) {
    loop {
        if c < a || (a == c && b < 0) {
            (a, b, c) = (c, -b, a);
            continue;
        }
        if b > a || b <= -a {
            let k = (a - b).div_euclid(2 * a);
            let nb = b + 2 * a * k;
            c += k * (b + a * k);
            b = nb;
            continue;
        }
        return (a, b, c);
    }
}

#[test]
fn class_numbers_match_orbit_count() {
    // every class has a representative with 0 < a ≤ |D|, |b| ≤ a
    for d in fundamental_discriminants(300) {
        let dv = d.value();
        let mut seen = std::collections::BTreeSet::new();
        for a in 1..=dv.abs() {
            for b in -a..=a {
                let n = b * b - dv;
                if n % (4 * a) == 0 {
                    let c = n / (4 * a);
                    let g = gcd(gcd(a, b), c);
                    if g == 1 {
                        seen.insert(reduce(a, b, c));
                    }
                }
            }
        }
        let mine: Vec<(i64, i64, i64)> = reduced_forms(&d).iter().map(|f| (f.a, f.b, f.c)).collect();
        assert_eq!(mine, seen.into_iter().collect::<Vec<_>>(), "D = {dv}");
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn point(re: f64, im: f64) -> BigComplex {
    BigComplex::from_balls(&BigFloat::exact_f64(256, re), &BigFloat::exact_f64(256, im))
}

#[test]
fn delta_at_i_matches_gamma_closed_form() {
    let prec = 400;
    let g = Float::with_val(prec, 0.25).gamma();
    let pi = Float::with_val(prec, rug::float::Constant::Pi);
    let closed = Float::with_val(prec, g.pow(24u32))
        / Float::with_val(prec, pi.pow(18u32))
        / Float::with_val(prec, 2u32).pow(24u32);
    let d = delta(&point(0.0, 1.0), 60).unwrap();
    let diff = Float::with_val(prec, d.abs().mid() - &closed).abs();
    assert!(diff < 1e-30, "{}", diff.to_f64());
}

#[test]
fn local_term_examples() {
    let t = point(0.3, 1.1);
    let a = faltings_local_term(&t, 50).unwrap();
    let b = faltings_local_term(&t.add(&BigComplex::one(256)), 50).unwrap();
    assert!(a.sub(&b).abs_upper() < 1e-40);
    let i = point(0.0, 1.0);
    let s = faltings_local_term(&i, 50).unwrap();
    let s2 = faltings_local_term(&i.inv().unwrap().neg(), 50).unwrap();
    assert!(s.sub(&s2).abs_upper() < 1e-40);
}

#[test]
fn theta_at_i_is_real_and_positive() {
    let th = theta_null(&point(0.0, 1.0), 40).unwrap();
    for t in &th {
        assert!(t.re_ball().is_positive());
        assert!(t.im().to_f64().abs() < 1e-35);
    }
}

#[test]
fn class_polynomial_roots_match_j_values() {
    let d = Discriminant::new(-23).unwrap();
    let cp = hilbert_class_poly(&d).unwrap();
    assert!(cp.max_residual < 1e-4);
    let roots = poly_roots(&cp.poly, 30).unwrap();
    for f in reduced_forms(&d) {
        let j = j_invariant(&f.tau(256), 30).unwrap();
        assert!(roots.iter().any(|r| r.mid_distance(&j).to_f64() < 1e-6), "{j}");
    }
}

#[test]
fn non_fundamental_discriminants_are_supported() {
    // the order of conductor 2 in Z[i] has j = 287496
    let d = Discriminant::new(-16).unwrap();
    assert_eq!(class_number(&d), 1);
    let cp = hilbert_class_poly(&d).unwrap();
    assert_eq!(cp.poly.coeff(0), rug::Integer::from(-287496));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn local_term_is_modular(re in -0.5f64..0.5, im in 0.5f64..2.0) {
        let t = point(re, im);
        let s = faltings_local_term(&t, 50).unwrap();
        let s1 = faltings_local_term(&t.add(&BigComplex::one(256)), 50).unwrap();
        let si = faltings_local_term(&t.inv().unwrap().neg(), 50).unwrap();
        prop_assert!(s.sub(&s1).abs_upper() < 1e-40);
        prop_assert!(s.sub(&si).abs_upper() < 1e-40);
    }

    #[test]
    fn theta_odd_coordinates_coincide(re in -2.0f64..2.0, im in 0.3f64..3.0) {
        let th = theta_null(&point(re, im), 30).unwrap();
        prop_assert!(th[1].overlaps(&th[3]));
    }
}

#[test]
fn class_polynomials_round_cleanly_up_to_500() {
    for d in fundamental_discriminants(500) {
        let cp = hilbert_class_poly(&d).unwrap();
        assert_eq!(cp.poly.degree(), class_number(&d), "D = {}", d.value());
        assert!(cp.poly.is_monic());
        assert!(cp.max_residual < 1e-4, "D = {}: residual {}", d.value(), cp.max_residual);
    }
}
