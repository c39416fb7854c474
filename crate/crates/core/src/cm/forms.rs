//! Imaginary quadratic discriminants and reduced binary quadratic forms.

use std::fmt;

use rug::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{BigComplex, BigFloat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Discriminant {
    d: i64,
    fundamental: bool,
}

fn squarefree(mut n: u64) -> bool {
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p * p) {
            return false;
        }
        if n.is_multiple_of(p) {
            n /= p;
        }
        p += 1;
    }
    true
}

pub fn is_fundamental(d: i64) -> bool {
    if d >= 0 {
        return false;
    }
    let m = d.unsigned_abs();
    match d.rem_euclid(4) {
        1 => squarefree(m),
        0 => {
            let k = d / 4;
            matches!(k.rem_euclid(4), 2 | 3) && squarefree(k.unsigned_abs())
        }
        _ => false,
    }
}

impl Discriminant {
    /// Any negative `D ≡ 0, 1 (mod 4)`.
    pub fn new(d: i64) -> Result<Self> {
        if d >= 0 || !matches!(d.rem_euclid(4), 0 | 1) {
            return Err(Error::invalid(format!("{d} is not a negative discriminant (D < 0, D ≡ 0 or 1 mod 4)")));
        }
        if d < -(1 << 40) {
            return Err(Error::invalid("discriminant too large"));
        }
        Ok(Discriminant { d, fundamental: is_fundamental(d) })
    }

    /// Only fundamental discriminants.
    pub fn fundamental(d: i64) -> Result<Self> {
        let x = Discriminant::new(d)?;
        if !x.fundamental {
            return Err(Error::invalid(format!("{d} is not a fundamental discriminant")));
        }
        Ok(x)
    }

    pub fn value(&self) -> i64 {
        self.d
    }

    pub fn is_fundamental(&self) -> bool {
        self.fundamental
    }

    pub fn abs(&self) -> u64 {
        self.d.unsigned_abs()
    }
}

impl fmt::Display for Discriminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.d)
    }
}

/// `a x² + b xy + c y²` with `b² - 4ac = D`, primitive and reduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ReducedForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl ReducedForm {
    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    /// The CM point `(-b + i√|D|) / (2a)`, which lies in the standard
    /// fundamental domain.
    pub fn tau(&self, prec: u32) -> BigComplex {
        let d = self.discriminant().unsigned_abs();
        let two_a = 2 * self.a;
        let re = BigFloat::from_i64(prec, -self.b).div_i64(two_a);
        let im = BigFloat::from_integer(prec, &Integer::from(d)).sqrt().expect("positive").div_i64(two_a);
        BigComplex::from_balls(&re, &im)
    }

    /// `Im τ` as an f64, for cost estimates.
    pub fn im_tau(&self) -> f64 {
        (self.discriminant().unsigned_abs() as f64).sqrt() / (2.0 * self.a as f64)
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// All reduced primitive forms of discriminant `D`, sorted by `(a, b)`.
pub fn reduced_forms(d: &Discriminant) -> Vec<ReducedForm> {
    let dd = d.value();
    let m = d.abs() as i64;
    let mut out = Vec::new();
    let mut a = 1i64;
    // reduced forms have 3a² ≤ |D|
    while 3 * a * a <= m {
        for b in -a + 1..=a {
            if (b - dd).rem_euclid(2) != 0 {
                continue;
            }
            let num = b * b - dd;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (a == c && b < 0) {
                continue;
            }
            if gcd(gcd(a, b), c) != 1 {
                continue;
            }
            out.push(ReducedForm { a, b, c });
        }
        a += 1;
    }
    out.sort_by_key(|f| (f.a, f.b));
    out
}

pub fn class_number(d: &Discriminant) -> usize {
    reduced_forms(d).len()
}

/// Fundamental discriminants with `|D| ≤ dmax`, ordered by `|D|`.
pub fn fundamental_discriminants(dmax: u64) -> Vec<Discriminant> {
    (3..=dmax as i64)
        .map(|m| -m)
        .filter(|&d| is_fundamental(d))
        .map(|d| Discriminant { d, fundamental: true })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc(d: i64) -> Discriminant {
        Discriminant::new(d).unwrap()
    }

    fn forms(d: i64) -> Vec<(i64, i64, i64)> {
        reduced_forms(&disc(d)).iter().map(|f| (f.a, f.b, f.c)).collect()
    }

    #[test]
    fn small_examples() {
        assert_eq!(forms(-4), vec![(1, 0, 1)]);
        assert_eq!(forms(-3), vec![(1, 1, 1)]);
        assert_eq!(forms(-23), vec![(1, 1, 6), (2, -1, 3), (2, 1, 3)]);
        assert_eq!(class_number(&disc(-23)), 3);
        // non-fundamental: -12 has the primitive form (1,0,3) only
        assert_eq!(forms(-12), vec![(1, 0, 3)]);
    }

    #[test]
    fn fundamental_flags() {
        for d in [-3, -4, -7, -8, -11, -15, -19, -20, -23, -24, -163] {
            assert!(is_fundamental(d), "{d}");
        }
        for d in [-12, -16, -27, -28, -32, -36, -44] {
            assert!(!is_fundamental(d), "{d}");
        }
        assert!(Discriminant::new(-5).is_err());
        assert!(Discriminant::new(4).is_err());
        assert!(Discriminant::fundamental(-12).is_err());
    }

    #[test]
    fn forms_are_reduced_and_have_discriminant() {
        for d in fundamental_discriminants(400) {
            for f in reduced_forms(&d) {
                assert_eq!(f.discriminant(), d.value());
                assert!(f.b.abs() <= f.a && f.a <= f.c);
                let t = f.tau(64);
                assert!(t.im().to_f64() >= 0.8660);
                assert!(t.re().to_f64().abs() <= 0.5);
            }
        }
    }

    #[test]
    fn fundamental_list_is_ordered() {
        let v: Vec<i64> = fundamental_discriminants(24).iter().map(|d| d.value()).collect();
        assert_eq!(v, vec![-3, -4, -7, -8, -11, -15, -19, -20, -23, -24]);
    }
}
