//! Real balls: an arbitrary-precision midpoint with an `f64` error radius.
//!
//! Every operation returns a ball that contains the exact result of the same
//! operation applied to any points of the input balls. Radii are kept in
//! `f64` and are always rounded upwards; a radius that would underflow is
//! replaced by the smallest positive subnormal, so it can only be pessimistic.

use std::cmp::Ordering;
use std::fmt;

use rug::float::{Constant, Round};
use rug::ops::CompleteRound;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};

/// Extra bits added on top of the requested decimal precision.
pub const GUARD_BITS: u32 = 32;

/// Working precision in bits for `digits` correct decimal digits.
pub fn digits_to_bits(digits: u32) -> u32 {
    ((digits as f64) * std::f64::consts::LOG2_10).ceil() as u32 + GUARD_BITS
}

#[inline]
pub(crate) fn add_up(a: f64, b: f64) -> f64 {
    let s = a + b;
    if s == 0.0 {
        0.0
    } else {
        s.next_up()
    }
}

#[inline]
pub(crate) fn mul_up(a: f64, b: f64) -> f64 {
    let p = a * b;
    if p == 0.0 {
        0.0
    } else {
        p.next_up()
    }
}

#[inline]
pub(crate) fn div_up(a: f64, b: f64) -> f64 {
    let q = a / b;
    if q == 0.0 {
        0.0
    } else {
        q.next_up()
    }
}

/// Upper bound for `|x|` as an `f64`.
pub(crate) fn abs_up(x: &Float) -> f64 {
    if x.is_sign_negative() {
        -x.to_f64_round(Round::Down)
    } else {
        x.to_f64_round(Round::Up)
    }
}

/// Lower bound for `|x|` as an `f64`.
pub(crate) fn abs_down(x: &Float) -> f64 {
    if x.is_sign_negative() {
        -x.to_f64_round(Round::Up)
    } else {
        x.to_f64_round(Round::Down)
    }
}

/// Bound on the rounding error of a correctly rounded value `x`:
/// one unit in the last place, as an `f64` rounded up.
pub(crate) fn ulp(x: &Float) -> f64 {
    match x.get_exp() {
        None => 0.0,
        Some(e) => {
            let k = e as i64 - x.prec() as i64;
            if k < -1074 {
                f64::from_bits(1)
            } else if k > 1023 {
                f64::INFINITY
            } else {
                2f64.powi(k as i32)
            }
        }
    }
}

#[inline]
fn err_of(x: &Float, ord: Ordering) -> f64 {
    if ord == Ordering::Equal {
        0.0
    } else {
        ulp(x)
    }
}

/// A real number known to lie in `[mid - rad, mid + rad]`.
#[derive(Clone, Debug)]
pub struct BigFloat {
    mid: Float,
    rad: f64,
}

impl BigFloat {
    pub fn from_parts(mid: Float, rad: f64) -> Self {
        debug_assert!(rad >= 0.0);
        BigFloat { mid, rad }
    }

    pub fn exact_f64(prec: u32, x: f64) -> Self {
        let (mid, ord) = Float::with_val_round(prec.max(53), x, Round::Nearest);
        BigFloat { rad: err_of(&mid, ord), mid }
    }

    pub fn zero(prec: u32) -> Self {
        BigFloat::exact_f64(prec, 0.0)
    }

    pub fn one(prec: u32) -> Self {
        BigFloat::exact_f64(prec, 1.0)
    }

    pub fn from_integer(prec: u32, n: &Integer) -> Self {
        let (mid, ord) = Float::with_val_round(prec, n, Round::Nearest);
        BigFloat { rad: err_of(&mid, ord), mid }
    }

    pub fn from_i64(prec: u32, n: i64) -> Self {
        let (mid, ord) = Float::with_val_round(prec, n, Round::Nearest);
        BigFloat { rad: err_of(&mid, ord), mid }
    }

    pub fn from_rational(prec: u32, r: &Rational) -> Self {
        let (mid, ord) = Float::with_val_round(prec, r, Round::Nearest);
        BigFloat { rad: err_of(&mid, ord), mid }
    }

    pub fn pi(prec: u32) -> Self {
        let (mid, ord) = Float::with_val_round(prec, Constant::Pi, Round::Nearest);
        BigFloat { rad: err_of(&mid, ord), mid }
    }

    /// `log n` for a positive integer.
    pub fn ln_integer(prec: u32, n: &Integer) -> Result<Self> {
        if *n <= 0 {
            return Err(Error::InvalidInput(format!("log of non-positive integer {n}")));
        }
        let x = Float::with_val(prec + 8, n);
        let exact = x == *n;
        let (mid, ord) = Float::with_val_round(prec, x.ln_ref(), Round::Nearest);
        let mut rad = err_of(&mid, ord);
        if !exact {
            // relative input error 2^(-prec-8) moves the log by at most that much
            rad = add_up(rad, 2f64.powi(-(prec as i32) - 7));
        }
        Ok(BigFloat { mid, rad })
    }

    pub fn mid(&self) -> &Float {
        &self.mid
    }

    pub fn rad(&self) -> f64 {
        self.rad
    }

    pub fn prec(&self) -> u32 {
        self.mid.prec()
    }

    pub fn to_f64(&self) -> f64 {
        self.mid.to_f64()
    }

    pub fn is_finite(&self) -> bool {
        self.mid.is_finite() && self.rad.is_finite()
    }

    /// Lower endpoint, rounded down.
    pub fn lower(&self) -> Float {
        (&self.mid - self.rad).complete_round(self.prec(), Round::Down).0
    }

    /// Upper endpoint, rounded up.
    pub fn upper(&self) -> Float {
        (&self.mid + self.rad).complete_round(self.prec(), Round::Up).0
    }

    /// Upper bound for `|x|` over the ball.
    pub fn abs_upper(&self) -> f64 {
        add_up(abs_up(&self.mid), self.rad)
    }

    /// Lower bound for `|x|` over the ball (0 if the ball contains 0).
    pub fn abs_lower(&self) -> f64 {
        let m = abs_down(&self.mid);
        if m <= self.rad {
            0.0
        } else {
            let d = m - self.rad;
            d.next_down().max(0.0)
        }
    }

    pub fn contains_zero(&self) -> bool {
        self.mid.clone().abs() <= self.rad
    }

    /// `true` when the ball lies in `(0, ∞)`.
    pub fn is_positive(&self) -> bool {
        self.mid > 0 && self.lower() > 0
    }

    /// `true` when the ball lies in `(-∞, 0)`.
    pub fn is_negative(&self) -> bool {
        self.mid < 0 && self.upper() < 0
    }

    /// Sign of the represented number when it is certified by the ball.
    pub fn sign(&self) -> Option<Ordering> {
        if self.is_positive() {
            Some(Ordering::Greater)
        } else if self.is_negative() {
            Some(Ordering::Less)
        } else if self.mid.is_zero() && self.rad == 0.0 {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Certified comparison; `None` when the balls overlap (and are not both exact and equal).
    pub fn cmp_certified(&self, other: &BigFloat) -> Option<Ordering> {
        if self.rad == 0.0 && other.rad == 0.0 && self.mid == other.mid {
            return Some(Ordering::Equal);
        }
        self.sub(other).sign().filter(|o| *o != Ordering::Equal)
    }

    /// Whether the two balls intersect.
    pub fn overlaps(&self, other: &BigFloat) -> bool {
        self.cmp_certified(other).is_none_or(|o| o == Ordering::Equal)
    }

    fn prec2(&self, other: &BigFloat) -> u32 {
        self.prec().max(other.prec())
    }

    pub fn neg(&self) -> BigFloat {
        BigFloat { mid: -self.mid.clone(), rad: self.rad }
    }

    pub fn abs(&self) -> BigFloat {
        BigFloat { mid: self.mid.clone().abs(), rad: self.rad }
    }

    pub fn add(&self, other: &BigFloat) -> BigFloat {
        let (mid, ord) = (&self.mid + &other.mid).complete_round(self.prec2(other), Round::Nearest);
        let rad = add_up(add_up(self.rad, other.rad), err_of(&mid, ord));
        BigFloat { mid, rad }
    }

    pub fn sub(&self, other: &BigFloat) -> BigFloat {
        let (mid, ord) = (&self.mid - &other.mid).complete_round(self.prec2(other), Round::Nearest);
        let rad = add_up(add_up(self.rad, other.rad), err_of(&mid, ord));
        BigFloat { mid, rad }
    }

    pub fn mul(&self, other: &BigFloat) -> BigFloat {
        let (mid, ord) = (&self.mid * &other.mid).complete_round(self.prec2(other), Round::Nearest);
        let prop = add_up(
            add_up(mul_up(abs_up(&self.mid), other.rad), mul_up(abs_up(&other.mid), self.rad)),
            mul_up(self.rad, other.rad),
        );
        BigFloat { rad: add_up(prop, err_of(&mid, ord)), mid }
    }

    pub fn mul_i64(&self, k: i64) -> BigFloat {
        let (mid, ord) = (&self.mid * k).complete_round(self.prec(), Round::Nearest);
        let rad = add_up(mul_up(self.rad, (k as f64).abs()), err_of(&mid, ord));
        BigFloat { mid, rad }
    }

    pub fn mul_rational(&self, r: &Rational) -> BigFloat {
        self.mul(&BigFloat::from_rational(self.prec(), r))
    }

    pub fn div_i64(&self, k: i64) -> BigFloat {
        assert!(k != 0, "division by zero");
        let (mid, ord) = (&self.mid / k).complete_round(self.prec(), Round::Nearest);
        let rad = add_up(div_up(self.rad, (k as f64).abs()), err_of(&mid, ord));
        BigFloat { mid, rad }
    }

    pub fn div(&self, other: &BigFloat) -> Result<BigFloat> {
        let lb = other.abs_lower();
        if lb <= 0.0 {
            return Err(Error::precision("division by a ball containing zero"));
        }
        let (mid, ord) = (&self.mid / &other.mid).complete_round(self.prec2(other), Round::Nearest);
        let b = abs_up(&other.mid);
        let num = add_up(mul_up(abs_up(&self.mid), other.rad), mul_up(b, self.rad));
        let den = (abs_down(&other.mid) * lb).next_down();
        let prop = if den > 0.0 { div_up(num, den) } else { f64::INFINITY };
        Ok(BigFloat { rad: add_up(prop, err_of(&mid, ord)), mid })
    }

    pub fn sqr(&self) -> BigFloat {
        self.mul(self)
    }

    pub fn sqrt(&self) -> Result<BigFloat> {
        if self.is_negative() {
            return Err(Error::InvalidInput("square root of a negative ball".into()));
        }
        let lo = self.lower();
        if lo <= 0 {
            let mut hi = self.upper();
            hi.sqrt_round(Round::Up);
            let hi = abs_up(&hi);
            let mid = Float::with_val(self.prec(), hi / 2.0);
            return Ok(BigFloat { mid, rad: (hi / 2.0).next_up() });
        }
        let (mid, ord) = self.mid.sqrt_ref().complete_round(self.prec(), Round::Nearest);
        let mut slo = lo;
        slo.sqrt_round(Round::Down);
        let slo = abs_down(&slo);
        let prop = if slo > 0.0 { div_up(self.rad, slo) } else { f64::INFINITY };
        Ok(BigFloat { rad: add_up(prop, err_of(&mid, ord)), mid })
    }

    pub fn ln(&self) -> Result<BigFloat> {
        let lo = self.lower();
        if lo <= 0 {
            return Err(Error::precision("logarithm of a ball that is not certified positive"));
        }
        let (mid, ord) = self.mid.ln_ref().complete_round(self.prec(), Round::Nearest);
        let prop = div_up(self.rad, abs_down(&lo));
        Ok(BigFloat { rad: add_up(prop, err_of(&mid, ord)), mid })
    }

    pub fn exp(&self) -> BigFloat {
        let (mid, ord) = self.mid.exp_ref().complete_round(self.prec(), Round::Nearest);
        let prop = mul_up(add_up(abs_up(&mid), err_of(&mid, ord)), self.rad.exp_m1().next_up());
        BigFloat { rad: add_up(prop, err_of(&mid, ord)), mid }
    }

    pub fn sin(&self) -> BigFloat {
        let (mid, ord) = self.mid.sin_ref().complete_round(self.prec(), Round::Nearest);
        BigFloat { rad: add_up(self.rad, err_of(&mid, ord)), mid }
    }

    pub fn cos(&self) -> BigFloat {
        let (mid, ord) = self.mid.cos_ref().complete_round(self.prec(), Round::Nearest);
        BigFloat { rad: add_up(self.rad, err_of(&mid, ord)), mid }
    }

    /// `self^e` for a certified positive base.
    pub fn powf(&self, e: &BigFloat) -> Result<BigFloat> {
        Ok(self.ln()?.mul(e).exp())
    }

    pub fn powi(&self, n: u32) -> BigFloat {
        let mut acc = BigFloat::one(self.prec());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Ball containing `max(x, y)` for every `x` in `self` and `y` in `other`.
    pub fn max(&self, other: &BigFloat) -> BigFloat {
        match self.cmp_certified(other) {
            Some(Ordering::Greater) | Some(Ordering::Equal) => self.clone(),
            Some(Ordering::Less) => other.clone(),
            None => {
                let prec = self.prec2(other);
                let lo = self.lower().max(&other.lower());
                let hi = self.upper().max(&other.upper());
                BigFloat::from_interval(prec, &lo, &hi)
            }
        }
    }

    /// Ball containing `min(x, y)`.
    pub fn min(&self, other: &BigFloat) -> BigFloat {
        self.neg().max(&other.neg()).neg()
    }

    /// Smallest convenient ball enclosing `[lo, hi]`.
    pub fn from_interval(prec: u32, lo: &Float, hi: &Float) -> BigFloat {
        let (mid, _) = Float::with_val_round(prec + 2, lo + hi, Round::Nearest);
        let mid = Float::with_val(prec, mid / 2u32);
        let d1 = Float::with_val(64, hi - &mid).to_f64_round(Round::Up).abs();
        let d2 = Float::with_val(64, &mid - lo).to_f64_round(Round::Up).abs();
        BigFloat { mid, rad: d1.max(d2).next_up() }
    }

    /// Union hull of two balls.
    pub fn hull(&self, other: &BigFloat) -> BigFloat {
        let prec = self.prec2(other);
        let lo = self.lower().min(&other.lower());
        let hi = self.upper().max(&other.upper());
        BigFloat::from_interval(prec, &lo, &hi)
    }

    /// Widen the radius by `extra`.
    pub fn add_error(&self, extra: f64) -> BigFloat {
        BigFloat { mid: self.mid.clone(), rad: add_up(self.rad, extra) }
    }

    /// Rounds to a new precision, accounting for the rounding error.
    pub fn with_prec(&self, prec: u32) -> BigFloat {
        let (mid, ord) = Float::with_val_round(prec, &self.mid, Round::Nearest);
        BigFloat { rad: add_up(self.rad, err_of(&mid, ord)), mid }
    }

    /// Scientific notation with `sig` significant digits.
    pub fn format_sig(&self, sig: usize) -> String {
        format_sig(&self.mid, sig)
    }
}

/// Formats a float in scientific notation with `sig` significant digits.
pub fn format_sig(x: &Float, sig: usize) -> String {
    let v = x.to_f64();
    if v == 0.0 {
        return format!("{:.*e}", sig.saturating_sub(1), 0.0);
    }
    format!("{:.*e}", sig.saturating_sub(1), v)
}

/// Formats an error radius with three significant digits.
pub fn format_radius(r: f64) -> String {
    format!("{r:.2e}")
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ± {}", format_sig(&self.mid, 15), format_radius(self.rad))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 200;

    #[test]
    fn exact_small_values_have_zero_radius() {
        assert_eq!(BigFloat::from_i64(P, 12).rad(), 0.0);
        assert_eq!(BigFloat::exact_f64(P, 0.5).rad(), 0.0);
        assert!(BigFloat::from_rational(P, &Rational::from((1, 3))).rad() > 0.0);
    }

    #[test]
    fn pi_and_logs_contain_reference_values() {
        let pi = BigFloat::pi(P);
        let d = (pi.to_f64() - std::f64::consts::PI).abs();
        assert!(d < 1e-15);
        let l2 = BigFloat::ln_integer(P, &Integer::from(2)).unwrap();
        assert!((l2.to_f64() - std::f64::consts::LN_2).abs() < 1e-15);
        assert!(l2.rad() < 1e-55);
    }

    #[test]
    fn arithmetic_encloses_true_result() {
        let third = BigFloat::from_rational(P, &Rational::from((1, 3)));
        let three = BigFloat::from_i64(P, 3);
        let one = third.mul(&three);
        assert!(one.sub(&BigFloat::one(P)).contains_zero());
        let q = BigFloat::one(P).div(&three).unwrap();
        assert!(q.sub(&third).contains_zero());
        let e = BigFloat::one(P).exp().ln().unwrap();
        assert!(e.sub(&BigFloat::one(P)).contains_zero());
        assert!(e.rad() < 1e-50);
    }

    #[test]
    fn certified_comparison_is_none_on_overlap() {
        let a = BigFloat::from_parts(Float::with_val(64, 1.0), 0.5);
        let b = BigFloat::from_parts(Float::with_val(64, 1.2), 0.5);
        assert_eq!(a.cmp_certified(&b), None);
        let c = BigFloat::from_parts(Float::with_val(64, 3.0), 0.5);
        assert_eq!(a.cmp_certified(&c), Some(Ordering::Less));
        assert_eq!(BigFloat::one(64).cmp_certified(&BigFloat::one(64)), Some(Ordering::Equal));
    }

    #[test]
    fn max_of_straddling_balls() {
        let a = BigFloat::from_parts(Float::with_val(64, 1.0), 0.25);
        let one = BigFloat::one(64);
        let m = a.max(&one);
        assert!(m.lower() >= 1.0 - 1e-15);
        assert!(m.upper() >= 1.25);
    }

    #[test]
    fn ln_rejects_nonpositive_balls() {
        let a = BigFloat::from_parts(Float::with_val(64, 0.1), 0.2);
        assert!(a.ln().is_err());
    }

    #[test]
    fn sqrt_near_zero_is_enclosing() {
        let a = BigFloat::from_parts(Float::with_val(64, 0.0), 1e-20);
        let s = a.sqrt().unwrap();
        assert!(s.upper() >= 1e-10);
        assert!(s.lower() <= 0.0);
    }
}
