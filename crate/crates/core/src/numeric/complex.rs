//! Complex disks: a pair of `Float`s plus a radius bounding `|z - mid|`.

use std::fmt;

use rug::float::Round;
use rug::ops::CompleteRound;
use rug::Float;

use super::ball::{abs_up, add_up, div_up, format_radius, format_sig, mul_up, ulp, BigFloat};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct BigComplex {
    re: Float,
    im: Float,
    rad: f64,
}

fn rnd<C>(x: C, prec: u32) -> (Float, f64)
where
    C: CompleteRound<Completed = Float, Prec = u32, Round = Round, Ordering = std::cmp::Ordering>,
{
    let (f, ord) = x.complete_round(prec, Round::Nearest);
    let e = if ord == std::cmp::Ordering::Equal { 0.0 } else { ulp(&f) };
    (f, e)
}

impl BigComplex {
    pub fn from_parts(re: Float, im: Float, rad: f64) -> Self {
        BigComplex { re, im, rad }
    }

    pub fn from_real(x: &BigFloat) -> Self {
        BigComplex { re: x.mid().clone(), im: Float::new(x.prec()), rad: x.rad() }
    }

    /// Combines a real and an imaginary ball into a disk.
    pub fn from_balls(re: &BigFloat, im: &BigFloat) -> Self {
        BigComplex { re: re.mid().clone(), im: im.mid().clone(), rad: add_up(re.rad(), im.rad()) }
    }

    pub fn zero(prec: u32) -> Self {
        BigComplex { re: Float::new(prec), im: Float::new(prec), rad: 0.0 }
    }

    pub fn one(prec: u32) -> Self {
        BigComplex { re: Float::with_val(prec, 1), im: Float::new(prec), rad: 0.0 }
    }

    pub fn re(&self) -> &Float {
        &self.re
    }

    pub fn im(&self) -> &Float {
        &self.im
    }

    pub fn rad(&self) -> f64 {
        self.rad
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn re_ball(&self) -> BigFloat {
        BigFloat::from_parts(self.re.clone(), self.rad)
    }

    pub fn im_ball(&self) -> BigFloat {
        BigFloat::from_parts(self.im.clone(), self.rad)
    }

    /// Upper bound for `|mid|`.
    fn mid_abs_up(&self) -> f64 {
        let a = abs_up(&self.re);
        let b = abs_up(&self.im);
        add_up(a, b).min(mul_up(a.max(b), std::f64::consts::SQRT_2))
    }

    pub fn abs_upper(&self) -> f64 {
        add_up(self.mid_abs_up(), self.rad)
    }

    pub fn add_error(&self, extra: f64) -> BigComplex {
        BigComplex { re: self.re.clone(), im: self.im.clone(), rad: add_up(self.rad, extra) }
    }

    pub fn conj(&self) -> BigComplex {
        BigComplex { re: self.re.clone(), im: -self.im.clone(), rad: self.rad }
    }

    pub fn neg(&self) -> BigComplex {
        BigComplex { re: -self.re.clone(), im: -self.im.clone(), rad: self.rad }
    }

    pub fn add(&self, o: &BigComplex) -> BigComplex {
        let p = self.prec().max(o.prec());
        let (re, e1) = rnd(&self.re + &o.re, p);
        let (im, e2) = rnd(&self.im + &o.im, p);
        BigComplex { re, im, rad: add_up(add_up(self.rad, o.rad), add_up(e1, e2)) }
    }

    pub fn sub(&self, o: &BigComplex) -> BigComplex {
        let p = self.prec().max(o.prec());
        let (re, e1) = rnd(&self.re - &o.re, p);
        let (im, e2) = rnd(&self.im - &o.im, p);
        BigComplex { re, im, rad: add_up(add_up(self.rad, o.rad), add_up(e1, e2)) }
    }

    pub fn mul(&self, o: &BigComplex) -> BigComplex {
        let p = self.prec().max(o.prec());
        let (ac, e1) = rnd(&self.re * &o.re, p);
        let (bd, e2) = rnd(&self.im * &o.im, p);
        let (ad, e3) = rnd(&self.re * &o.im, p);
        let (bc, e4) = rnd(&self.im * &o.re, p);
        let (re, e5) = rnd(&ac - &bd, p);
        let (im, e6) = rnd(&ad + &bc, p);
        let round = add_up(add_up(add_up(e1, e2), add_up(e3, e4)), add_up(e5, e6));
        let za = self.mid_abs_up();
        let wa = o.mid_abs_up();
        let prop = add_up(add_up(mul_up(za, o.rad), mul_up(wa, self.rad)), mul_up(self.rad, o.rad));
        BigComplex { re, im, rad: add_up(prop, round) }
    }

    pub fn sqr(&self) -> BigComplex {
        self.mul(self)
    }

    pub fn mul_real(&self, x: &BigFloat) -> BigComplex {
        let p = self.prec().max(x.prec());
        let (re, e1) = rnd(&self.re * x.mid(), p);
        let (im, e2) = rnd(&self.im * x.mid(), p);
        let prop = add_up(
            add_up(mul_up(self.mid_abs_up(), x.rad()), mul_up(abs_up(x.mid()), self.rad)),
            mul_up(self.rad, x.rad()),
        );
        BigComplex { re, im, rad: add_up(prop, add_up(e1, e2)) }
    }

    pub fn mul_i64(&self, k: i64) -> BigComplex {
        let p = self.prec();
        let (re, e1) = rnd(&self.re * k, p);
        let (im, e2) = rnd(&self.im * k, p);
        BigComplex { re, im, rad: add_up(mul_up(self.rad, (k as f64).abs()), add_up(e1, e2)) }
    }

    /// Squared modulus as a real ball.
    pub fn norm_sqr(&self) -> BigFloat {
        let re = self.re_ball();
        let im = BigFloat::from_parts(self.im.clone(), 0.0);
        // |z|^2 over the disk: propagate through |mid|^2 with |z|-|mid| <= rad
        let m2 = BigFloat::from_parts(re.mid().clone(), 0.0).sqr().add(&im.sqr());
        let a = self.mid_abs_up();
        let prop = add_up(mul_up(2.0 * a, self.rad), mul_up(self.rad, self.rad));
        m2.add_error(prop)
    }

    /// Modulus as a real ball.
    pub fn abs(&self) -> BigFloat {
        let p = self.prec();
        let (m, e) = rnd(self.re.hypot_ref(&self.im), p);
        BigFloat::from_parts(m, add_up(self.rad, e))
    }

    pub fn inv(&self) -> Result<BigComplex> {
        let exact = BigComplex { re: self.re.clone(), im: self.im.clone(), rad: 0.0 };
        let l = exact.abs().abs_lower();
        if l <= self.rad {
            return Err(Error::precision("inverse of a disk containing zero"));
        }
        let n = exact.norm_sqr();
        let re = BigFloat::from_parts(self.re.clone(), 0.0).div(&n)?;
        let im = BigFloat::from_parts(self.im.clone(), 0.0).neg().div(&n)?;
        // |1/z - 1/w| <= |z - w| / (|z| |w|)
        let den = (l * (l - self.rad).next_down()).next_down();
        let prop = div_up(self.rad, den);
        Ok(BigComplex { re: re.mid().clone(), im: im.mid().clone(), rad: add_up(prop, add_up(re.rad(), im.rad())) })
    }

    pub fn div(&self, o: &BigComplex) -> Result<BigComplex> {
        Ok(self.mul(&o.inv()?))
    }

    /// `exp(z)`.
    pub fn exp(&self) -> BigComplex {
        let p = self.prec();
        let re = BigFloat::from_parts(self.re.clone(), 0.0);
        let im = BigFloat::from_parts(self.im.clone(), 0.0);
        let m = re.exp();
        let c = im.cos().mul(&m);
        let s = im.sin().mul(&m);
        let round = add_up(c.rad(), s.rad());
        let prop = mul_up(add_up(m.abs_upper(), round), self.rad.exp_m1().next_up());
        BigComplex { re: Float::with_val(p, c.mid()), im: Float::with_val(p, s.mid()), rad: add_up(round, prop) }
    }

    pub fn pow_u64(&self, mut n: u64) -> BigComplex {
        let mut base = self.clone();
        let mut acc = BigComplex::one(self.prec());
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.sqr();
            }
        }
        acc
    }

    fn center(&self) -> BigComplex {
        BigComplex { re: self.re.clone(), im: self.im.clone(), rad: 0.0 }
    }

    /// Ball enclosing the distance between the two midpoints.
    pub fn mid_distance(&self, o: &BigComplex) -> BigFloat {
        self.center().sub(&o.center()).abs()
    }

    /// `true` if the two disks intersect.
    pub fn overlaps(&self, o: &BigComplex) -> bool {
        self.mid_distance(o).abs_lower() <= add_up(self.rad, o.rad)
    }

    /// Whether the disk `self` lies inside the disk `o`.
    pub fn contained_in(&self, o: &BigComplex) -> bool {
        add_up(self.mid_distance(o).abs_upper(), self.rad) <= o.rad
    }
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({} {} {}i) ± {}",
            format_sig(&self.re, 15),
            if self.im.is_sign_negative() { "-" } else { "+" },
            format_sig(&Float::with_val(53, self.im.abs_ref()), 15),
            format_radius(self.rad)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 200;

    fn c(re: f64, im: f64) -> BigComplex {
        BigComplex::from_parts(Float::with_val(P, re), Float::with_val(P, im), 0.0)
    }

    #[test]
    fn euler_identity_is_enclosed() {
        let pi = BigFloat::pi(P);
        let ipi = BigComplex::from_balls(&BigFloat::zero(P), &pi);
        let e = ipi.exp();
        let minus_one = c(-1.0, 0.0);
        assert!(e.overlaps(&minus_one));
        assert!(e.rad() < 1e-55);
    }

    #[test]
    fn inverse_times_self_is_one() {
        let z = c(0.3, -1.7);
        let w = z.mul(&z.inv().unwrap());
        assert!(w.overlaps(&BigComplex::one(P)));
        assert!(w.rad() < 1e-55);
    }

    #[test]
    fn modulus_of_three_four() {
        let z = c(3.0, 4.0);
        let a = z.abs();
        assert!(a.sub(&BigFloat::from_i64(P, 5)).contains_zero());
        let n = z.norm_sqr();
        assert!(n.sub(&BigFloat::from_i64(P, 25)).contains_zero());
    }

    #[test]
    fn integer_powers_match_repeated_products() {
        let z = c(0.9, 0.2);
        let p = z.pow_u64(13);
        let mut q = BigComplex::one(P);
        for _ in 0..13 {
            q = q.mul(&z);
        }
        assert!(p.overlaps(&q));
    }
}
