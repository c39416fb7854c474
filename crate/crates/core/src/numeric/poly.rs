//! Dense univariate polynomials with arbitrary-precision integer coefficients.

use std::fmt;

use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use super::ball::BigFloat;
use super::complex::BigComplex;
use crate::error::{Error, Result};

/// Integer polynomial, coefficients stored lowest degree first.
///
/// The coefficient vector never has trailing zeros; the zero polynomial is
/// the empty vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<Integer>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<Integer>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        IntPoly::new(coeffs.iter().map(|&c| Integer::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Integer) -> Self {
        IntPoly::new(vec![c])
    }

    /// `x - r`.
    pub fn linear_monic(r: &Integer) -> Self {
        IntPoly::new(vec![Integer::from(-r), Integer::from(1)])
    }

    /// `a x^n - b`.
    pub fn binomial(a: Integer, n: usize, b: Integer) -> Self {
        let mut c = vec![Integer::new(); n + 1];
        c[0] = -b;
        c[n] = a;
        IntPoly::new(c)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[Integer] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Integer {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> Integer {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| *c == 1)
    }

    pub fn neg(&self) -> IntPoly {
        IntPoly { coeffs: self.coeffs.iter().map(|c| Integer::from(-c)).collect() }
    }

    pub fn add(&self, o: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &IntPoly) -> IntPoly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &IntPoly) -> IntPoly {
        if self.is_zero() || o.is_zero() {
            return IntPoly::zero();
        }
        let mut c = vec![Integer::new(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += Integer::from(a * b);
            }
        }
        IntPoly::new(c)
    }

    pub fn scale(&self, k: &Integer) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| Integer::from(c * k)).collect())
    }

    pub fn derivative(&self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| Integer::from(c * i as u64)).collect())
    }

    /// Gcd of the coefficients, nonnegative.
    pub fn content(&self) -> Integer {
        self.coeffs.iter().fold(Integer::new(), |g, c| g.gcd(c))
    }

    /// `self / content`, normalised to a positive leading coefficient.
    pub fn primitive_part(&self) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut g = self.content();
        if self.leading() < 0 {
            g = -g;
        }
        IntPoly::new(self.coeffs.iter().map(|c| Integer::from(c.div_exact_ref(&g))).collect())
    }

    pub fn is_primitive(&self) -> bool {
        self.content() == 1
    }

    /// Pseudo-remainder of `self` by `d` (`lc(d)^k · self = q·d + r`).
    pub fn pseudo_rem(&self, d: &IntPoly) -> IntPoly {
        assert!(!d.is_zero(), "pseudo-remainder by zero polynomial");
        let mut r = self.coeffs.clone();
        let dn = d.degree();
        let lc = d.leading();
        while r.len() > dn && !r.is_empty() {
            let k = r.len() - 1;
            let top = r[k].clone();
            if top.is_zero() {
                r.pop();
                continue;
            }
            for c in r.iter_mut() {
                *c *= &lc;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[k - dn + j] -= Integer::from(&top * dc);
            }
            r.pop();
        }
        IntPoly::new(r).primitive_part_keep_sign()
    }

    fn primitive_part_keep_sign(&self) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let g = self.content();
        IntPoly::new(self.coeffs.iter().map(|c| Integer::from(c.div_exact_ref(&g))).collect())
    }

    /// Exact division in `Z[x]`; `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &IntPoly) -> Option<IntPoly> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(IntPoly::zero());
        }
        if self.degree() < d.degree() {
            return None;
        }
        let mut r = self.coeffs.clone();
        let dn = d.degree();
        let lc = d.leading();
        let mut q = vec![Integer::new(); self.degree() - dn + 1];
        for k in (dn..r.len()).rev() {
            if r[k].is_zero() {
                continue;
            }
            if !r[k].is_divisible(&lc) {
                return None;
            }
            let t = Integer::from(r[k].div_exact_ref(&lc));
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[k - dn + j] -= Integer::from(&t * dc);
            }
            q[k - dn] = t;
        }
        if r.iter().all(|c| c.is_zero()) {
            Some(IntPoly::new(q))
        } else {
            None
        }
    }

    /// Primitive gcd with positive leading coefficient.
    pub fn gcd(&self, o: &IntPoly) -> IntPoly {
        let mut a = self.primitive_part();
        let mut b = o.primitive_part();
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b);
            a = b;
            b = r;
        }
        a.primitive_part()
    }

    /// Square-free decomposition of a primitive polynomial (Yun):
    /// `self = c · ∏ f_m^m` with each `f_m` square-free and pairwise coprime.
    pub fn squarefree_decomposition(&self) -> Vec<(IntPoly, usize)> {
        let f = self.primitive_part();
        if f.degree() == 0 {
            return Vec::new();
        }
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.div_exact(&a0).expect("gcd divides f");
        let c = df.div_exact(&a0).expect("gcd divides f'");
        let mut d = c.sub(&b.derivative());
        let mut out = Vec::new();
        let mut m = 1;
        while b.degree() > 0 {
            let a = b.gcd(&d);
            if a.degree() > 0 {
                out.push((a.clone(), m));
            }
            let nb = b.div_exact(&a).expect("gcd divides b");
            let nc = d.div_exact(&a).expect("gcd divides d");
            d = nc.sub(&nb.derivative());
            b = nb;
            m += 1;
        }
        out
    }

    pub fn eval_rational(&self, x: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    pub fn eval_integer(&self, x: &Integer) -> Integer {
        let mut acc = Integer::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    /// Horner evaluation on a complex disk.
    pub fn eval_complex(&self, z: &BigComplex) -> BigComplex {
        let prec = z.prec();
        let mut acc = BigComplex::zero(prec);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(z).add(&BigComplex::from_real(&BigFloat::from_integer(prec, c)));
        }
        acc
    }

    /// Parses expressions such as `x^2 - x - 1`, `3*x^5 - 2` or `2x + 7`.
    pub fn parse(src: &str) -> Result<IntPoly> {
        PolyParser { s: src.as_bytes(), pos: 0 }.parse()
    }
}

struct PolyParser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl PolyParser<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn number(&mut self) -> Option<Integer> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        std::str::from_utf8(&self.s[start..self.pos]).ok()?.parse::<Integer>().ok()
    }

    fn parse(mut self) -> Result<IntPoly> {
        let mut coeffs: Vec<Integer> = Vec::new();
        let mut first = true;
        loop {
            let sign = match self.peek() {
                None if first => return self.err("empty polynomial"),
                None => break,
                Some(b'+') => {
                    self.pos += 1;
                    1
                }
                Some(b'-') => {
                    self.pos += 1;
                    -1
                }
                Some(_) if first => 1,
                Some(c) => return self.err(format!("expected '+' or '-', found '{}'", c as char)),
            };
            first = false;
            let coef = self.number();
            let mut power = 0usize;
            let has_star = self.peek() == Some(b'*');
            if has_star {
                self.pos += 1;
            }
            if self.peek() == Some(b'x') {
                self.pos += 1;
                power = 1;
                if self.peek() == Some(b'^') {
                    self.pos += 1;
                    match self.number() {
                        Some(n) => match n.to_usize() {
                            Some(p) if p <= 1 << 16 => power = p,
                            _ => return self.err("exponent too large"),
                        },
                        None => return self.err("expected exponent after '^'"),
                    }
                }
            } else if has_star || coef.is_none() {
                return self.err("expected 'x' or an integer");
            }
            let c = coef.unwrap_or_else(|| Integer::from(1)) * sign;
            if coeffs.len() <= power {
                coeffs.resize(power + 1, Integer::new());
            }
            coeffs[power] += c;
        }
        Ok(IntPoly::new(coeffs))
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = *c < 0;
            let a = Integer::from(c.abs_ref());
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            match (i, a == 1) {
                (0, _) => write!(f, "{a}")?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{a}*x")?,
                (_, true) => write!(f, "x^{i}")?,
                (_, false) => write!(f, "{a}*x^{i}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for IntPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v: Vec<String> = Vec::deserialize(d)?;
        let coeffs = v
            .iter()
            .map(|s| s.parse::<Integer>().map_err(serde::de::Error::custom))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(IntPoly::new(coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64s(c)
    }

    #[test]
    fn normalises_trailing_zeros() {
        assert_eq!(p(&[1, 2, 0, 0]).degree(), 1);
        assert!(p(&[0, 0]).is_zero());
    }

    #[test]
    fn parse_and_display() {
        let f = IntPoly::parse("x^2 - x - 1").unwrap();
        assert_eq!(f, p(&[-1, -1, 1]));
        assert_eq!(f.to_string(), "x^2 - x - 1");
        assert_eq!(IntPoly::parse("3*x^5 - 2").unwrap(), p(&[-2, 0, 0, 0, 0, 3]));
        assert_eq!(IntPoly::parse("-2x + 7").unwrap(), p(&[7, -2]));
        assert_eq!(IntPoly::parse("7").unwrap(), p(&[7]));
    }

    #[test]
    fn parse_errors_report_position() {
        match IntPoly::parse("x^2 + + 1") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, "x^2 + ".len()),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(IntPoly::parse(""), Err(Error::Parse { pos: 0, .. })));
        assert!(matches!(IntPoly::parse("x^"), Err(Error::Parse { .. })));
    }

    #[test]
    fn gcd_and_exact_division() {
        // (x-1)(x+2) and (x-1)(x-3)
        let a = p(&[-1, 1]).mul(&p(&[2, 1]));
        let b = p(&[-1, 1]).mul(&p(&[-3, 1]));
        assert_eq!(a.gcd(&b), p(&[-1, 1]));
        assert_eq!(a.div_exact(&p(&[2, 1])), Some(p(&[-1, 1])));
        assert_eq!(a.div_exact(&p(&[3, 1])), None);
    }

    #[test]
    fn squarefree_decomposition_recovers_multiplicities() {
        // (x-1)^3 (x+2)^2 (2x+1)
        let f = p(&[-1, 1]).mul(&p(&[-1, 1])).mul(&p(&[-1, 1])).mul(&p(&[2, 1])).mul(&p(&[2, 1])).mul(&p(&[1, 2]));
        let dec = f.squarefree_decomposition();
        assert_eq!(dec, vec![(p(&[1, 2]), 1), (p(&[2, 1]), 2), (p(&[-1, 1]), 3)]);
        let total: usize = dec.iter().map(|(g, m)| g.degree() * m).sum();
        assert_eq!(total, f.degree());
    }

    #[test]
    fn serde_uses_decimal_strings() {
        let f = p(&[-8000, 1]);
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"["-8000","1"]"#);
        let g: IntPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(f, g);
    }
}
