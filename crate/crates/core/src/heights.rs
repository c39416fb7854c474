//! Weil heights of algebraic numbers.
//!
//! Numeric heights go through the Mahler measure of the minimal polynomial.
//! Exact heights are rational combinations `Σ c_p log p` over distinct primes;
//! since the logarithms of distinct primes are linearly independent over the
//! rationals, two such combinations are equal exactly when their coefficient
//! maps agree, and any nonzero combination has a sign that numeric evaluation
//! at increasing precision eventually certifies.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::numeric::primes::factor_small;
use crate::numeric::{digits_to_bits, poly_roots, BigComplex, BigFloat, IntPoly, DEFAULT_DIGITS};

/// Precision ceiling for certifying the sign of a nonzero log combination.
const MAX_SIGN_BITS: u32 = 1 << 18;

/// Trial-division limit used when factoring rationals into prime logs.
const FACTOR_LIMIT: u64 = 1 << 20;

/// `Σ c_p · log p` with distinct primes `p` and nonzero rational `c_p`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LogCombination {
    terms: BTreeMap<Integer, Rational>,
}

impl LogCombination {
    pub fn zero() -> Self {
        LogCombination::default()
    }

    /// `c · log p`. The caller guarantees `p` is prime.
    pub fn log_prime(p: Integer, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert(p, c);
        }
        LogCombination { terms }
    }

    /// `log |q|` for a nonzero rational, factored into prime logs.
    pub fn log_rational(q: &Rational) -> Result<Self> {
        if *q == 0 {
            return Err(Error::invalid("logarithm of zero"));
        }
        let mut out = LogCombination::zero();
        for (n, sign) in [(q.numer(), 1), (q.denom(), -1)] {
            let f = factor_small(n, FACTOR_LIMIT)
                .ok_or_else(|| Error::invalid(format!("could not factor {n} by trial division")))?;
            for (p, e) in f {
                out.add_term(p, Rational::from(e as i64 * sign));
            }
        }
        Ok(out)
    }

    /// Builds a combination from prime/coefficient pairs, merging repeats.
    pub fn from_terms<I: IntoIterator<Item = (Integer, Rational)>>(it: I) -> Self {
        let mut out = LogCombination::zero();
        for (p, c) in it {
            out.add_term(p, c);
        }
        out
    }

    pub fn add_term(&mut self, p: Integer, c: Rational) {
        let e = self.terms.entry(p).or_default();
        *e += c;
        if *e == 0 {
            self.terms.retain(|_, v| *v != 0);
        }
    }

    pub fn terms(&self) -> &BTreeMap<Integer, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &LogCombination) -> LogCombination {
        let mut out = self.clone();
        for (p, c) in &o.terms {
            out.add_term(p.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &LogCombination) -> LogCombination {
        self.add(&o.scale(&Rational::from(-1)))
    }

    pub fn scale(&self, k: &Rational) -> LogCombination {
        if *k == 0 {
            return LogCombination::zero();
        }
        LogCombination { terms: self.terms.iter().map(|(p, c)| (p.clone(), Rational::from(c * k))).collect() }
    }

    /// Certified enclosure at `prec` bits.
    pub fn eval(&self, prec: u32) -> BigFloat {
        let work = prec + 16;
        let mut acc = BigFloat::zero(work);
        for (p, c) in &self.terms {
            let l = BigFloat::ln_integer(work, p).expect("primes are positive");
            acc = acc.add(&l.mul_rational(c));
        }
        acc
    }

    /// Exact sign, certified numerically with escalating precision.
    pub fn sign(&self) -> Result<Ordering> {
        if self.is_zero() {
            return Ok(Ordering::Equal);
        }
        let mut prec = 128;
        while prec <= MAX_SIGN_BITS {
            if let Some(o) = self.eval(prec).sign() {
                return Ok(o);
            }
            prec *= 2;
        }
        Err(Error::precision(format!("sign of {self} not resolved at {MAX_SIGN_BITS} bits")))
    }

    pub fn cmp_exact(&self, o: &LogCombination) -> Result<Ordering> {
        self.sub(o).sign()
    }

    /// `max(self, o)`, returning `self` on ties.
    pub fn max_exact(&self, o: &LogCombination) -> Result<LogCombination> {
        Ok(if self.cmp_exact(o)? == Ordering::Less { o.clone() } else { self.clone() })
    }
}

fn fmt_coeff(c: &Rational) -> Option<String> {
    if *c == 1 {
        None
    } else if c.denom() == &1 {
        Some(c.numer().to_string())
    } else {
        Some(format!("{}/{}", c.numer(), c.denom()))
    }
}

impl fmt::Display for LogCombination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (p, c)) in self.terms.iter().enumerate() {
            let neg = *c < 0;
            let a = Rational::from(c.abs_ref());
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            match fmt_coeff(&a) {
                Some(s) => write!(f, "{s}*log({p})")?,
                None => write!(f, "log({p})")?,
            }
        }
        Ok(())
    }
}

/// A height, either exact or as a certified ball.
#[derive(Clone, Debug)]
pub enum HeightValue {
    Exact(LogCombination),
    Numeric(BigFloat),
}

/// Outcome of comparing two heights.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HeightOrdering {
    Less,
    Equal,
    Greater,
    Inconclusive,
}

impl From<Ordering> for HeightOrdering {
    fn from(o: Ordering) -> Self {
        match o {
            Ordering::Less => HeightOrdering::Less,
            Ordering::Equal => HeightOrdering::Equal,
            Ordering::Greater => HeightOrdering::Greater,
        }
    }
}

/// Multiplier `deg^γ`, exact when `γ` is an integer.
#[derive(Clone, Debug)]
pub enum Weight {
    Exact(Rational),
    Numeric(BigFloat),
}

pub fn degree_weight(deg: &Integer, gamma: f64, prec: u32) -> Weight {
    if gamma.fract() == 0.0 && gamma.abs() <= 64.0 {
        let k = gamma as i32;
        let p = Rational::from(deg.clone().pow(k.unsigned_abs()));
        let w = if k >= 0 { p } else { Rational::from(1) / p };
        return Weight::Exact(w);
    }
    let work = prec + 16;
    let l = BigFloat::ln_integer(work, deg).expect("degrees are positive");
    Weight::Numeric(l.mul(&BigFloat::exact_f64(work, gamma)).exp())
}

impl Weight {
    pub fn to_ball(&self, prec: u32) -> BigFloat {
        match self {
            Weight::Exact(r) => BigFloat::from_rational(prec, r),
            Weight::Numeric(b) => b.clone(),
        }
    }
}

impl HeightValue {
    pub fn zero() -> Self {
        HeightValue::Exact(LogCombination::zero())
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, HeightValue::Exact(_))
    }

    pub fn exact(&self) -> Option<&LogCombination> {
        match self {
            HeightValue::Exact(l) => Some(l),
            HeightValue::Numeric(_) => None,
        }
    }

    pub fn to_ball(&self, prec: u32) -> BigFloat {
        match self {
            HeightValue::Exact(l) => l.eval(prec),
            HeightValue::Numeric(b) => b.clone(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.to_ball(64).to_f64()
    }

    /// Multiplies by a weight; stays exact when both factors are exact.
    pub fn weighted(&self, w: &Weight, prec: u32) -> HeightValue {
        match (self, w) {
            (HeightValue::Exact(l), Weight::Exact(r)) => HeightValue::Exact(l.scale(r)),
            _ => HeightValue::Numeric(self.to_ball(prec).mul(&w.to_ball(prec))),
        }
    }

    /// Formats as the exact form followed by a 10-decimal evaluation, or as
    /// `≈ value` for numeric heights.
    pub fn display_with_value(&self) -> String {
        match self {
            HeightValue::Exact(l) if l.is_zero() => "0".to_string(),
            HeightValue::Exact(l) => format!("{l} ≈ {:.10}", l.eval(128).to_f64()),
            HeightValue::Numeric(b) => format!("≈ {:.10}", b.to_f64()),
        }
    }
}

impl fmt::Display for HeightValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HeightValue::Exact(l) => write!(f, "{l}"),
            HeightValue::Numeric(b) => write!(f, "{b}"),
        }
    }
}

/// Exact values are compared symbolically; numeric ones by their balls,
/// returning `Inconclusive` when the enclosures overlap.
pub fn height_value_compare(x: &HeightValue, y: &HeightValue) -> HeightOrdering {
    match (x, y) {
        (HeightValue::Exact(a), HeightValue::Exact(b)) => match a.cmp_exact(b) {
            Ok(o) => o.into(),
            Err(_) => HeightOrdering::Inconclusive,
        },
        _ => {
            let prec = 256.max(x.to_ball(64).prec()).max(y.to_ball(64).prec());
            match x.to_ball(prec).cmp_certified(&y.to_ball(prec)) {
                Some(o) => o.into(),
                None => HeightOrdering::Inconclusive,
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Irreducibility {
    /// Degree one, a degree 2/3 polynomial with no rational root, or Eisenstein.
    Proven,
    /// Passed the rational-root filter only; irreducibility is assumed.
    Trusted,
}

/// An algebraic number given by its minimal polynomial and an isolating disk.
#[derive(Clone, Debug)]
pub struct AlgebraicNumber {
    minpoly: IntPoly,
    approx: BigComplex,
    irreducibility: Irreducibility,
}

const VALIDATION_DIGITS: u32 = 30;

fn check_minpoly_shape(p: &IntPoly) -> Result<()> {
    if p.is_zero() || p.degree() == 0 {
        return Err(Error::invalid("minimal polynomial must have degree at least 1"));
    }
    if p.leading() < 0 {
        return Err(Error::invalid("minimal polynomial must have a positive leading coefficient"));
    }
    if !p.is_primitive() {
        return Err(Error::invalid("minimal polynomial must be primitive"));
    }
    Ok(())
}

fn eisenstein(p: &IntPoly) -> bool {
    let n = p.degree();
    let mut g = Integer::new();
    for c in &p.coeffs()[..n] {
        g.gcd_mut(c);
    }
    if g <= 1 {
        return false;
    }
    let Some(primes) = factor_small(&g, FACTOR_LIMIT) else { return false };
    primes.iter().any(|(q, _)| {
        let q2 = Integer::from(q * q);
        !p.leading().is_divisible(q) && !p.coeff(0).is_divisible(&q2)
    })
}

/// A rational root among the numerically computed roots, if any.
fn rational_root(p: &IntPoly, roots: &[BigComplex]) -> Option<Rational> {
    let lead = p.leading();
    let dens = factor_small(&lead, FACTOR_LIMIT).map(|f| divisors(&f)).unwrap_or_else(|| vec![lead.clone()]);
    for r in roots {
        if r.im().to_f64().abs() > r.rad() + 0.5 {
            continue;
        }
        for s in &dens {
            let Some(num) = Float::with_val(r.prec(), r.re() * s).to_integer() else { continue };
            for cand in [num.clone() - 1u32, num.clone(), num + 1u32] {
                let q = Rational::from((cand, s.clone()));
                if p.eval_rational(&q) == 0 {
                    return Some(q);
                }
            }
        }
    }
    None
}

fn divisors(f: &[(Integer, u32)]) -> Vec<Integer> {
    let mut out = vec![Integer::from(1)];
    for (p, e) in f {
        let cur = out.clone();
        let mut pk = Integer::from(1);
        for _ in 0..*e {
            pk *= p;
            out.extend(cur.iter().map(|d| Integer::from(d * &pk)));
        }
    }
    out.sort();
    out
}

impl AlgebraicNumber {
    /// Validates the polynomial and checks that `approx` meets exactly one of
    /// its roots.
    pub fn new(minpoly: IntPoly, approx: BigComplex) -> Result<Self> {
        check_minpoly_shape(&minpoly)?;
        let roots = poly_roots(&minpoly, VALIDATION_DIGITS)?;
        let irreducibility = classify(&minpoly, &roots)?;
        let hits = roots.iter().filter(|r| r.overlaps(&approx)).count();
        if hits != 1 {
            return Err(Error::invalid(format!(
                "approximation meets {hits} roots of the minimal polynomial, expected 1"
            )));
        }
        Ok(AlgebraicNumber { minpoly, approx, irreducibility })
    }

    /// The root of `minpoly` with the largest real part (the positive real
    /// branch for binomials).
    pub fn from_minpoly(minpoly: IntPoly) -> Result<Self> {
        check_minpoly_shape(&minpoly)?;
        let roots = poly_roots(&minpoly, VALIDATION_DIGITS)?;
        let irreducibility = classify(&minpoly, &roots)?;
        let approx = roots.last().cloned().expect("degree at least 1");
        Ok(AlgebraicNumber { minpoly, approx, irreducibility })
    }

    /// All conjugates of the root of `minpoly`.
    pub fn conjugates(minpoly: &IntPoly) -> Result<Vec<AlgebraicNumber>> {
        check_minpoly_shape(minpoly)?;
        let roots = poly_roots(minpoly, VALIDATION_DIGITS)?;
        let irreducibility = classify(minpoly, &roots)?;
        Ok(roots
            .into_iter()
            .map(|approx| AlgebraicNumber { minpoly: minpoly.clone(), approx, irreducibility })
            .collect())
    }

    pub fn from_rational(q: &Rational) -> Self {
        let minpoly = IntPoly::new(vec![-q.numer().clone(), q.denom().clone()]);
        AlgebraicNumber {
            minpoly,
            approx: BigComplex::from_real(&BigFloat::from_rational(128, q)),
            irreducibility: Irreducibility::Proven,
        }
    }

    pub fn minpoly(&self) -> &IntPoly {
        &self.minpoly
    }

    pub fn approx(&self) -> &BigComplex {
        &self.approx
    }

    pub fn degree(&self) -> usize {
        self.minpoly.degree()
    }

    pub fn irreducibility(&self) -> Irreducibility {
        self.irreducibility
    }
}

fn classify(p: &IntPoly, roots: &[BigComplex]) -> Result<Irreducibility> {
    let n = p.degree();
    if n == 1 {
        return Ok(Irreducibility::Proven);
    }
    if p.gcd(&p.derivative()).degree() > 0 {
        return Err(Error::invalid("polynomial has a repeated factor, so it is not a minimal polynomial"));
    }
    if let Some(q) = rational_root(p, roots) {
        return Err(Error::invalid(format!("polynomial is reducible: it has the rational root {q}")));
    }
    if n <= 3 || eisenstein(p) {
        Ok(Irreducibility::Proven)
    } else {
        Ok(Irreducibility::Trusted)
    }
}

/// `log M(p)`: log of the leading coefficient plus `Σ log max(1, |root|)`.
pub fn log_mahler_measure(p: &IntPoly, digits: u32) -> Result<BigFloat> {
    let roots = poly_roots(p, digits)?;
    let prec = digits_to_bits(digits);
    let one = BigFloat::one(prec);
    let lead = Integer::from(p.leading().abs_ref());
    let mut acc = BigFloat::ln_integer(prec, &lead)?;
    for r in &roots {
        let m = r.abs().max(&one);
        acc = acc.add(&m.ln()?);
    }
    Ok(acc)
}

/// Weil height at the default precision.
pub fn weil_height(a: &AlgebraicNumber) -> Result<HeightValue> {
    weil_height_digits(a, DEFAULT_DIGITS)
}

pub fn weil_height_digits(a: &AlgebraicNumber, digits: u32) -> Result<HeightValue> {
    let m = log_mahler_measure(a.minpoly(), digits)?;
    Ok(HeightValue::Numeric(m.div_i64(a.degree() as i64)))
}

/// `deg(a)^γ · h(a)`.
pub fn weighted_height(a: &AlgebraicNumber, gamma: f64) -> Result<HeightValue> {
    if !gamma.is_finite() {
        return Err(Error::invalid("gamma must be finite"));
    }
    let h = weil_height(a)?;
    let prec = digits_to_bits(DEFAULT_DIGITS);
    Ok(h.weighted(&degree_weight(&Integer::from(a.degree()), gamma, prec), prec))
}
