//! Positive real radicals `∏ p^(e_p)` and projective points built from them.
//!
//! Every absolute value of such a number is explicit: at a place above `ℓ`
//! it is `ℓ^(-e_ℓ)` and at every archimedean place it is the real value
//! itself. Heights are therefore exact rational combinations of prime logs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rug::ops::Pow;
use rug::{Integer, Rational};

use crate::error::{Error, Result};
use crate::heights::{degree_weight, AlgebraicNumber, HeightOrdering, HeightValue, LogCombination};
use crate::numeric::primes::factor_small;
use crate::numeric::{smith_normal_form, BigFloat, IntMatrix, IntPoly};

const FACTOR_LIMIT: u64 = 1 << 20;

/// `∏ p^(e_p)` over primes `p`, exponents reduced and nonzero.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RadicalScalar {
    exps: BTreeMap<Integer, Rational>,
}

impl RadicalScalar {
    pub fn one() -> Self {
        RadicalScalar::default()
    }

    /// `p^e`; the caller guarantees `p` is prime.
    pub fn prime_power(p: Integer, e: Rational) -> Self {
        let mut exps = BTreeMap::new();
        if e != 0 {
            exps.insert(p, e);
        }
        RadicalScalar { exps }
    }

    /// Builds from (prime, exponent) pairs, merging repeated primes.
    pub fn from_exponents<I: IntoIterator<Item = (Integer, Rational)>>(it: I) -> Self {
        let mut out = RadicalScalar::one();
        for (p, e) in it {
            out.add_exponent(p, e);
        }
        out
    }

    fn add_exponent(&mut self, p: Integer, e: Rational) {
        let v = self.exps.entry(p).or_default();
        *v += e;
        if *v == 0 {
            self.exps.retain(|_, x| *x != 0);
        }
    }

    /// `q^e` for a positive rational `q`.
    pub fn from_rational_power(q: &Rational, e: &Rational) -> Result<Self> {
        if *q <= 0 {
            return Err(Error::invalid("radical base must be a positive rational"));
        }
        let mut out = RadicalScalar::one();
        for (n, sign) in [(q.numer(), 1i64), (q.denom(), -1i64)] {
            let f = factor_small(n, FACTOR_LIMIT)
                .ok_or_else(|| Error::invalid(format!("could not factor {n} by trial division")))?;
            for (p, k) in f {
                out.add_exponent(p, e * Rational::from(k as i64 * sign));
            }
        }
        Ok(out)
    }

    pub fn from_rational(q: &Rational) -> Result<Self> {
        RadicalScalar::from_rational_power(q, &Rational::from(1))
    }

    pub fn exponents(&self) -> &BTreeMap<Integer, Rational> {
        &self.exps
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn mul(&self, o: &RadicalScalar) -> RadicalScalar {
        let mut out = self.clone();
        for (p, e) in &o.exps {
            out.add_exponent(p.clone(), e.clone());
        }
        out
    }

    pub fn pow(&self, k: &Rational) -> RadicalScalar {
        if *k == 0 {
            return RadicalScalar::one();
        }
        RadicalScalar { exps: self.exps.iter().map(|(p, e)| (p.clone(), Rational::from(e * k))).collect() }
    }

    pub fn inv(&self) -> RadicalScalar {
        self.pow(&Rational::from(-1))
    }

    /// Exact `log` of the value.
    pub fn log_value(&self) -> LogCombination {
        LogCombination::from_terms(self.exps.iter().map(|(p, e)| (p.clone(), e.clone())))
    }

    pub fn value(&self, prec: u32) -> BigFloat {
        self.log_value().eval(prec).exp()
    }

    /// `Some(q)` when the value is rational.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.exps.values().any(|e| *e.denom() != 1) {
            return None;
        }
        let mut num = Integer::from(1);
        let mut den = Integer::from(1);
        for (p, e) in &self.exps {
            let abs = Integer::from(e.numer().abs_ref()).to_u32().expect("exponent fits in u32");
            let pk = p.clone().pow(abs);
            if *e > 0 {
                num *= pk;
            } else {
                den *= pk;
            }
        }
        Some(Rational::from((num, den)))
    }

    /// Field degree: the least `m` with the `m`-th power rational.
    pub fn degree(&self) -> Integer {
        self.exps.values().fold(Integer::from(1), |acc, e| acc.lcm(e.denom()))
    }

    /// `Q x^d - P` where `a^d = P/Q`; irreducible by Capelli's theorem since
    /// `d` is minimal and the value is a positive real.
    pub fn minimal_polynomial(&self) -> Result<IntPoly> {
        let d = self.degree();
        let du = d.to_usize().ok_or_else(|| Error::invalid("radical degree too large"))?;
        let r = self.pow(&Rational::from(d)).as_rational().expect("d-th power is rational");
        let (p, q) = r.into_numer_denom();
        Ok(IntPoly::binomial(q, du, p))
    }

    pub fn to_algebraic(&self) -> Result<AlgebraicNumber> {
        AlgebraicNumber::from_minpoly(self.minimal_polynomial()?)
    }

    /// Parses products of factors `p/q ^ k/d`, e.g. `2/3 ^ 1/5 * 7 ^ -1/2`.
    pub fn parse(src: &str) -> Result<Self> {
        let mut p = Parser::new(src);
        let r = p.scalar()?;
        p.end()?;
        Ok(r)
    }
}

impl fmt::Display for RadicalScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exps.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .exps
            .iter()
            .map(|(p, e)| {
                if *e == 1 {
                    p.to_string()
                } else if *e.denom() == 1 {
                    format!("{p}^{}", e.numer())
                } else {
                    format!("{p}^({}/{})", e.numer(), e.denom())
                }
            })
            .collect();
        write!(f, "{}", parts.join(" * "))
    }
}

/// `max(Σ_{e>0} e log p, Σ_{e<0} -e log p)`, i.e. the negative-exponent
/// part plus `max(0, log a)`.
pub fn radical_height(a: &RadicalScalar) -> LogCombination {
    let pos = LogCombination::from_terms(a.exps.iter().filter(|(_, e)| **e > 0).map(|(p, e)| (p.clone(), e.clone())));
    let neg = LogCombination::from_terms(
        a.exps.iter().filter(|(_, e)| **e < 0).map(|(p, e)| (p.clone(), Rational::from(-e))),
    );
    pos.max_exact(&neg).expect("distinct prime logs always have a certifiable sign")
}

pub fn radical_degree(a: &RadicalScalar) -> Integer {
    a.degree()
}

/// Degree of `Q(a_1, …, a_k)` for positive real radicals, by Kummer theory:
/// the index of `Z^S` in the group generated by `Z^S` and the exponent
/// vectors, read off a Smith normal form.
pub fn compositum_degree(radicals: &[RadicalScalar]) -> Integer {
    let primes: BTreeSet<&Integer> = radicals.iter().flat_map(|a| a.exps.keys()).collect();
    if primes.is_empty() {
        return Integer::from(1);
    }
    let primes: Vec<&Integer> = primes.into_iter().collect();
    let l = radicals.iter().fold(Integer::from(1), |acc, a| acc.lcm(&a.degree()));
    if l == 1 {
        return Integer::from(1);
    }
    let m = primes.len();
    let mut rows = Vec::with_capacity(radicals.len() + m);
    for a in radicals {
        rows.push(
            primes
                .iter()
                .map(|p| a.exps.get(*p).map_or(Integer::new(), |e| Rational::from(e * &l).numer().clone()))
                .collect::<Vec<Integer>>(),
        );
    }
    for j in 0..m {
        rows.push((0..m).map(|k| if k == j { l.clone() } else { Integer::new() }).collect());
    }
    let snf = smith_normal_form(&IntMatrix::from_rows(rows).expect("rectangular")).expect("nonempty");
    let det = snf.diagonal().into_iter().fold(Integer::from(1), |acc, d| acc * d);
    l.pow(m as u32) / det
}

/// A projective coordinate: zero or a signed radical.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Coord {
    Zero,
    Nonzero { negative: bool, value: RadicalScalar },
}

impl Coord {
    pub fn positive(value: RadicalScalar) -> Coord {
        Coord::Nonzero { negative: false, value }
    }

    pub fn rational(q: &Rational) -> Result<Coord> {
        if *q == 0 {
            return Ok(Coord::Zero);
        }
        let value = RadicalScalar::from_rational(&Rational::from(q.abs_ref()))?;
        Ok(Coord::Nonzero { negative: *q < 0, value })
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Coord::Zero)
    }

    pub fn radical(&self) -> Option<&RadicalScalar> {
        match self {
            Coord::Zero => None,
            Coord::Nonzero { value, .. } => Some(value),
        }
    }

    pub fn div(&self, o: &RadicalScalar, o_negative: bool) -> Coord {
        match self {
            Coord::Zero => Coord::Zero,
            Coord::Nonzero { negative, value } => {
                Coord::Nonzero { negative: negative ^ o_negative, value: value.mul(&o.inv()) }
            }
        }
    }

    pub fn mul(&self, o: &RadicalScalar, o_negative: bool) -> Coord {
        self.div(&o.inv(), o_negative)
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coord::Zero => write!(f, "0"),
            Coord::Nonzero { negative, value } => {
                if *negative {
                    write!(f, "-")?;
                }
                if let Some(r) = value.as_rational() {
                    write!(f, "{r}")
                } else if value.exps.len() > 1 && *negative {
                    write!(f, "({value})")
                } else {
                    write!(f, "{value}")
                }
            }
        }
    }
}

/// `[x_0 : … : x_N]` with radical coordinates, `N ≥ 1`, not all zero.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RadicalPoint {
    coords: Vec<Coord>,
}

impl RadicalPoint {
    pub fn new(coords: Vec<Coord>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::invalid("a projective point needs at least two coordinates"));
        }
        if coords.iter().all(Coord::is_zero) {
            return Err(Error::invalid("all coordinates are zero"));
        }
        Ok(RadicalPoint { coords })
    }

    /// Point with positive radical coordinates.
    pub fn from_radicals(rs: &[RadicalScalar]) -> Result<Self> {
        RadicalPoint::new(rs.iter().cloned().map(Coord::positive).collect())
    }

    pub fn coords(&self) -> &[Coord] {
        &self.coords
    }

    /// `N`, the dimension of the ambient projective space.
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn first_nonzero(&self) -> usize {
        self.coords.iter().position(|c| !c.is_zero()).expect("validated nonzero")
    }

    /// Divides through by the first nonzero coordinate.
    pub fn normalized(&self) -> RadicalPoint {
        let k = self.first_nonzero();
        let (neg, val) = match &self.coords[k] {
            Coord::Nonzero { negative, value } => (*negative, value.clone()),
            Coord::Zero => unreachable!(),
        };
        RadicalPoint { coords: self.coords.iter().map(|c| c.div(&val, neg)).collect() }
    }

    /// Multiplies every coordinate by `±λ`.
    pub fn scaled(&self, lambda: &RadicalScalar, negative: bool) -> RadicalPoint {
        RadicalPoint { coords: self.coords.iter().map(|c| c.mul(lambda, negative)).collect() }
    }

    /// Coordinates other than the normalizing one, after normalization.
    pub fn affine_coords(&self) -> Vec<Coord> {
        let k = self.first_nonzero();
        let n = self.normalized();
        n.coords.into_iter().enumerate().filter(|(i, _)| *i != k).map(|(_, c)| c).collect()
    }

    /// Parses `[c_0 : c_1 : …]`, where each coordinate is `0` or an optionally
    /// negated radical product (brackets optional).
    pub fn parse(src: &str) -> Result<Self> {
        let mut p = Parser::new(src);
        let pt = p.point()?;
        p.end()?;
        Ok(pt)
    }
}

impl fmt::Display for RadicalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(" : "))
    }
}

/// Exact logarithmic Weil height of a point:
/// `Σ_ℓ log ℓ · max_i(-e_{ℓ,i}) + max_i log|x_i|` over nonzero coordinates.
pub fn projective_height(pt: &RadicalPoint) -> LogCombination {
    let nz: Vec<&RadicalScalar> = pt.coords.iter().filter_map(Coord::radical).collect();
    let primes: BTreeSet<&Integer> = nz.iter().flat_map(|a| a.exps.keys()).collect();
    let mut finite = LogCombination::zero();
    for p in primes {
        let m = nz
            .iter()
            .map(|a| a.exps.get(p).map_or(Rational::new(), |e| Rational::from(-e)))
            .max()
            .expect("at least one coordinate");
        finite.add_term(p.clone(), m);
    }
    finite.add(&archimedean_max(&nz))
}

/// `max_i log x_i`, ties kept on the first maximal coordinate.
fn archimedean_max(nz: &[&RadicalScalar]) -> LogCombination {
    let mut best = nz[0].log_value();
    for a in &nz[1..] {
        best = best.max_exact(&a.log_value()).expect("distinct prime logs always have a certifiable sign");
    }
    best
}

/// Variant with the archimedean max replaced by `log (Σ x_i²)^(1/2)`.
pub fn projective_height_l2(pt: &RadicalPoint, prec: u32) -> BigFloat {
    let nz: Vec<&RadicalScalar> = pt.coords.iter().filter_map(Coord::radical).collect();
    let h = projective_height(pt);
    let top = archimedean_max(&nz);
    // log sqrt(Σ x_i^2) = top + (1/2) log Σ exp(2 (log x_i - top)), the sum is ≥ 1
    let work = prec + 32;
    let mut sum = BigFloat::zero(work);
    for a in &nz {
        let d = a.log_value().sub(&top);
        sum = sum.add(&d.eval(work).mul_i64(2).exp());
    }
    let excess = sum.ln().expect("sum of squares is at least one").div_i64(2);
    h.eval(work).add(&excess)
}

/// `D^γ · h(P)` with `D` the degree of the field generated by the
/// coordinates after dividing by the first nonzero one.
pub fn weighted_projective_height(pt: &RadicalPoint, gamma: f64, prec: u32) -> HeightValue {
    let affine: Vec<RadicalScalar> = pt.affine_coords().iter().filter_map(|c| c.radical().cloned()).collect();
    let d = compositum_degree(&affine);
    HeightValue::Exact(projective_height(pt)).weighted(&degree_weight(&d, gamma, prec), prec)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainVerdict {
    Holds,
    /// Every affine coordinate has height zero.
    Degenerate,
    Violated,
    /// Certified comparison did not settle within the precision cap.
    Unresolved,
}

#[derive(Clone, Debug)]
pub struct ChainReport {
    pub lhs: HeightValue,
    pub middle: HeightValue,
    pub rhs: HeightValue,
    /// Indices (1-based, among affine coordinates) with nonzero height.
    pub index_set: Vec<usize>,
    pub verdict: ChainVerdict,
}

const CHAIN_MAX_BITS: u32 = 1 << 13;

/// Checks `D^γ h(P) ≥ ∏_I d_i^γ · (∏_I h(a_i))^(1/|I|) ≥ (∏_I d_i^(Nγ) h(a_i))^(1/|I|)`
/// where `a_i` are the affine coordinates and `I` those of nonzero height.
pub fn lemma_chain_check(pt: &RadicalPoint, gamma: f64, n: usize) -> Result<ChainReport> {
    if !(gamma < 0.0) || !gamma.is_finite() {
        return Err(Error::invalid("gamma must be a negative real"));
    }
    if pt.dim() != n || n == 0 {
        return Err(Error::invalid(format!("point has {} coordinates, expected N + 1 = {}", pt.coords.len(), n + 1)));
    }
    let affine = pt.affine_coords();
    let hp = projective_height(pt);
    let mut index_set = Vec::new();
    let mut hs = Vec::new();
    let mut degs = Vec::new();
    for (i, c) in affine.iter().enumerate() {
        if let Some(a) = c.radical() {
            let h = radical_height(a);
            if !h.is_zero() {
                index_set.push(i + 1);
                hs.push(h);
                degs.push(a.degree());
            }
        }
    }
    let big_d = compositum_degree(&affine.iter().filter_map(|c| c.radical().cloned()).collect::<Vec<_>>());
    let lhs_exact = HeightValue::Exact(hp.clone());
    if index_set.is_empty() {
        let lhs = lhs_exact.weighted(&degree_weight(&big_d, gamma, 128), 128);
        return Ok(ChainReport {
            lhs,
            middle: HeightValue::zero(),
            rhs: HeightValue::zero(),
            index_set,
            verdict: ChainVerdict::Degenerate,
        });
    }
    let k = index_set.len();
    let prod_d = degs.iter().fold(Integer::from(1), |a, d| a * d);
    // exact ties, decided without numerics
    let lhs_eq_mid = big_d == prod_d && hs.iter().all(|h| *h == hp);
    let mid_eq_rhs = k == n || prod_d == 1;

    let mut prec = 128;
    loop {
        let (lhs, middle, rhs) = chain_values(&hp, &hs, &big_d, &prod_d, &degs, gamma, n, prec);
        let c1 = if lhs_eq_mid { HeightOrdering::Equal } else { cmp_values(&lhs, &middle, prec) };
        let c2 = if mid_eq_rhs { HeightOrdering::Equal } else { cmp_values(&middle, &rhs, prec) };
        let verdict = match (c1, c2) {
            (HeightOrdering::Less, _) | (_, HeightOrdering::Less) => ChainVerdict::Violated,
            (HeightOrdering::Inconclusive, _) | (_, HeightOrdering::Inconclusive) => ChainVerdict::Unresolved,
            _ => ChainVerdict::Holds,
        };
        if verdict != ChainVerdict::Unresolved || prec >= CHAIN_MAX_BITS {
            return Ok(ChainReport { lhs, middle, rhs, index_set, verdict });
        }
        prec *= 2;
    }
}

fn cmp_values(a: &HeightValue, b: &HeightValue, prec: u32) -> HeightOrdering {
    match (a, b) {
        (HeightValue::Exact(x), HeightValue::Exact(y)) => match x.cmp_exact(y) {
            Ok(o) => o.into(),
            Err(_) => HeightOrdering::Inconclusive,
        },
        _ => match a.to_ball(prec).cmp_certified(&b.to_ball(prec)) {
            Some(o) => o.into(),
            None => HeightOrdering::Inconclusive,
        },
    }
}

#[allow(clippy::too_many_arguments)]
fn chain_values(
    hp: &LogCombination,
    hs: &[LogCombination],
    big_d: &Integer,
    prod_d: &Integer,
    degs: &[Integer],
    gamma: f64,
    n: usize,
    prec: u32,
) -> (HeightValue, HeightValue, HeightValue) {
    let k = hs.len();
    let lhs = HeightValue::Exact(hp.clone()).weighted(&degree_weight(big_d, gamma, prec), prec);
    let w_mid = degree_weight(prod_d, gamma, prec);
    let ngamma = n as f64 * gamma;
    if k == 1 {
        let h = HeightValue::Exact(hs[0].clone());
        let middle = h.weighted(&w_mid, prec);
        let rhs = h.weighted(&degree_weight(&degs[0], ngamma, prec), prec);
        return (lhs, middle, rhs);
    }
    let work = prec + 32;
    // geometric means via logs: all factors are positive
    let mut log_h = BigFloat::zero(work);
    let mut log_w = BigFloat::zero(work);
    for (h, d) in hs.iter().zip(degs) {
        log_h = log_h.add(&h.eval(work).ln().expect("nonzero heights are positive"));
        log_w = log_w.add(&degree_weight(d, ngamma, work).to_ball(work).ln().expect("weights are positive"));
    }
    let gm = log_h.div_i64(k as i64).exp();
    let middle = HeightValue::Numeric(gm.mul(&w_mid.to_ball(work)));
    let rhs = HeightValue::Numeric(log_h.add(&log_w).div_i64(k as i64).exp());
    (lhs, middle, rhs)
}

/// Strict upper bound for a census.
#[derive(Clone, Debug)]
pub enum Threshold {
    Exact(LogCombination),
    Float(f64),
}

impl Threshold {
    fn value(&self) -> HeightValue {
        match self {
            Threshold::Exact(l) => HeightValue::Exact(l.clone()),
            Threshold::Float(x) => HeightValue::Numeric(BigFloat::exact_f64(128, *x)),
        }
    }

    fn upper_f64(&self) -> f64 {
        match self {
            Threshold::Exact(l) => l.eval(64).upper().to_f64(),
            Threshold::Float(x) => *x,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CensusParams {
    pub generators: Vec<RadicalScalar>,
    pub n: usize,
    pub gamma: f64,
    pub threshold: Threshold,
    /// Maximum number of candidate points examined.
    pub budget: usize,
    /// Generator exponents range over `-box_bound..=box_bound`.
    pub box_bound: u32,
}

#[derive(Clone, Debug)]
pub struct CensusEntry {
    pub point: RadicalPoint,
    pub hgamma: HeightValue,
}

#[derive(Clone, Debug)]
pub struct Census {
    /// Points with certified `h_γ < threshold`, in enumeration order.
    pub points: Vec<CensusEntry>,
    /// Points whose comparison with the threshold could not be certified.
    pub undecided: Vec<CensusEntry>,
    pub examined: usize,
    pub truncated: bool,
    /// Without generators, every point below the threshold has rational
    /// coordinates with numerators and denominators below `exp(threshold)`,
    /// so an untruncated census is provably complete.
    pub complete: bool,
}

/// Coordinate candidates: zero, then `±(p/q) ∏ g_j^{k_j}` ordered by the
/// exponent vector, then numerator, then denominator, then sign.
fn coordinate_candidates(params: &CensusParams, rational_bound: u64, cap: usize) -> Vec<Coord> {
    let m = params.generators.len();
    let b = params.box_bound as i64;
    let mut out = vec![Coord::Zero];
    let mut seen = BTreeSet::new();
    let mut k = vec![-b; m];
    loop {
        let mono = params
            .generators
            .iter()
            .zip(&k)
            .fold(RadicalScalar::one(), |acc, (g, &e)| acc.mul(&g.pow(&Rational::from(e))));
        for p in 1..=rational_bound {
            for q in 1..=rational_bound {
                if Integer::from(p).gcd(&Integer::from(q)) != 1 {
                    continue;
                }
                let r = RadicalScalar::from_rational(&Rational::from((p, q))).expect("positive");
                let v = mono.mul(&r);
                if seen.insert(v.clone()) {
                    out.push(Coord::Nonzero { negative: false, value: v.clone() });
                    out.push(Coord::Nonzero { negative: true, value: v });
                }
                if out.len() > cap {
                    return out;
                }
            }
        }
        // next exponent vector in lexicographic order
        let mut i = m;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if k[i] < b {
                k[i] += 1;
                for x in k.iter_mut().skip(i + 1) {
                    *x = -b;
                }
                break;
            }
        }
    }
}

/// Enumerates points of `P^N` whose coordinates are signed monomials in the
/// generators times small rationals, normalized so the first nonzero
/// coordinate is 1, and keeps those with `h_γ` strictly below the threshold.
pub fn projective_northcott_experiment(params: &CensusParams) -> Result<Census> {
    if params.n == 0 {
        return Err(Error::invalid("N must be positive"));
    }
    if !(params.gamma < 0.0) {
        return Err(Error::invalid("gamma must be negative"));
    }
    let t_up = params.threshold.upper_f64();
    let rational_bound = if t_up <= 0.0 { 1 } else { (t_up.exp().ceil() as u64).saturating_sub(1).max(1) };
    if rational_bound > 1 << 16 {
        return Err(Error::invalid("threshold too large for enumeration"));
    }
    let cands = coordinate_candidates(params, rational_bound, params.budget.saturating_add(1));
    let thr = params.threshold.value();
    let mut census = Census { points: vec![], undecided: vec![], examined: 0, truncated: false, complete: false };
    let one = Coord::positive(RadicalScalar::one());
    let n = params.n;
    'charts: for chart in 0..=n {
        let free = n - chart;
        let mut idx = vec![0usize; free];
        loop {
            if census.examined >= params.budget {
                census.truncated = true;
                break 'charts;
            }
            census.examined += 1;
            let mut coords = vec![Coord::Zero; chart];
            coords.push(one.clone());
            coords.extend(idx.iter().map(|&i| cands[i].clone()));
            let point = RadicalPoint { coords };
            let hgamma = weighted_projective_height(&point, params.gamma, 128);
            match cmp_values(&hgamma, &thr, 128) {
                HeightOrdering::Less => census.points.push(CensusEntry { point, hgamma }),
                HeightOrdering::Inconclusive => census.undecided.push(CensusEntry { point, hgamma }),
                _ => {}
            }
            // odometer over candidate indices, last coordinate fastest
            let mut j = free;
            loop {
                if j == 0 {
                    continue 'charts;
                }
                j -= 1;
                if idx[j] + 1 < cands.len() {
                    idx[j] += 1;
                    for x in idx.iter_mut().skip(j + 1) {
                        *x = 0;
                    }
                    break;
                }
            }
        }
    }
    if cands.len() > params.budget.saturating_add(1) {
        census.truncated = true;
    }
    census.complete = params.generators.is_empty() && !census.truncated && census.undecided.is_empty();
    Ok(census)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser { src, pos: 0 }
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn end(&mut self) -> Result<()> {
        self.skip_ws();
        if self.pos < self.src.len() {
            Err(self.err("unexpected trailing input"))
        } else {
            Ok(())
        }
    }

    fn integer(&mut self) -> Result<Integer> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        Ok(self.src[start..self.pos].parse::<Integer>().expect("digits"))
    }

    fn rational(&mut self) -> Result<Rational> {
        let neg = self.eat('-');
        let n = self.integer()?;
        let r = if self.eat('/') {
            let at = self.pos;
            let d = self.integer()?;
            if d == 0 {
                return Err(Error::Parse { pos: at, msg: "zero denominator".into() });
            }
            Rational::from((n, d))
        } else {
            Rational::from(n)
        };
        Ok(if neg { -r } else { r })
    }

    fn factor(&mut self) -> Result<RadicalScalar> {
        self.skip_ws();
        let at = self.pos;
        let base = self.rational()?;
        if base <= 0 {
            return Err(Error::Parse { pos: at, msg: "radical base must be a positive rational".into() });
        }
        let e = if self.eat('^') {
            let paren = self.eat('(');
            let e = self.rational()?;
            if paren && !self.eat(')') {
                return Err(self.err("expected ')'"));
            }
            e
        } else {
            Rational::from(1)
        };
        RadicalScalar::from_rational_power(&base, &e).map_err(|e| Error::Parse { pos: at, msg: e.to_string() })
    }

    fn scalar(&mut self) -> Result<RadicalScalar> {
        let mut acc = self.factor()?;
        while self.eat('*') {
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn coord(&mut self) -> Result<Coord> {
        let negative = self.eat('-');
        self.skip_ws();
        let save = self.pos;
        if self.peek() == Some('0') {
            self.pos += 1;
            self.skip_ws();
            if matches!(self.peek(), None | Some(':') | Some(']')) {
                return Ok(Coord::Zero);
            }
            self.pos = save;
        }
        Ok(Coord::Nonzero { negative, value: self.scalar()? })
    }

    fn point(&mut self) -> Result<RadicalPoint> {
        let bracket = self.eat('[');
        let mut coords = vec![self.coord()?];
        while self.eat(':') {
            coords.push(self.coord()?);
        }
        if bracket && !self.eat(']') {
            return Err(self.err("expected ']'"));
        }
        RadicalPoint::new(coords).map_err(|e| Error::Parse { pos: self.pos, msg: e.to_string() })
    }
}
