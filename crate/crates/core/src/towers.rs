//! Radical towers `Q((p_1/q_1)^(1/d_1), (p_2/q_2)^(1/d_2), …)` with a large
//! Northcott number for the weighted height `h_γ`, and sample-based
//! certificates of the per-level lower bound.

use std::collections::BTreeMap;

use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heights::{degree_weight, HeightOrdering, HeightValue};
use crate::numeric::{is_prime, next_prime, BigFloat};
use crate::radical::{radical_height, RadicalScalar};

/// Selected primes above this many bits are refused.
pub const MAX_PRIME_BITS: u32 = 4096;

/// Largest accepted seed (number of admissible primes skipped at level 1).
pub const MAX_SEED: u64 = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Level {
    pub p: Integer,
    pub q: Integer,
    pub d: u32,
}

impl Level {
    /// `(p/q)^(1/d)`.
    pub fn generator(&self) -> RadicalScalar {
        RadicalScalar::from_exponents([
            (self.p.clone(), Rational::from((1, self.d))),
            (self.q.clone(), Rational::from((-1, self.d))),
        ])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "TowerDoc", try_from = "TowerDoc")]
pub struct TowerSpec {
    pub gamma: f64,
    pub target_c: f64,
    pub levels: Vec<Level>,
}

#[derive(Serialize, Deserialize)]
struct LevelDoc {
    p: String,
    q: String,
    d: u32,
}

#[derive(Serialize, Deserialize)]
struct TowerDoc {
    gamma: f64,
    #[serde(rename = "C")]
    c: f64,
    levels: Vec<LevelDoc>,
}

impl From<TowerSpec> for TowerDoc {
    fn from(t: TowerSpec) -> Self {
        TowerDoc {
            gamma: t.gamma,
            c: t.target_c,
            levels: t.levels.into_iter().map(|l| LevelDoc { p: l.p.to_string(), q: l.q.to_string(), d: l.d }).collect(),
        }
    }
}

impl TryFrom<TowerDoc> for TowerSpec {
    type Error = Error;

    fn try_from(doc: TowerDoc) -> Result<Self> {
        let mut levels = Vec::with_capacity(doc.levels.len());
        for (i, l) in doc.levels.into_iter().enumerate() {
            let parse = |s: &str| {
                s.trim()
                    .parse::<Integer>()
                    .map_err(|_| Error::invalid(format!("level {}: '{s}' is not an integer", i + 1)))
            };
            levels.push(Level { p: parse(&l.p)?, q: parse(&l.q)?, d: l.d });
        }
        let t = TowerSpec { gamma: doc.gamma, target_c: doc.c, levels };
        t.validate()?;
        Ok(t)
    }
}

impl TowerSpec {
    pub fn validate(&self) -> Result<()> {
        if !self.gamma.is_finite() || self.gamma >= 0.0 {
            return Err(Error::invalid("gamma must be a negative real"));
        }
        if !self.target_c.is_finite() {
            return Err(Error::invalid("C must be finite"));
        }
        let mut seen = BTreeMap::new();
        for (i, l) in self.levels.iter().enumerate() {
            if l.d < 2 {
                return Err(Error::invalid(format!("level {}: degree must be at least 2", i + 1)));
            }
            for x in [&l.p, &l.q] {
                if !is_prime(x) {
                    return Err(Error::invalid(format!("level {}: {x} is not prime", i + 1)));
                }
                if let Some(j) = seen.insert(x.clone(), i + 1) {
                    return Err(Error::invalid(format!("prime {x} is used at levels {j} and {}", i + 1)));
                }
            }
        }
        Ok(())
    }

    pub fn generators(&self) -> Vec<RadicalScalar> {
        self.levels.iter().map(Level::generator).collect()
    }

    /// `d_1 ⋯ d_i` for 1-based `i`.
    pub fn degree_product(&self, i: usize) -> Integer {
        self.levels[..i].iter().fold(Integer::from(1), |a, l| a * l.d)
    }

    /// `h_γ` of the level-`i` generator, exact when `γ` is an integer.
    pub fn generator_hgamma(&self, i: usize, prec: u32) -> HeightValue {
        let l = &self.levels[i - 1];
        HeightValue::Exact(radical_height(&l.generator()))
            .weighted(&degree_weight(&Integer::from(l.d), self.gamma, prec), prec)
    }
}

fn check_level_index(t: &TowerSpec, i: usize) -> Result<()> {
    if i == 0 || i > t.levels.len() {
        return Err(Error::invalid(format!("level index {i} outside 1..={}", t.levels.len())));
    }
    Ok(())
}

/// `C - log(d_i) / (2 (d_1⋯d_i)^γ (d_i - 1))`.
pub fn remark_bound(t: &TowerSpec, i: usize, prec: u32) -> Result<BigFloat> {
    check_level_index(t, i)?;
    let work = prec + 32;
    let d = t.levels[i - 1].d;
    let w = degree_weight(&t.degree_product(i), t.gamma, work).to_ball(work);
    let num = BigFloat::ln_integer(work, &Integer::from(d))?;
    let den = w.mul_i64(2 * (d as i64 - 1));
    Ok(BigFloat::exact_f64(work, t.target_c).sub(&num.div(&den)?))
}

/// Whether `(1/d) log p · D^γ ≥ C` is certified.
fn clears_target(p: &Integer, d: u32, big_d: &Integer, gamma: f64, c: f64) -> bool {
    let mut prec = 128;
    while prec <= 4096 {
        let v = BigFloat::ln_integer(prec, p)
            .expect("p > 1")
            .div_i64(d as i64)
            .mul(&degree_weight(big_d, gamma, prec).to_ball(prec));
        match v.cmp_certified(&BigFloat::exact_f64(prec, c)) {
            Some(o) => return o.is_ge(),
            None => prec *= 2,
        }
    }
    false
}

/// Deterministic tower: `q_i` is the smallest unused prime and `p_i` the
/// smallest unused prime above `max(q_i, exp(C d_i (d_1⋯d_i)^(-γ)))`. At
/// level 1, `seed` admissible primes are skipped, so distinct seeds give
/// distinct towers.
pub fn build_tower(gamma: f64, c: f64, num_levels: usize, schedule: &[u32], seed: u64) -> Result<TowerSpec> {
    if !gamma.is_finite() || gamma >= 0.0 {
        return Err(Error::invalid("gamma must be a negative real"));
    }
    if !c.is_finite() || c <= 0.0 {
        return Err(Error::invalid("C must be a positive real"));
    }
    if schedule.len() != num_levels {
        return Err(Error::invalid(format!(
            "degree schedule has {} entries but {num_levels} levels were requested",
            schedule.len()
        )));
    }
    if let Some(d) = schedule.iter().find(|&&d| d < 2) {
        return Err(Error::invalid(format!("degree {d} in schedule is below 2")));
    }
    if seed > MAX_SEED {
        return Err(Error::invalid(format!("seed must be at most {MAX_SEED}")));
    }
    let mut used: Vec<Integer> = Vec::new();
    let mut levels = Vec::with_capacity(num_levels);
    let mut big_d = Integer::from(1);
    let fresh_after = |start: &Integer, used: &[Integer]| {
        let mut x = next_prime(start);
        while used.contains(&x) {
            x = next_prime(&x);
        }
        x
    };
    for (idx, &d) in schedule.iter().enumerate() {
        big_d *= d;
        let q = fresh_after(&Integer::from(1), &used);
        let bits_estimate = c * d as f64 * big_d.to_f64().powf(-gamma) / std::f64::consts::LN_2;
        if !bits_estimate.is_finite() || bits_estimate > MAX_PRIME_BITS as f64 {
            return Err(Error::Construction(format!(
                "level {}: required prime exceeds 2^{MAX_PRIME_BITS} (needs about 2^{bits_estimate:.0}); use a smaller C or smaller degrees",
                idx + 1
            )));
        }
        // threshold exp(C d D^(-γ)), rounded up so the search starts above it
        let prec = bits_estimate as u32 + 96;
        let log_t =
            BigFloat::exact_f64(prec, c).mul_i64(d as i64).mul(&degree_weight(&big_d, -gamma, prec).to_ball(prec));
        let t = log_t.exp().upper().ceil().to_integer().expect("finite threshold");
        let start = t.max(q.clone());
        let mut p = fresh_after(&(start - 1u32), &used);
        if p == q {
            p = fresh_after(&p, &used);
        }
        let mut retries = 0;
        while !clears_target(&p, d, &big_d, gamma, c) {
            retries += 1;
            if retries > 64 {
                return Err(Error::Construction(format!(
                    "level {}: could not certify a prime above the threshold",
                    idx + 1
                )));
            }
            p = fresh_after(&p, &used);
        }
        if idx == 0 {
            for _ in 0..seed {
                p = fresh_after(&p, &used);
            }
        }
        if p.significant_bits() > MAX_PRIME_BITS {
            return Err(Error::Construction(format!(
                "level {}: prime search passed 2^{MAX_PRIME_BITS}; use a smaller C or smaller degrees",
                idx + 1
            )));
        }
        used.push(q.clone());
        used.push(p.clone());
        levels.push(Level { p, q, d });
    }
    let t = TowerSpec { gamma, target_c: c, levels };
    t.validate()?;
    Ok(t)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleVerdict {
    Pass,
    Fail,
    /// Not separated from the bound at the precision cap.
    Undecided,
}

#[derive(Clone, Debug)]
pub struct Sample {
    /// Exponents `k_1, …, k_i` of the monomial `∏ g_j^(k_j)`.
    pub exponents: Vec<i64>,
    pub element: RadicalScalar,
    pub hgamma: HeightValue,
    pub verdict: SampleVerdict,
}

#[derive(Clone, Debug)]
pub struct LevelCertificate {
    pub level: usize,
    pub remark_bound: BigFloat,
    pub generator_hgamma: HeightValue,
    pub samples: Vec<Sample>,
}

impl LevelCertificate {
    pub fn failures(&self) -> usize {
        self.samples.iter().filter(|s| s.verdict == SampleVerdict::Fail).count()
    }

    pub fn undecided(&self) -> usize {
        self.samples.iter().filter(|s| s.verdict == SampleVerdict::Undecided).count()
    }

    pub fn passed(&self) -> bool {
        self.failures() == 0 && self.undecided() == 0
    }
}

/// Exponent vectors of length `n` with sup-norm exactly `r`, in
/// lexicographic order.
fn shell(n: usize, r: i64) -> impl Iterator<Item = Vec<i64>> {
    let mut k = vec![-r; n];
    let mut done = n == 0;
    std::iter::from_fn(move || loop {
        if done {
            return None;
        }
        let cur = k.clone();
        let mut j = n;
        loop {
            if j == 0 {
                done = true;
                break;
            }
            j -= 1;
            if k[j] < r {
                k[j] += 1;
                for x in k.iter_mut().skip(j + 1) {
                    *x = -r;
                }
                break;
            }
        }
        if cur.iter().any(|x| x.abs() == r) {
            return Some(cur);
        }
    })
}

fn compare_to_bound(h: &HeightValue, bound: &TowerSpec, i: usize) -> SampleVerdict {
    let mut prec = 128;
    while prec <= 2048 {
        let b = remark_bound(bound, i, prec).expect("level index checked");
        match h.to_ball(prec).cmp_certified(&b) {
            Some(o) if o.is_ge() => return SampleVerdict::Pass,
            Some(_) => return SampleVerdict::Fail,
            None => prec *= 2,
        }
    }
    SampleVerdict::Undecided
}

/// Checks `h_γ(a) ≥ remark_bound` on monomials `a = ∏_{j≤i} g_j^(k_j)` with
/// `k_i ≢ 0 (mod d_i)`, so that `a ∈ K_i ∖ K_{i-1}`, taken in boxes of
/// growing radius until `sample_budget` elements have been checked.
pub fn certify_level(t: &TowerSpec, i: usize, sample_budget: usize) -> Result<LevelCertificate> {
    check_level_index(t, i)?;
    let gens: Vec<RadicalScalar> = t.levels[..i].iter().map(Level::generator).collect();
    let di = t.levels[i - 1].d as i64;
    let prec = 128;
    let mut samples = Vec::with_capacity(sample_budget);
    let mut r = 1;
    'outer: while samples.len() < sample_budget {
        for k in shell(i, r) {
            if k[i - 1].rem_euclid(di) == 0 {
                continue;
            }
            let a = gens.iter().zip(&k).fold(RadicalScalar::one(), |acc, (g, &e)| acc.mul(&g.pow(&Rational::from(e))));
            let hgamma =
                HeightValue::Exact(radical_height(&a)).weighted(&degree_weight(&a.degree(), t.gamma, prec), prec);
            let verdict = compare_to_bound(&hgamma, t, i);
            samples.push(Sample { exponents: k, element: a, hgamma, verdict });
            if samples.len() >= sample_budget {
                break 'outer;
            }
        }
        r += 1;
    }
    Ok(LevelCertificate {
        level: i,
        remark_bound: remark_bound(t, i, prec)?,
        generator_hgamma: t.generator_hgamma(i, prec),
        samples,
    })
}

/// Towers with different prime multisets generate different fields
/// (a sufficient criterion for these radical fields).
pub fn distinct_fields_check(t1: &TowerSpec, t2: &TowerSpec) -> bool {
    let ms = |t: &TowerSpec| {
        let mut v: Vec<Integer> = t.levels.iter().flat_map(|l| [l.p.clone(), l.q.clone()]).collect();
        v.sort();
        v
    };
    ms(t1) != ms(t2)
}

/// Whether the certified comparison `h_γ(generator) ≥ C` holds at level `i`.
pub fn generator_clears_target(t: &TowerSpec, i: usize) -> Result<bool> {
    check_level_index(t, i)?;
    let h = t.generator_hgamma(i, 256);
    let c = HeightValue::Numeric(BigFloat::exact_f64(256, t.target_c));
    Ok(matches!(crate::heights::height_value_compare(&h, &c), HeightOrdering::Greater | HeightOrdering::Equal))
}
