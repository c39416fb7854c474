//! Per-discriminant records and the scan experiments built on them.

use rayon::prelude::*;
use rug::float::Round;
use serde::Serialize;

use super::classpoly::{hilbert_class_poly, j_height};
use super::forms::{fundamental_discriminants, reduced_forms, Discriminant};
use super::modular::{faltings_local_term_of_form, theta_log_ratio, theta_null_of_form};
use crate::error::{Error, Result};
use crate::heights::HeightValue;
use crate::numeric::{digits_to_bits, BigFloat, IntPoly};

/// Additive constant turning the averaged local term into a Faltings height.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum FaltingsOffset {
    /// `-(1/2) log 2`, the genus-one translate matching the nonnegative
    /// normalisation (Deligne's value plus `(1/2) log 2π`).
    #[default]
    Standard,
    Custom(f64),
}

impl FaltingsOffset {
    pub fn value(&self, prec: u32) -> BigFloat {
        match self {
            FaltingsOffset::Standard => BigFloat::ln_integer(prec, &2.into()).expect("ln 2").div_i64(2).neg(),
            FaltingsOffset::Custom(c) => BigFloat::exact_f64(prec, *c),
        }
    }
}

/// `(1/h) Σ_forms s(τ_f) + offset`.
pub fn faltings_height_cm(d: &Discriminant, digits: u32, offset: FaltingsOffset) -> Result<BigFloat> {
    let forms = reduced_forms(d);
    let p = digits_to_bits(digits);
    let mut acc = BigFloat::zero(p);
    for f in &forms {
        acc = acc.add(&faltings_local_term_of_form(f, digits)?);
    }
    Ok(acc.div_i64(forms.len() as i64).add(&offset.value(p)))
}

/// Archimedean Galois-average estimate of the L² theta height:
/// `(1/h) Σ_forms log ‖Θ(0; τ_f)‖₂` with each point scaled so its largest
/// coordinate has modulus 1. Finite places are not included.
pub fn theta_height_estimate(d: &Discriminant, digits: u32) -> Result<BigFloat> {
    let forms = reduced_forms(d);
    let p = digits_to_bits(digits);
    let mut acc = BigFloat::zero(p);
    for f in &forms {
        acc = acc.add(&theta_log_ratio(&theta_null_of_form(f, digits)?)?);
    }
    Ok(acc.div_i64(forms.len() as i64))
}

/// `|max(1, h_Θ) - max(1, h_F)/2|`.
pub fn theta_faltings_residual(theta: &BigFloat, faltings: &BigFloat) -> BigFloat {
    let one = BigFloat::one(theta.prec());
    theta.max(&one).sub(&faltings.max(&one).div_i64(2)).abs()
}

/// What to compute for each discriminant.
#[derive(Clone, Copy, Debug)]
pub struct RecordOptions {
    pub digits: u32,
    pub offset: FaltingsOffset,
    pub class_poly: bool,
    pub theta: bool,
}

impl Default for RecordOptions {
    fn default() -> Self {
        RecordOptions {
            digits: crate::numeric::DEFAULT_DIGITS,
            offset: FaltingsOffset::Standard,
            class_poly: false,
            theta: true,
        }
    }
}

/// Everything the lab knows about one discriminant. Optional parts are
/// `None` when the options skipped them.
#[derive(Clone, Debug)]
pub struct CMRecord {
    pub discriminant: Discriminant,
    pub class_number: usize,
    pub class_poly: Option<IntPoly>,
    pub j_height: HeightValue,
    pub faltings_height: BigFloat,
    pub theta_height_est: Option<BigFloat>,
    pub residual: Option<BigFloat>,
    pub decay_ratio: BigFloat,
    pub digits: u32,
}

pub fn cm_record(d: &Discriminant, opts: &RecordOptions) -> Result<CMRecord> {
    let h = reduced_forms(d).len();
    let class_poly = if opts.class_poly {
        let cp = hilbert_class_poly(d)?;
        debug_assert_eq!(cp.poly.degree(), h);
        Some(cp.poly)
    } else {
        None
    };
    let jh = j_height(d, opts.digits)?;
    let hf = faltings_height_cm(d, opts.digits, opts.offset)?;
    let (theta, residual) = if opts.theta {
        let t = theta_height_estimate(d, opts.digits)?;
        let r = theta_faltings_residual(&t, &hf);
        (Some(t), Some(r))
    } else {
        (None, None)
    };
    Ok(CMRecord {
        discriminant: *d,
        class_number: h,
        class_poly,
        j_height: HeightValue::Numeric(jh),
        decay_ratio: hf.div_i64(h as i64),
        faltings_height: hf,
        theta_height_est: theta,
        residual,
        digits: opts.digits,
    })
}

/// Records for every fundamental `D` with `|D| ≤ dmax`, sorted by `|D|`.
/// Runs on the current rayon pool; the order of the output does not depend
/// on the number of workers.
pub fn scan(dmax: u64, opts: &RecordOptions) -> Vec<(Discriminant, Result<CMRecord>)> {
    fundamental_discriminants(dmax).into_par_iter().map(|d| (d, cm_record(&d, opts))).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct TfRow {
    pub discriminant: i64,
    #[serde(skip)]
    pub faltings: BigFloat,
    #[serde(skip)]
    pub theta: BigFloat,
    #[serde(skip)]
    pub residual: BigFloat,
    /// `r(D) / log(min(h_Θ, h_F) + 2)`
    #[serde(skip)]
    pub ratio: BigFloat,
    /// Whether the doubled-precision residual overlaps this one.
    pub stable: bool,
}

#[derive(Clone, Debug)]
pub struct TfReport {
    pub rows: Vec<TfRow>,
    pub failures: Vec<(i64, Error)>,
    /// Smallest `c` with `r(D) ≤ c log(min + 2)` on every row (upper bound of
    /// the ball maximum).
    pub fitted_c: f64,
    pub all_stable: bool,
}

fn tf_values(d: &Discriminant, digits: u32) -> Result<(BigFloat, BigFloat, BigFloat)> {
    let hf = faltings_height_cm(d, digits, FaltingsOffset::Standard)?;
    let ht = theta_height_estimate(d, digits)?;
    let r = theta_faltings_residual(&ht, &hf);
    Ok((hf, ht, r))
}

/// Residual scan over fundamental discriminants, rechecked at twice the
/// precision.
pub fn verify_theta_faltings(dmax: u64, digits: u32) -> TfReport {
    let results: Vec<(Discriminant, Result<TfRow>)> = fundamental_discriminants(dmax)
        .into_par_iter()
        .map(|d| {
            let row = (|| {
                let (hf, ht, r) = tf_values(&d, digits)?;
                let (_, _, r2) = tf_values(&d, digits * 2)?;
                let two = BigFloat::from_i64(hf.prec(), 2);
                let scale = hf.min(&ht).add(&two).ln()?;
                Ok(TfRow {
                    discriminant: d.value(),
                    ratio: r.div(&scale)?,
                    stable: r.overlaps(&r2),
                    faltings: hf,
                    theta: ht,
                    residual: r,
                })
            })();
            (d, row)
        })
        .collect();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (d, r) in results {
        match r {
            Ok(row) => rows.push(row),
            Err(e) => failures.push((d.value(), e)),
        }
    }
    let fitted_c = rows.iter().map(|r| r.ratio.upper().to_f64_round(Round::Up)).fold(0.0, f64::max);
    let all_stable = rows.iter().all(|r| r.stable);
    TfReport { rows, failures, fitted_c, all_stable }
}

#[derive(Clone, Debug)]
pub struct DecayRow {
    pub discriminant: i64,
    pub class_number: usize,
    pub faltings: BigFloat,
    pub ratio: BigFloat,
    /// `max` of the ratio over this and every later row.
    pub envelope: BigFloat,
}

#[derive(Clone, Debug)]
pub struct DecayReport {
    pub rows: Vec<DecayRow>,
    pub failures: Vec<(i64, Error)>,
    /// Midpoints of the envelope never increase along the scan.
    pub nonincreasing: bool,
    /// Envelope at the first `|D| ≥ 100`.
    pub env_start: Option<BigFloat>,
    /// Envelope at the last scanned discriminant.
    pub env_end: Option<BigFloat>,
    /// `env_end < env_start` certified by disjoint balls.
    pub strict_drop: bool,
}

/// The envelope `env(X) = max_{|D| ≥ X} h_F(D)/h(D)` over fundamental
/// discriminants up to `dmax`.
pub fn verify_decay(dmax: u64, digits: u32) -> DecayReport {
    let results: Vec<(Discriminant, Result<(usize, BigFloat)>)> = fundamental_discriminants(dmax)
        .into_par_iter()
        .map(|d| {
            let h = reduced_forms(&d).len();
            (d, faltings_height_cm(&d, digits, FaltingsOffset::Standard).map(|f| (h, f)))
        })
        .collect();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (d, r) in results {
        match r {
            Ok((h, f)) => rows.push(DecayRow {
                discriminant: d.value(),
                class_number: h,
                ratio: f.div_i64(h as i64),
                envelope: f.div_i64(h as i64),
                faltings: f,
            }),
            Err(e) => failures.push((d.value(), e)),
        }
    }
    for i in (0..rows.len().saturating_sub(1)).rev() {
        let env = rows[i].ratio.max(&rows[i + 1].envelope);
        rows[i].envelope = env;
    }
    let nonincreasing = rows.windows(2).all(|w| w[1].envelope.mid() <= w[0].envelope.mid());
    let env_start = rows.iter().find(|r| r.discriminant.unsigned_abs() >= 100).map(|r| r.envelope.clone());
    let env_end = rows.last().map(|r| r.envelope.clone());
    let strict_drop = match (&env_start, &env_end) {
        (Some(a), Some(b)) => b.cmp_certified(a) == Some(std::cmp::Ordering::Less),
        _ => false,
    };
    DecayReport { rows, failures, nonincreasing, env_start, env_end, strict_drop }
}

#[derive(Clone, Debug)]
pub struct CensusRow {
    pub discriminant: i64,
    pub ratio: BigFloat,
}

#[derive(Clone, Debug)]
pub struct FinitenessCensus {
    /// Class number one and ratio certified at most `C′`.
    pub members: Vec<CensusRow>,
    /// Class number one, but the ratio ball straddles `C′`.
    pub undecided: Vec<CensusRow>,
    /// Every class-number-one discriminant met, whatever its ratio.
    pub class_number_one: Vec<i64>,
    pub failures: Vec<(i64, Error)>,
}

impl FinitenessCensus {
    pub fn cardinality(&self) -> usize {
        self.members.len()
    }
}

/// Fundamental `D` with `|D| ≤ dmax`, class number one and
/// `h_F(D) ≤ C′`; such moduli are rational and lie in every field.
pub fn finiteness_demo(c_prime: f64, dmax: u64, digits: u32) -> Result<FinitenessCensus> {
    if !c_prime.is_finite() || c_prime < 0.0 {
        return Err(Error::invalid("C′ must be a nonnegative real"));
    }
    let one: Vec<Discriminant> =
        fundamental_discriminants(dmax).into_iter().filter(|d| reduced_forms(d).len() == 1).collect();
    let mut census = FinitenessCensus {
        members: Vec::new(),
        undecided: Vec::new(),
        class_number_one: one.iter().map(|d| d.value()).collect(),
        failures: Vec::new(),
    };
    let bound = BigFloat::exact_f64(digits_to_bits(digits), c_prime);
    for d in one {
        match faltings_height_cm(&d, digits, FaltingsOffset::Standard) {
            Ok(ratio) => {
                let row = CensusRow { discriminant: d.value(), ratio: ratio.clone() };
                match ratio.cmp_certified(&bound) {
                    Some(std::cmp::Ordering::Greater) => {}
                    None => census.undecided.push(row),
                    Some(_) => census.members.push(row),
                }
            }
            Err(e) => census.failures.push((d.value(), e)),
        }
    }
    Ok(census)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc(d: i64) -> Discriminant {
        Discriminant::new(d).unwrap()
    }

    #[test]
    fn faltings_ordering_and_values() {
        let a = faltings_height_cm(&disc(-3), 30, FaltingsOffset::Standard).unwrap();
        let b = faltings_height_cm(&disc(-4), 30, FaltingsOffset::Standard).unwrap();
        assert_eq!(a.cmp_certified(&b), Some(std::cmp::Ordering::Less));
        // Deligne's value for j = 0 is -0.748752485...; ours adds (1/2) log 2π
        let deligne = -0.748_752_485_8 + 0.5 * (2.0 * std::f64::consts::PI).ln();
        assert!((a.to_f64() - deligne).abs() < 1e-9, "{a}");
        let c = faltings_height_cm(&disc(-3), 30, FaltingsOffset::Custom(0.0)).unwrap();
        assert!((c.to_f64() - a.to_f64() - 0.5 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn theta_estimate_nonnegative_and_stable() {
        for d in [-3, -4, -7, -23] {
            let t = theta_height_estimate(&disc(d), 30).unwrap();
            assert!(t.lower() >= 0, "{d}: {t}");
        }
        let a = theta_height_estimate(&disc(-4), 30).unwrap();
        let b = theta_height_estimate(&disc(-4), 60).unwrap();
        assert!(a.to_f64() > 0.0);
        assert!(a.sub(&b).abs_upper() < 1e-20);
    }

    #[test]
    fn record_fields_agree() {
        let opts = RecordOptions { digits: 30, class_poly: true, ..Default::default() };
        let r = cm_record(&disc(-23), &opts).unwrap();
        assert_eq!(r.class_number, 3);
        assert_eq!(r.class_poly.as_ref().unwrap().degree(), 3);
        assert!(r.decay_ratio.mul_i64(3).overlaps(&r.faltings_height));
        let jh = r.j_height.to_f64();
        assert!(jh > 0.0);
    }

    #[test]
    fn scan_is_sorted_and_worker_independent() {
        let opts = RecordOptions { digits: 20, ..Default::default() };
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| scan(60, &opts));
        let b = four.install(|| scan(60, &opts));
        let da: Vec<i64> = a.iter().map(|(d, _)| d.value()).collect();
        assert!(da.windows(2).all(|w| w[0] > w[1]));
        for ((_, x), (_, y)) in a.iter().zip(&b) {
            let (x, y) = (x.as_ref().unwrap(), y.as_ref().unwrap());
            assert_eq!(x.faltings_height.mid(), y.faltings_height.mid());
        }
    }

    #[test]
    fn small_decay_and_tf_scans() {
        let rep = verify_decay(400, 20);
        assert!(rep.failures.is_empty());
        assert!(rep.nonincreasing);
        assert!(rep.rows.iter().all(|r| r.class_number >= 1));
        let tf = verify_theta_faltings(100, 20);
        assert!(tf.failures.is_empty() && tf.all_stable);
        assert!(tf.fitted_c.is_finite());
        // the f64 constant must bound every ratio ball, not just its midpoint
        for r in &tf.rows {
            assert!(r.ratio.upper() <= tf.fitted_c, "D = {}", r.discriminant);
        }
    }

    #[test]
    fn finiteness_census() {
        let c = finiteness_demo(10.0, 200, 20).unwrap();
        assert_eq!(c.class_number_one, vec![-3, -4, -7, -8, -11, -19, -43, -67, -163]);
        let got: Vec<i64> = c.members.iter().map(|r| r.discriminant).collect();
        assert_eq!(got, c.class_number_one);
        assert_eq!(finiteness_demo(0.0, 200, 20).unwrap().cardinality(), 0);
        let bigger = finiteness_demo(10.0, 1000, 20).unwrap();
        assert_eq!(bigger.class_number_one, c.class_number_one);
    }
}
