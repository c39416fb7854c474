//! Certified q-series evaluation of modular quantities on the upper half plane.
//!
//! Truncation errors are bounded explicitly and folded into the ball radii.
//! The discriminant is normalised as `Δ = q ∏ (1 - qⁿ)²⁴`, so `j = E₄³ / Δ`
//! takes the value 1728 at `i`.

use rug::Float;

use super::forms::ReducedForm;
use crate::error::{Error, Result};
use crate::numeric::{digits_to_bits, BigComplex, BigFloat, MAX_ESCALATIONS};

/// Terms allowed in any one series before giving up.
const MAX_TERMS: usize = 200_000;

/// `2^x` rounded up, with the smallest subnormal as a floor.
fn pow2_up(x: f64) -> f64 {
    if x < -1070.0 {
        f64::from_bits(1)
    } else {
        2f64.powf(x).next_up()
    }
}

/// Rebuilds `τ` at working precision `prec` (never lower than its own).
fn lift(tau: &BigComplex, prec: u32) -> BigComplex {
    let p = prec.max(tau.prec());
    BigComplex::from_parts(Float::with_val(p, tau.re()), Float::with_val(p, tau.im()), tau.rad())
}

fn check_upper(tau: &BigComplex) -> Result<()> {
    let y = tau.im_ball();
    if !y.is_positive() {
        return Err(Error::invalid("τ must lie in the upper half plane"));
    }
    Ok(())
}

/// `exp(2πi·k·τ)` for a real scale `k`.
fn nome(tau: &BigComplex, k: &BigFloat) -> BigComplex {
    let p = tau.prec();
    let ik = BigComplex::from_balls(&BigFloat::zero(p), &BigFloat::pi(p).mul_i64(2).mul(k));
    tau.mul(&ik).exp()
}

/// Upper bound on `|q|`, rejected when the series would not converge usefully.
fn modulus_bound(q: &BigComplex) -> Result<f64> {
    let r = q.abs_upper();
    if !(r < 0.999) {
        return Err(Error::invalid("Im τ is too small for q-series evaluation"));
    }
    Ok(r)
}

/// `∏_{n≥1} (1 - qⁿ)`, with the tail bounded through
/// `|log(1 - qⁿ)| ≤ rⁿ / (1 - r)`.
pub(crate) fn euler_product(q: &BigComplex) -> Result<BigComplex> {
    let p = q.prec();
    let r = modulus_bound(q)?;
    let lr = r.log2();
    let one = BigComplex::one(p);
    let mut acc = one.clone();
    let mut qn = one.clone();
    let den = -2.0 * (1.0 - r).log2();
    for n in 1..=MAX_TERMS {
        qn = qn.mul(q);
        acc = acc.mul(&one.sub(&qn));
        // log2 of r^{n+1} / (1 - r)^2
        let lt = (n as f64 + 1.0) * lr + den;
        if r == 0.0 || lt < -(p as f64) - 16.0 {
            let t = if r == 0.0 { 0.0 } else { pow2_up(lt) };
            let rel = t.exp_m1().next_up();
            return Ok(acc.add_error(acc.abs_upper() * rel * (1.0 + 1e-15)));
        }
    }
    Err(Error::precision("Euler product did not converge"))
}

fn sigma3(n: u64) -> u64 {
    let mut s = 0u64;
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            s += d * d * d;
            let e = n / d;
            if e != d {
                s += e * e * e;
            }
        }
        d += 1;
    }
    s
}

/// `E₄ = 1 + 240 Σ σ₃(n) qⁿ`, with tail `240 Σ_{n>N} n⁴ rⁿ` bounded by a
/// geometric series.
pub(crate) fn eisenstein_e4(q: &BigComplex) -> Result<BigComplex> {
    let p = q.prec();
    let r = modulus_bound(q)?;
    let lr = r.log2();
    let mut acc = BigComplex::zero(p);
    let mut qn = BigComplex::one(p);
    for n in 1..=MAX_TERMS as u64 {
        qn = qn.mul(q);
        acc = acc.add(&qn.mul_real(&BigFloat::from_integer(p, &sigma3(n).into())));
        let m = (n + 1) as f64;
        let rho = ((m + 1.0) / m).powi(4) * r;
        if r == 0.0 {
            break;
        }
        if rho < 1.0 {
            let lt = 4.0 * m.log2() + m * lr - (1.0 - rho).log2();
            if lt < -(p as f64) - 16.0 {
                let e4 = BigComplex::one(p).add(&acc.mul_i64(240));
                return Ok(e4.add_error(240.0 * pow2_up(lt)));
            }
        }
    }
    if r == 0.0 {
        return Ok(BigComplex::one(p).add(&acc.mul_i64(240)));
    }
    Err(Error::precision("Eisenstein series did not converge"))
}

/// Moves `τ` into the standard fundamental domain by integer translations and
/// the inversion `τ ↦ -1/τ`; `j` and the local Faltings term are invariant.
pub fn reduce_to_fundamental_domain(tau: &BigComplex) -> Result<BigComplex> {
    check_upper(tau)?;
    let p = tau.prec();
    let mut t = tau.clone();
    for _ in 0..10_000 {
        let n = t.re().to_integer().expect("finite");
        if n != 0 {
            t = t.sub(&BigComplex::from_real(&BigFloat::from_integer(p, &n)));
        }
        let m = Float::with_val(p, t.re().square_ref()) + Float::with_val(p, t.im().square_ref());
        if m < 0.999_999 {
            t = t.inv()?.neg();
        } else {
            return Ok(t);
        }
    }
    Err(Error::precision("fundamental domain reduction did not terminate"))
}

/// Runs `f` at increasing precision until `done` accepts the result.
fn escalate<T>(start: u32, f: impl Fn(u32) -> Result<T>, done: impl Fn(&T) -> bool) -> Result<T> {
    let mut bits = start;
    let mut last = None;
    for _ in 0..=MAX_ESCALATIONS {
        match f(bits) {
            Ok(v) if done(&v) => return Ok(v),
            Ok(_) => last = None,
            Err(e @ Error::InvalidInput(_)) => return Err(e),
            Err(e) => last = Some(e),
        }
        bits = bits.saturating_mul(2);
    }
    Err(last.unwrap_or_else(|| Error::precision("requested accuracy not reached within the escalation limit")))
}

fn accuracy(digits: u32) -> f64 {
    10f64.powi(-(digits.min(300) as i32))
}

/// `Δ(τ)` evaluated at the given point with the working precision of `τ`.
pub(crate) fn delta_at(tau: &BigComplex) -> Result<BigComplex> {
    let q = nome(tau, &BigFloat::one(tau.prec()));
    let pr = euler_product(&q)?;
    Ok(q.mul(&pr.pow_u64(24)))
}

fn j_at(tau: &BigComplex) -> Result<BigComplex> {
    let t = reduce_to_fundamental_domain(tau)?;
    let q = nome(&t, &BigFloat::one(t.prec()));
    let e4 = eisenstein_e4(&q)?;
    let d = q.mul(&euler_product(&q)?.pow_u64(24));
    e4.pow_u64(3).div(&d)
}

/// Modular discriminant with absolute error at most `10^-digits`.
pub fn delta(tau: &BigComplex, digits: u32) -> Result<BigComplex> {
    check_upper(tau)?;
    let eps = accuracy(digits);
    escalate(digits_to_bits(digits), |b| delta_at(&lift(tau, b)), |v| v.rad() <= eps)
}

/// Klein's `j` with absolute error at most `10^-digits`.
pub fn j_invariant(tau: &BigComplex, digits: u32) -> Result<BigComplex> {
    check_upper(tau)?;
    let eps = accuracy(digits);
    let y = reduce_to_fundamental_domain(tau)?.im().to_f64();
    // |j| ≈ e^{2πy}: its integer part needs that many extra bits
    let mag = (2.0 * std::f64::consts::PI * y / std::f64::consts::LN_2).ceil() as u32 + 16;
    escalate(digits_to_bits(digits) + mag, |b| j_at(&lift(tau, b)), |v| v.rad() <= eps)
}

/// `j` at the CM point of a reduced form, recomputing `τ` at each precision.
pub fn j_of_form(f: &ReducedForm, digits: u32) -> Result<BigComplex> {
    let eps = accuracy(digits);
    let mag = (2.0 * std::f64::consts::PI * f.im_tau() / std::f64::consts::LN_2).ceil() as u32 + 16;
    escalate(digits_to_bits(digits) + mag, |b| j_at(&f.tau(b)), |v| v.rad() <= eps)
}

/// `log max(1, |j(τ)|)` at a reduced form, via `log|j| = 3 log|E₄| + 2πy -
/// 24 log|P|` when `j` itself would be huge.
pub fn log_max_one_j(f: &ReducedForm, digits: u32) -> Result<BigFloat> {
    let eps = accuracy(digits);
    let y = f.im_tau();
    escalate(
        digits_to_bits(digits),
        |b| {
            let tau = f.tau(b);
            if y < 20.0 {
                let j = j_at(&tau)?;
                let a = j.abs();
                let one = BigFloat::one(b);
                let m = a.max(&one);
                if m.lower() <= 0 {
                    return Err(Error::precision("|j| ball reaches zero"));
                }
                m.ln()
            } else {
                let q = nome(&tau, &BigFloat::one(b));
                let e4 = eisenstein_e4(&q)?.abs().ln()?;
                let pr = euler_product(&q)?.abs().ln()?;
                let two_pi_y = BigFloat::pi(b).mul_i64(2).mul(&tau.im_ball());
                Ok(e4.mul_i64(3).add(&two_pi_y).sub(&pr.mul_i64(24)))
            }
        },
        |v| v.rad() <= eps,
    )
}

fn local_term_at(tau: &BigComplex) -> Result<BigFloat> {
    let p = tau.prec();
    let y = BigFloat::from_parts(tau.im().clone(), tau.rad());
    let q = nome(tau, &BigFloat::one(p));
    let lp = euler_product(&q)?.abs().ln()?;
    let head = BigFloat::pi(p).mul(&y).div_i64(6);
    Ok(head.sub(&lp.mul_i64(2)).sub(&y.ln()?.div_i64(2)))
}

/// `-(1/12) log(|Δ(τ)| (Im τ)⁶) = πy/6 - 2 log|∏(1-qⁿ)| - (1/2) log y`,
/// evaluated directly at `τ` without reduction.
pub fn faltings_local_term(tau: &BigComplex, digits: u32) -> Result<BigFloat> {
    check_upper(tau)?;
    let eps = accuracy(digits);
    escalate(digits_to_bits(digits), |b| local_term_at(&lift(tau, b)), |v| v.rad() <= eps)
}

/// The local term at a reduced form's CM point.
pub fn faltings_local_term_of_form(f: &ReducedForm, digits: u32) -> Result<BigFloat> {
    let eps = accuracy(digits);
    escalate(digits_to_bits(digits), |b| local_term_at(&f.tau(b)), |v| v.rad() <= eps)
}

fn theta_at(tau: &BigComplex) -> Result<[BigComplex; 4]> {
    let p = tau.prec();
    let q8 = nome(tau, &BigFloat::exact_f64(p, 0.125));
    let r = q8.abs_upper();
    if !(r < 0.999) {
        return Err(Error::invalid("Im τ is too small for theta evaluation"));
    }
    let lr = r.log2();
    // smallest M with 2 r^{(M+1)²} / (1 - r^{2M+3}) below the target
    let mut m_max = 1usize;
    let tail = loop {
        let m1 = (m_max + 1) as f64;
        let lt = 1.0 + m1 * m1 * lr - (1.0 - r.powf(2.0 * m_max as f64 + 3.0)).log2();
        if r == 0.0 {
            break 0.0;
        }
        if lt < -(p as f64) - 16.0 {
            break pow2_up(lt);
        }
        m_max += 1;
        if m_max > MAX_TERMS {
            return Err(Error::precision("theta series did not converge"));
        }
    };
    // pw[m] = q8^{m²}, stepping by q8^{2m+1}
    let q2 = q8.sqr();
    let mut pw = Vec::with_capacity(m_max + 1);
    let mut cur = BigComplex::one(p);
    let mut step = q8.clone();
    for _ in 0..=m_max {
        pw.push(cur.clone());
        cur = cur.mul(&step);
        step = step.mul(&q2);
    }
    let mut out: [BigComplex; 4] = std::array::from_fn(|_| BigComplex::zero(p));
    let m = m_max as i64;
    for k in -m..=m {
        let j = k.rem_euclid(4) as usize;
        out[j] = out[j].add(&pw[k.unsigned_abs() as usize]);
    }
    Ok(out.map(|t| t.add_error(tail)))
}

/// Theta constants `θⱼ(τ) = Σ_{m ≡ j (mod 4)} exp(πiτm²/4)` for
/// `j = 0..3`, the coordinates of the level-(2,4) theta null point.
pub fn theta_null(tau: &BigComplex, digits: u32) -> Result<[BigComplex; 4]> {
    check_upper(tau)?;
    let eps = accuracy(digits);
    escalate(digits_to_bits(digits), |b| theta_at(&lift(tau, b)), |v| v.iter().all(|t| t.rad() <= eps))
}

/// Theta null point at a reduced form's CM point.
pub fn theta_null_of_form(f: &ReducedForm, digits: u32) -> Result<[BigComplex; 4]> {
    let eps = accuracy(digits);
    escalate(digits_to_bits(digits), |b| theta_at(&f.tau(b)), |v| v.iter().all(|t| t.rad() <= eps))
}

/// `log(‖θ‖₂ / max |θⱼ|)`: the archimedean contribution of one embedding to
/// the L² theta height, normalised by the sup-norm chart.
pub fn theta_log_ratio(theta: &[BigComplex; 4]) -> Result<BigFloat> {
    let p = theta[0].prec();
    let mut n2 = BigFloat::zero(p);
    let mut mx = BigFloat::zero(p);
    for t in theta {
        n2 = n2.add(&t.norm_sqr());
        mx = mx.max(&t.abs());
    }
    Ok(n2.ln()?.div_i64(2).sub(&mx.ln()?))
}
