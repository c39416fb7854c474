//! Certified complex roots of integer polynomials.
//!
//! Approximations come from the Aberth–Ehrlich simultaneous iteration started
//! on Newton-polygon circles. They are then certified with the Weierstrass
//! corrections `W_i = p(z_i) / (a_n ∏_{j≠i} (z_i - z_j))`: every root lies in
//! the union of the disks `|z - z_i| ≤ n |W_i|`, and a connected component of
//! `m` disks holds exactly `m` roots. A root is accepted once its disk is
//! isolated and its radius is below the requested tolerance; otherwise the
//! working precision is doubled, at most [`MAX_ESCALATIONS`] times.

use std::cmp::Ordering;

use rug::{Complex, Float};

use super::ball::{add_up, digits_to_bits, mul_up, BigFloat};
use super::complex::BigComplex;
use super::poly::IntPoly;
use crate::error::{Error, Result};

pub const MAX_ESCALATIONS: u32 = 10;

/// Largest supported `precision_digits` (radii are stored as `f64`).
pub const MAX_ROOT_DIGITS: u32 = 300;

/// All complex roots of `p`, repeated according to multiplicity, each with
/// an error radius at most `10^-digits`. Roots are sorted by real part, then
/// imaginary part.
pub fn poly_roots(p: &IntPoly, digits: u32) -> Result<Vec<BigComplex>> {
    if p.is_zero() || p.degree() == 0 {
        return Err(Error::invalid("poly_roots needs a polynomial of degree at least 1"));
    }
    if digits == 0 || digits > MAX_ROOT_DIGITS {
        return Err(Error::invalid(format!("precision_digits must be in 1..={MAX_ROOT_DIGITS}")));
    }
    let base_bits = digits_to_bits(digits);
    let zeros = p.coeffs().iter().take_while(|c| c.is_zero()).count();
    let rest = IntPoly::new(p.coeffs()[zeros..].to_vec());
    let mut out: Vec<BigComplex> = (0..zeros).map(|_| BigComplex::zero(base_bits)).collect();
    for (factor, mult) in rest.squarefree_decomposition() {
        let roots = if factor.degree() == 1 {
            vec![linear_root(&factor, digits)]
        } else {
            isolate_squarefree(&factor, digits)?
        };
        for r in roots {
            for _ in 0..mult {
                out.push(r.clone());
            }
        }
    }
    out.sort_by(|a, b| match a.re().partial_cmp(b.re()) {
        Some(Ordering::Equal) | None => a.im().partial_cmp(b.im()).unwrap_or(Ordering::Equal),
        Some(o) => o,
    });
    Ok(out)
}

fn linear_root(f: &IntPoly, digits: u32) -> BigComplex {
    let r = rug::Rational::from((-f.coeff(0), f.coeff(1)));
    let mag_bits = r.numer().significant_bits() as i64 - r.denom().significant_bits() as i64;
    let bits = digits_to_bits(digits) + mag_bits.max(0) as u32;
    BigComplex::from_real(&BigFloat::from_rational(bits, &r))
}

fn ln_abs(c: &rug::Integer) -> f64 {
    Float::with_val(64, c).abs().ln().to_f64()
}

/// log2 of a Cauchy bound on the root moduli.
fn root_bound_log2(f: &IntPoly) -> f64 {
    let n = f.degree();
    let ln_lead = ln_abs(&f.leading());
    let mut m = f64::NEG_INFINITY;
    for c in f.coeffs()[..n].iter().filter(|c| !c.is_zero()) {
        m = m.max(ln_abs(c) - ln_lead);
    }
    (m.max(0.0) + std::f64::consts::LN_2) / std::f64::consts::LN_2
}

/// Initial approximations on circles read off the upper convex hull of
/// `(k, log|a_k|)`.
fn initial_guesses(f: &IntPoly, bits: u32) -> Vec<Complex> {
    let n = f.degree();
    let pts: Vec<(usize, f64)> =
        f.coeffs().iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(k, c)| (k, ln_abs(c))).collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let (k1, y1) = hull[hull.len() - 2];
            let (k2, y2) = hull[hull.len() - 1];
            // drop the middle point if it lies on or below the chord
            let cross = (k2 as f64 - k1 as f64) * (p.1 - y1) - (y2 - y1) * (p.0 as f64 - k1 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut out = Vec::with_capacity(n);
    let tau = std::f64::consts::TAU;
    for w in hull.windows(2) {
        let (k1, y1) = w[0];
        let (k2, y2) = w[1];
        let m = k2 - k1;
        let ln_r = (y1 - y2) / m as f64;
        for j in 0..m {
            let angle = tau * j as f64 / m as f64 + tau * k2 as f64 / n as f64 + 0.4;
            let r = Float::with_val(bits, ln_r).exp();
            let re = Float::with_val(bits, &r * angle.cos());
            let im = Float::with_val(bits, &r * angle.sin());
            out.push(Complex::with_val(bits, (re, im)));
        }
    }
    out
}

fn horner(coeffs: &[Float], z: &Complex) -> Complex {
    let mut acc = Complex::new(z.prec());
    for c in coeffs.iter().rev() {
        acc *= z;
        acc += c;
    }
    acc
}

/// Aberth–Ehrlich sweeps (Gauss–Seidel style) until corrections are below
/// `2^-(bits-8)` relative to the iterates or `max_iter` is hit.
fn aberth(f: &IntPoly, z: &mut [Complex], bits: u32, max_iter: usize) {
    let coeffs: Vec<Float> = f.coeffs().iter().map(|c| Float::with_val(bits, c)).collect();
    let dcoeffs: Vec<Float> = f.derivative().coeffs().iter().map(|c| Float::with_val(bits, c)).collect();
    let n = z.len();
    let tol = Float::with_val(bits, Float::i_exp(1, -(bits as i32) + 8));
    for _ in 0..max_iter {
        let mut converged = true;
        for i in 0..n {
            let pz = horner(&coeffs, &z[i]);
            if pz.real().is_zero() && pz.imag().is_zero() {
                continue;
            }
            let dpz = horner(&dcoeffs, &z[i]);
            let ratio = Complex::with_val(bits, &pz / &dpz);
            let mut s = Complex::new(bits);
            for j in 0..n {
                if j != i {
                    let d = Complex::with_val(bits, &z[i] - &z[j]);
                    s += d.recip();
                }
            }
            let denom = Complex::with_val(bits, 1) - Complex::with_val(bits, &ratio * &s);
            let w = Complex::with_val(bits, &ratio / &denom);
            if !w.real().is_finite() || !w.imag().is_finite() {
                // perturb a collapsed iterate and keep going
                z[i] += Complex::with_val(bits, (Float::i_exp(1, -20), Float::i_exp(1, -21)));
                converged = false;
                continue;
            }
            let wabs = Float::with_val(53, w.abs_ref());
            let zabs = Float::with_val(53, z[i].abs_ref()).max(&Float::with_val(53, 1));
            if wabs > Float::with_val(53, &tol * &zabs) {
                converged = false;
            }
            z[i] -= w;
        }
        if converged {
            break;
        }
    }
}

/// Inclusion disks for the iterates; `None` if some disk is not isolated
/// or is wider than `target`.
fn certify(f: &IntPoly, z: &[Complex], bits: u32, target: f64) -> Option<Vec<BigComplex>> {
    let n = z.len();
    let centers: Vec<BigComplex> = z
        .iter()
        .map(|c| BigComplex::from_parts(Float::with_val(bits, c.real()), Float::with_val(bits, c.imag()), 0.0))
        .collect();
    let lead = BigComplex::from_real(&BigFloat::from_integer(bits, &f.leading()));
    let mut radii = Vec::with_capacity(n);
    for i in 0..n {
        let mut den = lead.clone();
        for j in 0..n {
            if j != i {
                den = den.mul(&centers[i].sub(&centers[j]));
            }
        }
        let w = f.eval_complex(&centers[i]).div(&den).ok()?;
        let r = mul_up(n as f64, w.abs_upper());
        if !r.is_finite() || r > target {
            return None;
        }
        radii.push(r);
    }
    for i in 0..n {
        for j in i + 1..n {
            let d = centers[i].mid_distance(&centers[j]);
            if d.abs_lower() <= add_up(radii[i], radii[j]) {
                return None;
            }
        }
    }
    Some(centers.into_iter().zip(radii).map(|(c, r)| c.add_error(r)).collect())
}

fn isolate_squarefree(f: &IntPoly, digits: u32) -> Result<Vec<BigComplex>> {
    let n = f.degree();
    let target = 10f64.powi(-(digits as i32));
    let extra = root_bound_log2(f).ceil() as u32 + 2 * (usize::BITS - n.leading_zeros()) + 16;
    let mut bits = digits_to_bits(digits) + extra;
    let mut z = initial_guesses(f, bits);
    let mut max_iter = 200 + 20 * n;
    for _ in 0..=MAX_ESCALATIONS {
        aberth(f, &mut z, bits, max_iter);
        if let Some(disks) = certify(f, &z, bits, target) {
            return Ok(disks);
        }
        bits *= 2;
        max_iter = 60 + 4 * n;
        for c in z.iter_mut() {
            c.set_prec(bits);
        }
    }
    Err(Error::precision(format!(
        "root isolation of a degree-{n} polynomial did not reach 1e-{digits} after {MAX_ESCALATIONS} escalations"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64s(c)
    }

    fn close(z: &BigComplex, re: f64, im: f64, tol: f64) -> bool {
        (z.re().to_f64() - re).abs() < tol && (z.im().to_f64() - im).abs() < tol
    }

    #[test]
    fn sqrt_two_to_thirty_digits() {
        let r = poly_roots(&p(&[-2, 0, 1]), 30).unwrap();
        assert_eq!(r.len(), 2);
        let sqrt2 = BigFloat::from_i64(200, 2).sqrt().unwrap();
        assert!(r[0].overlaps(&BigComplex::from_real(&sqrt2.neg())));
        assert!(r[1].overlaps(&BigComplex::from_real(&sqrt2)));
        for z in &r {
            assert!(z.rad() <= 1e-30);
        }
    }

    #[test]
    fn linear_rational_root_is_exact() {
        let r = poly_roots(&p(&[-3, 1]), 30).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].rad(), 0.0);
        assert_eq!(*r[0].re(), 3);
    }

    #[test]
    fn gaussian_units() {
        let r = poly_roots(&p(&[1, 0, 1]), 40).unwrap();
        assert!(close(&r[0], 0.0, -1.0, 1e-30) || close(&r[0], 0.0, 1.0, 1e-30));
        assert!(r.iter().any(|z| close(z, 0.0, 1.0, 1e-30)));
        assert!(r.iter().any(|z| close(z, 0.0, -1.0, 1e-30)));
    }

    #[test]
    fn multiplicities_and_zero_roots() {
        // x^2 (x-1)^3 (x^2+1)
        let f = p(&[0, 0, 1]).mul(&p(&[-1, 1]).mul(&p(&[-1, 1])).mul(&p(&[-1, 1]))).mul(&p(&[1, 0, 1]));
        let r = poly_roots(&f, 20).unwrap();
        assert_eq!(r.len(), 7);
        assert_eq!(r.iter().filter(|z| close(z, 0.0, 0.0, 1e-25)).count(), 2);
        assert_eq!(r.iter().filter(|z| close(z, 1.0, 0.0, 1e-25)).count(), 3);
    }

    #[test]
    fn widely_spread_roots() {
        // (x - 10^20)(x - 1)(x + 10^-3 scaled): 1000x - 1 has root 1e-3
        let big = rug::Integer::from(rug::Integer::u_pow_u(10, 20));
        let f = IntPoly::linear_monic(&big).mul(&p(&[-1, 1])).mul(&p(&[-1, 1000])).mul(&p(&[2, 0, 1]));
        let r = poly_roots(&f, 40).unwrap();
        assert_eq!(r.len(), 5);
        assert!(r.iter().any(|z| close(z, 1e20, 0.0, 1.0)));
        assert!(r.iter().any(|z| close(z, 1e-3, 0.0, 1e-30)));
    }

    #[test]
    fn rejects_constants() {
        assert!(poly_roots(&p(&[5]), 10).is_err());
        assert!(poly_roots(&IntPoly::zero(), 10).is_err());
    }

    #[test]
    fn refinement_stays_inside_previous_disks() {
        let f = p(&[-7, 3, 0, -2, 0, 1]);
        let coarse = poly_roots(&f, 20).unwrap();
        let fine = poly_roots(&f, 60).unwrap();
        for z in &fine {
            assert!(coarse.iter().any(|c| c.overlaps(z) && z.mid_distance(c).abs_upper() <= c.rad() + z.rad()));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn product_of_roots_matches_constant_term(coeffs in proptest::collection::vec(-20i64..=20, 2..=9), lead in 1i64..=5) {
            let mut c = coeffs.clone();
            c.push(lead);
            let f = p(&c);
            prop_assume!(f.degree() >= 1);
            let roots = poly_roots(&f, 30).unwrap();
            prop_assert_eq!(roots.len(), f.degree());
            let prec = 256;
            let mut prod = BigComplex::from_real(&BigFloat::from_i64(prec, lead));
            for r in &roots {
                prod = prod.mul(r);
            }
            let sign = if f.degree().is_multiple_of(2) { 1 } else { -1 };
            let expected = BigComplex::from_real(&BigFloat::from_integer(prec, &(f.coeff(0) * sign)));
            prop_assert!(prod.overlaps(&expected), "prod {} vs {}", prod, expected);
        }
    }
}
