//! Hilbert class polynomials and the height of singular moduli.

use rug::Integer;

use super::forms::{reduced_forms, Discriminant};
use super::modular::{j_of_form, log_max_one_j};
use crate::error::{Error, Result};
use crate::numeric::{digits_to_bits, BigComplex, BigFloat, IntPoly, MAX_ESCALATIONS};

/// Coefficients are refused beyond this many decimal digits, since ball
/// radii live in `f64`.
pub const MAX_COEFF_DIGITS: f64 = 290.0;

/// A coefficient must round from within this distance of an integer.
const ROUNDING_SLACK: f64 = 0.1;

/// The class polynomial together with the largest distance of a computed
/// coefficient from the integer it rounded to.
#[derive(Clone, Debug)]
pub struct ClassPolynomial {
    pub poly: IntPoly,
    pub max_residual: f64,
    pub precision_bits: u32,
}

/// log10 of an upper bound on the coefficients of `∏ (x - j(τ_f))`.
fn coeff_digits(d: &Discriminant) -> f64 {
    let forms = reduced_forms(d);
    let h = forms.len() as f64;
    let sum: f64 = forms.iter().map(|f| (2.0 * std::f64::consts::PI * f.im_tau()).max(0.0) + 1.0).sum::<f64>()
        / std::f64::consts::LN_10;
    sum + h * 2f64.log10()
}

/// `H_D(x) = ∏_f (x - j(τ_f))` over reduced primitive forms, recovered from
/// q-series values and certified by rounding.
pub fn hilbert_class_poly(d: &Discriminant) -> Result<ClassPolynomial> {
    let forms = reduced_forms(d);
    let est = coeff_digits(d);
    if est > MAX_COEFF_DIGITS {
        return Err(Error::invalid(format!(
            "class polynomial for D = {d} has coefficients of about {est:.0} digits; the limit is {MAX_COEFF_DIGITS}"
        )));
    }
    // root errors get multiplied by coefficients of size about 10^est
    let mut digits = (est.ceil() as u32 + 6).min(300);
    for _ in 0..=MAX_ESCALATIONS {
        let roots: Vec<BigComplex> = forms.iter().map(|f| j_of_form(f, digits)).collect::<Result<_>>()?;
        let bits = digits_to_bits(digits + est.ceil() as u32);
        let p = bits.max(roots.iter().map(|r| r.prec()).max().unwrap_or(bits));
        // coefficients of the monic product, lowest degree first
        let mut coeffs = vec![BigComplex::one(p)];
        for r in &roots {
            let mut next = vec![BigComplex::zero(p); coeffs.len() + 1];
            for (i, c) in coeffs.iter().enumerate() {
                next[i + 1] = next[i + 1].add(c);
                next[i] = next[i].sub(&c.mul(r));
            }
            coeffs = next;
        }
        if let Some(poly) = round_coeffs(&coeffs) {
            return Ok(ClassPolynomial { poly: poly.0, max_residual: poly.1, precision_bits: p });
        }
        if digits == 300 {
            break;
        }
        digits = (digits + 20).min(300);
    }
    Err(Error::precision(format!("class polynomial for D = {d} did not round within the escalation limit")))
}

fn round_coeffs(coeffs: &[BigComplex]) -> Option<(IntPoly, f64)> {
    let mut out = Vec::with_capacity(coeffs.len());
    let mut worst = 0f64;
    for c in coeffs {
        if !(c.rad() < 0.4) || c.im().to_f64().abs() > ROUNDING_SLACK {
            return None;
        }
        let n: Integer = c.re().to_integer()?;
        let res = BigFloat::from_parts(c.re().clone(), 0.0).sub(&BigFloat::from_integer(c.prec(), &n)).abs_upper();
        if res > ROUNDING_SLACK || res + c.rad() >= 0.5 {
            return None;
        }
        worst = worst.max(res);
        out.push(n);
    }
    Some((IntPoly::new(out), worst))
}

/// Weil height of `j(O_D)`: the average of `log max(1, |j(τ_f)|)` over the
/// conjugates, since the class polynomial is monic.
pub fn j_height(d: &Discriminant, digits: u32) -> Result<BigFloat> {
    let forms = reduced_forms(d);
    let p = digits_to_bits(digits);
    let mut acc = BigFloat::zero(p);
    for f in &forms {
        acc = acc.add(&log_max_one_j(f, digits)?);
    }
    Ok(acc.div_i64(forms.len() as i64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heights::{weil_height_digits, AlgebraicNumber};

    fn hp(d: i64) -> ClassPolynomial {
        hilbert_class_poly(&Discriminant::new(d).unwrap()).unwrap()
    }

    #[test]
    fn class_number_one_polynomials() {
        let cases: [(i64, i64); 9] = [
            (-3, 0),
            (-4, 1728),
            (-7, -3375),
            (-8, 8000),
            (-11, -32768),
            (-19, -884736),
            (-43, -884736000),
            (-67, -147197952000),
            (-163, -262537412640768000),
        ];
        for (d, j) in cases {
            let h = hp(d);
            assert_eq!(h.poly, IntPoly::linear_monic(&Integer::from(j)), "D = {d}");
            assert!(h.max_residual < 1e-6);
        }
    }

    #[test]
    fn degree_two_and_three() {
        // H_{-15} = x² + 191025x - 121287375
        assert_eq!(hp(-15).poly, IntPoly::from_i64s(&[-121287375, 191025, 1]));
        let h23 = hp(-23).poly;
        assert_eq!(h23.degree(), 3);
        assert_eq!(h23.coeff(2), Integer::from(3491750));
        assert_eq!(h23.coeff(0), Integer::from(12771880859375i64));
    }

    #[test]
    fn j_height_matches_weil_height_of_class_polynomial_root() {
        for d in [-4, -7, -15, -23, -31] {
            let disc = Discriminant::new(d).unwrap();
            let a = j_height(&disc, 30).unwrap();
            let h = hp(d).poly;
            let alg = AlgebraicNumber::from_minpoly(h).unwrap();
            let b = weil_height_digits(&alg, 30).unwrap().to_ball(200);
            assert!(a.sub(&b).abs_upper() < 1e-20, "D = {d}: {a} vs {b}");
        }
        assert_eq!(j_height(&Discriminant::new(-3).unwrap(), 30).unwrap().to_f64(), 0.0);
    }

    #[test]
    fn oversized_requests_are_refused() {
        let d = Discriminant::new(-199_999).unwrap();
        assert!(matches!(hilbert_class_poly(&d), Err(Error::InvalidInput(_))));
    }
}
