use heightlab::heights::{degree_weight, weil_height_digits, AlgebraicNumber, HeightValue, Irreducibility};
use heightlab::numeric::{digits_to_bits, IntPoly};
use heightlab::radical::{radical_height, RadicalScalar};

use super::{parse_error, CliError, CliResult, Outcome};
use crate::config::RunConfig;

/// Splits `tag: body`, returning the body's offset in the original string.
fn split_tag(expr: &str) -> Result<(&str, &str, usize), CliError> {
    let (tag, _) = expr.split_once(':').ok_or_else(|| CliError::Usage("expected 'rad: ...' or 'alg: ...'".into()))?;
    let off = tag.len() + 1;
    Ok((tag.trim(), &expr[off..], off))
}

pub fn evaluate(cfg: &RunConfig, expr: &str, gamma: Option<f64>) -> Result<(HeightValue, Vec<String>), CliError> {
    let (tag, body, off) = split_tag(expr)?;
    let prec = digits_to_bits(cfg.precision_digits);
    let mut notes = Vec::new();
    let check_gamma = |g: f64| {
        if g.is_finite() {
            Ok(g)
        } else {
            Err(CliError::Usage("gamma must be finite".into()))
        }
    };
    match tag {
        "rad" => {
            let a = RadicalScalar::parse(body).map_err(|e| parse_error(expr, e, off))?;
            let h = HeightValue::Exact(radical_height(&a));
            Ok(match gamma {
                None => (h, notes),
                Some(g) => (h.weighted(&degree_weight(&a.degree(), check_gamma(g)?, prec), prec), notes),
            })
        }
        "alg" => {
            let p = IntPoly::parse(body).map_err(|e| parse_error(expr, e, off))?;
            let a = AlgebraicNumber::from_minpoly(p)?;
            if a.irreducibility() == Irreducibility::Trusted {
                notes.push("warning: irreducibility of the polynomial is assumed, not proven".into());
            }
            let h = weil_height_digits(&a, cfg.precision_digits)?;
            Ok(match gamma {
                None => (h, notes),
                Some(g) => {
                    let d = heightlab::Integer::from(a.degree());
                    (h.weighted(&degree_weight(&d, check_gamma(g)?, prec), prec), notes)
                }
            })
        }
        other => Err(CliError::Usage(format!("unknown expression kind '{other}' (expected rad or alg)"))),
    }
}

pub fn run(cfg: &RunConfig, expr: &str, gamma: Option<f64>) -> CliResult {
    let (h, notes) = evaluate(cfg, expr, gamma)?;
    for n in notes {
        eprintln!("{n}");
    }
    println!("{}", h.display_with_value());
    Ok(Outcome::Passed)
}
