use heightlab::heights::HeightValue;
use heightlab::numeric::digits_to_bits;
use heightlab::radical::{
    lemma_chain_check, projective_height, projective_height_l2, weighted_projective_height, ChainVerdict, RadicalPoint,
};

use super::{parse_error, CliError, CliResult, Outcome};
use crate::config::RunConfig;

fn parse_point(src: &str) -> Result<RadicalPoint, CliError> {
    RadicalPoint::parse(src).map_err(|e| parse_error(src, e, 0))
}

pub fn point_height(cfg: &RunConfig, src: &str, gamma: Option<f64>) -> CliResult {
    let pt = parse_point(src)?;
    let prec = digits_to_bits(cfg.precision_digits);
    println!("point: {pt}");
    println!("h: {}", HeightValue::Exact(projective_height(&pt)).display_with_value());
    println!("h_2: ≈ {:.10}", projective_height_l2(&pt, prec).to_f64());
    if let Some(g) = gamma {
        if !g.is_finite() {
            return Err(CliError::Usage("gamma must be finite".into()));
        }
        println!("h_gamma: {}", weighted_projective_height(&pt, g, prec).display_with_value());
    }
    Ok(Outcome::Passed)
}

pub fn lemma_check(_cfg: &RunConfig, src: &str, gamma: f64) -> CliResult {
    let pt = parse_point(src)?;
    let n = pt.dim();
    let rep = lemma_chain_check(&pt, gamma, n)?;
    println!("point: {pt}");
    println!("lhs:    {}", rep.lhs.display_with_value());
    println!("middle: {}", rep.middle.display_with_value());
    println!("rhs:    {}", rep.rhs.display_with_value());
    let idx: Vec<String> = rep.index_set.iter().map(|i| i.to_string()).collect();
    println!("index set: {{{}}}", idx.join(", "));
    let verdict = match rep.verdict {
        ChainVerdict::Holds => "holds",
        ChainVerdict::Degenerate => "degenerate",
        ChainVerdict::Violated => "violated",
        ChainVerdict::Unresolved => "unresolved",
    };
    println!("verdict: {verdict}");
    match rep.verdict {
        ChainVerdict::Holds | ChainVerdict::Degenerate => Ok(Outcome::Passed),
        ChainVerdict::Violated => Ok(Outcome::Failed),
        ChainVerdict::Unresolved => Err(CliError::Precision("chain comparison unresolved at the precision cap".into())),
    }
}
