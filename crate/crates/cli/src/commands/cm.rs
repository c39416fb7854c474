use heightlab::cm::modular::{faltings_local_term_of_form, theta_log_ratio, theta_null_of_form};
use heightlab::cm::{
    faltings_height_cm, finiteness_demo, reduced_forms, scan, theta_height_estimate, verify_decay,
    verify_theta_faltings, Discriminant, FaltingsOffset, RecordOptions,
};
use heightlab::numeric::BigFloat;

use super::{with_pool, CliError, CliResult, Outcome};
use crate::config::RunConfig;
use crate::report::{ball_field, exact_field, fmt_num, missing_field, write_plot, Report};
use crate::CmCmd;

/// Largest `|D|` accepted by the scans.
pub const MAX_DMAX: u64 = 1_000_000;

fn check_dmax(dmax: u64) -> Result<(), CliError> {
    if !(3..=MAX_DMAX).contains(&dmax) {
        return Err(CliError::Usage(format!("--dmax must lie in 3..={MAX_DMAX}")));
    }
    Ok(())
}

fn report_written(path: &std::path::Path) {
    eprintln!("wrote {}", path.display());
}

pub fn run(cfg: &RunConfig, cmd: CmCmd) -> CliResult {
    let digits = cfg.precision_digits;
    match cmd {
        CmCmd::Scan { dmax } => {
            check_dmax(dmax)?;
            let opts = RecordOptions { digits, ..Default::default() };
            let records = with_pool(cfg, || scan(dmax, &opts))?;
            let mut rep = Report::new(
                "cm-scan",
                "D",
                &["class_number", "j_height", "faltings_height", "theta_height_est", "residual", "ratio"],
                digits,
            );
            let mut failures = 0;
            for (d, r) in &records {
                match r {
                    Ok(rec) => {
                        let opt = |name: &str, b: &Option<BigFloat>| match b {
                            Some(b) => ball_field(name, b),
                            None => missing_field(name),
                        };
                        rep.push(
                            d,
                            vec![
                                exact_field("class_number", rec.class_number),
                                ball_field("j_height", &rec.j_height.to_ball(64)),
                                ball_field("faltings_height", &rec.faltings_height),
                                opt("theta_height_est", &rec.theta_height_est),
                                opt("residual", &rec.residual),
                                ball_field("ratio", &rec.decay_ratio),
                            ],
                            None,
                            "",
                        );
                    }
                    Err(e) => {
                        failures += 1;
                        let h = reduced_forms(d).len();
                        let mut v = vec![exact_field("class_number", h)];
                        v.extend(rep.columns[1..].iter().map(|c| missing_field(c)));
                        rep.push(d, v, None, &e.to_string());
                    }
                }
            }
            let params = [("dmax", dmax.to_string())];
            report_written(&rep.write(cfg, &params)?);
            let plot = records
                .iter()
                .filter_map(|(d, r)| r.as_ref().ok().map(|rec| (d.abs() as f64, rec.faltings_height.clone())));
            report_written(&write_plot(cfg, "cm-scan-faltings", &params, ["absD", "faltings_height"], plot)?);
            println!("scanned {} fundamental discriminants, {failures} failures", records.len());
            if failures > 0 {
                return Err(CliError::Precision(format!("{failures} discriminants failed; see the errors column")));
            }
            Ok(Outcome::Passed)
        }
        CmCmd::Faltings { d, offset } => {
            let disc = Discriminant::new(d)?;
            let off = offset.map(FaltingsOffset::Custom).unwrap_or_default();
            let mut rep = Report::new("cm-faltings", "form", &["a", "b", "c", "local_term"], digits);
            for f in reduced_forms(&disc) {
                let s = faltings_local_term_of_form(&f, digits)?;
                rep.push(
                    format!("({} {} {})", f.a, f.b, f.c),
                    vec![
                        exact_field("a", f.a),
                        exact_field("b", f.b),
                        exact_field("c", f.c),
                        ball_field("local_term", &s),
                    ],
                    None,
                    "",
                );
            }
            let hf = faltings_height_cm(&disc, digits, off)?;
            let params = [("D", d.to_string()), ("offset", format!("{off:?}"))];
            report_written(&rep.write(cfg, &params)?);
            println!("D = {d}, class number {}", rep.rows.len());
            println!("faltings height: {} ± {}", fmt_num(hf.to_f64()), crate::report::fmt_rad(hf.rad()));
            Ok(Outcome::Passed)
        }
        CmCmd::Theta { d } => {
            let disc = Discriminant::new(d)?;
            let cols = ["theta0", "theta1", "theta2", "theta3", "log_ratio"];
            let mut rep = Report::new("cm-theta", "form", &cols, digits);
            for f in reduced_forms(&disc) {
                let th = theta_null_of_form(&f, digits)?;
                let r = theta_log_ratio(&th)?;
                let mut v: Vec<_> = th
                    .iter()
                    .zip(cols)
                    .map(|(t, name)| crate::report::Field {
                        name: name.into(),
                        value: format!("{}{:+.14e}i", fmt_num(t.re().to_f64()), t.im().to_f64()),
                        radius: crate::report::fmt_rad(t.rad()),
                    })
                    .collect();
                v.push(ball_field("log_ratio", &r));
                rep.push(format!("({} {} {})", f.a, f.b, f.c), v, None, "");
            }
            let est = theta_height_estimate(&disc, digits)?;
            let params = [("D", d.to_string())];
            report_written(&rep.write(cfg, &params)?);
            println!("D = {d}: theta height estimate (archimedean, reduced-form average) {}", fmt_num(est.to_f64()));
            Ok(Outcome::Passed)
        }
        CmCmd::VerifyTf { dmax } => {
            check_dmax(dmax)?;
            let tf = with_pool(cfg, || verify_theta_faltings(dmax, digits))?;
            let mut rep = Report::new(
                "cm-verify-tf",
                "D",
                &["faltings_height", "theta_height_est", "residual", "scaled"],
                digits,
            );
            for r in &tf.rows {
                rep.push(
                    r.discriminant,
                    vec![
                        ball_field("faltings_height", &r.faltings),
                        ball_field("theta_height_est", &r.theta),
                        ball_field("residual", &r.residual),
                        ball_field("scaled", &r.ratio),
                    ],
                    Some(if r.stable { "stable" } else { "unstable" }),
                    "",
                );
            }
            let params = [("dmax", dmax.to_string())];
            report_written(&rep.write(cfg, &params)?);
            let plot = tf.rows.iter().map(|r| (r.discriminant.unsigned_abs() as f64, r.residual.clone()));
            report_written(&write_plot(cfg, "cm-verify-tf-residual", &params, ["absD", "residual"], plot)?);
            for (d, e) in &tf.failures {
                eprintln!("D = {d}: {e}");
            }
            println!("rows: {}, failures: {}", tf.rows.len(), tf.failures.len());
            println!("fitted c: {}", fmt_num(tf.fitted_c));
            println!("precision stable: {}", tf.all_stable);
            Ok(Outcome::from_bool(tf.all_stable && tf.failures.is_empty() && tf.fitted_c.is_finite()))
        }
        CmCmd::VerifyDecay { dmax } => {
            check_dmax(dmax)?;
            let rep_data = with_pool(cfg, || verify_decay(dmax, digits))?;
            let mut rep =
                Report::new("cm-verify-decay", "D", &["class_number", "faltings_height", "ratio", "envelope"], digits);
            for r in &rep_data.rows {
                rep.push(
                    r.discriminant,
                    vec![
                        exact_field("class_number", r.class_number),
                        ball_field("faltings_height", &r.faltings),
                        ball_field("ratio", &r.ratio),
                        ball_field("envelope", &r.envelope),
                    ],
                    None,
                    "",
                );
            }
            let params = [("dmax", dmax.to_string())];
            report_written(&rep.write(cfg, &params)?);
            let env = rep_data.rows.iter().map(|r| (r.discriminant.unsigned_abs() as f64, r.envelope.clone()));
            report_written(&write_plot(cfg, "cm-verify-decay-envelope", &params, ["X", "env"], env)?);
            for (d, e) in &rep_data.failures {
                eprintln!("D = {d}: {e}");
            }
            let show = |b: &Option<BigFloat>| b.as_ref().map(|b| fmt_num(b.to_f64())).unwrap_or_else(|| "n/a".into());
            println!("rows: {}, failures: {}", rep_data.rows.len(), rep_data.failures.len());
            println!("env(100): {}", show(&rep_data.env_start));
            if let Some(last) = rep_data.rows.last() {
                println!("env({}): {}", last.discriminant.unsigned_abs(), show(&rep_data.env_end));
            }
            println!("env nonincreasing: {}", rep_data.nonincreasing);
            println!("strict drop: {}", rep_data.strict_drop);
            Ok(Outcome::from_bool(rep_data.nonincreasing && rep_data.strict_drop && rep_data.failures.is_empty()))
        }
        CmCmd::Finiteness { cprime, dmax } => {
            check_dmax(dmax)?;
            let census = finiteness_demo(cprime, dmax, digits)?;
            let mut rep = Report::new("cm-finiteness", "D", &["ratio"], digits);
            let members: Vec<i64> = census.members.iter().map(|r| r.discriminant).collect();
            let undecided: Vec<i64> = census.undecided.iter().map(|r| r.discriminant).collect();
            for r in census.members.iter().chain(&census.undecided) {
                let v = if members.contains(&r.discriminant) { "member" } else { "undecided" };
                rep.push(r.discriminant, vec![ball_field("ratio", &r.ratio)], Some(v), "");
            }
            rep.rows.sort_by_key(|r| r.input.parse::<i64>().map(|d| -d).unwrap_or(0));
            let params = [("cprime", cprime.to_string()), ("dmax", dmax.to_string())];
            report_written(&rep.write(cfg, &params)?);
            let list = |v: &[i64]| v.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(", ");
            println!("class number one: {{{}}}", list(&census.class_number_one));
            println!("census (ratio <= {cprime}): {{{}}}", list(&members));
            if !undecided.is_empty() {
                println!("undecided: {{{}}}", list(&undecided));
            }
            println!("cardinality: {}", census.cardinality());
            if !census.failures.is_empty() {
                return Err(CliError::Precision(format!("{} discriminants failed", census.failures.len())));
            }
            Ok(Outcome::Passed)
        }
    }
}
