use heightlab::numeric::digits_to_bits;
use heightlab::towers::{build_tower, certify_level, SampleVerdict, TowerSpec};

use super::{CliError, CliResult, Outcome};
use crate::config::RunConfig;
use crate::report::{ball_field, exact_field, fmt_num, write_file, Report};
use crate::TowerCmd;

pub fn run(cfg: &RunConfig, cmd: TowerCmd) -> CliResult {
    match cmd {
        TowerCmd::Gen { gamma, c, levels, schedule } => {
            let t = build_tower(gamma, c, levels, &schedule, cfg.seed)?;
            let json = serde_json::to_string_pretty(&t).expect("tower serializes") + "\n";
            let sched: Vec<String> = schedule.iter().map(|d| d.to_string()).collect();
            let params = [
                ("gamma", gamma.to_string()),
                ("C", c.to_string()),
                ("levels", levels.to_string()),
                ("schedule", sched.join(",")),
            ];
            let path = cfg.report_path("tower", &params, "json");
            write_file(&path, &json)?;
            print!("{json}");
            eprintln!("wrote {}", path.display());
            Ok(Outcome::Passed)
        }
        TowerCmd::Certify { file, budget } => {
            let text = std::fs::read_to_string(&file)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", file.display())))?;
            let t: TowerSpec = serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("{}: not a tower description: {e}", file.display())))?;
            certify(cfg, &t, budget, &text)
        }
    }
}

fn certify(cfg: &RunConfig, t: &TowerSpec, budget: usize, source: &str) -> CliResult {
    if budget == 0 {
        return Err(CliError::Usage("budget must be at least 1".into()));
    }
    let prec = digits_to_bits(cfg.precision_digits);
    let mut report = Report::new(
        "tower-certificate",
        "sample",
        &["level", "exponents", "element", "h_gamma", "bound"],
        cfg.precision_digits,
    );
    let mut ok = true;
    for i in 1..=t.levels.len() {
        let cert = certify_level(t, i, budget)?;
        let l = &t.levels[i - 1];
        println!(
            "level {i}: p = {}, q = {}, d = {}: {} samples, {} failures, {} undecided, bound {}, generator h_gamma {}",
            l.p,
            l.q,
            l.d,
            cert.samples.len(),
            cert.failures(),
            cert.undecided(),
            fmt_num(cert.remark_bound.to_f64()),
            fmt_num(cert.generator_hgamma.to_f64())
        );
        ok &= cert.passed();
        for (k, s) in cert.samples.iter().enumerate() {
            let exps: Vec<String> = s.exponents.iter().map(|e| e.to_string()).collect();
            let verdict = match s.verdict {
                SampleVerdict::Pass => "pass",
                SampleVerdict::Fail => "fail",
                SampleVerdict::Undecided => "undecided",
            };
            report.push(
                format!("{i}.{}", k + 1),
                vec![
                    exact_field("level", i),
                    exact_field("exponents", exps.join(" ")),
                    exact_field("element", &s.element),
                    ball_field("h_gamma", &s.hgamma.to_ball(prec)),
                    ball_field("bound", &cert.remark_bound),
                ],
                Some(verdict),
                "",
            );
        }
    }
    let params = [("tower", source.trim().to_string()), ("budget", budget.to_string())];
    let path = report.write(cfg, &params)?;
    println!("certificate: {}", if ok { "pass" } else { "fail" });
    eprintln!("wrote {}", path.display());
    Ok(Outcome::from_bool(ok))
}
