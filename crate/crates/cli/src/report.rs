//! Report rows and their CSV, JSON and plot-data renderings.

use std::io::Write;
use std::path::{Path, PathBuf};

use heightlab::numeric::BigFloat;
use serde::{Deserialize, Serialize};

use crate::config::{Format, RunConfig};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// One output value; `radius` is empty for exact quantities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Field {
    pub name: String,
    pub value: String,
    pub radius: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub experiment: String,
    pub input: String,
    pub values: Vec<Field>,
    pub verdict: Option<String>,
    pub precision: u32,
    pub version: String,
    pub errors: String,
}

/// 15 significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.14e}")
}

pub fn fmt_rad(r: f64) -> String {
    format!("{r:.3e}")
}

pub fn ball_field(name: &str, b: &BigFloat) -> Field {
    Field { name: name.into(), value: fmt_num(b.to_f64()), radius: fmt_rad(b.rad()) }
}

pub fn exact_field(name: &str, v: impl ToString) -> Field {
    Field { name: name.into(), value: v.to_string(), radius: String::new() }
}

pub fn missing_field(name: &str) -> Field {
    Field { name: name.into(), value: String::new(), radius: String::new() }
}

/// A table of rows sharing one column layout.
#[derive(Clone, Debug)]
pub struct Report {
    pub experiment: String,
    pub input_name: String,
    pub columns: Vec<String>,
    pub rows: Vec<ReportRow>,
    pub precision: u32,
}

impl Report {
    pub fn new(experiment: &str, input_name: &str, columns: &[&str], precision: u32) -> Self {
        Report {
            experiment: experiment.into(),
            input_name: input_name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            precision,
        }
    }

    pub fn push(&mut self, input: impl ToString, values: Vec<Field>, verdict: Option<&str>, errors: &str) {
        debug_assert_eq!(values.len(), self.columns.len());
        self.rows.push(ReportRow {
            experiment: self.experiment.clone(),
            input: input.to_string(),
            values,
            verdict: verdict.map(str::to_string),
            precision: self.precision,
            version: VERSION.into(),
            errors: errors.into(),
        });
    }

    fn has_verdicts(&self) -> bool {
        self.rows.iter().any(|r| r.verdict.is_some())
    }

    pub fn to_csv(&self) -> String {
        let mut head = vec![self.input_name.clone()];
        head.extend(self.columns.iter().cloned());
        head.push("error_radius".into());
        if self.has_verdicts() {
            head.push("verdict".into());
        }
        head.extend(["precision".into(), "version".into(), "errors".into()]);
        let mut out = head.join(",");
        out.push('\n');
        for r in &self.rows {
            let mut cells = vec![csv_escape(&r.input)];
            cells.extend(r.values.iter().map(|f| csv_escape(&f.value)));
            let worst = r.values.iter().filter_map(|f| f.radius.parse::<f64>().ok()).fold(0.0, f64::max);
            cells.push(fmt_rad(worst));
            if self.has_verdicts() {
                cells.push(r.verdict.clone().unwrap_or_default());
            }
            cells.push(r.precision.to_string());
            cells.push(r.version.clone());
            cells.push(csv_escape(&r.errors));
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.rows).expect("rows serialize");
        s.push('\n');
        s
    }

    /// Writes the report in the configured format and returns its path.
    pub fn write(&self, cfg: &RunConfig, params: &[(&str, String)]) -> std::io::Result<PathBuf> {
        let path = cfg.report_path(&self.experiment, params, cfg.format.extension());
        let body = match cfg.format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        };
        write_file(&path, &body)?;
        Ok(path)
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn write_file(path: &Path, body: &str) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(body.as_bytes())
}

/// Plot-ready whitespace-separated columns `X Y Y_radius`.
pub fn write_plot(
    cfg: &RunConfig,
    name: &str,
    params: &[(&str, String)],
    header: [&str; 2],
    points: impl Iterator<Item = (f64, BigFloat)>,
) -> std::io::Result<PathBuf> {
    let path = cfg.report_path(name, params, "dat");
    let mut body = format!("# {} {} radius\n", header[0], header[1]);
    for (x, y) in points {
        body.push_str(&format!("{x} {} {}\n", fmt_num(y.to_f64()), fmt_rad(y.rad())));
    }
    write_file(&path, &body)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new("demo", "D", &["a", "b"], 64);
        r.push(
            -3,
            vec![exact_field("a", 1), ball_field("b", &BigFloat::exact_f64(128, 0.5).add_error(1e-40))],
            None,
            "",
        );
        r.push(-4, vec![exact_field("a", 2), missing_field("b")], None, "precision failure: x, y");
        r
    }

    #[test]
    fn csv_layout() {
        let csv = sample().to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "D,a,b,error_radius,precision,version,errors");
        let first = lines.next().unwrap();
        assert!(first.starts_with("-3,1,5.00000000000000e-1,1.000e-40,64,"));
        assert!(lines.next().unwrap().ends_with("\"precision failure: x, y\""));
    }

    #[test]
    fn rows_round_trip_through_json() {
        let r = sample();
        let back: Vec<ReportRow> = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r.rows);
    }
}
