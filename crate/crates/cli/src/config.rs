//! Run configuration: defaults, then a key=value file, then flags.

use std::fmt;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

pub const MIN_PRECISION: u32 = 16;
pub const MAX_PRECISION: u32 = 300;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format '{other}' (expected csv or json)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub precision_digits: u32,
    pub worker_count: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            precision_digits: heightlab::numeric::DEFAULT_DIGITS,
            worker_count: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
            seed: 0,
            output_dir: PathBuf::from("heightlab-out"),
            format: Format::Csv,
        }
    }
}

/// A configuration problem, reported as a usage error.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Values given on the command line; `None` means "not given".
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub precision: Option<u32>,
    pub workers: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

fn parse_value<T: std::str::FromStr>(key: &str, v: &str, line: usize) -> Result<T, ConfigError> {
    v.parse().map_err(|_| ConfigError(format!("config line {line}: invalid value '{v}' for {key}")))
}

/// Applies a `key = value` file (blank lines and `#` comments allowed).
pub fn apply_file(cfg: &mut RunConfig, text: &str) -> Result<(), ConfigError> {
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) =
            line.split_once('=').ok_or_else(|| ConfigError(format!("config line {}: expected key=value", i + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        match k {
            "precision" => cfg.precision_digits = parse_value(k, v, i + 1)?,
            "workers" => cfg.worker_count = parse_value(k, v, i + 1)?,
            "seed" => cfg.seed = parse_value(k, v, i + 1)?,
            "out" => cfg.output_dir = PathBuf::from(v),
            "format" => cfg.format = v.parse().map_err(|e| ConfigError(format!("config line {}: {e}", i + 1)))?,
            _ => return Err(ConfigError(format!("config line {}: unknown key '{k}'", i + 1))),
        }
    }
    Ok(())
}

impl RunConfig {
    pub fn resolve(file: Option<&Path>, o: &Overrides) -> Result<RunConfig, ConfigError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
            apply_file(&mut cfg, &text)?;
        }
        if let Some(p) = o.precision {
            cfg.precision_digits = p;
        }
        if let Some(w) = o.workers {
            cfg.worker_count = w;
        }
        if let Some(s) = o.seed {
            cfg.seed = s;
        }
        if let Some(d) = &o.out {
            cfg.output_dir = d.clone();
        }
        if let Some(f) = o.format {
            cfg.format = f;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(MIN_PRECISION..=MAX_PRECISION).contains(&self.precision_digits) {
            return Err(ConfigError(format!(
                "precision must be between {MIN_PRECISION} and {MAX_PRECISION} digits, got {}",
                self.precision_digits
            )));
        }
        if self.worker_count == 0 {
            return Err(ConfigError("workers must be at least 1".into()));
        }
        if self.output_dir.as_os_str().is_empty() {
            return Err(ConfigError("output directory must not be empty".into()));
        }
        Ok(())
    }

    /// Canonical text of everything that can change a report's contents.
    /// Worker count and output directory are excluded on purpose.
    pub fn canonical(&self, experiment: &str, params: &[(&str, String)]) -> String {
        let mut items: Vec<(String, String)> = params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
        items.push(("experiment".into(), experiment.into()));
        items.push(("format".into(), self.format.extension().into()));
        items.push(("precision".into(), self.precision_digits.to_string()));
        items.push(("seed".into(), self.seed.to_string()));
        items.push(("version".into(), env!("CARGO_PKG_VERSION").into()));
        items.sort();
        items.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    /// `<experiment>-<hash>.<ext>` inside the output directory.
    pub fn report_path(&self, experiment: &str, params: &[(&str, String)], ext: &str) -> PathBuf {
        let digest = Sha256::digest(self.canonical(experiment, params).as_bytes());
        let tag = hex::encode(&digest[..6]);
        self.output_dir.join(format!("{experiment}-{tag}.{ext}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "# comment\nprecision = 40\nworkers=3\nformat=json\n").unwrap();
        let o = Overrides { precision: Some(50), ..Default::default() };
        let cfg = RunConfig::resolve(Some(&path), &o).unwrap();
        assert_eq!(cfg.precision_digits, 50);
        assert_eq!(cfg.worker_count, 3);
        assert_eq!(cfg.format, Format::Json);
    }

    #[test]
    fn validation() {
        let bad = Overrides { precision: Some(8), ..Default::default() };
        assert!(RunConfig::resolve(None, &bad).is_err());
        let bad = Overrides { workers: Some(0), ..Default::default() };
        assert!(RunConfig::resolve(None, &bad).is_err());
        let mut cfg = RunConfig::default();
        assert!(apply_file(&mut cfg, "colour = blue").is_err());
        assert!(apply_file(&mut cfg, "precision").is_err());
        assert!(apply_file(&mut cfg, "format = xml").is_err());
    }

    #[test]
    fn hash_ignores_workers_and_out() {
        let a = RunConfig { worker_count: 1, ..Default::default() };
        let b = RunConfig { worker_count: 8, output_dir: "elsewhere".into(), ..Default::default() };
        let p = [("dmax", "200".to_string())];
        assert_eq!(a.report_path("cm-scan", &p, "csv").file_name(), b.report_path("cm-scan", &p, "csv").file_name());
        let c = RunConfig { precision_digits: 30, ..Default::default() };
        assert_ne!(a.report_path("cm-scan", &p, "csv").file_name(), c.report_path("cm-scan", &p, "csv").file_name());
    }
}
