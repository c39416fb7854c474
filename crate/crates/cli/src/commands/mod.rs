pub mod cm;
pub mod height;
pub mod point;
pub mod tower;

use std::fmt;

use crate::config::RunConfig;

/// Whether the command's checks held.
#[derive(Debug, PartialEq, Eq)]
pub enum Outcome {
    Passed,
    Failed,
}

impl Outcome {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Outcome::Passed
        } else {
            Outcome::Failed
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Precision(String),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Precision(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Precision(m) => f.write_str(m),
            CliError::Io(e) => write!(f, "i/o: {e}"),
        }
    }
}

impl From<heightlab::Error> for CliError {
    fn from(e: heightlab::Error) -> Self {
        match e {
            heightlab::Error::Precision(_) => CliError::Precision(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

pub type CliResult = Result<Outcome, CliError>;

/// Runs `f` on a pool of the configured size.
pub fn with_pool<T: Send>(cfg: &RunConfig, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.worker_count)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {} workers: {e}", cfg.worker_count)))?;
    Ok(pool.install(f))
}

/// Prints a parse error with a caret under the offending position.
pub fn parse_error(src: &str, e: heightlab::Error, offset: usize) -> CliError {
    match e {
        heightlab::Error::Parse { pos, msg } => {
            let at = pos + offset;
            let full = format!("parse error at position {at}: {msg}\n  {src}\n  {}^", " ".repeat(at));
            CliError::Usage(full)
        }
        other => other.into(),
    }
}
