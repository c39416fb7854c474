mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{Format, Overrides, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "heightlab", version, about = "Heights, Northcott towers and CM height experiments")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// Working precision in decimal digits (at least 16).
    #[arg(long, global = true)]
    precision: Option<u32>,
    /// Worker threads for scans.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for report files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    format: Option<Format>,
    /// key=value file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Height of "rad: p/q ^ k/d * ..." or "alg: <minimal polynomial>".
    Height {
        expr: String,
        #[arg(long, allow_hyphen_values = true)]
        gamma: Option<f64>,
    },
    #[command(subcommand)]
    Tower(TowerCmd),
    #[command(subcommand)]
    Cm(CmCmd),
    /// Projective height of a point such as "[1 : 2^1/2 : -3/4]".
    PointHeight {
        point: String,
        #[arg(long, allow_hyphen_values = true)]
        gamma: Option<f64>,
    },
    /// Checks the weighted height chain for a projective point.
    LemmaCheck {
        point: String,
        #[arg(long, allow_hyphen_values = true)]
        gamma: f64,
    },
}

#[derive(Subcommand, Debug)]
pub enum TowerCmd {
    /// Builds a tower and prints its JSON description.
    Gen {
        #[arg(long, allow_hyphen_values = true)]
        gamma: f64,
        #[arg(long = "c")]
        c: f64,
        #[arg(long)]
        levels: usize,
        /// Comma-separated degrees, one per level.
        #[arg(long, value_delimiter = ',')]
        schedule: Vec<u32>,
    },
    /// Certifies every level of a tower JSON file.
    Certify {
        file: PathBuf,
        /// Monomials checked per level.
        #[arg(long, default_value_t = 500)]
        budget: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum CmCmd {
    /// Records for every fundamental discriminant up to --dmax.
    Scan {
        #[arg(long)]
        dmax: u64,
    },
    /// Faltings height of one discriminant, with its local terms.
    Faltings {
        #[arg(long, allow_hyphen_values = true)]
        d: i64,
        #[arg(long, allow_hyphen_values = true)]
        offset: Option<f64>,
    },
    /// Theta null points and the theta height estimate of one discriminant.
    Theta {
        #[arg(long, allow_hyphen_values = true)]
        d: i64,
    },
    /// Theta/Faltings residual scan with a fitted constant.
    VerifyTf {
        #[arg(long)]
        dmax: u64,
    },
    /// Decay envelope of Faltings height over class number.
    VerifyDecay {
        #[arg(long)]
        dmax: u64,
    },
    /// Class-number-one discriminants with Faltings height at most C′.
    Finiteness {
        #[arg(long)]
        cprime: f64,
        #[arg(long)]
        dmax: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let o = Overrides {
        precision: cli.global.precision,
        workers: cli.global.workers,
        seed: cli.global.seed,
        out: cli.global.out.clone(),
        format: cli.global.format,
    };
    let cfg = match RunConfig::resolve(cli.global.config.as_deref(), &o) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Height { expr, gamma } => commands::height::run(&cfg, &expr, gamma),
        Command::Tower(t) => commands::tower::run(&cfg, t),
        Command::Cm(c) => commands::cm::run(&cfg, c),
        Command::PointHeight { point, gamma } => commands::point::point_height(&cfg, &point, gamma),
        Command::LemmaCheck { point, gamma } => commands::point::lemma_check(&cfg, &point, gamma),
    };
    match result {
        Ok(commands::Outcome::Passed) => ExitCode::SUCCESS,
        Ok(commands::Outcome::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
