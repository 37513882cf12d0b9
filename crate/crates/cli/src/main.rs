//! `gmforms`: scan Gaussian Mersenne norms, solve `x^2 + d*y^2`, audit the
//! mod-8 statements and inspect class groups.
//!
//! Exit codes: 0 success, 1 legitimate negative (no representation, or a
//! `--strict` failure), 2 usage error, 3 a statement was refuted.

mod commands;
mod config;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use config::Config;

#[derive(Debug, Parser)]
#[command(
    name = "gmforms",
    version,
    about = "Gaussian Mersenne norms and x^2 + d*y^2 audits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Emit::Table)]
    emit: Emit,

    /// Write the report here instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Worker threads for parallel scans (default: config file, then all cores).
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,

    /// Configuration file (`key = value` lines: p_cap, workers).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Json,
    Table,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List exponents p whose norm G_p is a probable prime.
    Scan {
        #[arg(long, default_value_t = 3)]
        pmin: u64,
        #[arg(long)]
        pmax: u64,
    },
    /// Solve G_p = x^2 + d*y^2.
    Represent {
        /// Exponent p; the target is G_p.
        #[arg(long)]
        p: u64,
        #[arg(long, allow_negative_numbers = true)]
        d: i64,
    },
    /// Audit 8 | y over every Gaussian Mersenne prime up to --pmax.
    Verify {
        #[arg(long)]
        pmax: u64,
        /// Comma-separated list; values other than 7 need --generalized.
        #[arg(long, value_delimiter = ',', default_value = "7")]
        d: Vec<u64>,
        /// Accept any square-free d = 7 (mod 24).
        #[arg(long)]
        generalized: bool,
        /// Also fail (exit 1) on d = 7 records that should qualify but are not confirmed.
        #[arg(long)]
        strict: bool,
    },
    /// Reduced forms and structure of the class group of discriminant D < 0.
    Classgroup {
        #[arg(allow_negative_numbers = true)]
        discriminant: i64,
    },
    /// Residues of G_p mod 8, 16, 32 and 7 against the predicted values.
    Congruences {
        #[arg(long)]
        p: u64,
    },
}

pub struct Done {
    pub json: String,
    pub table: String,
    pub code: u8,
}

/// `Err` carries a usage message (exit 2).
fn run(cli: Cli) -> Result<Done, String> {
    let cfg = Config::load(cli.config.as_deref())?;
    if let Some(src) = &cfg.source {
        eprintln!("gmforms: config {}", src.display());
    }
    let workers = cli.workers.or(cfg.workers).unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| format!("cannot start {workers} workers: {e}"))?;
    pool.install(|| match cli.command {
        Command::Scan { pmin, pmax } => commands::scan(&cfg, pmin, pmax),
        Command::Represent { p, d } => commands::represent(&cfg, p, d),
        Command::Verify {
            pmax,
            d,
            generalized,
            strict,
        } => commands::verify(&cfg, pmax, &d, generalized, strict),
        Command::Classgroup { discriminant } => commands::classgroup(discriminant),
        Command::Congruences { p } => commands::congruences(&cfg, p),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let emit = cli.emit;
    let out = cli.out.clone();
    let done = match run(cli) {
        Ok(done) => done,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let text = match emit {
        Emit::Json => &done.json,
        Emit::Table => &done.table,
    };
    let written = match &out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| e.to_string()),
    };
    if let Err(msg) = written {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    ExitCode::from(done.code)
}
