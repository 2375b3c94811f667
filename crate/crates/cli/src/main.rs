//! Command-line front end: every subcommand wires fixture data through
//! the library and emits a deterministic report in text, JSON, or CSV.
//!
//! Exit codes are part of the interface:
//!   0 verified / produced, 1 verified false, 2 input error,
//!   3 insufficient data for a verdict, 4 empty data set.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use gapcert::fixtures::FixtureSet;
use gapcert::Error;

mod commands;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundMode {
    /// Check exactly the indices up to --bound.
    Explicit,
    /// Derive the bound that upgrades agreement to a proof.
    Sturm,
}

#[derive(Parser)]
#[command(
    name = "gapcert",
    version,
    about = "Fourier coefficients of curve newforms, congruence certification, interval scans"
)]
struct Cli {
    /// Report format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Write the report to this file instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Directory with curves.json, forms/, regression.json (default: bundled)
    #[arg(long, global = true)]
    fixtures: Option<PathBuf>,

    /// Worker threads for parallel stages (default: all cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Trace-of-Frobenius table for a bundled curve
    Ap {
        #[arg(long)]
        curve: String,
        /// Include primes p <= bound
        #[arg(long, default_value_t = 100)]
        bound: u64,
        /// Point counter: enumerate, legendre, bsgs, auto
        #[arg(long, default_value = "auto")]
        counter: String,
    },
    /// q-expansion of a curve's newform or a stored form
    Qexp {
        #[arg(long, conflicts_with = "form", required_unless_present = "form")]
        curve: Option<String>,
        #[arg(long)]
        form: Option<String>,
        /// Trusted coefficient bound (stored forms default to their own)
        #[arg(long)]
        bound: Option<u64>,
        #[arg(long, default_value = "auto")]
        counter: String,
    },
    /// Index bound that turns coefficient agreement into identity
    Sturm {
        #[arg(long)]
        weight1: u32,
        #[arg(long)]
        weight2: u32,
        #[arg(long)]
        level: u64,
    },
    /// Coefficient-wise congruence mod 2^m between two forms
    Congr {
        /// Form label, curve label, or a q-expansion JSON file
        #[arg(long)]
        form1: String,
        #[arg(long)]
        form2: String,
        #[arg(long, default_value_t = 2)]
        modulus_exp: u32,
        #[arg(long, value_enum, default_value_t = BoundMode::Explicit)]
        check: BoundMode,
        /// Required when --check explicit
        #[arg(long, required_if_eq("check", "explicit"))]
        bound: Option<u64>,
    },
    /// 2-adic closeness: weight clause, alpha clause, prime indices
    Close {
        #[arg(long)]
        form1: String,
        #[arg(long)]
        form2: String,
        #[arg(long, default_value_t = 2)]
        modulus_exp: u32,
        #[arg(long, default_value_t = 1)]
        s: u32,
        /// Check prime indices p <= this bound
        #[arg(long)]
        prime_bound: u64,
    },
    /// Short-interval scan for qualifying integers
    Scan {
        /// Integer class: s2s, hypothesis, hypothesis-strict
        #[arg(long, default_value = "s2s")]
        kind: String,
        #[arg(long)]
        level: u64,
        #[arg(long)]
        xmin: u64,
        #[arg(long)]
        xmax: u64,
        /// Interval constant (decimal or p/q); omit with --estimate
        #[arg(long, required_unless_present = "estimate")]
        c: Option<String>,
        #[arg(long, default_value = "1/4")]
        delta: String,
        /// Sweep for the minimal c instead of checking a fixed one
        #[arg(long, conflicts_with = "c")]
        estimate: bool,
    },
    /// Zero-run statistics over computed coefficients
    Gaps {
        #[arg(long)]
        curve: String,
        #[arg(long, default_value_t = 1)]
        nmin: u64,
        #[arg(long)]
        nmax: u64,
        /// Coefficient bound (defaults to nmax)
        #[arg(long)]
        bound: Option<u64>,
        /// after-nonzero or literal
        #[arg(long, default_value = "after-nonzero")]
        convention: String,
        /// Re-check each index against a certificate: weight2, hypothesis
        #[arg(long)]
        certify: Option<String>,
        #[arg(long, default_value = "auto")]
        counter: String,
    },
    /// Sample the 4-torsion family y^2 = x^3 - (2t-1)x^2 + t^2 x
    EtFamily {
        /// Sample t = 1..=count
        #[arg(long, default_value_t = 50)]
        count: i64,
    },
    /// Run every bundled verification check
    VerifyPaper,
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::PastTrustedBound { .. } | Error::MissingPrime { .. } | Error::TruncatedRun { .. } => {
            3
        }
        Error::EmptyData(_) => 4,
        _ => 2,
    }
}

fn write_out(path: Option<&std::path::Path>, body: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, body),
        None => std::io::stdout().write_all(body.as_bytes()),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            eprintln!("error: worker pool: {e}");
            std::process::exit(2);
        }
    }
    let set = match &cli.fixtures {
        Some(dir) => FixtureSet::from_dir(dir),
        None => FixtureSet::builtin(),
    };
    let set = match set {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: fixtures: {e}");
            std::process::exit(2);
        }
    };
    let code = match commands::run(&cli.command, &set, cli.format) {
        Ok((code, body)) => match write_out(cli.output.as_deref(), &body) {
            Ok(()) => code,
            Err(e) => {
                eprintln!("error: {e}");
                2
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    };
    std::process::exit(code);
}
