//! Command-line driver for stoplist retrieval experiments: index a TIPSTER
//! corpus, search TREC topics with TF*IDF, BM25 or KL, evaluate runs, and
//! compare techniques with Friedman and Wilcoxon tests.
//!
//! Run tags follow the technique codes `<MODEL>` and `<MODEL>_<LIST>`, e.g.
//! `BM25`, `KL_CS`. Exit status is 0 on success, 1 for usage errors and 2 for
//! data or parse errors.

pub mod args;
pub mod commands;
pub mod compare;
pub mod config;
pub mod error;
pub mod report;
pub mod runfile;
pub mod synth;
pub mod topics;

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;

pub use args::Cli;
pub use error::{CliError, Result};

/// Parses `args` and runs the command, writing normal output to `out`.
/// Returns the process exit status.
pub fn run<I, T, W>(args: I, out: &mut W) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    W: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => error::EXIT_USAGE,
            };
        }
    };
    init_logging(cli.verbose);
    match commands::execute(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Warnings by default, `-v` for progress, `-vv` for debug; `RUST_LOG` wins.
fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .try_init();
}
