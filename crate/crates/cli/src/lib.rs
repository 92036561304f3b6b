//! Batch front-end for `ineq-forge-core`: tabulations, verifications,
//! falsifications, identity checks and remainder probes, written as CSV or
//! JSON reports.

pub mod cli;
pub mod commands;
pub mod config;
pub mod parallel;
pub mod report;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

use cli::{Cli, Command};

/// Exit status of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    /// Every verdict is the expected one.
    Ok = 0,
    /// Falsified (or flagged) where the inequality was expected to hold.
    Unexpected = 1,
    Inconclusive = 2,
    Usage = 3,
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Io(String),
}

/// Parse `args` (including the program name), run the command and write its
/// report. Returns the process exit code.
pub fn run<I: IntoIterator<Item = OsString>>(args: I) -> i32 {
    let args = match config::expand(args.into_iter().collect()) {
        Ok(a) => a,
        Err(m) => {
            eprintln!("error: {m}");
            return Status::Usage as i32;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { Status::Usage as i32 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(status) => status as i32,
        Err(Failure::Usage(m)) | Err(Failure::Io(m)) => {
            eprintln!("error: {m}");
            Status::Usage as i32
        }
    }
}

fn execute(command: &Command) -> Result<Status, Failure> {
    let threads = parallel::thread_cap().map_err(Failure::Usage)?;
    let (out, path) = match command {
        Command::Weights(a) => (commands::weights(a)?, &a.out.output),
        Command::Constants(a) => (commands::constants(a)?, &a.out.output),
        Command::Verify(a) => (commands::verify(a, threads)?, &a.out.output),
        Command::Falsify(a) => (commands::falsify(a, threads)?, &a.out.output),
        Command::Identity(a) => (commands::identity(a)?, &a.out.output),
        Command::Probe(a) => (commands::probe(a)?, &a.out.output),
    };
    match path {
        Some(p) => std::fs::write(p, &out.body).map_err(|e| Failure::Io(format!("cannot write {}: {e}", p.display())))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(out.body.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Io(format!("cannot write report: {e}")))?;
        }
    }
    eprintln!("{}", out.summary);
    Ok(out.status)
}
