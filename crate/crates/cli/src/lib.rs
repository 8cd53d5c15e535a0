//! The `plausible` command-line tool.
//!
//! Exit codes: `0` when the question is decided positively, `1` when it is
//! decided negatively (the report then carries a checked certificate), `2` on
//! any input or usage error.

pub mod args;
pub mod verbs;

use std::ffi::OsString;
use std::fs;
use std::io::Read;
use std::path::Path;

use clap::error::ErrorKind;
use clap::Parser;

use plausible::agreement::AgreementError;
use plausible::doc::{parse_order_doc, DocError};
use plausible::order::OrderError;
use plausible::par::Execution;
use plausible::testspace::TestSpaceError;

use args::{Cli, Command};
use verbs::Report;

pub const DECIDED_POSITIVE: u8 = 0;
pub const DECIDED_NEGATIVE: u8 = 1;
pub const INPUT_ERROR: u8 = 2;

#[derive(Debug)]
pub enum CliError {
    Doc(DocError),
    Message(String),
}

impl CliError {
    pub fn new(msg: impl Into<String>) -> Self {
        CliError::Message(msg.into())
    }

    /// A certificate the engine produced did not survive re-checking.
    pub fn uncertified(msg: impl std::fmt::Display) -> Self {
        CliError::Message(format!("internal error: certificate rejected: {msg}"))
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Doc(e) => e.fmt(f),
            CliError::Message(m) => f.write_str(m),
        }
    }
}

impl From<DocError> for CliError {
    fn from(e: DocError) -> Self {
        CliError::Doc(e)
    }
}

impl From<TestSpaceError> for CliError {
    fn from(e: TestSpaceError) -> Self {
        CliError::Doc(e.into())
    }
}

impl From<OrderError> for CliError {
    fn from(e: OrderError) -> Self {
        CliError::Doc(e.into())
    }
}

impl From<AgreementError> for CliError {
    fn from(e: AgreementError) -> Self {
        CliError::Message(e.to_string())
    }
}

/// What a run printed and how it ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

impl Output {
    fn error(msg: impl std::fmt::Display) -> Self {
        let line = msg
            .to_string()
            .lines()
            .next()
            .unwrap_or_default()
            .to_string();
        Output {
            code: INPUT_ERROR,
            stdout: String::new(),
            stderr: format!("plausible: {line}\n"),
        }
    }
}

fn read_input(path: &Path, stdin: &mut dyn Read) -> Result<String, CliError> {
    let mut text = String::new();
    if path.as_os_str() == "-" {
        stdin
            .read_to_string(&mut text)
            .map_err(|e| CliError::new(format!("reading standard input: {e}")))?;
    } else {
        text = fs::read_to_string(path)
            .map_err(|e| CliError::new(format!("reading {}: {e}", path.display())))?;
    }
    Ok(text)
}

fn dispatch(cli: &Cli, stdin: &mut dyn Read) -> Result<Report, CliError> {
    let execution = Execution::default();
    let load = |input: &args::InputArgs, stdin: &mut dyn Read| -> Result<_, CliError> {
        Ok(parse_order_doc(&read_input(&input.input, stdin)?)?)
    };
    match &cli.command {
        Command::Validate(input) => verbs::validate(&load(input, stdin)?, input),
        Command::Events(input) => verbs::events(&load(input, stdin)?, input),
        Command::Check {
            input,
            pair_cap,
            oracle,
        } => verbs::check(&load(input, stdin)?, input, *pair_cap, oracle, execution),
        Command::Agree {
            input,
            method,
            oracle,
        } => verbs::agree(&load(input, stdin)?, input, *method, oracle, execution),
        Command::AlmostAgree { input, oracle } => {
            verbs::almost_agree(&load(input, stdin)?, input, oracle, execution)
        }
        Command::Witness {
            input,
            certificate,
            index,
        } => {
            let doc = load(input, stdin)?;
            let cert = read_input(certificate, stdin)?;
            verbs::witness(&doc, input, &cert, *index)
        }
        Command::Generate { fixture } => verbs::generate(fixture),
        Command::Oracle { input, bounds } => {
            verbs::oracle(&load(input, stdin)?, input, bounds, execution)
        }
    }
}

#[cfg(feature = "parallel")]
fn with_threads<R: Send>(
    threads: Option<usize>,
    f: impl FnOnce() -> R + Send,
) -> Result<R, CliError> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(CliError::new("--threads must be at least 1")),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::new(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn with_threads<R: Send>(
    threads: Option<usize>,
    f: impl FnOnce() -> R + Send,
) -> Result<R, CliError> {
    match threads {
        Some(0) => Err(CliError::new("--threads must be at least 1")),
        _ => Ok(f()),
    }
}

/// Parses `argv` (program name first) and runs one verb.
pub fn run<I, T>(argv: I, stdin: &mut (dyn Read + Send)) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            return Output {
                code: DECIDED_POSITIVE,
                stdout: e.to_string(),
                stderr: String::new(),
            }
        }
        Err(e) => {
            let text = e.to_string();
            let line = text
                .lines()
                .find(|l| l.starts_with("error:"))
                .unwrap_or("error: invalid arguments");
            return Output::error(line.trim_start_matches("error: "));
        }
    };
    let result = with_threads(cli.threads, || dispatch(&cli, stdin)).and_then(|r| r);
    match result {
        Ok(report) => Output {
            code: report.code,
            stdout: if cli.json { report.json } else { report.human },
            stderr: String::new(),
        },
        Err(e) => Output::error(e),
    }
}
