//! Command-line front end: reads a system file, dispatches to the library
//! and renders text, JSON or CSV.
//!
//! Exit codes: 0 when every check passes, 1 when a verification fails,
//! 2 for usage errors (bad flags, unreadable or invalid system files).

mod args;
mod commands;

use std::ffi::OsString;
use std::io::Write;
use std::path::Path;

use clap::error::ErrorKind;
use clap::Parser;

pub use args::{Cli, Command, Format};

/// Output of one command.
#[derive(Debug, Clone)]
pub struct Report {
    pub text: String,
    pub json: serde_json::Value,
    pub csv: Option<String>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    Usage(String),
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Style {
    pub color: bool,
}

impl Style {
    pub fn verdict(self, ok: bool) -> &'static str {
        match (ok, self.color) {
            (true, false) => "PASS",
            (false, false) => "FAIL",
            (true, true) => "\x1b[32mPASS\x1b[0m",
            (false, true) => "\x1b[31mFAIL\x1b[0m",
        }
    }
}

/// Whether to colour output: `SUSYODE_COLOR=0|1`, otherwise `default`.
pub fn color_from_env(default: bool) -> bool {
    match std::env::var("SUSYODE_COLOR").as_deref() {
        Ok("0") => false,
        Ok("1") => true,
        _ => default,
    }
}

fn strip_ansi(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c == '\x1b' {
            for d in chars.by_ref() {
                if d == 'm' {
                    break;
                }
            }
        } else {
            out.push(c);
        }
    }
    out
}

fn write_artifacts(dir: &Path, name: &str, report: &Report) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(format!("{name}.txt")), strip_ansi(&report.text))?;
    std::fs::write(dir.join(format!("{name}.json")), format!("{:#}\n", report.json))?;
    if let Some(csv) = &report.csv {
        std::fs::write(dir.join(format!("{name}.csv")), csv)?;
    }
    Ok(())
}

/// Run the command line `args` (program name first) and return the exit code.
pub fn run<I, T>(args: I, color: bool, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let shown = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{shown}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{shown}");
                    2
                }
            };
        }
    };
    let result = commands::execute(&cli, Style { color }).and_then(|report| {
        let body = match cli.format {
            Format::Text => report.text.clone(),
            Format::Structured => format!("{:#}\n", report.json),
            Format::Csv => report
                .csv
                .clone()
                .ok_or_else(|| CliError::Usage(format!("`{}` has no CSV output", cli.command.name())))?,
        };
        if let Some(dir) = &cli.out {
            write_artifacts(dir, cli.command.name(), &report)
                .map_err(|e| CliError::Usage(format!("cannot write to {}: {e}", dir.display())))?;
        }
        Ok((body, report.pass))
    });
    match result {
        Ok((body, pass)) => {
            let _ = stdout.write_all(body.as_bytes());
            if pass {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let (CliError::Usage(m) | CliError::Failure(m)) = &e;
            let _ = writeln!(stderr, "error: {m}");
            e.exit_code()
        }
    }
}
