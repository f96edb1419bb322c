//! `hadamard`: command-line front end.
//!
//! Prints exactly one JSON document on stdout and a short human summary on
//! stderr.

mod config;
mod run;

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use config::{Cli, UsageError};

pub const EXIT_USAGE: u8 = 64;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.render().to_string();
            return usage_exit(&UsageError::new(rendered.trim_end()));
        }
    };
    match run::run(cli.command) {
        Ok(out) => {
            emit(&out.json);
            eprintln!("{}", out.summary);
            ExitCode::from(out.exit)
        }
        Err(e) => usage_exit(&e),
    }
}

fn emit(json: &str) {
    let mut stdout = std::io::stdout().lock();
    let _ = writeln!(stdout, "{json}");
    let _ = stdout.flush();
}

fn usage_exit(e: &UsageError) -> ExitCode {
    emit(&run::usage_json(e));
    eprintln!("usage error: {e}");
    ExitCode::from(EXIT_USAGE)
}
