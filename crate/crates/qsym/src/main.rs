use std::process::ExitCode;

use clap::Parser;
use qsym::cli::{run, Cli};

fn main() -> ExitCode {
    ExitCode::from(run(&Cli::parse()))
}
