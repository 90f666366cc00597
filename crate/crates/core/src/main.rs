use std::process::ExitCode;

use clap::Parser;

use cauchy_gabor::cli::{run, Cli};

fn main() -> ExitCode {
    ExitCode::from(run(Cli::parse()) as u8)
}
