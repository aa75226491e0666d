use std::process::ExitCode;

use clap::Parser;
use scatmaxp::cli::{run, Cli};

fn main() -> ExitCode {
    run(Cli::parse())
}
