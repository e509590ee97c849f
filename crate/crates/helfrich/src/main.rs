use std::process::ExitCode;

use clap::Parser;

use helfrich::cli::{merge_spec, run, Cli};

fn main() -> ExitCode {
    let result = merge_spec(std::env::args_os().collect()).and_then(|args| run(Cli::parse_from(args)));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
