use std::io;
use std::process::ExitCode;

use clap::Parser;
use sdeqr_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli, &mut io::stdout().lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sdeqr: error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
