use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = tnkit::Cli::parse();
    match tnkit::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tnkit: {e:#}");
            ExitCode::from(tnkit::exit_code(&e))
        }
    }
}
