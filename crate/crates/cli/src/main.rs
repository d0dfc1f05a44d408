use std::io;
use std::process::ExitCode;

use clap::Parser;

use botgate_cli::{run, Cli};

/// Exit status for malformed command lines.
const USAGE: u8 = 64;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let stdout = io::stdout();
    match run(cli, &mut stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("botgate: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
