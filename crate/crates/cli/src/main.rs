use std::process::ExitCode;

use clap::Parser;
use tubal_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            for line in &out.lines {
                println!("{line}");
            }
            if let Some(iters) = out.unconverged {
                eprintln!("warning: solver stopped after {iters} iterations without converging");
            }
            ExitCode::from(out.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
