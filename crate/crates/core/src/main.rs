use std::io::{self, Read, Write};
use std::process::ExitCode;

use clap::Parser;

use mcflow::cli::{run, RunConfig, EXIT_USAGE};

fn read_input(path: &str) -> io::Result<String> {
    if path == "-" {
        let mut text = String::new();
        io::stdin().read_to_string(&mut text)?;
        Ok(text)
    } else {
        std::fs::read_to_string(path)
    }
}

fn main() -> ExitCode {
    let config = RunConfig::parse();
    let path = config.command.input_path().to_string();
    let text = match read_input(&path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {path}: {e}");
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    let outcome = run(&config, &text);
    let _ = io::stdout().write_all(outcome.stdout.as_bytes());
    let _ = io::stderr().write_all(outcome.stderr.as_bytes());
    ExitCode::from(outcome.code as u8)
}
