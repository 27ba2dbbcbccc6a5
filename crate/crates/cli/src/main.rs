use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use sepspec_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&report.json).unwrap());
            } else {
                println!("{}", report.text);
            }
            ExitCode::from(report.code)
        }
        Err(e) => {
            if cli.json {
                println!("{}", json!({ "error": e.message, "exit_code": e.code }));
            }
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
