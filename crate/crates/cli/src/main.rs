use std::io::Read;
use std::panic;
use std::process::ExitCode;

use clap::Parser;
use fdca_cli::{run, Cli, Exit};

fn read_input(path: Option<&str>) -> std::io::Result<String> {
    match path {
        Some(p) => std::fs::read_to_string(p),
        None => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let input = match read_input(cli.input.as_deref()) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("fdca: cannot read input: {e}");
            return ExitCode::from(Exit::Invalid.code() as u8);
        }
    };
    // internal assertions on malformed input count as invalid input
    panic::set_hook(Box::new(|info| eprintln!("fdca: {info}")));
    let outcome = match panic::catch_unwind(|| run(&cli.command, &input)) {
        Ok(o) => o,
        Err(_) => return ExitCode::from(Exit::Invalid.code() as u8),
    };
    let text = serde_json::to_string_pretty(&outcome.report).expect("reports serialize") + "\n";
    if let Some(err) = outcome.report.get("error") {
        eprintln!("fdca: {}", err.as_str().unwrap_or("error"));
    }
    let written = match &cli.output {
        Some(p) => std::fs::write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("fdca: cannot write report: {e}");
        return ExitCode::from(Exit::Invalid.code() as u8);
    }
    ExitCode::from(outcome.exit.code() as u8)
}
