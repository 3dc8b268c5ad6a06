use std::io::Write;
use std::process::ExitCode;

use scatlen_cli::{parse_config, run, CliError};

fn main() -> ExitCode {
    match execute() {
        Ok(code) => ExitCode::from(code as u8),
        Err(CliError::Clap(e)) => {
            let _ = e.print();
            ExitCode::from(if e.use_stderr() { 1 } else { 0 })
        }
        Err(e) => {
            eprintln!("scatlen: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute() -> Result<i32, CliError> {
    let cfg = parse_config(std::env::args_os())?;
    let output = run(&cfg)?;
    for w in &output.warnings {
        eprintln!("warning: {w}");
    }
    match &cfg.out {
        Some(path) => std::fs::write(path, &output.text)?,
        None => std::io::stdout().write_all(output.text.as_bytes())?,
    }
    Ok(output.exit_code)
}
