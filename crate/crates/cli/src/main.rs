use std::io::Write as _;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;

use d2dsim::app::{render, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("d2dsim: error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn execute(cli: &Cli) -> Result<()> {
    let rendered = render(cli)?;
    match &rendered.out {
        Some(path) => {
            std::fs::write(path, &rendered.csv).with_context(|| format!("cannot write {}", path.display()))?;
            eprintln!("wrote {} rows to {}", rendered.rows, path.display());
        }
        None => std::io::stdout().lock().write_all(rendered.csv.as_bytes())?,
    }
    Ok(())
}
