use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use dspars::cli::{error_report, render_json, run, Cli};
use dspars::Error;

fn emit(cli: &Cli, text: &str) -> Result<(), Error> {
    match &cli.out {
        Some(path) => fs::write(path, text).map_err(|e| Error::Io {
            path: path.clone(),
            source: e,
        }),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| Error::Io {
            path: "<stdout>".into(),
            source: e,
        }),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let err = Error::Usage(e.render().to_string().trim_end().to_string());
            print!("{}", render_json(&error_report(&err)));
            return ExitCode::from(err.exit_code() as u8);
        }
        Err(e) => e.exit(),
    };
    let result = run(&cli).and_then(|report| emit(&cli, &report.render()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            print!("{}", render_json(&error_report(&err)));
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
