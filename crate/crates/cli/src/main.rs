// Copyright 2026 The ifm-cnot Developers
// SPDX-License-Identifier: Apache-2.0

use std::process::ExitCode;

use clap::Parser;
use ifm_cli::args::{Cli, Sub};
use ifm_cli::config;
use ifm_cli::experiment::{read_text, replay, run_experiment, write_outputs};
use ifm_cli::CliResult;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ifm-cnot: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(sub: &Sub) -> CliResult<()> {
    if let Sub::Replay { file, out } = sub {
        let stored = read_text(file)?;
        let mut result = replay(&stored)?;
        if let Some(path) = out {
            result.config.output.path = Some(path.clone());
            write_outputs(&result.output, &result.config)?;
        }
        if !result.identical {
            return Err(ifm_cli::CliError::ReplayMismatch(format!(
                "{} differs from its re-run",
                file.display()
            )));
        }
        eprintln!("replay of {}: identical", file.display());
        return Ok(());
    }
    let (command, args) = sub.experiment().expect("experiment subcommand");
    let file_text = args.config.as_deref().map(read_text).transpose()?;
    let cfg = config::resolve(args.to_value()?, file_text.as_deref())?;
    let output = run_experiment(&cfg, command)?;
    for path in write_outputs(&output, &cfg)? {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}
