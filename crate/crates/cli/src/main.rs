//! `backdoor`: bounds, detector risks, the toy attack and the random-subset
//! probe from the command line.
//!
//! Exit codes: 0 on success, 2 for invalid input, 3 when an exact
//! computation exceeds its enumeration cap, 1 for anything else (I/O).

mod args;
mod commands;
mod plot;
mod record;
mod svg;

use std::process::ExitCode;

use args::{BoundsCommand, Cli, Command};
use clap::Parser;
use record::OutputRecord;

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<backdoor_core::Error>() {
            return match e {
                backdoor_core::Error::Resource { .. } => 3,
                _ => 2,
            };
        }
        if cause.downcast_ref::<serde_json::Error>().is_some() {
            return 2;
        }
    }
    1
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    let (name, outcome) = match &cli.command {
        Command::Bounds(BoundsCommand::Table2(a)) => ("bounds table2", commands::bounds_table2(a)?),
        Command::Risk(a) => ("risk", commands::risk(a)?),
        Command::Toy(a) => ("toy", commands::toy(a)?),
        Command::Probe(a) => ("probe", commands::probe(a)?),
        Command::Run(a) => ("run", commands::run_config(&a.config)?),
    };
    print!("{}", outcome.stdout);
    if let Some(path) = &cli.out {
        let echo: Vec<String> = std::env::args().collect();
        let record = OutputRecord {
            command: echo.join(" "),
            config_hash: outcome.config_hash,
            timestamp: chrono::Utc::now().to_rfc3339(),
            payload: outcome.payload,
        };
        if !record::append(path, &record)? {
            eprintln!(
                "{name}: a record with config hash {} is already in {}; not appended",
                record.config_hash,
                path.display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
