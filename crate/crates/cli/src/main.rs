mod args;
mod commands;
mod manifest;

use std::process::ExitCode;

use clap::Parser;

use duffjoint::config::{load_config, parse_config, reference_config_text, LoadedConfig};

use crate::args::Cli;
use crate::manifest::Outputs;

fn load(cli: &Cli) -> duffjoint::Result<LoadedConfig> {
    match &cli.common.config {
        Some(path) => load_config(path),
        None => parse_config(reference_config_text()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match load(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };

    let mut outputs = Outputs::new(&cli.common.out_dir);
    let (name, params) = match commands::run(&cli.command, &cfg, &mut outputs) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    match outputs.write(name, &cfg, &params) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: writing outputs: {e}");
            ExitCode::FAILURE
        }
    }
}
