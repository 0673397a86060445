mod cache;
mod commands;
mod config;

use std::process::ExitCode;

use clap::Parser;

use crate::config::{Cli, Failure};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = config::RunConfig::from_cli(cli).and_then(|cfg| commands::run(&cfg));
    match result {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure { category, error, output }) => {
            if let Some(out) = output {
                print!("{out}");
            }
            eprintln!("error[{}]: {error:#}", category.name());
            ExitCode::from(category.code())
        }
    }
}
