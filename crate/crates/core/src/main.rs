use std::process::ExitCode;

use clap::Parser;
use fisherlens::cli::{exit_code, run, Cli, RunConfig};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let code = match RunConfig::from_cli(&cli).and_then(|cfg| run(&cfg)) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("fisherlens: {err}");
            exit_code(&err)
        }
    };
    ExitCode::from(code as u8)
}
