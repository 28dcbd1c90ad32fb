//! `fisherlens` command-line front end.
//!
//! Exit codes: 0 success, 2 bad arguments, 3 numeric non-convergence,
//! 4 check failure (1 for I/O errors).

pub mod angle;
pub mod commands;
pub mod config;
pub mod output;
pub mod svg;

use std::path::Path;

pub use config::{Cli, Command, FigureId, RawConfig, RunConfig};

use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_CHECK: i32 = 4;

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::Domain { .. } | Error::InvalidGrid(_) | Error::GridTooNarrow { .. } => {
            EXIT_USAGE
        }
        Error::NoSignChange { .. } | Error::NonConvergence { .. } | Error::RejectionStall { .. } => {
            EXIT_NUMERIC
        }
        Error::TooFewSamples(_) => EXIT_USAGE,
        Error::Io { .. } => EXIT_IO,
    }
}

/// Runs a resolved configuration and returns the process exit code.
pub fn run(cfg: &RunConfig) -> Result<i32, Error> {
    let out = cfg.output_path.as_deref();
    match cfg.command {
        Command::Sweep => {
            commands::sweep_csv(cfg)?.write_to(out)?;
        }
        Command::Reproduce => {
            let fig = cfg.figure_id.expect("validated by RunConfig");
            let dir = out.unwrap_or(Path::new("."));
            for p in commands::write_figure(fig, dir, cfg.emit_svg)? {
                eprintln!("wrote {}", p.display());
            }
        }
        Command::Sleast => {
            commands::sleast_csv(cfg)?.write_to(out)?;
        }
        Command::OracleCheck => {
            let report = commands::oracle_check(cfg)?;
            if let (Some(path), Some(csv)) = (out, &report.csv) {
                csv.write_to(Some(path))?;
            }
            print!("{}", report.summary());
            if !report.passed() {
                return Ok(EXIT_CHECK);
            }
        }
        Command::Crb => {
            let rep = commands::crb_report(cfg)?;
            let csv = commands::crb_csv(cfg, &rep);
            let summary = commands::crb_summary(&rep);
            match out {
                Some(_) => {
                    csv.write_to(out)?;
                    print!("{summary}");
                }
                None => {
                    csv.write_to(None)?;
                    eprint!("{summary}");
                }
            }
        }
    }
    Ok(EXIT_OK)
}
