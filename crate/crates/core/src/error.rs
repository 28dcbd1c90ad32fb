use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} = {value} is outside the domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("{method} did not converge after {iterations} iterations")]
    NonConvergence { method: &'static str, iterations: usize },
    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid too narrow: boundary intensity is {ratio:e} of peak")]
    GridTooNarrow { ratio: f64 },
    #[error("rejection sampler stalled: acceptance {acceptance:e} after {attempts} attempts")]
    RejectionStall { acceptance: f64, attempts: u64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
