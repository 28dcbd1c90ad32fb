//! Run configuration: built-in defaults, overridden by a `key = value`
//! file, overridden by command-line flags.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};

use super::angle::parse_angle_list;
use super::output::fmt_num;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Sweep,
    Reproduce,
    Sleast,
    OracleCheck,
    Crb,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Sweep => "sweep",
            Command::Reproduce => "reproduce",
            Command::Sleast => "sleast",
            Command::OracleCheck => "oracle-check",
            Command::Crb => "crb",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureId {
    Fig2a,
    Fig2b,
    Fig3a,
    Fig3b,
}

impl FigureId {
    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig2a => "fig2a",
            FigureId::Fig2b => "fig2b",
            FigureId::Fig3a => "fig3a",
            FigureId::Fig3b => "fig3b",
        }
    }

    fn parse(text: &str) -> Result<Self> {
        FigureId::from_str(text, true).map_err(|_| Error::Config(format!("unknown figure {text:?}")))
    }
}

/// Command-line interface.
#[derive(Debug, Parser)]
#[command(
    name = "fisherlens",
    version,
    about = "Fisher information of two entangled-partner point sources"
)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    #[arg(long)]
    pub sigma: Option<String>,
    /// Unbalanceness b/a (comma-separated list for sleast).
    #[arg(long)]
    pub r: Option<String>,
    /// Partner basis angle, e.g. `pi/6` (comma-separated list for sleast).
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    /// Relative phase, e.g. `0` or `pi/2` (comma-separated list for sleast).
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<String>,
    #[arg(long = "s-min")]
    pub s_min: Option<String>,
    #[arg(long = "s-max")]
    pub s_max: Option<String>,
    #[arg(long)]
    pub points: Option<String>,
    #[arg(long)]
    pub figure: Option<String>,
    #[arg(long = "with-oracle")]
    pub with_oracle: bool,
    #[arg(long)]
    pub seed: Option<String>,
    /// Output file (directory for `reproduce`); stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: bool,
    /// Repetitions per Monte-Carlo trial.
    #[arg(long)]
    pub samples: Option<String>,
    #[arg(long)]
    pub trials: Option<String>,
    /// True separation for `crb`.
    #[arg(long = "s-true")]
    pub s_true: Option<String>,
    /// Oracle grid points.
    #[arg(long = "grid-points")]
    pub grid_points: Option<String>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

const KEYS: [&str; 16] = [
    "sigma",
    "r",
    "alpha",
    "phi",
    "s_min",
    "s_max",
    "points",
    "figure",
    "with_oracle",
    "seed",
    "out",
    "svg",
    "samples",
    "trials",
    "s_true",
    "grid_points",
];

/// Unresolved settings from one source.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    values: Vec<(&'static str, String)>,
}

impl RawConfig {
    fn set(&mut self, key: &'static str, value: String) {
        self.values.retain(|(k, _)| *k != key);
        self.values.push((key, value));
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.values
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse_file_text(text: &str) -> Result<Self> {
        let mut raw = RawConfig::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
            let key = key.trim().replace('-', "_");
            let known = KEYS
                .iter()
                .find(|k| **k == key)
                .ok_or_else(|| Error::Config(format!("line {}: unknown key {key:?}", lineno + 1)))?;
            raw.set(known, value.trim().to_owned());
        }
        Ok(raw)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse_file_text(&text)
    }

    pub fn from_cli(cli: &Cli) -> Self {
        let mut raw = RawConfig::default();
        let opts: [(&'static str, &Option<String>); 12] = [
            ("sigma", &cli.sigma),
            ("r", &cli.r),
            ("alpha", &cli.alpha),
            ("phi", &cli.phi),
            ("s_min", &cli.s_min),
            ("s_max", &cli.s_max),
            ("points", &cli.points),
            ("figure", &cli.figure),
            ("seed", &cli.seed),
            ("samples", &cli.samples),
            ("trials", &cli.trials),
            ("s_true", &cli.s_true),
        ];
        for (k, v) in opts {
            if let Some(v) = v {
                raw.set(k, v.clone());
            }
        }
        if let Some(g) = &cli.grid_points {
            raw.set("grid_points", g.clone());
        }
        if let Some(out) = &cli.out {
            raw.set("out", out.display().to_string());
        }
        if cli.with_oracle {
            raw.set("with_oracle", "true".into());
        }
        if cli.svg {
            raw.set("svg", "true".into());
        }
        raw
    }

    /// `other` wins on every key it sets.
    pub fn overlay(mut self, other: &RawConfig) -> Self {
        for (k, v) in &other.values {
            self.set(k, v.clone());
        }
        self
    }
}

/// Fully resolved configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub sigma: f64,
    pub r: Vec<f64>,
    pub alpha: Vec<f64>,
    pub phi: Vec<f64>,
    pub s_min: f64,
    pub s_max: f64,
    pub points: usize,
    pub figure_id: Option<FigureId>,
    pub with_oracle: bool,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
    pub emit_svg: bool,
    pub samples: usize,
    pub trials: usize,
    pub s_true: f64,
    pub grid_points: usize,
}

fn real(raw: &RawConfig, key: &str, default: f64) -> Result<f64> {
    match raw.get(key) {
        None => Ok(default),
        Some(v) => v
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| Error::Config(format!("{key}: expected a number, got {v:?}"))),
    }
}

fn count<T: std::str::FromStr>(raw: &RawConfig, key: &str, default: T) -> Result<T> {
    match raw.get(key) {
        None => Ok(default),
        Some(v) => v
            .parse::<T>()
            .map_err(|_| Error::Config(format!("{key}: expected a nonnegative integer, got {v:?}"))),
    }
}

fn flag(raw: &RawConfig, key: &str) -> Result<bool> {
    match raw.get(key) {
        None | Some("false") => Ok(false),
        Some("true") => Ok(true),
        Some(v) => Err(Error::Config(format!("{key}: expected true or false, got {v:?}"))),
    }
}

fn angles(raw: &RawConfig, key: &str, default: &[f64]) -> Result<Vec<f64>> {
    match raw.get(key) {
        None => Ok(default.to_vec()),
        Some(v) => parse_angle_list(v),
    }
}

fn reals(raw: &RawConfig, key: &str, default: &[f64]) -> Result<Vec<f64>> {
    match raw.get(key) {
        None => Ok(default.to_vec()),
        Some(v) => v
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| Error::Config(format!("{key}: expected numbers, got {v:?}")))
            })
            .collect(),
    }
}

/// Default basis angles for the least-separation table.
pub const SLEAST_ALPHAS: [f64; 6] = [0.0, PI / 12.0, PI / 8.0, PI / 6.0, PI / 4.0, 3.0 * PI / 8.0];

impl RunConfig {
    pub fn resolve(command: Command, raw: &RawConfig) -> Result<Self> {
        let alpha_default: &[f64] = if command == Command::Sleast {
            &SLEAST_ALPHAS
        } else {
            &[PI / 6.0]
        };
        let cfg = RunConfig {
            command,
            sigma: real(raw, "sigma", 1.0)?,
            r: reals(raw, "r", &[1.0])?,
            alpha: angles(raw, "alpha", alpha_default)?,
            phi: angles(raw, "phi", &[0.0])?,
            s_min: real(raw, "s_min", 0.0)?,
            s_max: real(raw, "s_max", 5.0)?,
            points: count(raw, "points", 501usize)?,
            figure_id: raw.get("figure").map(FigureId::parse).transpose()?,
            with_oracle: flag(raw, "with_oracle")?,
            seed: count(raw, "seed", 42u64)?,
            output_path: raw.get("out").map(PathBuf::from),
            emit_svg: flag(raw, "svg")?,
            samples: count(raw, "samples", 1000usize)?,
            trials: count(raw, "trials", 500usize)?,
            s_true: real(raw, "s_true", 1.0)?,
            grid_points: count(raw, "grid_points", crate::oracle::DEFAULT_POINTS)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_cli(cli: &Cli) -> Result<Self> {
        let base = match &cli.config {
            Some(path) => RawConfig::from_file(path)?,
            None => RawConfig::default(),
        };
        let merged = base.overlay(&RawConfig::from_cli(cli));
        Self::resolve(cli.command, &merged)
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.sigma > 0.0) {
            return bad(format!("sigma must be positive, got {}", self.sigma));
        }
        if self.r.iter().any(|&r| r < 0.0) {
            return bad("r must be nonnegative".into());
        }
        if !(self.s_min >= 0.0) {
            return bad(format!("s_min must be nonnegative, got {}", self.s_min));
        }
        if !(self.s_max > self.s_min) {
            return bad(format!(
                "s_max ({}) must exceed s_min ({})",
                self.s_max, self.s_min
            ));
        }
        if self.points < 2 {
            return bad(format!("points must be at least 2, got {}", self.points));
        }
        if self.command != Command::Sleast
            && (self.r.len() != 1 || self.alpha.len() != 1 || self.phi.len() != 1)
        {
            return bad(format!(
                "{} takes a single value for r, alpha and phi",
                self.command.name()
            ));
        }
        if self.command == Command::Reproduce && self.figure_id.is_none() {
            return bad("reproduce needs --figure fig2a|fig2b|fig3a|fig3b".into());
        }
        if self.command == Command::Crb && (self.trials < 2 || self.samples < 1) {
            return bad("crb needs trials >= 2 and samples >= 1".into());
        }
        if !(self.s_true >= 0.0) {
            return bad("s_true must be nonnegative".into());
        }
        Ok(())
    }

    /// Canonical one-line serialization used in CSV provenance headers.
    /// The output path is excluded so that the bytes do not depend on it.
    pub fn canonical(&self) -> String {
        let list = |v: &[f64]| v.iter().copied().map(fmt_num).collect::<Vec<_>>().join(";");
        let mut parts = vec![
            format!("command={}", self.command.name()),
            format!("sigma={}", fmt_num(self.sigma)),
            format!("r={}", list(&self.r)),
            format!("alpha={}", list(&self.alpha)),
            format!("phi={}", list(&self.phi)),
        ];
        match self.command {
            Command::Sweep => {
                parts.push(format!("s_min={}", fmt_num(self.s_min)));
                parts.push(format!("s_max={}", fmt_num(self.s_max)));
                parts.push(format!("points={}", self.points));
                parts.push(format!("with_oracle={}", self.with_oracle));
            }
            Command::Crb => {
                parts.push(format!("s_true={}", fmt_num(self.s_true)));
                parts.push(format!("samples={}", self.samples));
                parts.push(format!("trials={}", self.trials));
                parts.push(format!("seed={}", self.seed));
            }
            Command::OracleCheck => parts.push(format!("grid_points={}", self.grid_points)),
            Command::Reproduce | Command::Sleast => {}
        }
        parts.join(" ")
    }
}
