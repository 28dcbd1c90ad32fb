//! CSV formatting shared by all subcommands.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Rounds to 12 significant digits and prints the shortest representation
/// of the rounded value.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".to_owned();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if rounded.abs() < 1e-6 {
        format!("{rounded:e}")
    } else {
        format!("{rounded}")
    }
}

/// In-memory CSV document with a provenance comment line.
#[derive(Debug, Clone, PartialEq)]
pub struct Csv {
    text: String,
    columns: usize,
}

impl Csv {
    pub fn new(config: &str, header: &[&str]) -> Self {
        let mut text = format!("# fisherlens {VERSION} config={config}\n");
        text.push_str(&header.join(","));
        text.push('\n');
        Self {
            text,
            columns: header.len(),
        }
    }

    /// Extra comment line; must be added before any row.
    pub fn comment(&mut self, line: &str) {
        let _ = writeln!(self.text, "# {line}");
    }

    /// Row of already-formatted cells; empty strings leave a cell blank.
    pub fn row<S: AsRef<str>>(&mut self, cells: &[S]) {
        debug_assert_eq!(cells.len(), self.columns);
        let line: Vec<&str> = cells.iter().map(AsRef::as_ref).collect();
        self.text.push_str(&line.join(","));
        self.text.push('\n');
    }

    pub fn numbers(&mut self, values: &[f64]) {
        let cells: Vec<String> = values.iter().copied().map(fmt_num).collect();
        self.row(&cells);
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn write_to(&self, path: Option<&Path>) -> Result<()> {
        write_text(path, &self.text)
    }
}

/// Writes to `path`, or to stdout when `path` is `None`.
pub fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| Error::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|source| Error::Io {
                path: "<stdout>".into(),
                source,
            }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_num(0.25), "0.25");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(std::f64::consts::PI / 6.0), "0.523598775598");
        assert_eq!(fmt_num(1.5233271467757372), "1.52332714678");
        assert_eq!(fmt_num(-2.5e-17), "-2.5e-17");
        assert_eq!(fmt_num(3.5e-6), "0.0000035");
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(-0.0), "0");
    }

    #[test]
    fn csv_layout() {
        let mut csv = Csv::new("a=1", &["s", "f"]);
        csv.numbers(&[0.0, 0.25]);
        csv.row(&["1", ""]);
        assert_eq!(
            csv.as_str(),
            format!("# fisherlens {VERSION} config=a=1\ns,f\n0,0.25\n1,\n")
        );
    }
}
