//! Report writers. Reports are assembled in memory and written once.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, CliResult};

/// Shortest round-trip decimal, switching to exponent form outside
/// `[1e-4, 1e7)`.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e7).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// CSV table with a header row.
pub struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new(header: &[&str]) -> CliResult<Self> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(header).map_err(csv_error)?;
        Ok(Self { writer })
    }

    pub fn row<I, S>(&mut self, fields: I) -> CliResult<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).map_err(csv_error)
    }

    pub fn into_bytes(self) -> CliResult<Vec<u8>> {
        self.writer.into_inner().map_err(|e| CliError::Output(e.to_string()))
    }
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Output(e.to_string())
}

pub fn json_bytes<T: Serialize>(value: &T) -> CliResult<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Output(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Writes to `path`, or to stdout when absent.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| CliError::io(p, e)),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(bytes).and_then(|_| out.flush()).map_err(|e| CliError::io(PathBuf::from("<stdout>"), e))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    /// Explicit choice, else the output extension, else CSV.
    pub fn resolve(explicit: Option<Format>, out: Option<&Path>) -> Format {
        explicit.unwrap_or_else(|| match out.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(num(0.0), "0");
        assert_eq!(num(1.5), "1.5");
        assert_eq!(num(1e-12), "1e-12");
        assert_eq!(num(-2.5e9), "-2.5e9");
        assert_eq!(num(3.256461062679751), "3.256461062679751");
    }

    #[test]
    fn table_has_header() {
        let mut t = Table::new(&["a", "b"]).unwrap();
        t.row(["1", "2"]).unwrap();
        assert_eq!(String::from_utf8(t.into_bytes().unwrap()).unwrap(), "a,b\n1,2\n");
    }

    #[test]
    fn format_from_extension() {
        assert_eq!(Format::resolve(None, Some(Path::new("g.JSON"))), Format::Json);
        assert_eq!(Format::resolve(None, Some(Path::new("g.csv"))), Format::Csv);
        assert_eq!(Format::resolve(Some(Format::Json), None), Format::Json);
    }
}
