//! File helpers shared by the artifact writers.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};

/// Seventeen significant digits: enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Json {
        path: path.to_path_buf(),
        source: e,
    })?;
    write_text(path, &(text + "\n"))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Json {
        path: path.to_path_buf(),
        source: e,
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}

/// CSV text with an optional leading `# config_digest=…` comment line.
#[derive(Clone, Debug, Default)]
pub struct CsvText {
    text: String,
}

impl CsvText {
    pub fn new(header: &str, digest: Option<&str>) -> Self {
        let mut text = String::new();
        if let Some(d) = digest {
            text.push_str(&format!("# config_digest={d}\n"));
        }
        text.push_str(header);
        text.push('\n');
        CsvText { text }
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut first = true;
        for f in fields {
            if !first {
                self.text.push(',');
            }
            self.text.push_str(f.as_ref());
            first = false;
        }
        self.text.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_text(path, &self.text)
    }
}

/// Parsed CSV: header fields, numeric rows, and the digest comment if any.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvTable {
    pub digest: Option<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn parse(text: &str) -> Result<Self> {
        let mut digest = None;
        let mut header = None;
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(c) = line.strip_prefix('#') {
                if let Some(d) = c.trim().strip_prefix("config_digest=") {
                    digest = Some(d.to_string());
                }
                continue;
            }
            if header.is_none() {
                header = Some(line.split(',').map(|s| s.trim().to_string()).collect::<Vec<_>>());
                continue;
            }
            let row = line
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::invalid(format!("csv line {}", lineno + 1), e.to_string()))?;
            rows.push(row);
        }
        Ok(CsvTable {
            digest,
            header: header.ok_or_else(|| Error::UnknownSchema(String::new()))?,
            rows,
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_roundtrip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02e23] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn csv_roundtrip() {
        let mut c = CsvText::new("a,b", Some("abc"));
        c.row([fmt_f64(0.1), fmt_f64(2.0)]);
        let t = CsvTable::parse(c.as_str()).unwrap();
        assert_eq!(t.digest.as_deref(), Some("abc"));
        assert_eq!(t.header, vec!["a", "b"]);
        assert_eq!(t.column("b").unwrap(), vec![2.0]);
    }
}
