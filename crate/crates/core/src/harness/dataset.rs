//! Line-oriented dataset files: one `complex, ground truth` pair per line.

use std::fs;
use std::path::Path;

use serde::Serialize;

use super::HarnessError;
use crate::expr::{parse, Width};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DatasetFormat {
    /// TAB when the line has one, comma otherwise.
    #[default]
    Auto,
    Comma,
    Tab,
}

impl std::str::FromStr for DatasetFormat {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(DatasetFormat::Auto),
            "comma" | "csv" => Ok(DatasetFormat::Comma),
            "tab" | "tsv" => Ok(DatasetFormat::Tab),
            other => Err(HarnessError::Config(format!("unknown dataset format `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DatasetEntry {
    pub complex: String,
    pub ground_truth: String,
    /// 1-based line in the source file.
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvalidLine {
    pub line: usize,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Dataset {
    pub entries: Vec<DatasetEntry>,
    pub invalid: Vec<InvalidLine>,
}

fn split_line(line: &str, format: DatasetFormat) -> Vec<&str> {
    let sep = match format {
        DatasetFormat::Tab => '\t',
        DatasetFormat::Comma => ',',
        DatasetFormat::Auto if line.contains('\t') => '\t',
        DatasetFormat::Auto => ',',
    };
    line.split(sep).map(str::trim).collect()
}

/// Parses dataset text. Blank lines and lines starting with `#` are
/// skipped; fields after the second are ignored. Lines that do not hold two
/// parseable expressions are collected in [`Dataset::invalid`], or abort
/// the load in strict mode.
pub fn parse_dataset(text: &str, format: DatasetFormat, strict: bool) -> Result<Dataset, HarnessError> {
    let mut out = Dataset::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields = split_line(trimmed, format);
        let reason = match fields.as_slice() {
            [complex, truth, ..] => match (parse(complex, Width::W64), parse(truth, Width::W64)) {
                (Ok(_), Ok(_)) => {
                    out.entries.push(DatasetEntry {
                        complex: complex.to_string(),
                        ground_truth: truth.to_string(),
                        line,
                    });
                    continue;
                }
                (Err(e), _) => format!("complex expression: {e}"),
                (_, Err(e)) => format!("ground truth: {e}"),
            },
            _ => "expected two fields".to_string(),
        };
        if strict {
            return Err(HarnessError::InvalidLine { line, reason });
        }
        out.invalid.push(InvalidLine { line, reason });
    }
    Ok(out)
}

pub fn load_dataset(path: &Path, format: DatasetFormat, strict: bool) -> Result<Dataset, HarnessError> {
    let text = fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })?;
    parse_dataset(&text, format, strict)
}
