//! File formats: the native instance format, TimPassLib directories and solution files.
//!
//! All formats are semicolon-separated tables with `#` comments, and every
//! number is written exactly (integers or `n/d` fractions).

mod native;
mod solution;
mod timpasslib;

use std::path::Path;

pub use native::{parse_instance, write_instance, INSTANCE_HEADER};
pub use solution::{parse_solution, verify_solution, write_solution, SolutionFile, SOLUTION_HEADER};
pub use timpasslib::{read_timpasslib, TimPassLibInstance};

use crate::network::{EventActivityNetwork, NetworkError};
use crate::num::ParseNumberError;
use crate::routing::{ODMatrix, RoutingError};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File { path: String, source: std::io::Error },
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("label `{0}` contains a separator or line break")]
    InvalidLabel(String),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Routing(#[from] RoutingError),
}

impl IoError {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        IoError::Parse { line, column, message: message.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Dialect {
    #[default]
    Native,
    TimPassLib,
}

impl std::str::FromStr for Dialect {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "native" => Ok(Dialect::Native),
            "timpasslib" => Ok(Dialect::TimPassLib),
            other => Err(format!("unknown dialect `{other}` (expected native or timpasslib)")),
        }
    }
}

/// A network with optional passenger demand.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub network: EventActivityNetwork,
    pub od: Option<ODMatrix>,
}

pub(crate) fn read_file(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::File { path: path.display().to_string(), source })
}

pub fn write_file(path: &Path, text: &str) -> Result<(), IoError> {
    std::fs::write(path, text).map_err(|source| IoError::File { path: path.display().to_string(), source })
}

/// Reads a native file, or a TimPassLib directory.
pub fn read_instance(path: &Path, dialect: Dialect) -> Result<Instance, IoError> {
    match dialect {
        Dialect::Native => parse_instance(&read_file(path)?),
        Dialect::TimPassLib => Ok(read_timpasslib(path)?.instance),
    }
}

/// One data row: trimmed fields with their 1-based starting columns.
pub(crate) struct Row<'a> {
    pub line: usize,
    pub fields: Vec<(usize, &'a str)>,
}

impl<'a> Row<'a> {
    pub(crate) fn split(line: usize, text: &'a str) -> Self {
        let mut fields = Vec::new();
        let mut start = 0;
        for part in text.split(';') {
            let lead = part.len() - part.trim_start().len();
            fields.push((start + lead + 1, part.trim()));
            start += part.len() + 1;
        }
        Row { line, fields }
    }

    pub(crate) fn expect_len(&self, range: std::ops::RangeInclusive<usize>, what: &str) -> Result<(), IoError> {
        if range.contains(&self.fields.len()) {
            Ok(())
        } else {
            Err(IoError::parse(
                self.line,
                1,
                format!("{what} needs {} to {} fields, found {}", range.start(), range.end(), self.fields.len()),
            ))
        }
    }

    pub(crate) fn str(&self, k: usize) -> &'a str {
        self.fields.get(k).map(|f| f.1).unwrap_or("")
    }

    pub(crate) fn num<T>(&self, k: usize, parse: impl Fn(&str) -> Result<T, ParseNumberError>) -> Result<T, IoError> {
        let (column, text) = self.fields.get(k).copied().unwrap_or((1, ""));
        parse(text).map_err(|e| IoError::parse(self.line, column, e.to_string()))
    }

    pub(crate) fn column(&self, k: usize) -> usize {
        self.fields.get(k).map(|f| f.0).unwrap_or(1)
    }
}

/// Non-comment, non-blank lines with 1-based line numbers.
pub(crate) fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim_end()))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
}
