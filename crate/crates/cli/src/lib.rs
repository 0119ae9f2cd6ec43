//! Command logic behind the `qcqpx` binary. Each command returns a value
//! that serializes to the `--json` output and renders to plain text.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod generate;
pub mod render;
pub mod report;
pub mod table1;

use std::fmt;
use std::path::Path;

use qcqpx_core::{Error, InstanceFile};

pub mod exit {
    pub const OK: i32 = 0;
    /// A verification check failed, or extraction failed on an optimal SDP.
    pub const CHECK_FAILED: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const IO: i32 = 3;
    pub const UNBOUNDED: i32 = 4;
    pub const INFEASIBLE: i32 = 5;
    pub const MAX_ITER: i32 = 6;
    pub const MISMATCH: i32 = 7;
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: exit::USAGE,
            message: message.into(),
        }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        Self {
            code: exit::IO,
            message: format!("{}: {err}", path.display()),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self::usage(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn read_instance(path: &Path) -> CliResult<InstanceFile> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    InstanceFile::from_json(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Parses `"a,b,c"` into numbers.
pub fn parse_list(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| CliError::usage(format!("not a number: '{t}'"))))
        .collect()
}

/// Parses `"a,b;c,d"` into rows.
pub fn parse_rows(s: &str) -> CliResult<Vec<Vec<f64>>> {
    s.split(';').filter(|r| !r.trim().is_empty()).map(parse_list).collect()
}

/// Formats a float for text output with a fixed number of decimals and no
/// negative zero.
pub fn fmt_num(v: f64, decimals: usize) -> String {
    let s = format!("{v:.decimals$}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

pub fn fmt_vec(v: &[f64], decimals: usize) -> String {
    let parts: Vec<String> = v.iter().map(|x| fmt_num(*x, decimals)).collect();
    format!("({})", parts.join(", "))
}
