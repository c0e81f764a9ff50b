//! CSV reading and writing for vectors and matrices.
//!
//! Vector files hold one real per line or a single comma-separated row
//! (auto-detected). Lines starting with `#` and blank lines are ignored.
//! Matrix files hold one comma-separated row per line.

use std::path::Path;

use crate::error::{Error, Result};
use crate::norms::Signal;

fn parse_value(token: &str, line_no: usize) -> Result<f64> {
    token
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("invalid number {token:?} on line {line_no}")))
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Parse a vector from CSV text.
pub fn parse_vector_csv(text: &str) -> Result<Signal> {
    let lines: Vec<(usize, &str)> = data_lines(text).collect();
    if lines.is_empty() {
        return Err(Error::Parse("no data lines in vector file".into()));
    }
    let entries = if lines.len() == 1 {
        let (no, line) = lines[0];
        line.split(',')
            .map(|tok| parse_value(tok, no))
            .collect::<Result<Vec<f64>>>()?
    } else {
        lines
            .iter()
            .map(|&(no, line)| {
                if line.contains(',') {
                    Err(Error::Parse(format!(
                        "line {no}: multi-line vector files must hold one value per line"
                    )))
                } else {
                    parse_value(line, no)
                }
            })
            .collect::<Result<Vec<f64>>>()?
    };
    Signal::new(entries)
}

/// Read a vector from a CSV file.
pub fn read_vector_csv(path: impl AsRef<Path>) -> Result<Signal> {
    parse_vector_csv(&std::fs::read_to_string(path)?)
}

/// Format a vector as a single comma-separated row.
pub fn vector_to_csv_row(x: &Signal) -> String {
    x.entries()
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Write a vector as a single comma-separated row (with trailing newline).
pub fn write_vector_csv(path: impl AsRef<Path>, x: &Signal) -> Result<()> {
    std::fs::write(path, vector_to_csv_row(x) + "\n")?;
    Ok(())
}

/// Parse a row-major matrix from CSV text; all rows must have equal length.
pub fn parse_matrix_csv(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (no, line) in data_lines(text) {
        let row = line
            .split(',')
            .map(|tok| parse_value(tok, no))
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::Parse(format!(
                    "line {no}: expected {} columns, found {}",
                    first.len(),
                    row.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse("no data lines in matrix file".into()));
    }
    Ok(rows)
}

/// Read a row-major matrix from a CSV file.
pub fn read_matrix_csv(path: impl AsRef<Path>) -> Result<Vec<Vec<f64>>> {
    parse_matrix_csv(&std::fs::read_to_string(path)?)
}
