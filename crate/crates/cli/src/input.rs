use std::fs;
use std::path::Path;

use lrdshift::Series;

use crate::errors::{CliError, CliResult};

/// Reads a series from a text file: one real per line, or a single-column
/// CSV whose optional header is tolerated on the first non-empty line.
/// Any later unparseable or non-finite row is a parse error naming its
/// line number.
pub fn read_series(path: &Path) -> CliResult<Series> {
    let raw = fs::read_to_string(path).map_err(|err| CliError::Parse {
        path: path.display().to_string(),
        detail: err.to_string(),
    })?;

    let mut values = Vec::new();
    let mut first_data_line = true;
    for (idx, line) in raw.lines().enumerate() {
        let cell = line.trim().trim_matches('"').trim();
        if cell.is_empty() {
            continue;
        }
        match cell.parse::<f64>() {
            Ok(value) if value.is_finite() => {
                values.push(value);
                first_data_line = false;
            }
            Ok(_) => {
                return Err(CliError::Parse {
                    path: path.display().to_string(),
                    detail: format!("line {}: value is not finite: {cell}", idx + 1),
                });
            }
            Err(_) if first_data_line => {
                // Single-column CSV header.
                first_data_line = false;
            }
            Err(_) => {
                return Err(CliError::Parse {
                    path: path.display().to_string(),
                    detail: format!("line {}: not a number: {cell}", idx + 1),
                });
            }
        }
    }

    Series::new(values).map_err(|_| CliError::Parse {
        path: path.display().to_string(),
        detail: "no numeric rows found".into(),
    })
}
