use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use polargauge::Vector;
use serde::Serialize;

use crate::error::CliError;

/// Inline JSON when the argument starts with `{`, otherwise a file path.
pub fn json_arg(arg: &str) -> Result<String, CliError> {
    if arg.trim_start().starts_with('{') {
        Ok(arg.to_string())
    } else {
        read(Path::new(arg))
    }
}

pub fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

pub fn parse_vector(text: &str) -> Result<Vector, CliError> {
    let values = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Usage(format!("bad vector '{text}': {e}")))?;
    Ok(Vector::from_vec(values))
}

/// Splits `key=value` overrides, rejecting unknown keys and nonpositive values.
pub fn parse_overrides(raw: &[String], known: &[&str]) -> Result<Vec<(String, f64)>, CliError> {
    raw.iter()
        .map(|item| {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("tolerance override '{item}' is not key=value")))?;
            let key = key.trim();
            if !known.contains(&key) {
                return Err(CliError::Usage(format!(
                    "unknown tolerance '{key}' (known: {})",
                    known.join(", ")
                )));
            }
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|e| CliError::Usage(format!("bad value in '{item}': {e}")))?;
            if !(value > 0.0 && value.is_finite()) {
                return Err(CliError::Usage(format!("tolerance '{key}' must be positive, got {value}")));
            }
            Ok((key.to_string(), value))
        })
        .collect()
}

pub fn sink(path: Option<&PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

pub fn write_json<T: Serialize>(value: &T, path: Option<&PathBuf>) -> Result<(), CliError> {
    let mut out = sink(path)?;
    serde_json::to_writer_pretty(&mut out, value).map_err(std::io::Error::from)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

pub fn write_rows<T: Serialize>(rows: &[T], path: &Path) -> Result<(), CliError> {
    let file = BufWriter::new(File::create(path)?);
    polargauge::trace::write_csv(rows, file)?;
    Ok(())
}
