//! Shared pieces of the CSV interchange formats.

use std::io::Lines;

use crate::error::{Error, Result};

pub const SPECTRUM_COLUMNS: &[&str] = &["operator", "kind", "n", "mu", "geometry", "cutoff"];
pub const TRACE_COLUMNS: &[&str] = &[
    "operator", "kind", "n", "mu", "geometry", "cutoff", "tail_eps",
];

/// 17 significant digits, enough to round-trip every `f64`.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Read the two `#` header lines (column names, then values) and return the
/// values.
pub fn read_header<B: std::io::BufRead>(
    lines: &mut Lines<B>,
    columns: &[&str],
) -> Result<Vec<String>> {
    let mut next = |what: &str| -> Result<String> {
        let line = lines
            .next()
            .ok_or_else(|| Error::Parse(format!("missing {what} header line")))??;
        line.strip_prefix("# ")
            .map(str::to_string)
            .ok_or_else(|| Error::Parse(format!("{what} header line must start with '# '")))
    };
    let names = next("column")?;
    let want = columns.join(",");
    if names != want {
        return Err(Error::Parse(format!(
            "expected header columns {want:?}, found {names:?}"
        )));
    }
    let values: Vec<String> = next("value")?.split(',').map(str::to_string).collect();
    if values.len() != columns.len() {
        return Err(Error::Parse(format!(
            "header has {} values, expected {}",
            values.len(),
            columns.len()
        )));
    }
    Ok(values)
}
