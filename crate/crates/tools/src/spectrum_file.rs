//! Eigenvalue files: one positive eigenvalue per line, or `value,multiplicity`.
//! Blank lines and `#` comments are ignored.

use std::path::Path;

use crate::error::{usage, Result, RunError};

pub fn parse(text: &str) -> std::result::Result<Vec<(f64, usize)>, String> {
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',').map(str::trim);
        let value_field = fields.next().unwrap_or("");
        let value: f64 = value_field
            .parse()
            .map_err(|_| format!("line {line_no}: '{value_field}' is not a number"))?;
        if !(value.is_finite() && value > 0.0) {
            return Err(format!("line {line_no}: eigenvalue must be positive, got {value}"));
        }
        let multiplicity = match fields.next() {
            None => 1,
            Some(m) => match m.parse::<usize>() {
                Ok(k) if k >= 1 => k,
                _ => return Err(format!("line {line_no}: multiplicity '{m}' is not a positive integer")),
            },
        };
        if fields.next().is_some() {
            return Err(format!("line {line_no}: expected 'value' or 'value,multiplicity'"));
        }
        pairs.push((value, multiplicity));
    }
    if pairs.is_empty() {
        return Err("spectrum file has no eigenvalues".into());
    }
    Ok(pairs)
}

pub fn read(path: &Path) -> Result<Vec<(f64, usize)>> {
    let text = std::fs::read_to_string(path).map_err(|e| RunError::io(path, e))?;
    parse(&text).map_err(|e| usage!("{}: {e}", path.display()))
}
