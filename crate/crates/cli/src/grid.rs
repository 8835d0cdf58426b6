//! Sweep grids: `a, b, c` lists, inclusive `from:to:step` ranges and
//! `log:from:to:count` geometric ranges.

use crate::error::{invalid, Result};

/// Relative slack when deciding whether a range end is hit exactly.
const RANGE_SLACK: f64 = 1e-9;

pub fn parse_real_grid(key: &str, text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    let values = if let Some(rest) = text.strip_prefix("log:") {
        let parts = split_fields(key, rest, 3)?;
        let (from, to) = (real(key, parts[0])?, real(key, parts[1])?);
        let count: usize = parts[2]
            .parse()
            .map_err(|_| validation(key, format!("bad point count '{}'", parts[2])))?;
        if !(from > 0.0 && to > 0.0) {
            return invalid(format!("{key}: log range needs positive ends"));
        }
        if count == 0 {
            return invalid(format!("{key}: log range needs at least one point"));
        }
        if count == 1 {
            if from != to {
                return invalid(format!("{key}: a single-point log range needs from == to"));
            }
            vec![from]
        } else {
            (0..count)
                .map(|i| (from.ln() + (to.ln() - from.ln()) * i as f64 / (count - 1) as f64).exp())
                .collect()
        }
    } else if text.contains(':') {
        let parts = split_fields(key, text, 3)?;
        let (from, to, step) = (real(key, parts[0])?, real(key, parts[1])?, real(key, parts[2])?);
        if !(step > 0.0) {
            return invalid(format!("{key}: step must be positive"));
        }
        if to < from {
            return invalid(format!("{key}: range end {to} is below its start {from}"));
        }
        let count = ((to - from) / step * (1.0 + RANGE_SLACK)).floor() as usize + 1;
        (0..count).map(|i| from + step * i as f64).collect()
    } else {
        text.split(',').map(|t| real(key, t.trim())).collect::<Result<Vec<_>>>()?
    };
    if values.is_empty() {
        return invalid(format!("{key}: empty grid"));
    }
    Ok(values)
}

pub fn parse_count_grid(key: &str, text: &str) -> Result<Vec<usize>> {
    let text = text.trim();
    let values: Vec<usize> = if text.contains(':') {
        let parts = split_fields(key, text, 3)?;
        let (from, to, step) = (count(key, parts[0])?, count(key, parts[1])?, count(key, parts[2])?);
        if step == 0 {
            return invalid(format!("{key}: step must be positive"));
        }
        if to < from {
            return invalid(format!("{key}: range end {to} is below its start {from}"));
        }
        (from..=to).step_by(step).collect()
    } else {
        text.split(',').map(|t| count(key, t.trim())).collect::<Result<_>>()?
    };
    if values.is_empty() {
        return invalid(format!("{key}: empty grid"));
    }
    Ok(values)
}

fn split_fields<'a>(key: &str, text: &'a str, n: usize) -> Result<Vec<&'a str>> {
    let parts: Vec<&str> = text.split(':').map(str::trim).collect();
    if parts.len() != n {
        return invalid(format!("{key}: expected {n} ':'-separated fields in '{text}'"));
    }
    Ok(parts)
}

fn validation(key: &str, msg: String) -> crate::error::CliError {
    crate::error::CliError::Validation(format!("{key}: {msg}"))
}

pub(crate) fn real(key: &str, text: &str) -> Result<f64> {
    match text.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => invalid(format!("{key}: '{text}' is not a finite number")),
    }
}

pub(crate) fn count(key: &str, text: &str) -> Result<usize> {
    text.parse::<usize>()
        .map_err(|_| validation(key, format!("'{text}' is not a nonnegative integer")))
}
