//! Per-size aggregated responses and their CSV form.
//!
//! CSV: UTF-8, LF line endings, header `n,y` or `n,y,trials,stddev`. Floats
//! are written in Rust's shortest round-trip form so a table survives a
//! write/read cycle bit for bit.

use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseRow {
    pub n: u64,
    pub y: f64,
    pub trials: u64,
    pub stddev: f64,
}

impl ResponseRow {
    pub fn point(n: u64, y: f64) -> Self {
        ResponseRow {
            n,
            y,
            trials: 1,
            stddev: 0.0,
        }
    }
}

/// Rows with strictly increasing `n`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResponseTable {
    rows: Vec<ResponseRow>,
}

impl ResponseTable {
    pub fn new(rows: Vec<ResponseRow>) -> Result<Self> {
        for (i, r) in rows.iter().enumerate() {
            check_row(r).map_err(|m| Error::invalid(format!("row {}: {m}", i + 1)))?;
            if i > 0 && rows[i - 1].n >= r.n {
                return Err(Error::invalid(format!(
                    "row {}: n = {} does not increase over {}",
                    i + 1,
                    r.n,
                    rows[i - 1].n
                )));
            }
        }
        Ok(ResponseTable { rows })
    }

    pub fn from_points(points: &[(u64, f64)]) -> Result<Self> {
        Self::new(points.iter().map(|&(n, y)| ResponseRow::point(n, y)).collect())
    }

    pub(crate) fn push(&mut self, row: ResponseRow) {
        debug_assert!(self.rows.last().is_none_or(|l| l.n < row.n));
        self.rows.push(row);
    }

    pub fn rows(&self) -> &[ResponseRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn sizes(&self) -> Vec<u64> {
        self.rows.iter().map(|r| r.n).collect()
    }

    pub fn responses(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.y).collect()
    }

    /// Same table with every response multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(
            self.rows
                .iter()
                .map(|r| ResponseRow {
                    y: r.y * c,
                    stddev: r.stddev * c.abs(),
                    ..*r
                })
                .collect(),
        )
    }

    pub fn to_csv(&self) -> String {
        self.to_csv_with_key("n")
    }

    pub(crate) fn to_csv_with_key(&self, key: &str) -> String {
        let mut s = format!("{key},y,trials,stddev\n");
        for r in &self.rows {
            let _ = writeln!(s, "{},{},{},{}", r.n, r.y, r.trials, r.stddev);
        }
        s
    }

    /// Parses CSV text. `source_name` labels errors.
    pub fn from_csv(text: &str, source_name: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::parse(source_name, 1, "empty input, expected a header"))?;
        let cols: Vec<&str> = header.trim_end_matches('\r').split(',').map(str::trim).collect();
        let full = match cols.as_slice() {
            [_, "y"] => false,
            [_, "y", "trials", "stddev"] => true,
            _ => {
                return Err(Error::parse(
                    source_name,
                    1,
                    format!("expected header `n,y` or `n,y,trials,stddev`, got `{header}`"),
                ))
            }
        };
        let width = if full { 4 } else { 2 };
        let mut rows = Vec::new();
        for (idx, line) in lines {
            let lineno = idx + 1;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != width {
                return Err(Error::parse(
                    source_name,
                    lineno,
                    format!("expected {width} fields, found {}", fields.len()),
                ));
            }
            let bad = |what: &str, v: &str| Error::parse(source_name, lineno, format!("bad {what} `{v}`"));
            let n = parse_size(fields[0]).ok_or_else(|| bad("size", fields[0]))?;
            let y: f64 = fields[1].parse().map_err(|_| bad("response", fields[1]))?;
            let (trials, stddev) = if full {
                (
                    fields[2].parse().map_err(|_| bad("trial count", fields[2]))?,
                    fields[3].parse().map_err(|_| bad("stddev", fields[3]))?,
                )
            } else {
                (1, 0.0)
            };
            let row = ResponseRow { n, y, trials, stddev };
            check_row(&row).map_err(|m| Error::parse(source_name, lineno, m))?;
            if let Some(prev) = rows.last() {
                let prev: &ResponseRow = prev;
                if prev.n >= n {
                    return Err(Error::parse(
                        source_name,
                        lineno,
                        format!("n = {n} does not increase over {}", prev.n),
                    ));
                }
            }
            rows.push(row);
        }
        Ok(ResponseTable { rows })
    }
}

/// Accepts integers and integral decimals such as `5e5`.
fn parse_size(s: &str) -> Option<u64> {
    if let Ok(v) = s.parse::<u64>() {
        return Some(v);
    }
    let f: f64 = s.parse().ok()?;
    (f.is_finite() && f >= 0.0 && f.fract() == 0.0 && f < 2f64.powi(63)).then_some(f as u64)
}

fn check_row(r: &ResponseRow) -> std::result::Result<(), String> {
    if !r.y.is_finite() || r.y < 0.0 {
        return Err(format!("response must be finite and non-negative, got {}", r.y));
    }
    if r.trials == 0 {
        return Err("trial count must be at least 1".into());
    }
    if !r.stddev.is_finite() || r.stddev < 0.0 {
        return Err(format!("stddev must be finite and non-negative, got {}", r.stddev));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_exact() {
        let t = ResponseTable::new(vec![
            ResponseRow { n: 10, y: 0.1 + 0.2, trials: 3, stddev: 1e-17 },
            ResponseRow { n: 20, y: 12345.678901234567, trials: 30, stddev: 2.5 },
        ])
        .unwrap();
        let back = ResponseTable::from_csv(&t.to_csv(), "mem").unwrap();
        assert_eq!(t, back);
    }

    #[test]
    fn short_header_defaults_trials() {
        let t = ResponseTable::from_csv("n,y\n500000,1.407\n1e6,5.219\n", "mem").unwrap();
        assert_eq!(t.rows()[1], ResponseRow::point(1_000_000, 5.219));
    }

    #[test]
    fn malformed_row_names_line() {
        let err = ResponseTable::from_csv("n,y\n1,2\n2,abc\n", "data.csv").unwrap_err();
        assert_eq!(err.to_string(), "data.csv:3: bad response `abc`");
        let err = ResponseTable::from_csv("n,y\n2,1\n1,2\n", "d").unwrap_err();
        assert!(err.to_string().starts_with("d:3:"), "{err}");
        assert!(ResponseTable::from_csv("", "d").is_err());
        assert!(ResponseTable::from_csv("a,b,c\n", "d").is_err());
    }

    #[test]
    fn rejects_non_increasing_sizes() {
        assert!(ResponseTable::from_points(&[(2, 1.0), (2, 3.0)]).is_err());
        assert!(ResponseTable::from_points(&[(2, -1.0)]).is_err());
    }
}
