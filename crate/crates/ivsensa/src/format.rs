//! Locale-independent rendering of interval tables as CSV or JSON.
//!
//! Both formats carry the columns `<key>,lower,upper,feasible`, where the key is
//! `theta` for sensitivity curves and `a` for CDF bands. Numbers get six
//! significant digits; the key column always shows at least three decimals so
//! that grids line up (`0.010`, `1.000`). Infeasible rows leave `lower` and
//! `upper` empty in CSV and `null` in JSON.

use std::fmt::Write;

use ivsensa_core::{IdentifiedInterval, SensitivityCurve};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// How numbers are written.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    /// Six significant digits.
    Rounded,
    /// Shortest representation that parses back to the same `f64`.
    Exact,
}

/// Six significant digits in plain decimal notation, trailing zeros removed.
/// Magnitudes below `1e-12` print as `0`.
pub fn format_number(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x.abs() < 1e-12 {
        return "0".to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    let x = if magnitude > 5 {
        let unit = 10f64.powi(magnitude - 5);
        (x / unit).round() * unit
    } else {
        x
    };
    let mut s = format!("{x:.decimals$}");
    if s.contains('.') {
        let trimmed = s.trim_end_matches('0').trim_end_matches('.').len();
        s.truncate(trimmed);
    }
    if s == "-0" {
        s = "0".to_string();
    }
    s
}

/// [`format_number`] padded to at least three decimals.
pub fn format_key(x: f64) -> String {
    let mut s = format_number(x);
    let decimals = s.find('.').map_or(0, |dot| s.len() - dot - 1);
    if decimals == 0 {
        s.push('.');
    }
    for _ in decimals..3 {
        s.push('0');
    }
    s
}

fn number(x: f64, precision: Precision) -> String {
    match precision {
        Precision::Rounded => format_number(x),
        Precision::Exact => format!("{x:?}"),
    }
}

fn key(x: f64, precision: Precision) -> String {
    match precision {
        Precision::Rounded => format_key(x),
        Precision::Exact => format!("{x:?}"),
    }
}

/// Rows of `(key, interval)` rendered in `format`.
pub fn render_table(
    key_name: &str,
    rows: &[(f64, IdentifiedInterval)],
    format: OutputFormat,
    precision: Precision,
) -> String {
    let mut out = String::new();
    match format {
        OutputFormat::Csv => {
            let _ = writeln!(out, "{key_name},lower,upper,feasible");
            for (k, interval) in rows {
                let (lo, hi) = interval
                    .bounds()
                    .map_or((String::new(), String::new()), |(l, u)| (number(l, precision), number(u, precision)));
                let _ = writeln!(out, "{},{lo},{hi},{}", key(*k, precision), interval.is_feasible());
            }
        }
        OutputFormat::Json => {
            if rows.is_empty() {
                out.push_str("[]\n");
                return out;
            }
            out.push_str("[\n");
            for (i, (k, interval)) in rows.iter().enumerate() {
                let (lo, hi) = interval
                    .bounds()
                    .map_or(("null".to_string(), "null".to_string()), |(l, u)| {
                        (number(l, precision), number(u, precision))
                    });
                let sep = if i + 1 == rows.len() { "" } else { "," };
                let _ = writeln!(
                    out,
                    "  {{\"{key_name}\": {}, \"lower\": {lo}, \"upper\": {hi}, \"feasible\": {}}}{sep}",
                    key(*k, precision),
                    interval.is_feasible()
                );
            }
            out.push_str("]\n");
        }
    }
    out
}

pub fn emit_curve(curve: &SensitivityCurve, format: OutputFormat, precision: Precision) -> String {
    let rows: Vec<_> = curve.points().iter().map(|p| (p.theta, p.interval)).collect();
    render_table("theta", &rows, format, precision)
}

/// Parses a CSV table written by [`render_table`] back into rows.
pub fn parse_table_csv(text: &str) -> Result<Vec<(f64, IdentifiedInterval)>, String> {
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty table")?;
    if !header.ends_with(",lower,upper,feasible") {
        return Err(format!("unexpected header `{header}`"));
    }
    lines
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            let [k, lo, hi, feasible] = f[..] else {
                return Err(format!("expected four fields in `{line}`"));
            };
            let num = |s: &str| s.parse::<f64>().map_err(|e| format!("`{s}`: {e}"));
            let interval = match feasible {
                "true" => IdentifiedInterval::new(num(lo)?, num(hi)?).map_err(|e| e.to_string())?,
                "false" if lo.is_empty() && hi.is_empty() => IdentifiedInterval::EMPTY,
                _ => return Err(format!("bad feasibility fields in `{line}`")),
            };
            Ok((num(k)?, interval))
        })
        .collect()
}
