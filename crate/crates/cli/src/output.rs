use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use cvtele_core::WignerGrid;
use serde::Serialize;

use crate::error::CliError;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "CVTELE_OUT_DIR";

const SIG_DIGITS: usize = 12;

/// Formats `x` with 12 significant digits. Fixed notation unless the
/// magnitude is extreme, where scientific keeps the digit count honest.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return format!("{:.*}", SIG_DIGITS - 1, 0.0);
    }
    if !x.is_finite() {
        return x.to_string();
    }
    // exponent after rounding to 12 digits
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let exp: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    if !(-5..15).contains(&exp) {
        return sci;
    }
    let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
    format!("{:.*}", decimals, x)
}

/// `x` rounded to 12 significant digits, for JSON numbers.
pub fn round_num(x: f64) -> f64 {
    fmt_num(x).parse().unwrap_or(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format '{s}' (expected csv or json)")),
        }
    }
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Where a single-file result goes: an explicit path, a file named
/// `default_name` in the output directory from the environment, or stdout.
pub fn destination(out: Option<PathBuf>, default_name: &str) -> Option<PathBuf> {
    out.or_else(|| std::env::var_os(OUT_DIR_ENV).map(|d| PathBuf::from(d).join(default_name)))
}

pub fn emit(dest: Option<&Path>, text: &str) -> Result<(), CliError> {
    match dest {
        Some(path) => write_file(path, text),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Io { path: PathBuf::from("<stdout>"), source })
        }
    }
}

pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|source| CliError::Io { path: parent.to_path_buf(), source })?;
    }
    fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

/// A table with named columns; cells are already formatted.
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, Copy)]
pub enum Cell {
    Num(f64),
    Bool(bool),
}

impl Table {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.csv(),
            Format::Json => self.json(),
        }
    }

    fn csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match *c {
                    Cell::Num(x) => fmt_num(x),
                    Cell::Bool(b) => b.to_string(),
                })
                .collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    fn json(&self) -> String {
        let rows: Vec<serde_json::Map<String, serde_json::Value>> = self
            .rows
            .iter()
            .map(|row| {
                self.columns
                    .iter()
                    .zip(row)
                    .map(|(name, c)| {
                        let v = match *c {
                            Cell::Num(x) => serde_json::json!(round_num(x)),
                            Cell::Bool(b) => serde_json::json!(b),
                        };
                        (name.to_string(), v)
                    })
                    .collect()
            })
            .collect();
        to_json(&serde_json::json!({ "columns": self.columns, "rows": rows }))
    }
}

/// Grid values as `alpha_r,alpha_i,value` rows, `alpha_i` varying fastest.
pub fn grid_csv(w: &WignerGrid) -> String {
    let spec = w.spec();
    let n = spec.resolution();
    let mut s = String::with_capacity(n * n * 48);
    s.push_str("alpha_r,alpha_i,value\n");
    for ir in 0..n {
        let xr = fmt_num(spec.coord(ir));
        for ii in 0..n {
            s.push_str(&xr);
            s.push(',');
            s.push_str(&fmt_num(spec.coord(ii)));
            s.push(',');
            s.push_str(&fmt_num(w.at(ir, ii)));
            s.push('\n');
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_num(0.5), "0.500000000000");
        assert_eq!(fmt_num(1.567672), "1.56767200000");
        assert_eq!(fmt_num(-123.456), "-123.456000000");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(9.9999999999996), "10.0000000000");
        assert_eq!(fmt_num(0.0), "0.00000000000");
        assert_eq!(fmt_num(-0.0), "0.00000000000");
        assert_eq!(fmt_num(2.5e-9), "2.50000000000e-9");
    }

    #[test]
    fn json_numbers_are_rounded() {
        assert_eq!(round_num(0.1 + 0.2), 0.3);
        assert_eq!(round_num(1.0 / 3.0), 0.333333333333);
    }
}
