//! Plain CSV emission: one `#`-prefixed header line, numbers rounded to 12
//! significant digits and printed as the shortest decimal that round-trips
//! the rounded value, so identical inputs give byte-identical files.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

/// Significant digits kept for every floating-point cell.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// A single CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// Formats `x` with at most 12 significant digits.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().expect("formatted float parses");
    let mag = rounded.abs();
    if (1e-4..1e12).contains(&mag) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

fn format_cell(cell: &Cell) -> String {
    match cell {
        Cell::Num(v) => format_number(*v),
        Cell::Int(v) => v.to_string(),
        Cell::Text(s) => {
            if s.contains([',', '"', '\n']) {
                format!("\"{}\"", s.replace('"', "\"\""))
            } else {
                s.clone()
            }
        }
    }
}

/// In-memory table.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    /// Appends a row; panics if its width differs from the header's.
    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width must match header");
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# {}", self.header.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(format_cell).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn write(&self, path: &Path) -> io::Result<()> {
        std::fs::write(path, self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formatting() {
        assert_eq!(format_number(0.1), "0.1");
        assert_eq!(format_number(1.0), "1");
        assert_eq!(format_number(-2.5), "-2.5");
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_number(4.97e-6), "4.97e-6");
        assert_eq!(format_number(123456789.123456789), "123456789.123");
        assert_eq!(format_number(f64::NAN), "nan");
        assert_eq!(format_number(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn twelve_digits_round_trip() {
        for x in [std::f64::consts::PI, 73.54355067681902, 1.234567890123456e-9, 9.99999999999999e11] {
            let s = format_number(x);
            let back: f64 = s.parse().unwrap();
            assert!(((back - x) / x).abs() < 1e-11, "{x} -> {s}");
        }
    }

    #[test]
    fn rendering() {
        let mut t = Table::new(["t", "label", "n"]);
        t.push(vec![0.5.into(), "a,b".into(), 3usize.into()]);
        assert_eq!(t.render(), "# t,label,n\n0.5,\"a,b\",3\n");
    }

    #[test]
    #[should_panic]
    fn width_mismatch_panics() {
        Table::new(["a"]).push(vec![1.0.into(), 2.0.into()]);
    }
}
