//! CSV output: `#` comment header, one column-name row, then numbers with
//! 17 significant digits.

use std::io::{self, Write};

use crate::scenario::Scenario;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// 17 significant digits, round-trip exact for `f64`.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Csv {
    comments: Vec<String>,
    columns: Vec<&'static str>,
    rows: Vec<Vec<f64>>,
}

impl Csv {
    /// Header recording the tool version, the command line, the units tag,
    /// the scenario and the seed.
    pub fn new(
        command: &str,
        scenario: &Scenario,
        seed: Option<u64>,
        columns: &[&'static str],
    ) -> Self {
        let comments = vec![
            format!("colldec {VERSION}"),
            format!("command: {command}"),
            format!("units: {}", scenario.units()),
            format!("scenario: {}", scenario.to_json_line()),
            format!(
                "seed: {}",
                seed.map_or_else(|| "none".to_string(), |s| s.to_string())
            ),
        ];
        Self {
            comments,
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn comment(&mut self, line: impl Into<String>) {
        self.comments.push(line.into());
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn write_to<W: Write + ?Sized>(&self, out: &mut W) -> io::Result<()> {
        for c in &self.comments {
            writeln!(out, "# {c}")?;
        }
        writeln!(out, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&x| fmt_num(x)).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, 6.684_342_065_682_667, 1e-300, -2.5e17, 0.0] {
            let s = fmt_num(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(fmt_num(1.0), "1.0000000000000000e0");
    }
}
