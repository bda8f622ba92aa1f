//! Column tables and the numeric text format shared by every CSV/JSON writer.

use serde::Serialize;
use std::io::Write;

/// Formats a float as its shortest round-trip representation, switching to
/// scientific notation when `|x| >= 1e6` or `0 < |x| < 1e-6`.
pub fn format_number(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".to_string()
        } else if x > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    let a = x.abs();
    if a != 0.0 && !(1e-6..1e6).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

/// A single cell: numbers are formatted with [`format_number`], text is
/// written verbatim.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Num(x) => format_number(*x),
            Cell::Text(s) => s.clone(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Text(_) => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// A named column with its unit (`"1"` for dimensionless).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Column {
    pub name: String,
    pub unit: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[(&str, &str)]) -> Self {
        Self {
            name: name.into(),
            columns: columns
                .iter()
                .map(|(n, u)| Column {
                    name: n.to_string(),
                    unit: u.to_string(),
                })
                .collect(),
            rows: Vec::new(),
        }
    }

    /// Appends a row. Panics if the row width does not match the columns.
    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width mismatch in table {}",
            self.name
        );
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c.name == name)?;
        self.rows.iter().map(|r| r[idx].as_f64()).collect()
    }

    /// Writes the table as CSV. `preamble` lines are emitted first as `# `
    /// comments, then the header row as `name [unit]`, then data rows.
    pub fn write_csv<W: Write>(&self, out: W, preamble: &[String]) -> csv::Result<()> {
        let mut out = out;
        for line in preamble {
            writeln!(out, "# {line}")?;
        }
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record(self.columns.iter().map(|c| format!("{} [{}]", c.name, c.unit)))?;
        for row in &self.rows {
            wtr.write_record(row.iter().map(Cell::render))?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self, preamble: &[String]) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf, preamble)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("csv output is utf-8")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format_switches_to_scientific() {
        assert_eq!(format_number(0.5), "0.5");
        assert_eq!(format_number(123456.0), "123456");
        assert_eq!(format_number(1e6), "1e6");
        assert_eq!(format_number(2.5e-7), "2.5e-7");
        assert_eq!(format_number(1e-6), "0.000001");
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(-3.0e9), "-3e9");
    }

    #[test]
    fn shortest_round_trip() {
        for x in [0.1 + 0.2, 1.0 / 3.0, 4.9e-5, 7.335e-3, 12345.678901234] {
            let s = format_number(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new("demo", &[("v_dd", "V"), ("value", "W"), ("unit", "-")]);
        t.push(vec![0.7.into(), 6.0e-7.into(), "W".into()]);
        let s = t.to_csv_string(&["scenario: demo".to_string()]);
        assert_eq!(s, "# scenario: demo\nv_dd [V],value [W],unit [-]\n0.7,6e-7,W\n");
    }
}
