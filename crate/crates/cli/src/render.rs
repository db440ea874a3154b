//! Plain-text renderings: aligned tables and CSV.

use clap::ValueEnum;
use serde::Serialize;

use threeway_dof::allocation::Certificate;
use threeway_dof::rational::{self, Rational};

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

/// Four-place decimal, the human-facing rendering of a rational.
pub fn dec(r: &Rational) -> String {
    rational::to_decimal(r, 4)
}

/// The serde name of a unit-like enum value.
pub fn tag<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::String(s)) => s,
        Ok(other) => other.to_string(),
        Err(_) => String::from("?"),
    }
}

pub fn certificate(c: &Certificate) -> String {
    match c {
        Certificate::ClosedForm { formula } => format!("closed form: {formula}"),
        Certificate::DualityPair { gap, subproblems_solved, subproblems_feasible, .. } => format!(
            "duality pair, gap {} ({subproblems_feasible}/{subproblems_solved} subproblems feasible)",
            rational::to_pq(gap)
        ),
        Certificate::Exhaustive { denominator, points } => format!("grid search, step 1/{denominator}, {points} points"),
    }
}

pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<const N: usize>(header: [&str; N]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn row<const N: usize>(&mut self, cells: [String; N]) {
        self.rows.push(cells.to_vec());
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.csv(),
            _ => self.aligned(),
        }
    }

    fn csv(&self) -> String {
        let escape = |c: &String| {
            if c.contains([',', '"', '\n']) {
                format!("\"{}\"", c.replace('"', "\"\""))
            } else {
                c.clone()
            }
        };
        std::iter::once(&self.header)
            .chain(&self.rows)
            .map(|r| r.iter().map(escape).collect::<Vec<_>>().join(",") + "\n")
            .collect()
    }

    fn aligned(&self) -> String {
        let width = |i: usize| {
            std::iter::once(&self.header).chain(&self.rows).map(|r| r[i].chars().count()).max().unwrap_or(0)
        };
        let widths: Vec<usize> = (0..self.header.len()).map(width).collect();
        let line = |r: &Vec<String>| {
            let cells: Vec<String> = r.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            cells.join("  ").trim_end().to_string() + "\n"
        };
        let rule: String = widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("  ") + "\n";
        let mut out = line(&self.header);
        out.push_str(&rule);
        for r in &self.rows {
            out.push_str(&line(r));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use threeway_dof::rational::frac;

    #[test]
    fn decimals_have_four_places() {
        assert_eq!(dec(&frac(16, 3)), "5.3333");
        assert_eq!(dec(&frac(4, 1)), "4.0000");
    }

    #[test]
    fn csv_escapes_commas() {
        let mut t = Table::new(["a", "b"]);
        t.row(["x,y".into(), "1".into()]);
        assert_eq!(t.render(Format::Csv), "a,b\n\"x,y\",1\n");
    }

    #[test]
    fn table_aligns_columns() {
        let mut t = Table::new(["k", "value"]);
        t.row(["long key".into(), "1".into()]);
        let out = t.render(Format::Table);
        assert_eq!(out.lines().next().unwrap(), "k         value");
        assert_eq!(out.lines().nth(2).unwrap(), "long key  1");
    }
}
