//! Comma-delimited tables with a single header row and `#` footer lines.

use std::fmt::Write as _;
use std::path::Path;

use crate::config::CliResult;

#[derive(Debug, Default, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub footer: Vec<(String, String)>,
}

/// Shortest decimal form that parses back to the same `f64`.
pub fn num(v: f64) -> String {
    format!("{v}")
}

pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table { header: header.into_iter().map(Into::into).collect(), ..Table::default() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn push_nums(&mut self, row: &[f64]) {
        self.push(row.iter().map(|&v| num(v)).collect());
    }

    pub fn note(&mut self, key: impl Into<String>, value: impl ToString) {
        self.footer.push((key.into(), value.to_string()));
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        for (k, v) in &self.footer {
            let _ = writeln!(out, "# {k} = {v}");
        }
        out
    }

    /// Writes to `path`, or to stdout when no path is given.
    pub fn emit(&self, path: Option<&Path>) -> CliResult<()> {
        let text = self.render();
        match path {
            Some(p) => std::fs::write(p, text)?,
            None => print!("{text}"),
        }
        Ok(())
    }
}

/// Parses a rendered table back into header, numeric rows and footer.
#[cfg(test)]
pub fn parse(text: &str) -> Option<(Vec<String>, Vec<Vec<String>>, Vec<(String, String)>)> {
    let mut lines = text.lines();
    let header = lines.next()?.split(',').map(str::to_string).collect();
    let mut rows = Vec::new();
    let mut footer = Vec::new();
    for line in lines {
        if let Some(rest) = line.strip_prefix("# ") {
            let (k, v) = rest.split_once(" = ")?;
            footer.push((k.to_string(), v.to_string()));
        } else {
            rows.push(line.split(',').map(str::to_string).collect());
        }
    }
    Some((header, rows, footer))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_bit_exactly() {
        let values = [0.1, 1.0 / 3.0, 1e-300, -2.5e17, f64::MIN_POSITIVE, 0.0];
        let mut t = Table::new(["v"]);
        for v in values {
            t.push_nums(&[v]);
        }
        t.note("max", 1.5);
        let (header, rows, footer) = parse(&t.render()).unwrap();
        assert_eq!(header, vec!["v"]);
        for (row, v) in rows.iter().zip(values) {
            assert_eq!(row[0].parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
        assert_eq!(footer, vec![("max".to_string(), "1.5".to_string())]);
    }
}
