//! Deterministic CSV / Markdown / JSON rendering of result tables.

use std::fmt;
use std::str::FromStr;

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::levels::{RankOutcome, RankResult};
use crate::search::SearchReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Markdown,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "md" | "markdown" => Ok(Format::Markdown),
            "json" => Ok(Format::Json),
            other => Err(Error::Parse(format!("unknown format `{other}` (expected csv, md or json)"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Markdown => "md",
            Format::Json => "json",
        })
    }
}

/// One cell, with its spelling in each output format.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub csv: String,
    pub md: String,
    pub json: Value,
}

impl Cell {
    pub fn int(v: u64) -> Self {
        Cell { csv: v.to_string(), md: v.to_string(), json: Value::from(v) }
    }

    pub fn empty() -> Self {
        Cell { csv: String::new(), md: String::new(), json: Value::Null }
    }

    pub fn text(s: impl Into<String>) -> Self {
        let s = s.into();
        Cell { csv: s.clone(), md: s.clone(), json: Value::from(s) }
    }

    /// `Rank(s)` as the number `s`; a cutoff as the tag `gt:s` (`>s` in Markdown).
    pub fn rank(outcome: RankOutcome) -> Self {
        match outcome {
            RankOutcome::Rank(s) => Cell::int(s as u64),
            RankOutcome::ExceedsCutoff(s) => {
                let tag = format!("gt:{s}");
                Cell { csv: tag.clone(), md: format!(">{s}"), json: Value::from(tag) }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    /// Markdown tables drop columns that only matter to machine readers.
    pub in_markdown: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(names: &[&str]) -> Self {
        Table {
            columns: names.iter().map(|n| Column { name: n.to_string(), in_markdown: true }).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Markdown => self.to_markdown(),
            Format::Json => self.to_json(),
        }
    }

    fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(self.columns.iter().map(|c| c.name.as_str())).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.csv.as_str())).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
    }

    fn to_markdown(&self) -> String {
        let keep: Vec<usize> =
            (0..self.columns.len()).filter(|&i| self.columns[i].in_markdown).collect();
        let line = |cells: Vec<&str>| format!("| {} |\n", cells.join(" | "));
        let mut out = line(keep.iter().map(|&i| self.columns[i].name.as_str()).collect());
        out.push_str(&format!("|{}\n", "---|".repeat(keep.len())));
        for row in &self.rows {
            out.push_str(&line(keep.iter().map(|&i| row[i].md.as_str()).collect()));
        }
        out
    }

    fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (col, cell) in self.columns.iter().zip(row) {
                    obj.insert(col.name.clone(), cell.json.clone());
                }
                Value::Object(obj)
            })
            .collect();
        let mut out = serde_json::to_string_pretty(&Value::Array(rows)).expect("json rows serialize");
        out.push('\n');
        out
    }
}

/// `m,p,n1,bound`; a missing solution leaves `n1` empty and fills `bound`
/// (Markdown shows `>bound` instead).
pub fn search_table(report: &SearchReport) -> Table {
    let mut t = Table::new(&["m", "p", "n1", "bound"]);
    t.columns[3].in_markdown = false;
    for r in &report.rows {
        let (n1, bound) = match r.n1 {
            Some(n) => (Cell::int(n), Cell::empty()),
            None => {
                let mut c = Cell::empty();
                c.md = format!(">{}", r.bound);
                (c, Cell::int(r.bound))
            }
        };
        t.push(vec![Cell::int(r.m), Cell::int(r.p), n1, bound]);
    }
    t
}

/// `h,rank` rows.
pub fn rank_table(rows: &[(u64, RankResult)]) -> Table {
    let mut t = Table::new(&["h", "rank"]);
    for (h, r) in rows {
        t.push(vec![Cell::int(*h), Cell::rank(r.outcome)]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::SearchRow;
    use crate::triple::FamilyTag;

    fn report() -> SearchReport {
        SearchReport {
            family: FamilyTag::Bm,
            rows: vec![
                SearchRow { m: 3, p: 5, n1: Some(9), bound: 100 },
                SearchRow { m: 2, p: 8, n1: None, bound: 100 },
            ],
        }
    }

    #[test]
    fn csv_and_markdown() {
        let t = search_table(&report());
        assert_eq!(t.render(Format::Csv), "m,p,n1,bound\n3,5,9,\n2,8,,100\n");
        assert_eq!(
            t.render(Format::Markdown),
            "| m | p | n1 |\n|---|---|---|\n| 3 | 5 | 9 |\n| 2 | 8 | >100 |\n"
        );
    }

    #[test]
    fn json_rows() {
        let t = search_table(&report());
        let v: Value = serde_json::from_str(&t.render(Format::Json)).unwrap();
        assert_eq!(v[0]["n1"], 9);
        assert_eq!(v[1]["n1"], Value::Null);
        assert_eq!(v[1]["bound"], 100);
    }

    #[test]
    fn cutoff_is_tagged() {
        let rows = vec![
            (3, RankResult { outcome: RankOutcome::Rank(2), witness: None }),
            (4, RankResult { outcome: RankOutcome::ExceedsCutoff(13), witness: None }),
        ];
        let t = rank_table(&rows);
        assert_eq!(t.render(Format::Csv), "h,rank\n3,2\n4,gt:13\n");
        assert!(t.render(Format::Markdown).contains("| 4 | >13 |"));
        assert!(t.render(Format::Json).contains("\"gt:13\""));
    }

    #[test]
    fn empty_tables() {
        let t = rank_table(&[]);
        assert_eq!(t.render(Format::Csv), "h,rank\n");
        assert_eq!(t.render(Format::Markdown), "| h | rank |\n|---|---|\n");
        assert_eq!(t.render(Format::Json), "[]\n");
    }

    #[test]
    fn formats_parse() {
        assert_eq!("MD".parse::<Format>().unwrap(), Format::Markdown);
        assert!("xml".parse::<Format>().is_err());
    }
}
