//! Reports.
//!
//! The text form starts with the schema tag `undistort-report v1` and the
//! echoed scenario header, followed by one block per analysis:
//!
//! ```text
//! [3 certify-rotation]
//! line = 41
//! homeo = T
//! certificate.verdict = Undistorted
//! ...
//! ```
//!
//! Every value is a plain `key = value` line. Reals are printed with Rust's
//! shortest round-trip formatting, so the text is reproducible bit for bit.
//! Tables are referenced by file name (`table.NAME = FILE`) and written as
//! CSV next to `report.txt` when an output directory is given.

use std::fmt::Write as _;
use std::path::Path;

pub const SCHEMA: &str = "undistort-report v1";

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub file: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory csv write");
        for row in &self.rows {
            w.write_record(row).expect("in-memory csv write");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv flush"))
            .expect("csv output is utf-8")
    }
}

/// One analysis block.
#[derive(Clone, Debug, PartialEq)]
pub struct Record {
    pub index: usize,
    pub kind: String,
    pub entries: Vec<(String, String)>,
}

impl Record {
    pub fn new(index: usize, kind: &str) -> Record {
        Record {
            index,
            kind: kind.to_string(),
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.entries.push((key.into(), value.to_string()));
    }

    pub fn real(&mut self, key: impl Into<String>, value: f64) {
        self.push(key, format!("{value:?}"));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn get_f64(&self, key: &str) -> Option<f64> {
        self.get(key)?.parse().ok()
    }

    pub fn error(&self) -> Option<&str> {
        self.get("error")
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub header: Vec<(String, String)>,
    pub records: Vec<Record>,
    pub tables: Vec<Table>,
}

impl Report {
    pub fn record(&self, index: usize) -> Option<&Record> {
        self.records.iter().find(|r| r.index == index)
    }

    pub fn records_of<'a>(&'a self, kind: &'a str) -> impl Iterator<Item = &'a Record> + 'a {
        self.records.iter().filter(move |r| r.kind == kind)
    }

    pub fn table(&self, file: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.file == file)
    }

    pub fn has_errors(&self) -> bool {
        self.records.iter().any(|r| r.error().is_some())
            || self.header.iter().any(|(k, _)| k == "error")
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{SCHEMA}");
        for (k, v) in &self.header {
            let _ = writeln!(out, "{k} = {v}");
        }
        for r in &self.records {
            let _ = writeln!(out, "\n[{} {}]", r.index, r.kind);
            for (k, v) in &r.entries {
                let _ = writeln!(out, "{k} = {v}");
            }
        }
        out
    }

    /// Writes `report.txt` and every table into `dir`, creating it if needed.
    pub fn write_to(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.txt"), self.text())?;
        for t in &self.tables {
            std::fs::write(dir.join(&t.file), t.to_csv())?;
        }
        Ok(())
    }
}
