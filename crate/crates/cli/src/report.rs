//! Tabular reports shared by every subcommand, written as CSV or JSON with the
//! config and library version in the header.

use std::path::{Path, PathBuf};

use kloodist_core::census::CountReport;
use kloodist_core::equidist::WeylReport;
use serde_json::{json, Map, Value};

use crate::config::Format;
use crate::format::fmt_g17;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i128),
    Float(f64),
    Str(String),
    Bool(bool),
    Na,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => fmt_g17(*v),
            Cell::Str(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Str(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Na => "na".into(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => i64::try_from(*v).map_or_else(|_| Value::String(v.to_string()), Value::from),
            Cell::Float(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Str(s) => Value::String(s.clone()),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Na => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Cell {
        Cell::Float(v)
    }
}
impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Cell {
        v.map_or(Cell::Na, Cell::Float)
    }
}
impl From<bool> for Cell {
    fn from(v: bool) -> Cell {
        Cell::Bool(v)
    }
}
impl From<Option<bool>> for Cell {
    fn from(v: Option<bool>) -> Cell {
        v.map_or(Cell::Na, Cell::Bool)
    }
}
impl From<String> for Cell {
    fn from(v: String) -> Cell {
        Cell::Str(v)
    }
}
impl From<&str> for Cell {
    fn from(v: &str) -> Cell {
        Cell::Str(v.to_string())
    }
}
macro_rules! int_cell {
    ($($t:ty),*) => {$(
        impl From<$t> for Cell {
            fn from(v: $t) -> Cell {
                Cell::Int(v as i128)
            }
        }
    )*};
}
int_cell!(usize, u32, u64, u128, i64);

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&'static str]) -> Table {
        Table { name: name.into(), columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width in {}", self.name);
        self.rows.push(row);
    }

    pub fn csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    fn json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> =
                        self.columns.iter().zip(row).map(|(c, v)| (c.to_string(), v.json())).collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

/// Named tables plus a "checks" table of hard assertions.
#[derive(Clone, Debug)]
pub struct Report {
    pub command: &'static str,
    pub tables: Vec<Table>,
    checks: Table,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(command: &'static str) -> Report {
        Report {
            command,
            tables: Vec::new(),
            checks: Table::new("checks", &["check", "pass", "detail"]),
            warnings: Vec::new(),
        }
    }

    pub fn check(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.checks.push(vec![Cell::Str(name.into()), Cell::Bool(pass), Cell::Str(detail.into())]);
    }

    pub fn warn(&mut self, msg: impl Into<String>) {
        let msg = msg.into();
        eprintln!("warning: {msg}");
        self.warnings.push(msg);
    }

    pub fn failures(&self) -> Vec<String> {
        self.checks
            .rows
            .iter()
            .filter(|r| r[1] == Cell::Bool(false))
            .map(|r| format!("{}: {}", r[0].csv(), r[2].csv()))
            .collect()
    }

    fn header(&self, config_json: &str) -> String {
        format!("# kloodist {}\n# version={VERSION}\n# config={config_json}\n", self.command)
    }

    /// Writes `<command>_<table>.csv` per table or one `<command>.json`.
    pub fn write(&self, out: &Path, format: Format, config_json: &str) -> std::io::Result<Vec<PathBuf>> {
        std::fs::create_dir_all(out)?;
        let mut written = Vec::new();
        match format {
            Format::Csv => {
                for t in self.tables.iter().chain([&self.checks]) {
                    let path = out.join(format!("{}_{}.csv", self.command, t.name));
                    let mut text = self.header(config_json);
                    for w in &self.warnings {
                        text.push_str(&format!("# warning={w}\n"));
                    }
                    text.push_str(&t.csv());
                    write_atomic(&path, text.as_bytes())?;
                    written.push(path);
                }
            }
            Format::Json => {
                let tables: Map<String, Value> =
                    self.tables.iter().chain([&self.checks]).map(|t| (t.name.clone(), t.json())).collect();
                let config: Value = serde_json::from_str(config_json).unwrap_or(Value::Null);
                let doc = json!({
                    "command": self.command,
                    "version": VERSION,
                    "config": config,
                    "warnings": self.warnings,
                    "tables": tables,
                });
                let path = out.join(format!("{}.json", self.command));
                let mut text = serde_json::to_string_pretty(&doc).expect("json");
                text.push('\n');
                write_atomic(&path, text.as_bytes())?;
                written.push(path);
            }
        }
        Ok(written)
    }
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    use std::io::Write as _;
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub const COUNT_COLUMNS: [&str; 7] = ["label", "exact", "main", "deviation", "bound", "normalized", "pass"];

pub fn count_row(r: &CountReport) -> Vec<Cell> {
    vec![
        r.label.clone().into(),
        r.exact.into(),
        r.main.into(),
        r.deviation.into(),
        r.bound.into(),
        r.normalized.into(),
        r.pass.into(),
    ]
}

pub fn fmt_k(k: &[u32]) -> String {
    k.iter().map(u32::to_string).collect::<Vec<_>>().join(":")
}

pub const WEYL_COLUMNS: [&str; 6] = ["k", "count", "value", "bound", "ratio", "within"];

pub fn weyl_cells(r: &WeylReport) -> Vec<Cell> {
    vec![fmt_k(&r.k).into(), r.count.into(), r.value.into(), r.bound.into(), r.ratio.into(), r.within_bound().into()]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_cells() {
        let mut t = Table::new("x", &["a", "b", "c", "d", "e"]);
        t.push(vec![Cell::Int(-3), 0.1.into(), "p,q".into(), Cell::Na, Some(true).into()]);
        assert_eq!(t.csv(), "a,b,c,d,e\n-3,0.10000000000000001,\"p,q\",na,true\n");
    }

    #[test]
    fn failures_come_from_checks() {
        let mut r = Report::new("demo");
        r.check("one", true, "");
        r.check("two", false, "off by 1");
        assert_eq!(r.failures(), vec!["two: off by 1".to_string()]);
    }

    #[test]
    fn written_files_carry_config_and_version() {
        let dir = tempfile::tempdir().unwrap();
        let mut r = Report::new("demo");
        let mut t = Table::new("rows", &["n"]);
        t.push(vec![Cell::Int(1)]);
        r.tables.push(t);
        let files = r.write(dir.path(), Format::Csv, "{\"k\":1}").unwrap();
        assert_eq!(files.len(), 2);
        let text = std::fs::read_to_string(&files[0]).unwrap();
        assert!(text.starts_with(&format!("# kloodist demo\n# version={VERSION}\n# config={{\"k\":1}}\nn\n1\n")));
        let files = r.write(dir.path(), Format::Json, "{\"k\":1}").unwrap();
        let doc: Value = serde_json::from_str(&std::fs::read_to_string(&files[0]).unwrap()).unwrap();
        assert_eq!(doc["config"]["k"], 1);
        assert_eq!(doc["tables"]["rows"][0]["n"], 1);
    }
}
