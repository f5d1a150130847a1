//! Atomic file output and versioned CSV headers.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::Result;

/// Write `contents` to a temporary sibling and rename it over `path`.
pub fn atomic_write(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

/// Format with 12 significant digits.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    format!("{x:.11e}")
}

/// CSV builder whose first line names the schema and the crate version.
pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn new(schema: &str, columns: &[&str]) -> Self {
        let mut buf = String::new();
        let _ = writeln!(buf, "# schema: {schema}; ionberry {}", env!("CARGO_PKG_VERSION"));
        buf.push_str(&columns.join(","));
        buf.push('\n');
        Csv { buf }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.buf.push_str(&fields.join(","));
        self.buf.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.buf
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        atomic_write(path, self.buf.as_bytes())
    }
}

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
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

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Text(b.to_string())
    }
}

/// A named, versioned table that renders as CSV or as a JSON array of records.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub schema: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(schema: &str, columns: &[&str]) -> Self {
        Table {
            schema: schema.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    fn position(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric entries of a column; text cells give NaN.
    pub fn numbers(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.position(name)?;
        Some(
            self.rows
                .iter()
                .map(|r| match &r[k] {
                    Cell::Num(x) => *x,
                    Cell::Int(i) => *i as f64,
                    Cell::Text(_) => f64::NAN,
                })
                .collect(),
        )
    }

    pub fn texts(&self, name: &str) -> Option<Vec<String>> {
        let k = self.position(name)?;
        Some(
            self.rows
                .iter()
                .map(|r| match &r[k] {
                    Cell::Num(x) => fmt_num(*x),
                    Cell::Int(i) => i.to_string(),
                    Cell::Text(s) => s.clone(),
                })
                .collect(),
        )
    }

    pub fn to_csv(&self) -> Csv {
        let cols: Vec<&str> = self.columns.iter().map(String::as_str).collect();
        let mut csv = Csv::new(&self.schema, &cols);
        for r in &self.rows {
            csv.row(&r
                .iter()
                .map(|c| match c {
                    Cell::Num(x) => fmt_num(*x),
                    Cell::Int(i) => i.to_string(),
                    Cell::Text(s) => s.clone(),
                })
                .collect::<Vec<_>>());
        }
        csv
    }

    /// `{"schema": …, "version": …, "rows": [{column: value, …}, …]}` with
    /// numbers rounded to 12 significant digits; non-finite numbers become null.
    pub fn to_json(&self) -> serde_json::Value {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let obj = self
                    .columns
                    .iter()
                    .zip(r)
                    .map(|(c, v)| {
                        let v = match v {
                            Cell::Num(x) => json_number(*x),
                            Cell::Int(i) => serde_json::Value::from(*i),
                            Cell::Text(s) => serde_json::Value::String(s.clone()),
                        };
                        (c.clone(), v)
                    })
                    .collect::<serde_json::Map<_, _>>();
                serde_json::Value::Object(obj)
            })
            .collect();
        serde_json::json!({
            "schema": self.schema,
            "version": env!("CARGO_PKG_VERSION"),
            "rows": serde_json::Value::Array(rows),
        })
    }
}

/// A JSON number rounded to 12 significant digits, or null.
pub fn json_number(x: f64) -> serde_json::Value {
    fmt_num(x)
        .parse::<f64>()
        .ok()
        .and_then(serde_json::Number::from_f64)
        .map_or(serde_json::Value::Null, serde_json::Value::Number)
}
