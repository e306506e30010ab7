use crate::config::RunConfig;
use crate::error::CliResult;
use serde_json::{Map, Value};
use std::io::Write;

#[derive(Debug, Clone)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Float(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Text(s) => Value::from(s.clone()),
            Cell::Bool(b) => Value::from(*b),
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}
impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}
impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}
impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}
impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}
impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// Rows plus run metadata.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub meta: Vec<(&'static str, Cell)>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), ..Default::default() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn meta(&mut self, key: &'static str, value: impl Into<Cell>) {
        self.meta.push((key, value.into()));
    }

    fn render_csv(&self, cfg: &RunConfig) -> CliResult<Vec<u8>> {
        let mut buf = Vec::new();
        writeln!(buf, "# config: {}", cfg.echo())?;
        for (k, v) in &self.meta {
            writeln!(buf, "# {k}: {}", v.csv())?;
        }
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(&self.header)?;
            for r in &self.rows {
                w.write_record(r.iter().map(Cell::csv))?;
            }
            w.flush()?;
        }
        Ok(buf)
    }

    fn render_json(&self, cfg: &RunConfig) -> CliResult<Vec<u8>> {
        let mut obj = Map::new();
        obj.insert("config".into(), serde_json::to_value(cfg)?);
        for (k, v) in &self.meta {
            obj.insert((*k).into(), v.json());
        }
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Object(self.header.iter().zip(r).map(|(h, c)| ((*h).to_string(), c.json())).collect()))
            .collect();
        obj.insert("rows".into(), Value::Array(rows));
        let mut buf = serde_json::to_vec_pretty(&Value::Object(obj))?;
        buf.push(b'\n');
        Ok(buf)
    }

    pub fn render(&self, cfg: &RunConfig) -> CliResult<Vec<u8>> {
        if cfg.json_output()? {
            self.render_json(cfg)
        } else {
            self.render_csv(cfg)
        }
    }
}

/// Writes to `--out` or standard output.
pub fn emit(cfg: &RunConfig, bytes: &[u8]) -> CliResult<()> {
    match &cfg.out_path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| crate::error::CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            std::io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}

/// JSON document with the config echo first.
pub fn json_document(cfg: &RunConfig, body: Value) -> CliResult<Vec<u8>> {
    let mut obj = Map::new();
    obj.insert("config".into(), serde_json::to_value(cfg)?);
    if let Value::Object(m) = body {
        obj.extend(m);
    } else {
        obj.insert("result".into(), body);
    }
    let mut buf = serde_json::to_vec_pretty(&Value::Object(obj))?;
    buf.push(b'\n');
    Ok(buf)
}
