//! Single-writer report stream in JSONL or CSV.
//!
//! JSONL is the source of truth. CSV is a flat projection: arrays become
//! `;`-joined cells, nulls become empty cells, and the header and summary
//! records are written as `# `-prefixed JSON comment lines.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::config::OutputFormat;
use crate::records::validate_line;

#[derive(Debug, Error)]
pub enum OutputError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("serialization failed: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv encoding failed: {0}")]
    Csv(#[from] csv::Error),
    #[error("self-check rejected emitted line {line:?}: {reason}")]
    Schema { line: String, reason: String },
}

pub struct Emitter<'w> {
    out: &'w mut (dyn Write + Send),
    format: OutputFormat,
    self_check: bool,
    csv_columns: Option<Vec<String>>,
    lines: u64,
}

impl<'w> Emitter<'w> {
    pub fn new(out: &'w mut (dyn Write + Send), format: OutputFormat, self_check: bool) -> Self {
        Emitter { out, format, self_check, csv_columns: None, lines: 0 }
    }

    pub fn lines_written(&self) -> u64 {
        self.lines
    }

    fn json_line<T: Serialize>(&mut self, rec: &T) -> Result<String, OutputError> {
        let line = serde_json::to_string(rec)?;
        if self.self_check {
            validate_line(&line).map_err(|e| OutputError::Schema { line: line.clone(), reason: e.to_string() })?;
        }
        Ok(line)
    }

    /// Header and summary lines: plain JSONL, or comments in CSV.
    pub fn framing<T: Serialize>(&mut self, rec: &T) -> Result<(), OutputError> {
        let line = self.json_line(rec)?;
        match self.format {
            OutputFormat::Jsonl => writeln!(self.out, "{line}")?,
            OutputFormat::Csv => writeln!(self.out, "# {line}")?,
        }
        self.lines += 1;
        Ok(())
    }

    pub fn record<T: Serialize>(&mut self, rec: &T) -> Result<(), OutputError> {
        let line = self.json_line(rec)?;
        match self.format {
            OutputFormat::Jsonl => writeln!(self.out, "{line}")?,
            OutputFormat::Csv => self.csv_row(serde_json::from_str(&line)?)?,
        }
        self.lines += 1;
        Ok(())
    }

    fn csv_row(&mut self, value: Value) -> Result<(), OutputError> {
        let (columns, cells): (Vec<String>, Vec<String>) = match value {
            Value::Object(map) => map.into_iter().map(|(k, v)| (k, flatten(&v))).unzip(),
            other => (vec!["values".to_string()], vec![flatten(&other)]),
        };
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        if self.csv_columns.as_ref() != Some(&columns) {
            w.write_record(&columns)?;
            self.csv_columns = Some(columns);
        }
        w.write_record(&cells)?;
        let bytes = w.into_inner().map_err(|e| io::Error::other(e.to_string()))?;
        self.out.write_all(&bytes)?;
        Ok(())
    }

    pub fn flush(&mut self) -> Result<(), OutputError> {
        self.out.flush()?;
        Ok(())
    }
}

fn flatten(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(flatten).collect::<Vec<_>>().join(";"),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::records::{HeaderRecord, HitRecord};

    #[test]
    fn csv_projection() {
        let mut buf = Vec::new();
        let mut em = Emitter::new(&mut buf, OutputFormat::Csv, true);
        em.framing(&HeaderRecord::new("search z".into())).unwrap();
        let p = rdsquare_core::classify_point(4, 3, 0).unwrap();
        em.record(&HitRecord::from(&p)).unwrap();
        em.record(&HitRecord::from(&rdsquare_core::classify_point(12, 5, 0).unwrap())).unwrap();
        em.record(&vec![3u64, 5, 7]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert!(lines[0].starts_with("# {\"config\":\"search z\""));
        assert_eq!(lines[1], "z,x,y,sq_dists,roots,count,tags");
        assert_eq!(lines[2], "4,3,0,9;25;17;1,3;5;;1,3,on_edge");
        assert_eq!(lines[3], "12,5,0,25;169;193;49,5;13;;7,3,on_edge");
        assert_eq!(lines[4], "values");
        assert_eq!(lines[5], "3;5;7");
    }

    #[test]
    fn self_check_catches_off_schema_records() {
        #[derive(Serialize)]
        struct Bogus {
            nope: u8,
        }
        let mut buf = Vec::new();
        let mut em = Emitter::new(&mut buf, OutputFormat::Jsonl, true);
        assert!(matches!(em.record(&Bogus { nope: 1 }), Err(OutputError::Schema { .. })));
        let mut em = Emitter::new(&mut buf, OutputFormat::Jsonl, false);
        assert!(em.record(&Bogus { nope: 1 }).is_ok());
    }
}
