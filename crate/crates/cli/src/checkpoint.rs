//! Append-only JSONL checkpoint for search sweeps.
//!
//! Layout: a header `{"config":…,"version":…}`, then one
//! `{"z_done":…,"hits":[…],"scanned":…,"covered":…}` per finished square in
//! ascending z, then `{"complete":true}` once the sweep is done.

use std::fs::{File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::records::{CheckpointRecord, CompleteRecord, HeaderRecord};

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("checkpoint {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("checkpoint was written for a different run\n  checkpoint: {found}\n  this run:   {expected}")]
    ConfigMismatch { expected: String, found: String },
    #[error("checkpoint corrupt at byte offset {offset}: {reason}")]
    Corrupt { offset: u64, reason: String },
}

/// State recovered from an existing checkpoint.
#[derive(Debug, Default)]
pub struct Resume {
    pub records: Vec<CheckpointRecord>,
    pub complete: bool,
    /// Bytes of the file that hold complete, valid lines.
    pub valid_len: u64,
    pub dropped_partial_line: bool,
    pub had_header: bool,
}

/// Reads and validates a checkpoint. A missing or empty file yields an empty
/// resume state; a truncated final line is dropped.
pub fn load(path: &Path, canonical: &str, z_lo: i64) -> Result<Resume, CheckpointError> {
    let io_err = |source| CheckpointError::Io { path: path.to_path_buf(), source };
    let bytes = match std::fs::read(path) {
        Ok(b) => b,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(Resume::default()),
        Err(e) => return Err(io_err(e)),
    };
    let mut resume = Resume::default();
    let mut offset = 0usize;
    while offset < bytes.len() {
        let Some(nl) = bytes[offset..].iter().position(|&b| b == b'\n') else {
            // No newline: the writer died mid-line.
            resume.dropped_partial_line = true;
            break;
        };
        let line = &bytes[offset..offset + nl];
        let corrupt = |reason: String| CheckpointError::Corrupt { offset: offset as u64, reason };
        let text = std::str::from_utf8(line).map_err(|e| corrupt(e.to_string()))?;
        if !resume.had_header {
            let header: HeaderRecord = serde_json::from_str(text).map_err(|e| corrupt(format!("bad header: {e}")))?;
            if header.config != canonical || header.version != crate::VERSION {
                return Err(CheckpointError::ConfigMismatch {
                    expected: format!("{canonical} (version {})", crate::VERSION),
                    found: format!("{} (version {})", header.config, header.version),
                });
            }
            resume.had_header = true;
        } else if resume.complete {
            return Err(corrupt("data after the completion record".into()));
        } else if let Ok(done) = serde_json::from_str::<CompleteRecord>(text) {
            if !done.complete {
                return Err(corrupt("completion record set to false".into()));
            }
            resume.complete = true;
        } else {
            let rec: CheckpointRecord = serde_json::from_str(text).map_err(|e| corrupt(e.to_string()))?;
            let want = z_lo + resume.records.len() as i64;
            if rec.z_done != want {
                return Err(corrupt(format!("expected z_done={want}, found {}", rec.z_done)));
            }
            resume.records.push(rec);
        }
        offset += nl + 1;
        resume.valid_len = offset as u64;
    }
    Ok(resume)
}

/// Serialized appender; one instance per sweep.
pub struct CheckpointWriter {
    path: PathBuf,
    file: File,
}

impl CheckpointWriter {
    /// Opens the checkpoint for appending after `valid_len` bytes, cutting
    /// off anything past that (a partial line). Writes the header when the
    /// file holds none.
    pub fn open(path: &Path, resume: &Resume, canonical: &str) -> Result<Self, CheckpointError> {
        let io_err = |source| CheckpointError::Io { path: path.to_path_buf(), source };
        let file = OpenOptions::new().create(true).append(true).open(path).map_err(io_err)?;
        file.set_len(resume.valid_len).map_err(io_err)?;
        let mut w = CheckpointWriter { path: path.to_path_buf(), file };
        if !resume.had_header {
            w.line(&HeaderRecord::new(canonical.to_string()))?;
        }
        Ok(w)
    }

    fn line<T: serde::Serialize>(&mut self, rec: &T) -> Result<(), CheckpointError> {
        let io_err = |source| CheckpointError::Io { path: self.path.clone(), source };
        let mut text = serde_json::to_string(rec).map_err(|e| io_err(e.into()))?;
        text.push('\n');
        self.file.write_all(text.as_bytes()).map_err(io_err)?;
        self.file.flush().map_err(io_err)?;
        Ok(())
    }

    pub fn append(&mut self, rec: &CheckpointRecord) -> Result<(), CheckpointError> {
        self.line(rec)
    }

    pub fn finish(&mut self) -> Result<(), CheckpointError> {
        self.line(&CompleteRecord { complete: true })?;
        self.file.sync_all().map_err(|source| CheckpointError::Io { path: self.path.clone(), source })
    }
}
