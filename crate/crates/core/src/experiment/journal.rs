//! Append-only JSON-lines result files.

use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};

/// Reads every complete record. A trailing line without its newline is what
/// an interrupted write leaves behind; it is cut from the file so appends
/// start on a clean line. A complete line that fails to parse is an error.
pub fn load<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let text = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    let mut good = 0;
    for (i, line) in text.split_inclusive('\n').enumerate() {
        if !line.ends_with('\n') {
            log::warn!("{}: dropping partial line {}", path.display(), i + 1);
            break;
        }
        out.push(serde_json::from_str(line).map_err(|e| {
            Error::Parse { line: i + 1, message: format!("{}: {e}", path.display()) }
        })?);
        good += line.len();
    }
    if good < text.len() {
        OpenOptions::new().write(true).open(path)?.set_len(good as u64)?;
    }
    Ok(out)
}

/// Appender that flushes each record to disk before returning.
pub struct Journal {
    file: File,
    path: PathBuf,
}

impl Journal {
    pub fn open(path: &Path) -> Result<Self> {
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(Self { file, path: path.to_path_buf() })
    }

    pub fn append<T: Serialize>(&mut self, record: &T) -> Result<()> {
        let mut line = serde_json::to_string(record)?;
        line.push('\n');
        self.file.write_all(line.as_bytes())?;
        self.file.flush()?;
        self.file.sync_data()?;
        log::debug!("appended record to {}", self.path.display());
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_tail_is_truncated() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.jsonl");
        std::fs::write(&p, "[1]\n[2]\n[3").unwrap();
        let v: Vec<Vec<u32>> = load(&p).unwrap();
        assert_eq!(v, vec![vec![1], vec![2]]);
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "[1]\n[2]\n");
        Journal::open(&p).unwrap().append(&vec![4u32]).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "[1]\n[2]\n[4]\n");
    }

    #[test]
    fn corrupt_complete_line_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.jsonl");
        std::fs::write(&p, "[1]\nnot json\n").unwrap();
        assert!(matches!(load::<Vec<u32>>(&p), Err(Error::Parse { line: 2, .. })));
        assert!(load::<Vec<u32>>(&dir.path().join("missing")).unwrap().is_empty());
    }
}
