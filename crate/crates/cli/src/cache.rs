//! Append-only JSON-lines store of per-prime rank computations.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One rank computation of one consequence matrix modulo one prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRecord {
    /// Preset name, `file:<sha256>` or `dual:<operad>`.
    pub operad: String,
    pub degree: usize,
    pub prime: u64,
    pub monomial_count: u64,
    pub row_count: u64,
    pub rank: u64,
    pub dim: u64,
    pub wall_time_ms: u64,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

impl RunRecord {
    fn key(&self) -> Key {
        (self.operad.clone(), self.degree, self.prime)
    }
}

type Key = (String, usize, u64);

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cache {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("cache {path}, line {line}: {message}")]
    Malformed {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error(
        "rank conflict for {operad} at degree {degree} mod {prime}: cached rank {cached}, new rank {new}; refusing to continue"
    )]
    Conflict {
        operad: String,
        degree: usize,
        prime: u64,
        cached: u64,
        new: u64,
    },
}

pub struct Cache {
    path: PathBuf,
    records: Mutex<HashMap<Key, RunRecord>>,
    writer: Mutex<Writer>,
}

struct Writer {
    file: Option<File>,
    /// Length to cut the file back to before the first append, dropping a
    /// torn line left by an interrupted write.
    truncate_to: Option<u64>,
}

impl Cache {
    /// Loads `path` if it exists. A torn final line (from an interrupted
    /// write) is skipped; any other unreadable line is an error.
    pub fn open(path: &Path) -> Result<Cache, CacheError> {
        let io_err = |source| CacheError::Io {
            path: path.to_path_buf(),
            source,
        };
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == io::ErrorKind::NotFound => String::new(),
            Err(e) => return Err(io_err(e)),
        };
        let torn = !text.is_empty() && !text.ends_with('\n');
        let truncate_to = torn.then(|| text.rfind('\n').map_or(0, |i| i + 1) as u64);
        let lines: Vec<&str> = text.lines().collect();
        let mut records: HashMap<Key, RunRecord> = HashMap::new();
        for (i, line) in lines.iter().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let record: RunRecord = match serde_json::from_str(line) {
                Ok(r) => r,
                Err(_) if torn && i + 1 == lines.len() => {
                    eprintln!(
                        "warning: ignoring incomplete last line of {}",
                        path.display()
                    );
                    break;
                }
                Err(e) => {
                    return Err(CacheError::Malformed {
                        path: path.to_path_buf(),
                        line: i + 1,
                        message: e.to_string(),
                    })
                }
            };
            if let Some(old) = records.get(&record.key()) {
                if old.rank != record.rank {
                    return Err(CacheError::Conflict {
                        operad: record.operad,
                        degree: record.degree,
                        prime: record.prime,
                        cached: old.rank,
                        new: record.rank,
                    });
                }
                continue;
            }
            records.insert(record.key(), record);
        }
        Ok(Cache {
            path: path.to_path_buf(),
            records: Mutex::new(records),
            writer: Mutex::new(Writer {
                file: None,
                truncate_to,
            }),
        })
    }

    pub fn get(&self, operad: &str, degree: usize, prime: u64) -> Option<RunRecord> {
        self.records
            .lock()
            .unwrap()
            .get(&(operad.to_string(), degree, prime))
            .cloned()
    }

    /// Appends a record. A differing rank for a cached key is an error and
    /// nothing is written; an agreeing one keeps the cached record.
    pub fn insert(&self, record: RunRecord) -> Result<RunRecord, CacheError> {
        let mut records = self.records.lock().unwrap();
        if let Some(old) = records.get(&record.key()) {
            if old.rank != record.rank {
                return Err(CacheError::Conflict {
                    operad: record.operad,
                    degree: record.degree,
                    prime: record.prime,
                    cached: old.rank,
                    new: record.rank,
                });
            }
            return Ok(old.clone());
        }
        self.append(&record)?;
        records.insert(record.key(), record.clone());
        Ok(record)
    }

    fn append(&self, record: &RunRecord) -> Result<(), CacheError> {
        let io_err = |source| CacheError::Io {
            path: self.path.clone(),
            source,
        };
        let mut w = self.writer.lock().unwrap();
        if w.file.is_none() {
            if let Some(len) = w.truncate_to.take() {
                OpenOptions::new()
                    .write(true)
                    .open(&self.path)
                    .and_then(|f| f.set_len(len))
                    .map_err(io_err)?;
            }
            let file = OpenOptions::new()
                .create(true)
                .append(true)
                .open(&self.path)
                .map_err(io_err)?;
            w.file = Some(file);
        }
        let mut line = serde_json::to_string(record).expect("records serialize");
        line.push('\n');
        let file = w.file.as_mut().expect("opened above");
        file.write_all(line.as_bytes()).map_err(io_err)?;
        file.flush().map_err(io_err)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(prime: u64, rank: u64) -> RunRecord {
        RunRecord {
            operad: "right-alternative".into(),
            degree: 4,
            prime,
            monomial_count: 120,
            row_count: 192,
            rank,
            dim: 120 - rank,
            wall_time_ms: 1,
            timestamp: 0,
        }
    }

    #[test]
    fn records_survive_reopening() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.jsonl");
        let cache = Cache::open(&path).unwrap();
        cache.insert(record(7, 60)).unwrap();
        cache.insert(record(11, 60)).unwrap();
        let again = Cache::open(&path).unwrap();
        assert_eq!(again.get("right-alternative", 4, 7), Some(record(7, 60)));
        assert_eq!(again.get("right-alternative", 5, 7), None);
    }

    #[test]
    fn conflicting_rank_is_refused() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.jsonl");
        let cache = Cache::open(&path).unwrap();
        cache.insert(record(7, 60)).unwrap();
        let err = cache.insert(record(7, 59)).unwrap_err();
        assert!(
            err.to_string().contains("cached rank 60, new rank 59"),
            "{err}"
        );
        assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 1);
    }

    #[test]
    fn torn_last_line_is_skipped_and_repaired() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.jsonl");
        let full = serde_json::to_string(&record(7, 60)).unwrap();
        std::fs::write(&path, format!("{full}\n{}", &full[..20])).unwrap();
        let cache = Cache::open(&path).unwrap();
        cache.insert(record(11, 60)).unwrap();
        let reopened = Cache::open(&path).unwrap();
        assert!(reopened.get("right-alternative", 4, 11).is_some());
        assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 2);
    }

    #[test]
    fn malformed_middle_line_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.jsonl");
        let full = serde_json::to_string(&record(7, 60)).unwrap();
        std::fs::write(&path, format!("garbage\n{full}\n")).unwrap();
        assert!(matches!(
            Cache::open(&path),
            Err(CacheError::Malformed { line: 1, .. })
        ));
    }
}
