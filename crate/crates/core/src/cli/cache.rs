//! Append-only cache of computed `B(n)` values.
//!
//! The file starts with a header line `# cyclo-cache v1 ...` followed by one
//! JSON record per line. Records are never rewritten; a second record for the
//! same `n` is only accepted if it repeats the same value.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const HEADER_PREFIX: &str = "# cyclo-cache v1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheRecord {
    pub n: u64,
    pub b_value: u64,
    pub method: String,
    pub witness: Option<Vec<u64>>,
    pub version: String,
}

#[derive(Debug)]
pub struct Cache {
    path: PathBuf,
    records: BTreeMap<u64, Vec<CacheRecord>>,
}

impl Cache {
    /// Reads the cache at `path`; a missing file is an empty cache.
    pub fn open(path: impl AsRef<Path>) -> Result<Cache> {
        let path = path.as_ref().to_path_buf();
        let mut cache = Cache { path, records: BTreeMap::new() };
        let file = match File::open(&cache.path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(cache),
            Err(e) => return Err(e.into()),
        };
        let mut lines = BufReader::new(file).lines();
        match lines.next().transpose()? {
            None => return Ok(cache),
            Some(h) if h.starts_with(HEADER_PREFIX) => {}
            Some(h) => return Err(Error::Parse(format!("{}: not a cache file (header {h:?})", cache.path.display()))),
        }
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: CacheRecord = serde_json::from_str(&line)
                .map_err(|e| Error::Parse(format!("{} line {}: {e}", cache.path.display(), i + 2)))?;
            cache.check(&rec)?;
            cache.records.entry(rec.n).or_default().push(rec);
        }
        Ok(cache)
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn len(&self) -> usize {
        self.records.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// A cached record for `n`, restricted to `method` if given.
    pub fn lookup(&self, n: u64, method: Option<&str>) -> Option<&CacheRecord> {
        self.records.get(&n)?.iter().find(|r| method.is_none_or(|m| r.method == m))
    }

    fn check(&self, rec: &CacheRecord) -> Result<()> {
        match self.records.get(&rec.n).and_then(|v| v.iter().find(|r| r.b_value != rec.b_value)) {
            Some(old) => Err(Error::CacheConflict { n: rec.n, cached: old.b_value, computed: rec.b_value }),
            None => Ok(()),
        }
    }

    /// Appends `rec` unless an identical record exists. Conflicting values abort.
    pub fn insert(&mut self, rec: CacheRecord) -> Result<()> {
        self.check(&rec)?;
        if self.records.get(&rec.n).is_some_and(|v| v.contains(&rec)) {
            return Ok(());
        }
        let fresh = !self.path.exists() || std::fs::metadata(&self.path)?.len() == 0;
        let mut f = OpenOptions::new().create(true).append(true).open(&self.path)?;
        if fresh {
            let created = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
            writeln!(f, "{HEADER_PREFIX} created_unix={created}")?;
        }
        writeln!(f, "{}", serde_json::to_string(&rec)?)?;
        self.records.entry(rec.n).or_default().push(rec);
        Ok(())
    }
}

/// Every line of the cache file that mentions `n`, for diagnostics.
pub fn dump(path: &Path, n: u64) -> String {
    let Ok(text) = std::fs::read_to_string(path) else { return String::new() };
    text.lines()
        .filter(|l| serde_json::from_str::<CacheRecord>(l).is_ok_and(|r| r.n == n))
        .map(|l| format!("{l}\n"))
        .collect()
}
