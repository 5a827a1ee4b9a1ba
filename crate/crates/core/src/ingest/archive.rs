//! Dated snapshot archive.
//!
//! Layout: `<root>/<provider>/<YYYY-MM-DD>.csv` holding the canonical
//! `rank,domain` form, plus `<root>/index.csv` with one
//! `provider,date,digest,count` record per stored snapshot. Files are
//! published with write-temp-then-rename, so readers never see a partial
//! file. A single writer is enforced with `<root>/.lock`.

use std::collections::BTreeMap;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;

use super::parsers::parse_canonical_csv;
use crate::digest::Digest;
use crate::psl::PublicSuffixRules;
use crate::snapshot::{Provider, ProviderSnapshot};

const INDEX_FILE: &str = "index.csv";
const LOCK_FILE: &str = ".lock";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexEntry {
    pub provider: Provider,
    pub date: NaiveDate,
    pub digest: Digest,
    pub count: usize,
}

impl IndexEntry {
    /// Path of the stored file, relative to the archive root.
    pub fn relative_path(&self) -> PathBuf {
        Path::new(self.provider.as_str()).join(format!("{}.csv", self.date.format("%Y-%m-%d")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PutStatus {
    Inserted,
    Unchanged,
    Replaced,
}

#[derive(Debug, thiserror::Error)]
pub enum ArchiveError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("conflict: {provider} {date} is already archived with digest {existing} (new digest {new}); pass overwrite to replace it")]
    Conflict {
        provider: Provider,
        date: NaiveDate,
        existing: Digest,
        new: Digest,
    },
    #[error("not found: no {provider} snapshot for {date}")]
    NotFound { provider: Provider, date: NaiveDate },
    #[error("corrupted archive entry {provider} {date}: {reason}")]
    Corrupted {
        provider: Provider,
        date: NaiveDate,
        reason: String,
    },
    #[error("bad index line {line}: {text:?}")]
    BadIndex { line: usize, text: String },
    #[error("archive is locked by another writer ({0}); remove the lock file if no writer is running")]
    Locked(PathBuf),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ArchiveError + '_ {
    move |source| ArchiveError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub struct ArchiveStore {
    root: PathBuf,
    index: BTreeMap<(Provider, NaiveDate), IndexEntry>,
}

impl ArchiveStore {
    /// Opens (creating if needed) an archive rooted at `root`.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, ArchiveError> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(io_err(&root))?;
        let index_path = root.join(INDEX_FILE);
        let mut index = BTreeMap::new();
        match fs::read_to_string(&index_path) {
            Ok(text) => {
                for (i, line) in text.lines().enumerate() {
                    if line.trim().is_empty() {
                        continue;
                    }
                    let entry = parse_index_line(line).ok_or_else(|| ArchiveError::BadIndex {
                        line: i + 1,
                        text: line.to_string(),
                    })?;
                    index.insert((entry.provider, entry.date), entry);
                }
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
            Err(e) => return Err(io_err(&index_path)(e)),
        }
        Ok(ArchiveStore { root, index })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn entry(&self, provider: Provider, date: NaiveDate) -> Option<&IndexEntry> {
        self.index.get(&(provider, date))
    }

    pub fn entries(&self) -> impl Iterator<Item = &IndexEntry> {
        self.index.values()
    }

    pub fn dates(&self, provider: Provider) -> Vec<NaiveDate> {
        self.index
            .keys()
            .filter(|(p, _)| *p == provider)
            .map(|&(_, d)| d)
            .collect()
    }

    /// Stores `snapshot`. Re-putting an identical snapshot is a no-op;
    /// a different snapshot for an occupied key is a conflict unless
    /// `overwrite` is set.
    pub fn put(
        &mut self,
        snapshot: &ProviderSnapshot,
        overwrite: bool,
    ) -> Result<(IndexEntry, PutStatus), ArchiveError> {
        let key = (snapshot.provider(), snapshot.date());
        let entry = IndexEntry {
            provider: snapshot.provider(),
            date: snapshot.date(),
            digest: snapshot.digest(),
            count: snapshot.len(),
        };
        let status = match self.index.get(&key) {
            Some(existing) if existing.digest == entry.digest => return Ok((existing.clone(), PutStatus::Unchanged)),
            Some(existing) if !overwrite => {
                return Err(ArchiveError::Conflict {
                    provider: key.0,
                    date: key.1,
                    existing: existing.digest,
                    new: entry.digest,
                })
            }
            Some(_) => PutStatus::Replaced,
            None => PutStatus::Inserted,
        };

        let _lock = WriterLock::acquire(&self.root)?;
        let path = self.root.join(entry.relative_path());
        write_atomic(&path, snapshot.to_canonical_csv().as_bytes())?;
        let mut index = self.index.clone();
        index.insert(key, entry.clone());
        write_atomic(&self.root.join(INDEX_FILE), render_index(&index).as_bytes())?;
        self.index = index;
        Ok((entry, status))
    }

    /// Loads a stored snapshot, checking its bytes against the index digest.
    pub fn get(
        &self,
        provider: Provider,
        date: NaiveDate,
        rules: &PublicSuffixRules,
    ) -> Result<ProviderSnapshot, ArchiveError> {
        let entry = self
            .entry(provider, date)
            .ok_or(ArchiveError::NotFound { provider, date })?;
        let bytes = self.read_verified(entry)?;
        let (snapshot, report) = parse_canonical_csv(&bytes, provider, date, rules);
        if report.dropped() > 0 || report.rank_gaps > 0 || snapshot.digest() != entry.digest {
            return Err(ArchiveError::Corrupted {
                provider,
                date,
                reason: format!("stored file is not canonical ({report})"),
            });
        }
        Ok(snapshot)
    }

    /// Re-hashes every stored file; returns the entries that fail.
    pub fn verify(&self) -> Vec<ArchiveError> {
        self.index
            .values()
            .filter_map(|e| self.read_verified(e).err())
            .collect()
    }

    /// Keeps downloaded bytes next to the parsed archive, before parsing.
    pub fn store_raw(&self, provider: Provider, date: NaiveDate, bytes: &[u8]) -> Result<PathBuf, ArchiveError> {
        let _lock = WriterLock::acquire(&self.root)?;
        let path = self
            .root
            .join("raw")
            .join(provider.as_str())
            .join(format!("{}.raw", date.format("%Y-%m-%d")));
        write_atomic(&path, bytes)?;
        Ok(path)
    }

    fn read_verified(&self, entry: &IndexEntry) -> Result<Vec<u8>, ArchiveError> {
        let path = self.root.join(entry.relative_path());
        let bytes = fs::read(&path).map_err(io_err(&path))?;
        // the file is the canonical serialization plus a final newline
        let body = bytes.strip_suffix(b"\n").unwrap_or(&bytes);
        let found = Digest::of(body);
        if found != entry.digest {
            return Err(ArchiveError::Corrupted {
                provider: entry.provider,
                date: entry.date,
                reason: format!("digest {found} does not match index {}", entry.digest),
            });
        }
        Ok(bytes)
    }
}

fn parse_index_line(line: &str) -> Option<IndexEntry> {
    let mut parts = line.split(',');
    let provider = parts.next()?.parse().ok()?;
    let date = NaiveDate::parse_from_str(parts.next()?, "%Y-%m-%d").ok()?;
    let digest = parts.next()?.parse().ok()?;
    let count = parts.next()?.parse().ok()?;
    if parts.next().is_some() {
        return None;
    }
    Some(IndexEntry {
        provider,
        date,
        digest,
        count,
    })
}

fn render_index(index: &BTreeMap<(Provider, NaiveDate), IndexEntry>) -> String {
    index
        .values()
        .map(|e| {
            format!(
                "{},{},{},{}\n",
                e.provider,
                e.date.format("%Y-%m-%d"),
                e.digest,
                e.count
            )
        })
        .collect()
}

/// Writes `bytes` to a temp file in the destination directory, then
/// renames it into place.
pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), ArchiveError> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(dir))?;
    tmp.write_all(bytes).map_err(io_err(path))?;
    tmp.as_file().sync_all().map_err(io_err(path))?;
    tmp.persist(path).map_err(|e| io_err(path)(e.error))?;
    Ok(())
}

/// Exclusive writer lock held for the lifetime of the guard.
pub(crate) struct WriterLock(PathBuf);

impl WriterLock {
    pub(crate) fn acquire(dir: &Path) -> Result<Self, ArchiveError> {
        let path = dir.join(LOCK_FILE);
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                let _ = writeln!(f, "{}", std::process::id());
                Ok(WriterLock(path))
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(ArchiveError::Locked(path)),
            Err(e) => Err(io_err(&path)(e)),
        }
    }
}

impl Drop for WriterLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.0);
    }
}
