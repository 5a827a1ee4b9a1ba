use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::manifest::{ListManifest, SHORT_ID_LEN};
use super::RecordError;
use crate::digest::Digest;
use crate::ingest::WriterLock;

pub const LIST_FILE: &str = "list.csv";
pub const EXTENDED_FILE: &str = "extended.csv";
pub const MANIFEST_FILE: &str = "manifest.txt";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordFormat {
    List,
    Extended,
    Manifest,
}

impl RecordFormat {
    pub fn file_name(self) -> &'static str {
        match self {
            RecordFormat::List => LIST_FILE,
            RecordFormat::Extended => EXTENDED_FILE,
            RecordFormat::Manifest => MANIFEST_FILE,
        }
    }
}

impl FromStr for RecordFormat {
    type Err = RecordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "list" => Ok(RecordFormat::List),
            "extended" => Ok(RecordFormat::Extended),
            "manifest" => Ok(RecordFormat::Manifest),
            _ => Err(RecordError::InvalidInput(format!("unknown record format {s:?}"))),
        }
    }
}

/// The part of a record that failed verification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CorruptField {
    OutputDigest,
    ExtendedDigest,
    ListId,
    Citation,
    /// The manifest does not parse or is not in canonical form.
    Manifest(String),
}

impl fmt::Display for CorruptField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorruptField::OutputDigest => f.write_str("output_digest"),
            CorruptField::ExtendedDigest => f.write_str("extended_digest"),
            CorruptField::ListId => f.write_str("list_id"),
            CorruptField::Citation => f.write_str("citation"),
            CorruptField::Manifest(why) => write!(f, "manifest ({why})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PublishStatus {
    Created,
    /// The same recipe was already published; nothing was written.
    Existing,
}

/// Published lists under `root/records/<list_id>/`.
///
/// Publishing takes the store's writer lock and moves a fully written
/// directory into place with one rename, so readers see either no record
/// or a complete one.
#[derive(Debug, Clone)]
pub struct RecordStore {
    dir: PathBuf,
}

fn valid_id(id: &str) -> bool {
    id.len() >= SHORT_ID_LEN && id.len() <= 64 && id.bytes().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f'))
}

impl RecordStore {
    pub fn open(root: impl AsRef<Path>) -> Result<Self, RecordError> {
        let dir = root.as_ref().join("records");
        fs::create_dir_all(&dir).map_err(|e| RecordError::io(&dir, e))?;
        Ok(RecordStore { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn record_dir(&self, id: &str) -> PathBuf {
        self.dir.join(id)
    }

    pub fn contains(&self, id: &str) -> bool {
        valid_id(id) && self.record_dir(id).join(MANIFEST_FILE).is_file()
    }

    /// Stores a record, extending the id past 8 characters if a different
    /// recipe already holds the shorter one. Returns the manifest as
    /// stored, which for an already-published recipe is the original.
    pub fn publish(
        &self,
        manifest: ListManifest,
        list_bytes: &[u8],
        extended_bytes: &[u8],
    ) -> Result<(ListManifest, PublishStatus), RecordError> {
        if Digest::of(list_bytes) != manifest.output_digest || Digest::of(extended_bytes) != manifest.extended_digest {
            return Err(RecordError::InvalidInput(
                "files do not match the manifest digests".into(),
            ));
        }
        let _lock = WriterLock::acquire(&self.dir)?;
        let recipe = manifest.recipe_digest();
        let mut manifest = manifest;
        for len in SHORT_ID_LEN..=64 {
            manifest = manifest.with_id_len(len);
            let dir = self.record_dir(&manifest.list_id);
            if !dir.exists() {
                self.write_record(&dir, &manifest, list_bytes, extended_bytes)?;
                return Ok((manifest, PublishStatus::Created));
            }
            let existing = self.read_manifest(&manifest.list_id)?;
            if existing.recipe_digest() == recipe {
                if existing.output_digest != manifest.output_digest {
                    return Err(RecordError::Conflict(existing.list_id));
                }
                return Ok((existing, PublishStatus::Existing));
            }
        }
        Err(RecordError::Conflict(recipe.to_hex()))
    }

    fn write_record(
        &self,
        dir: &Path,
        manifest: &ListManifest,
        list_bytes: &[u8],
        extended_bytes: &[u8],
    ) -> Result<(), RecordError> {
        let tmp = tempfile::Builder::new()
            .prefix(".publish-")
            .tempdir_in(&self.dir)
            .map_err(|e| RecordError::io(&self.dir, e))?;
        for (name, bytes) in [
            (LIST_FILE, list_bytes),
            (EXTENDED_FILE, extended_bytes),
            (MANIFEST_FILE, manifest.to_text().as_bytes()),
        ] {
            let path = tmp.path().join(name);
            fs::write(&path, bytes).map_err(|e| RecordError::io(&path, e))?;
        }
        let staged = tmp.keep();
        fs::rename(&staged, dir).map_err(|e| {
            let _ = fs::remove_dir_all(&staged);
            RecordError::io(dir, e)
        })
    }

    fn read(&self, id: &str, format: RecordFormat) -> Result<Vec<u8>, RecordError> {
        if !self.contains(id) {
            return Err(RecordError::NotFound(id.to_string()));
        }
        let path = self.record_dir(id).join(format.file_name());
        fs::read(&path).map_err(|e| RecordError::io(&path, e))
    }

    fn read_manifest(&self, id: &str) -> Result<ListManifest, RecordError> {
        let bytes = self.read(id, RecordFormat::Manifest)?;
        let text = String::from_utf8(bytes).map_err(|_| RecordError::BadManifest("not UTF-8".into()))?;
        ListManifest::parse(&text)
    }

    /// Checks every stored artifact against the manifest and the manifest
    /// against itself. Returns the manifest when all checks pass.
    pub fn verify_record(&self, id: &str) -> Result<ListManifest, RecordError> {
        let manifest_bytes = self.read(id, RecordFormat::Manifest)?;
        let corrupted = |fields| RecordError::Corrupted {
            id: id.to_string(),
            fields,
        };
        let manifest = std::str::from_utf8(&manifest_bytes)
            .map_err(|_| RecordError::BadManifest("not UTF-8".into()))
            .and_then(ListManifest::parse)
            .map_err(|e| corrupted(vec![CorruptField::Manifest(e.to_string())]))?;

        let mut fields = Vec::new();
        if manifest.to_text().as_bytes() != manifest_bytes.as_slice() {
            fields.push(CorruptField::Manifest("not in canonical form".into()));
        }
        if Digest::of(&self.read(id, RecordFormat::List)?) != manifest.output_digest {
            fields.push(CorruptField::OutputDigest);
        }
        if Digest::of(&self.read(id, RecordFormat::Extended)?) != manifest.extended_digest {
            fields.push(CorruptField::ExtendedDigest);
        }
        if manifest.list_id != id || !manifest.recipe_digest().to_hex().starts_with(id) {
            fields.push(CorruptField::ListId);
        }
        if manifest.citation != super::manifest::citation(&manifest.list_id, manifest.created) {
            fields.push(CorruptField::Citation);
        }
        if fields.is_empty() {
            Ok(manifest)
        } else {
            Err(corrupted(fields))
        }
    }

    /// The stored bytes of one artifact, only after the record verifies.
    pub fn serve_record(&self, id: &str, format: RecordFormat) -> Result<Vec<u8>, RecordError> {
        self.verify_record(id)?;
        self.read(id, format)
    }

    /// Ids of all published records, sorted.
    pub fn list_ids(&self) -> Result<Vec<String>, RecordError> {
        let mut ids = Vec::new();
        for entry in fs::read_dir(&self.dir).map_err(|e| RecordError::io(&self.dir, e))? {
            let entry = entry.map_err(|e| RecordError::io(&self.dir, e))?;
            if let Some(name) = entry.file_name().to_str() {
                if self.contains(name) {
                    ids.push(name.to_string());
                }
            }
        }
        ids.sort();
        Ok(ids)
    }
}
