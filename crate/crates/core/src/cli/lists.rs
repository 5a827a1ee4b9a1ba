//! Resolution of list arguments: a file path, `provider:date` for an
//! archived snapshot, or a published record id.

use std::path::{Path, PathBuf};

use chrono::NaiveDate;

use super::CliError;
use crate::combiner::{parse_extended_csv, CombinedList, EXTENDED_HEADER};
use crate::domain::DomainRecord;
use crate::ingest::{parse_canonical_csv, ArchiveStore};
use crate::psl::PublicSuffixRules;
use crate::records::{ListManifest, RecordFormat, RecordStore};
use crate::snapshot::{Provider, ProviderSnapshot};

pub(crate) struct Context {
    pub root: PathBuf,
    pub rules: PublicSuffixRules,
}

impl Context {
    pub fn archive(&self) -> Result<ArchiveStore, CliError> {
        Ok(ArchiveStore::open(&self.root)?)
    }

    pub fn records(&self) -> Result<RecordStore, CliError> {
        Ok(RecordStore::open(&self.root)?)
    }

    /// Ordered domains of a list argument.
    pub fn load_list(&self, arg: &str) -> Result<Vec<DomainRecord>, CliError> {
        let path = Path::new(arg);
        if path.is_file() {
            return self.list_from_file(path);
        }
        if let Some((provider, date)) = parse_archive_key(arg) {
            let snapshot = self.archive()?.get(provider, date, &self.rules)?;
            return Ok(snapshot.domains().cloned().collect());
        }
        let records = self.records()?;
        if records.contains(arg) {
            let bytes = records.serve_record(arg, RecordFormat::List)?;
            return self.list_from_bytes(&bytes, arg);
        }
        Err(CliError::Data(format!(
            "{arg:?} is not a file, an archived provider:date, or a record id"
        )))
    }

    fn list_from_file(&self, path: &Path) -> Result<Vec<DomainRecord>, CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        self.list_from_bytes(&bytes, &path.display().to_string())
    }

    fn list_from_bytes(&self, bytes: &[u8], what: &str) -> Result<Vec<DomainRecord>, CliError> {
        if bytes.starts_with(EXTENDED_HEADER.as_bytes()) {
            let text = std::str::from_utf8(bytes).map_err(|_| CliError::Data(format!("{what}: not UTF-8")))?;
            let entries = parse_extended_csv(text, &self.rules)?;
            return Ok(entries.into_iter().map(|e| e.domain).collect());
        }
        let placeholder = NaiveDate::default();
        let (snapshot, report) = parse_canonical_csv(bytes, Provider::Alexa, placeholder, &self.rules);
        if report.dropped() > 0 {
            return Err(CliError::Data(format!(
                "{what}: unreadable rank,domain lines ({report})"
            )));
        }
        if snapshot.is_empty() {
            return Err(CliError::Data(format!("{what}: empty list")));
        }
        Ok(snapshot.domains().cloned().collect())
    }

    /// A published list with its scores and recipe.
    pub fn load_combined(&self, id: &str) -> Result<CombinedList, CliError> {
        let records = self.records()?;
        if !records.contains(id) {
            return Err(CliError::Data(format!(
                "record {id} not found (threshold queries need a record id)"
            )));
        }
        let manifest: ListManifest = records.verify_record(id)?;
        let bytes = records.serve_record(id, RecordFormat::Extended)?;
        let text = String::from_utf8(bytes).map_err(|_| CliError::Data(format!("record {id}: not UTF-8")))?;
        Ok(CombinedList {
            entries: parse_extended_csv(&text, &self.rules)?,
            config: manifest.config,
            inputs: manifest.inputs,
        })
    }

    /// The archived snapshots a published list was built from, checked
    /// against the manifest digests.
    pub fn load_inputs(&self, list: &CombinedList) -> Result<Vec<ProviderSnapshot>, CliError> {
        let archive = self.archive()?;
        list.inputs
            .iter()
            .map(|input| {
                let s = archive.get(input.provider, input.date, &self.rules)?;
                if s.digest() != input.digest {
                    return Err(CliError::Data(format!(
                        "archived {} {} differs from the record's input",
                        input.provider, input.date
                    )));
                }
                Ok(s)
            })
            .collect()
    }
}

fn parse_archive_key(arg: &str) -> Option<(Provider, NaiveDate)> {
    let (p, d) = arg.split_once(':')?;
    Some((p.parse().ok()?, NaiveDate::parse_from_str(d, "%Y-%m-%d").ok()?))
}

/// Splits `LABEL=PATH`; a bare path is labelled by its file stem.
pub(crate) fn labelled_path(arg: &str) -> (String, PathBuf) {
    if let Some((label, path)) = arg.split_once('=') {
        if !label.is_empty() && !label.contains(['/', '\\']) {
            return (label.to_string(), PathBuf::from(path));
        }
    }
    let path = PathBuf::from(arg);
    let label = path
        .file_stem()
        .map_or_else(|| arg.to_string(), |s| s.to_string_lossy().into_owned());
    (label, path)
}
