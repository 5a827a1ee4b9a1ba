//! Content-addressed list records: manifests, citations, an on-disk store
//! and a read-only HTTP view of it.

mod http;
mod manifest;
mod store;

use std::path::Path;

pub use http::{route, serve_http, HttpResponse};
pub use manifest::{citation, make_manifest, recipe_digest, ListManifest, SHORT_ID_LEN};
pub use store::{CorruptField, PublishStatus, RecordFormat, RecordStore, EXTENDED_FILE, LIST_FILE, MANIFEST_FILE};

use crate::ingest::ArchiveError;

#[derive(Debug, thiserror::Error)]
pub enum RecordError {
    #[error("record {0} not found")]
    NotFound(String),
    #[error("record {id} is corrupted: {}", fields.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "))]
    Corrupted { id: String, fields: Vec<CorruptField> },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("bad manifest: {0}")]
    BadManifest(String),
    #[error("record {0} already exists with different content")]
    Conflict(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Store(#[from] ArchiveError),
}

impl RecordError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        RecordError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
