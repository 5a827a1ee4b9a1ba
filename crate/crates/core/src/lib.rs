//! Research-oriented top-sites rankings.
//!
//! Ingests daily provider snapshots (Alexa, Cisco Umbrella, Majestic,
//! Quantcast), combines them across providers and days with Borda or
//! Dowdall scoring, filters the result, measures list quality, quantifies
//! how much manipulation a list resists, and publishes content-addressed
//! records that can be cited and re-downloaded bit-exactly.

pub mod cli;
pub mod combiner;
pub mod digest;
pub mod domain;
pub mod ingest;
pub mod metrics;
pub mod psl;
pub mod records;
pub mod resilience;
pub mod snapshot;

pub use digest::Digest;
pub use domain::{parse_domain, DomainRecord, MalformedDomain};
pub use psl::PublicSuffixRules;
pub use snapshot::{snapshot_digest, Provider, ProviderSnapshot, RankedEntry};
