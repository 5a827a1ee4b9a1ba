//! Combining provider snapshots into one scored ranking, and the filter
//! pipeline applied to the result.

mod combine;
mod config;
mod filters;
mod inputs;
mod output;
mod scoring;

use chrono::NaiveDate;

use crate::snapshot::Provider;

pub use combine::{combine, umbrella_to_pld, CombinedList, Combiner, InputRef, ProviderSet, ScoredDomain};
pub(crate) use combine::{effective_list, scored_len};
pub use config::{
    CombineConfig, ConfigError, DateWindow, HealthFilter, Method, MissingPolicy, SetRef, SubdomainPattern,
    STANDARD_REFERENCE_LENGTH, STANDARD_WINDOW_DAYS,
};
pub use filters::{
    apply_domain_filters, apply_health_filters, apply_output_truncation, apply_set_filters, finalize, FilterInputs,
};
pub use inputs::{CrawlIndex, CrawlResult, FlagSet, InputFileError};
pub use output::{extended_csv, list_csv, parse_extended_csv, ExtendedCsvError, EXTENDED_HEADER};
pub use scoring::{exact_score, score, score_borda, score_dowdall};

#[derive(Debug, thiserror::Error)]
pub enum CombineError {
    #[error("no input snapshots")]
    EmptyInput,
    #[error("more than one snapshot for {provider} on {date}")]
    Conflict { provider: Provider, date: NaiveDate },
    #[error("snapshot {provider} {date} is outside the configured providers or window")]
    OutOfScope { provider: Provider, date: NaiveDate },
    #[error("snapshot {provider} {date} arrived out of (date, provider) order")]
    OutOfOrder { provider: Provider, date: NaiveDate },
    #[error("the config needs {0}, which was not supplied")]
    MissingFilterInput(&'static str),
    #[error("the supplied {0} does not match the digest pinned in the config")]
    FilterInputMismatch(&'static str),
    #[error(transparent)]
    InvalidConfig(#[from] ConfigError),
}
