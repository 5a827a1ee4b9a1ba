//! List-quality measurements: similarity, stability, TLD make-up, crawl
//! health and flag presence. Every table renders as CSV with a header.

mod rbo;
mod tables;

pub use rbo::{rbo, RboParams};
pub use tables::{
    daily_intersection, flag_csv, flag_summary, health_summary, stability_series, tld_csv, tld_distribution, FlagRow,
    HealthSummary, StabilityReport, TldRow, THIN_PAGE_BYTES,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricsError {
    #[error("metric undefined for an empty list")]
    EmptyInput,
    #[error("persistence p must lie strictly between 0 and 1, got {0}")]
    InvalidPersistence(f64),
    #[error("depth must be at least 1")]
    ZeroDepth,
    #[error("depth {depth} exceeds the shorter list length {available}")]
    DepthTooLarge { depth: usize, available: usize },
    #[error("duplicate item {0:?} within the evaluated prefix")]
    DuplicateItem(String),
}
