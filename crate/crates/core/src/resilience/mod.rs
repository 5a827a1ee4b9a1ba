//! How hard a combined list is to manipulate: the single-list rank a new
//! domain needs to enter the top T, and how many domains must be promoted
//! to push a set of flagged domains out of a top-K subset.

mod displacement;
mod probe;
mod threshold;

pub use displacement::{displacement_cost, displacement_csv, displacement_profile, DisplacementRow, MIN_ROW_LABEL};
pub use probe::{entry_threshold_exact, Manipulation, ProbeModel};
pub use threshold::{entry_threshold, Threshold, ThresholdQuery};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ResilienceError {
    #[error("combined list is empty")]
    EmptyList,
    #[error("invalid query: {0}")]
    InvalidQuery(String),
}
