//! Positional scoring with proportional rank rescaling.
//!
//! A list of length `M` is stretched onto the reference length `N`: rank
//! `r` becomes `r' = r * N / M`, so a short list (Quantcast) spans the same
//! score range as a full-length one.
//!
//! * Borda: `N - r'`. On a full-length list ranks 1..N score N-1, ..., 1, 0
//!   and unlisted domains score 0.
//! * Dowdall: `1 / r'`. On a full-length list ranks 1..N score 1, 1/2, ..., 1/N.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::config::Method;

/// Score of `rank` in a list of `list_len` entries, on a reference length
/// of `reference_length`. Requires `1 <= rank <= list_len`.
pub fn score(method: Method, rank: u64, list_len: u64, reference_length: u64) -> f64 {
    debug_assert!(rank >= 1 && rank <= list_len, "rank {rank} outside 1..={list_len}");
    match method {
        Method::Borda => score_borda(rank, list_len, reference_length),
        Method::Dowdall => score_dowdall(rank, list_len, reference_length),
    }
}

pub fn score_borda(rank: u64, list_len: u64, reference_length: u64) -> f64 {
    // N - r*N/M == N*(M-r)/M; exact whenever M == N
    (reference_length as f64) * ((list_len - rank) as f64) / (list_len as f64)
}

pub fn score_dowdall(rank: u64, list_len: u64, reference_length: u64) -> f64 {
    // 1 / (r*N/M) == M / (r*N); a single correctly rounded division
    (list_len as f64) / ((rank as f64) * (reference_length as f64))
}

/// The same score as an exact rational.
pub fn exact_score(method: Method, rank: u64, list_len: u64, reference_length: u64) -> BigRational {
    let (r, m, n) = (
        BigInt::from(rank),
        BigInt::from(list_len),
        BigInt::from(reference_length),
    );
    match method {
        Method::Borda => BigRational::new(n * (&m - r), m),
        Method::Dowdall => BigRational::new(m, r * n),
    }
}
