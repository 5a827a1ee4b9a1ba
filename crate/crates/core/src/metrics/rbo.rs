use std::collections::HashSet;
use std::fmt::Debug;
use std::hash::Hash;

use super::MetricsError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RboParams {
    pub p: f64,
    /// Evaluation depth; `None` means the shorter list's length.
    pub depth: Option<usize>,
}

impl RboParams {
    pub fn new(p: f64) -> Self {
        RboParams { p, depth: None }
    }

    pub fn with_depth(p: f64, depth: usize) -> Self {
        RboParams { p, depth: Some(depth) }
    }
}

/// Extrapolated rank-biased overlap of the top-`k` prefixes of `a` and `b`:
///
/// `(X_k/k)·p^k + ((1−p)/p)·Σ_{d=1..k} (X_d/d)·p^d`
///
/// where `X_d` is the overlap of the two depth-`d` prefixes. Lists that
/// agree as sets at every depth score exactly 1.0 and lists with no
/// common item in the prefix score exactly 0.0.
pub fn rbo<T: Eq + Hash + Debug>(a: &[T], b: &[T], params: RboParams) -> Result<f64, MetricsError> {
    let p = params.p;
    if !(p > 0.0 && p < 1.0) {
        return Err(MetricsError::InvalidPersistence(p));
    }
    if a.is_empty() || b.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let available = a.len().min(b.len());
    let k = params.depth.unwrap_or(available);
    if k == 0 {
        return Err(MetricsError::ZeroDepth);
    }
    if k > available {
        return Err(MetricsError::DepthTooLarge { depth: k, available });
    }

    let mut seen_a = HashSet::with_capacity(k);
    let mut seen_b = HashSet::with_capacity(k);
    let mut overlap = 0usize;
    let mut all_agree = true;
    let mut sum = 0.0;
    let mut weight = 1.0;
    for d in 1..=k {
        let (x, y) = (&a[d - 1], &b[d - 1]);
        if !seen_a.insert(x) {
            return Err(MetricsError::DuplicateItem(format!("{x:?}")));
        }
        if !seen_b.insert(y) {
            return Err(MetricsError::DuplicateItem(format!("{y:?}")));
        }
        if x == y {
            overlap += 1;
        } else {
            overlap += usize::from(seen_b.contains(x)) + usize::from(seen_a.contains(y));
        }
        all_agree &= overlap == d;
        weight *= p;
        sum += overlap as f64 / d as f64 * weight;
    }
    if all_agree {
        return Ok(1.0);
    }
    let value = (overlap as f64 / k as f64) * weight + (1.0 - p) / p * sum;
    Ok(value.clamp(0.0, 1.0))
}
