use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

/// Provider label used for the per-cut minimum rows.
pub const MIN_ROW_LABEL: &str = "min";

/// Fewest domains that must be promoted from outside the top `k` to push
/// every flagged domain out of it: `k - r_min + 1`, where `r_min` is the
/// best rank of a flagged domain, or 0 when none is in the top `k`.
pub fn displacement_cost<S: AsRef<str>>(list: &[S], flagged: &HashSet<String>, k: usize) -> usize {
    list.iter()
        .take(k)
        .position(|d| flagged.contains(d.as_ref()))
        .map_or(0, |i| k - i)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisplacementRow {
    pub provider: String,
    pub cut: usize,
    pub cost: usize,
}

/// [`displacement_cost`] for every provider and cut, followed by one
/// [`MIN_ROW_LABEL`] row per cut holding the cheapest cost among providers
/// present in that cut (0 when none is).
pub fn displacement_profile<S: AsRef<str>>(
    list: &[S],
    flagged: &BTreeMap<String, HashSet<String>>,
    cuts: &[usize],
) -> Vec<DisplacementRow> {
    let mut rows = Vec::new();
    for (provider, set) in flagged {
        for &cut in cuts {
            rows.push(DisplacementRow {
                provider: provider.clone(),
                cut,
                cost: displacement_cost(list, set, cut),
            });
        }
    }
    if !flagged.is_empty() {
        for &cut in cuts {
            let cost = rows
                .iter()
                .filter(|r| r.cut == cut && r.cost > 0)
                .map(|r| r.cost)
                .min()
                .unwrap_or(0);
            rows.push(DisplacementRow {
                provider: MIN_ROW_LABEL.to_string(),
                cut,
                cost,
            });
        }
    }
    rows
}

pub fn displacement_csv(rows: &[DisplacementRow]) -> String {
    let mut out = String::from("provider,cut,cost\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{}", r.provider, r.cut, r.cost);
    }
    out
}
