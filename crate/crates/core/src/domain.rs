//! Domain-name semantics: lowercase label sequences with their pay-level
//! domain and effective TLD resolved against a [`PublicSuffixRules`] set.

use std::fmt;

use crate::psl::PublicSuffixRules;

/// A parsed domain name. The PLD and TLD are stored as byte offsets into
/// `name`, since both are always suffixes of it.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DomainRecord {
    name: String,
    pld_start: u32,
    tld_start: u32,
}

impl DomainRecord {
    pub fn name(&self) -> &str {
        &self.name
    }

    /// The registrable domain. For a name that is itself a public suffix
    /// this is the whole name.
    pub fn pld(&self) -> &str {
        &self.name[self.pld_start as usize..]
    }

    pub fn tld(&self) -> &str {
        &self.name[self.tld_start as usize..]
    }

    pub fn is_pld(&self) -> bool {
        self.pld_start == 0 && self.tld_start > 0
    }

    /// True when the whole name is a public suffix (flagged not-a-PLD).
    pub fn is_public_suffix(&self) -> bool {
        self.tld_start == 0
    }

    pub fn is_subdomain(&self) -> bool {
        self.pld_start > 0
    }

    /// The PLD without its TLD, e.g. `google` for `www.google.co.uk`.
    /// Public-suffix names have no such part and return the full name.
    pub fn pld_stem(&self) -> &str {
        if self.is_public_suffix() {
            return &self.name;
        }
        &self.name[self.pld_start as usize..self.tld_start as usize - 1]
    }

    pub fn first_label(&self) -> &str {
        self.name.split('.').next().unwrap_or_default()
    }

    pub fn label_count(&self) -> usize {
        self.name.split('.').count()
    }

    /// The record for this name's PLD.
    pub fn pld_record(&self) -> DomainRecord {
        DomainRecord {
            name: self.pld().to_string(),
            pld_start: 0,
            tld_start: self.tld_start - self.pld_start,
        }
    }
}

impl fmt::Debug for DomainRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DomainRecord")
            .field("name", &self.name)
            .field("pld", &self.pld())
            .field("tld", &self.tld())
            .field("is_pld", &self.is_pld())
            .finish()
    }
}

impl fmt::Display for DomainRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MalformedKind {
    Empty,
    EmptyLabel,
    IllegalCharacter(char),
}

impl fmt::Display for MalformedKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MalformedKind::Empty => f.write_str("empty name"),
            MalformedKind::EmptyLabel => f.write_str("empty label"),
            MalformedKind::IllegalCharacter(c) => write!(f, "illegal character {c:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed domain {input:?}: {kind} at byte {position}")]
pub struct MalformedDomain {
    pub input: String,
    pub kind: MalformedKind,
    pub position: usize,
}

/// Parses a raw domain name.
///
/// Surrounding whitespace and one trailing dot are stripped and ASCII
/// letters are lowercased. Non-ASCII (IDN) labels are kept exactly as
/// published. Labels may contain ASCII alphanumerics, `-`, `_`, and any
/// non-ASCII character.
pub fn parse_domain(raw: &str, rules: &PublicSuffixRules) -> Result<DomainRecord, MalformedDomain> {
    let trimmed = raw.trim();
    let body = trimmed.strip_suffix('.').unwrap_or(trimmed);
    let fail = |kind, position| MalformedDomain {
        input: raw.to_string(),
        kind,
        position,
    };
    if body.is_empty() {
        return Err(fail(MalformedKind::Empty, 0));
    }

    let mut label_len = 0usize;
    for (i, c) in body.char_indices() {
        match c {
            '.' => {
                if label_len == 0 {
                    return Err(fail(MalformedKind::EmptyLabel, i));
                }
                label_len = 0;
            }
            c if c.is_ascii_alphanumeric() || c == '-' || c == '_' || !c.is_ascii() => {
                if c.is_whitespace() {
                    return Err(fail(MalformedKind::IllegalCharacter(c), i));
                }
                label_len += 1;
            }
            c => return Err(fail(MalformedKind::IllegalCharacter(c), i)),
        }
    }
    if label_len == 0 {
        return Err(fail(MalformedKind::EmptyLabel, body.len()));
    }

    let name = body.to_ascii_lowercase();
    Ok(resolve(name, rules))
}

fn resolve(name: String, rules: &PublicSuffixRules) -> DomainRecord {
    let starts: Vec<usize> = std::iter::once(0)
        .chain(name.match_indices('.').map(|(i, _)| i + 1))
        .collect();
    let n = starts.len();
    let suffix_labels = rules.suffix_label_count(&name).min(n);
    let tld_start = starts[n - suffix_labels];
    let pld_start = if suffix_labels < n {
        starts[n - suffix_labels - 1]
    } else {
        0
    };
    DomainRecord {
        pld_start: pld_start as u32,
        tld_start: tld_start as u32,
        name,
    }
}
