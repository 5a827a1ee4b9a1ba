use std::fmt::Write as _;

use chrono::NaiveDate;

use super::RecordError;
use crate::combiner::{CombineConfig, InputRef};
use crate::digest::{Digest, DigestWriter};

/// Length of a list id unless the store had to extend it.
pub const SHORT_ID_LEN: usize = 8;

/// The permanent description of a published list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ListManifest {
    pub list_id: String,
    pub created: NaiveDate,
    pub config: CombineConfig,
    /// Sorted by (provider, date).
    pub inputs: Vec<InputRef>,
    /// Digest of `list.csv`.
    pub output_digest: Digest,
    /// Digest of `extended.csv`.
    pub extended_digest: Digest,
    pub citation: String,
}

/// Hash of the canonical config followed by one `provider,date,digest`
/// line per input. The list id is a prefix of its hex form.
pub fn recipe_digest(config: &CombineConfig, inputs: &[InputRef]) -> Digest {
    let mut w = DigestWriter::new();
    w.update(config.canonical().as_bytes());
    for input in inputs {
        w.update(format!("{input}\n").as_bytes());
    }
    w.finish()
}

pub fn citation(list_id: &str, created: NaiveDate) -> String {
    format!(
        "Combined top-sites ranking, list {list_id}, generated {}; retrieve with GET /list/{list_id}/download",
        created.format("%Y-%m-%d")
    )
}

/// Builds the manifest for a finished list with an 8-character id.
///
/// `inputs` must already be strictly sorted by (provider, date).
pub fn make_manifest(
    config: &CombineConfig,
    inputs: &[InputRef],
    list_bytes: &[u8],
    extended_bytes: &[u8],
    created: NaiveDate,
) -> Result<ListManifest, RecordError> {
    if let Some(w) = inputs
        .windows(2)
        .find(|w| (w[0].provider, w[0].date) >= (w[1].provider, w[1].date))
    {
        return Err(RecordError::InvalidInput(format!(
            "inputs not strictly sorted at {} {}",
            w[1].provider, w[1].date
        )));
    }
    config
        .validate()
        .map_err(|e| RecordError::InvalidInput(e.to_string()))?;
    let list_id = recipe_digest(config, inputs).to_hex()[..SHORT_ID_LEN].to_string();
    Ok(ListManifest {
        citation: citation(&list_id, created),
        list_id,
        created,
        config: config.clone(),
        inputs: inputs.to_vec(),
        output_digest: Digest::of(list_bytes),
        extended_digest: Digest::of(extended_bytes),
    })
}

impl ListManifest {
    pub fn recipe_digest(&self) -> Digest {
        recipe_digest(&self.config, &self.inputs)
    }

    /// Re-labels the manifest with a longer prefix of its recipe digest.
    pub(crate) fn with_id_len(mut self, len: usize) -> Self {
        self.list_id = self.recipe_digest().to_hex()[..len].to_string();
        self.citation = citation(&self.list_id, self.created);
        self
    }

    /// Canonical `key: value` text: fixed keys in fixed order, config keys
    /// prefixed with `config.`, then one `input:` line per input.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "list_id: {}", self.list_id);
        let _ = writeln!(out, "created: {}", self.created.format("%Y-%m-%d"));
        let _ = writeln!(out, "output_digest: {}", self.output_digest);
        let _ = writeln!(out, "extended_digest: {}", self.extended_digest);
        let _ = writeln!(out, "citation: {}", self.citation);
        for line in self.config.canonical().lines() {
            let _ = writeln!(out, "config.{line}");
        }
        for input in &self.inputs {
            let _ = writeln!(out, "input: {input}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, RecordError> {
        let bad = |m: String| RecordError::BadManifest(m);
        let mut lines = text.lines().peekable();
        let mut field = |key: &str| -> Result<String, RecordError> {
            let line = lines.next().ok_or_else(|| bad(format!("missing {key}")))?;
            match line.split_once(": ") {
                Some((k, v)) if k == key => Ok(v.to_string()),
                _ => Err(bad(format!("expected {key}, found {line:?}"))),
            }
        };
        let list_id = field("list_id")?;
        let created = field("created")?;
        let created =
            NaiveDate::parse_from_str(&created, "%Y-%m-%d").map_err(|_| bad(format!("bad date {created:?}")))?;
        let output_digest = field("output_digest")?.parse().map_err(|e| bad(format!("{e}")))?;
        let extended_digest = field("extended_digest")?.parse().map_err(|e| bad(format!("{e}")))?;
        let citation = field("citation")?;

        let mut config_text = String::new();
        while let Some(rest) = lines.peek().and_then(|l| l.strip_prefix("config.")) {
            config_text.push_str(rest);
            config_text.push('\n');
            lines.next();
        }
        let config = CombineConfig::from_canonical(&config_text).map_err(|e| bad(e.to_string()))?;

        let mut inputs = Vec::new();
        for line in lines {
            let rest = line
                .strip_prefix("input: ")
                .ok_or_else(|| bad(format!("unexpected line {line:?}")))?;
            inputs.push(parse_input(rest).ok_or_else(|| bad(format!("bad input {rest:?}")))?);
        }
        Ok(ListManifest {
            list_id,
            created,
            config,
            inputs,
            output_digest,
            extended_digest,
            citation,
        })
    }
}

fn parse_input(s: &str) -> Option<InputRef> {
    let mut parts = s.split(',');
    let input = InputRef {
        provider: parts.next()?.parse().ok()?,
        date: NaiveDate::parse_from_str(parts.next()?, "%Y-%m-%d").ok()?,
        digest: parts.next()?.parse().ok()?,
    };
    parts.next().is_none().then_some(input)
}
