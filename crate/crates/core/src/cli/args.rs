use std::path::PathBuf;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};

use crate::combiner::{DateWindow, Method, MissingPolicy, SubdomainPattern};
use crate::snapshot::Provider;

#[derive(Debug, Parser)]
#[command(
    name = "toplist",
    version,
    about = "Combine, filter, and audit top-sites popularity rankings"
)]
pub struct Cli {
    /// Archive root holding snapshots and published records.
    #[arg(long, env = "TOPLIST_ARCHIVE", global = true, default_value = "toplist-archive")]
    pub archive: PathBuf,

    /// Public suffix rules file; defaults to the built-in rules.
    #[arg(long, env = "TOPLIST_PSL", global = true)]
    pub psl: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a provider file and store it in the archive.
    Ingest(IngestArgs),
    /// Build a combined list and publish it as a record.
    Combine(Box<CombineArgs>),
    /// List-quality measurements.
    #[command(subcommand)]
    Metrics(MetricsCommand),
    /// Manipulation-effort estimates.
    #[command(subcommand)]
    Resilience(ResilienceCommand),
    /// Inspect published records.
    #[command(subcommand)]
    Record(RecordCommand),
    /// Serve published records read-only over HTTP.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: String,
    },
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long)]
    pub provider: Provider,
    #[arg(long)]
    pub date: NaiveDate,
    /// The file as published by the provider.
    #[arg(long)]
    pub file: PathBuf,
    /// Replace a different snapshot already stored for this provider and date.
    #[arg(long)]
    pub overwrite: bool,
    /// Also keep the raw file bytes in the archive.
    #[arg(long)]
    pub keep_raw: bool,
}

#[derive(Debug, Args)]
pub struct CombineArgs {
    #[arg(long, value_delimiter = ',', default_values_t = Provider::ALL)]
    pub providers: Vec<Provider>,
    /// Inclusive window `START..END`, or a single day.
    #[arg(long, conflicts_with = "end")]
    pub days: Option<DateWindow>,
    /// Last day of a window of `--window-days` days.
    #[arg(long)]
    pub end: Option<NaiveDate>,
    #[arg(long, default_value_t = 30)]
    pub window_days: u32,
    #[arg(long, default_value_t = Method::Dowdall)]
    pub method: Method,
    #[arg(long, default_value_t = 1_000_000)]
    pub reference_length: u64,
    #[arg(long)]
    pub input_truncation: Option<u64>,
    /// Reduce Umbrella lists to pay-level domains before scoring.
    #[arg(long)]
    pub umbrella_pld: bool,
    #[arg(long, default_value_t = 1)]
    pub min_providers: u32,
    #[arg(long, default_value_t = 1)]
    pub min_days: u32,
    #[arg(long, value_delimiter = ',')]
    pub tld_include: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    pub tld_exclude: Vec<String>,
    /// Keep one name per PLD-minus-TLD group.
    #[arg(long)]
    pub pld_dedupe: bool,
    /// Keep only subdomains whose first label matches, e.g. `login.*`.
    #[arg(long)]
    pub subdomain_pattern: Option<SubdomainPattern>,
    /// Crawl results; enables the health filter.
    #[arg(long)]
    pub crawl: Option<PathBuf>,
    #[arg(long, default_value_t = 200, requires = "crawl")]
    pub status: u16,
    #[arg(long, default_value_t = 512, requires = "crawl")]
    pub min_body_bytes: u64,
    #[arg(long, default_value_t = MissingPolicy::Keep, requires = "crawl")]
    pub missing: MissingPolicy,
    /// Flag file whose domains are removed.
    #[arg(long)]
    pub benign_exclude: Option<PathBuf>,
    /// Domain set the output is intersected with (by name or PLD).
    #[arg(long)]
    pub popular_intersect: Option<PathBuf>,
    #[arg(long)]
    pub output_truncation: Option<u64>,
    /// Date written to the manifest; defaults to today.
    #[arg(long)]
    pub created: Option<NaiveDate>,
}

#[derive(Debug, Subcommand)]
pub enum MetricsCommand {
    /// Rank-biased overlap of two lists.
    Rbo {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long, default_value_t = 0.9)]
        p: f64,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Day-over-day intersection of one provider's archived lists.
    Stability {
        #[arg(long)]
        provider: Provider,
        #[arg(long)]
        days: DateWindow,
    },
    /// TLD distribution of a list.
    Tlds {
        #[arg(long)]
        list: String,
    },
    /// Crawl-outcome tallies for a list.
    Health {
        #[arg(long)]
        list: String,
        #[arg(long)]
        crawl: PathBuf,
    },
    /// Flagged-domain counts within top-K cuts.
    Flags {
        #[arg(long)]
        list: String,
        /// Flag file, optionally `LABEL=PATH`; repeatable.
        #[arg(long = "flags", required = true)]
        flags: Vec<String>,
        #[arg(long, value_delimiter = ',', default_values_t = [10_000usize, 100_000, 1_000_000])]
        cuts: Vec<usize>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ResilienceCommand {
    /// Worst single-list rank that still reaches a combined target rank.
    Threshold {
        /// A published record id.
        #[arg(long)]
        list: String,
        #[arg(long)]
        target: usize,
        #[arg(long, default_value_t = 1)]
        days: u32,
        #[arg(long, default_value_t = 1)]
        providers: u32,
        /// Account for incumbents shifted by the insertion, using the
        /// record's archived inputs.
        #[arg(long)]
        exact: bool,
    },
    /// Domains to promote so flagged domains leave the top K.
    Displace {
        #[arg(long)]
        list: String,
        /// Flagged-domain file, optionally `LABEL=PATH`; repeatable.
        #[arg(long = "flagged", required = true)]
        flagged: Vec<String>,
        #[arg(long = "k", value_delimiter = ',', required = true)]
        cuts: Vec<usize>,
    },
}

#[derive(Debug, Subcommand)]
pub enum RecordCommand {
    /// Check a record's files against its manifest.
    Verify { id: String },
    /// Print one artifact of a verified record.
    Show {
        id: String,
        #[arg(long, default_value = "list", value_parser = ["list", "extended", "manifest"])]
        format: String,
    },
    /// List published record ids.
    Ls,
}
