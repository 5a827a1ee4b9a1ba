use std::collections::{BTreeMap, HashSet};
use std::io::Write;

use super::args::{CombineArgs, IngestArgs, MetricsCommand, RecordCommand, ResilienceCommand};
use super::lists::{labelled_path, Context};
use super::{Cli, CliError, Command};
use crate::combiner::{
    extended_csv, finalize, list_csv, CombineConfig, CombinedList, Combiner, CrawlIndex, DateWindow, FilterInputs,
    FlagSet, HealthFilter, SetRef,
};
use crate::ingest::{parse_provider_file, PutStatus};
use crate::metrics::{
    flag_csv, flag_summary, health_summary, rbo, stability_series, tld_csv, tld_distribution, RboParams,
};
use crate::psl::PublicSuffixRules;
use crate::records::{make_manifest, serve_http, PublishStatus, RecordFormat};
use crate::resilience::{
    displacement_csv, displacement_profile, entry_threshold, entry_threshold_exact, Manipulation, ThresholdQuery,
};

/// Name given to the probe domain in exact threshold searches.
const PROBE_NAME: &str = "0probe.invalid";

pub(crate) fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let rules = match &cli.psl {
        Some(path) => {
            PublicSuffixRules::from_file(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?
        }
        None => PublicSuffixRules::builtin(),
    };
    let ctx = Context {
        root: cli.archive,
        rules,
    };
    match cli.command {
        Command::Ingest(args) => ingest(&ctx, args, out, err),
        Command::Combine(args) => combine(&ctx, *args, out, err),
        Command::Metrics(cmd) => metrics(&ctx, cmd, out, err),
        Command::Resilience(cmd) => resilience(&ctx, cmd, out),
        Command::Record(cmd) => record(&ctx, cmd, out),
        Command::Serve { addr } => {
            let store = ctx.records()?;
            writeln!(err, "serving {} on http://{addr}", store.dir().display())?;
            serve_http(&store, addr.as_str())?;
            Ok(())
        }
    }
}

fn ingest(ctx: &Context, args: IngestArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let bytes = std::fs::read(&args.file).map_err(|e| CliError::Data(format!("{}: {e}", args.file.display())))?;
    let (snapshot, report) = parse_provider_file(&bytes, args.provider, args.date, &ctx.rules)?;
    let mut archive = ctx.archive()?;
    if args.keep_raw {
        archive.store_raw(args.provider, args.date, &bytes)?;
    }
    let (entry, status) = archive.put(&snapshot, args.overwrite)?;
    writeln!(out, "{report}")?;
    let status = match status {
        PutStatus::Inserted => "stored",
        PutStatus::Unchanged => "already stored",
        PutStatus::Replaced => "replaced",
    };
    writeln!(
        err,
        "{status} {} {} ({} entries, {})",
        entry.provider, entry.date, entry.count, entry.digest
    )?;
    Ok(())
}

struct LoadedFilters {
    crawl: Option<CrawlIndex>,
    benign: Option<FlagSet>,
    popular: Option<FlagSet>,
}

fn build_config(ctx: &Context, args: &CombineArgs) -> Result<(CombineConfig, LoadedFilters), CliError> {
    let window = match (args.days, args.end) {
        (Some(w), _) => w,
        (None, Some(end)) => DateWindow::ending(end, args.window_days),
        (None, None) => return Err(CliError::Usage("one of --days or --end is required".into())),
    };
    let mut c = CombineConfig::new(args.providers.iter().copied(), window);
    c.method = args.method;
    c.reference_length = args.reference_length;
    c.input_truncation = args.input_truncation;
    c.umbrella_pld_mode = args.umbrella_pld;
    c.min_providers = args.min_providers;
    c.min_days = args.min_days;
    let tlds = |v: &[String]| {
        v.iter()
            .map(|t| t.trim().trim_start_matches('.').to_ascii_lowercase())
            .collect()
    };
    c.tld_include = tlds(&args.tld_include);
    c.tld_exclude = tlds(&args.tld_exclude);
    c.pld_dedupe_across_tlds = args.pld_dedupe;
    c.subdomain_pattern = args.subdomain_pattern.clone();
    c.output_truncation = args.output_truncation;
    c.public_suffix_digest = Some(ctx.rules.source_digest());

    let crawl = args.crawl.as_deref().map(CrawlIndex::from_file).transpose()?;
    if let Some(crawl) = &crawl {
        c.health_filter = Some(HealthFilter {
            require_reachable: true,
            status: Some(args.status),
            min_body_bytes: Some(args.min_body_bytes),
            missing: args.missing,
            crawl_digest: crawl.source_digest(),
        });
    }
    let load_set = |path: &Option<std::path::PathBuf>| -> Result<Option<FlagSet>, CliError> {
        let Some(path) = path else { return Ok(None) };
        let (label, path) = labelled_path(&path.to_string_lossy());
        Ok(Some(FlagSet::from_file(label, &path)?))
    };
    let benign = load_set(&args.benign_exclude)?;
    let popular = load_set(&args.popular_intersect)?;
    let set_ref = |s: &FlagSet| SetRef {
        label: s.label.clone(),
        digest: s.source_digest,
    };
    c.benign_exclude = benign.as_ref().map(set_ref);
    c.popular_intersect = popular.as_ref().map(set_ref);
    c.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok((c, LoadedFilters { crawl, benign, popular }))
}

/// Streams the archived inputs of `config` through the combiner, one
/// snapshot in memory at a time.
fn combine_from_archive(ctx: &Context, config: &CombineConfig, err: &mut dyn Write) -> Result<CombinedList, CliError> {
    let archive = ctx.archive()?;
    let mut keys = Vec::new();
    for day in config.window.days() {
        for &provider in &config.providers {
            if archive.entry(provider, day).is_some() {
                keys.push((provider, day));
            } else {
                writeln!(err, "missing input: {provider},{day}")?;
            }
        }
    }
    if keys.is_empty() {
        return Err(CliError::Data(
            "no archived inputs for the selected providers and window".into(),
        ));
    }
    let mut combiner = Combiner::new(config)?;
    for &(provider, day) in &keys {
        combiner.add(&archive.get(provider, day, &ctx.rules)?)?;
    }
    combiner.finish_with(|visit| {
        for &(provider, day) in &keys {
            visit(&archive.get(provider, day, &ctx.rules)?);
        }
        Ok::<(), CliError>(())
    })
}

fn combine(ctx: &Context, args: CombineArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let (config, filters) = build_config(ctx, &args)?;
    let list = combine_from_archive(ctx, &config, err)?;
    let list = finalize(
        list,
        FilterInputs {
            crawl: filters.crawl.as_ref(),
            benign: filters.benign.as_ref(),
            popular: filters.popular.as_ref(),
        },
    )?;
    let (list_bytes, extended_bytes) = (list_csv(&list), extended_csv(&list));
    let created = args.created.unwrap_or_else(|| chrono::Local::now().date_naive());
    let manifest = make_manifest(
        &list.config,
        &list.inputs,
        list_bytes.as_bytes(),
        extended_bytes.as_bytes(),
        created,
    )?;
    let (stored, status) = ctx
        .records()?
        .publish(manifest, list_bytes.as_bytes(), extended_bytes.as_bytes())?;
    let status = match status {
        PublishStatus::Created => "published",
        PublishStatus::Existing => "already published",
    };
    writeln!(
        err,
        "{status} {} ({} entries from {} inputs)",
        stored.list_id,
        list.len(),
        list.inputs.len()
    )?;
    writeln!(out, "{}", stored.list_id)?;
    Ok(())
}

fn names(domains: &[crate::domain::DomainRecord]) -> Vec<&str> {
    domains.iter().map(|d| d.name()).collect()
}

fn metrics(ctx: &Context, cmd: MetricsCommand, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        MetricsCommand::Rbo { a, b, p, depth } => {
            let (a, b) = (ctx.load_list(&a)?, ctx.load_list(&b)?);
            let (a, b) = (names(&a), names(&b));
            let depth = depth.unwrap_or(a.len().min(b.len()));
            let value = rbo(&a, &b, RboParams::with_depth(p, depth))?;
            write!(out, "p,depth,rbo\n{p},{depth},{value}\n")?;
        }
        MetricsCommand::Stability { provider, days } => {
            let archive = ctx.archive()?;
            let mut lists = Vec::new();
            for day in days.days() {
                if archive.entry(provider, day).is_none() {
                    writeln!(err, "missing input: {provider},{day}")?;
                    continue;
                }
                let s = archive.get(provider, day, &ctx.rules)?;
                lists.push((day, s.names().map(str::to_string).collect::<Vec<_>>()));
            }
            out.write_all(stability_series(provider.as_str(), lists)?.to_csv().as_bytes())?;
        }
        MetricsCommand::Tlds { list } => {
            let list = ctx.load_list(&list)?;
            out.write_all(tld_csv(&tld_distribution(&list)).as_bytes())?;
        }
        MetricsCommand::Health { list, crawl } => {
            let list = ctx.load_list(&list)?;
            let crawl = CrawlIndex::from_file(&crawl)?;
            out.write_all(health_summary(names(&list), &crawl).to_csv().as_bytes())?;
        }
        MetricsCommand::Flags { list, flags, cuts } => {
            let list = ctx.load_list(&list)?;
            let sets = flags
                .iter()
                .map(|arg| {
                    let (label, path) = labelled_path(arg);
                    FlagSet::from_file(label, &path)
                })
                .collect::<Result<Vec<_>, _>>()?;
            out.write_all(flag_csv(&flag_summary(&names(&list), &sets, &cuts)).as_bytes())?;
        }
    }
    Ok(())
}

fn resilience(ctx: &Context, cmd: ResilienceCommand, out: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        ResilienceCommand::Threshold {
            list,
            target,
            days,
            providers,
            exact,
        } => {
            let list = ctx.load_combined(&list)?;
            let result = if exact {
                let snapshots = ctx.load_inputs(&list)?;
                let manipulation = Manipulation::latest(&list, days, providers, PROBE_NAME);
                entry_threshold_exact(&list, &snapshots, target, &manipulation)?
            } else {
                let query = ThresholdQuery {
                    target_rank: target,
                    days_manipulated: days,
                    providers_manipulated: providers,
                };
                entry_threshold(&list, query)?
            };
            write!(
                out,
                "target,days,providers,rank\n{target},{days},{providers},{result}\n"
            )?;
        }
        ResilienceCommand::Displace { list, flagged, cuts } => {
            let list = ctx.load_list(&list)?;
            let mut sets = BTreeMap::new();
            for arg in &flagged {
                let (label, path) = labelled_path(arg);
                let set = FlagSet::from_file(label.clone(), &path)?;
                sets.insert(label, set.domains.into_iter().collect::<HashSet<_>>());
            }
            out.write_all(displacement_csv(&displacement_profile(&names(&list), &sets, &cuts)).as_bytes())?;
        }
    }
    Ok(())
}

fn record(ctx: &Context, cmd: RecordCommand, out: &mut dyn Write) -> Result<(), CliError> {
    let store = ctx.records()?;
    match cmd {
        RecordCommand::Verify { id } => {
            let m = store.verify_record(&id)?;
            write!(out, "list_id,status,created\n{},ok,{}\n", m.list_id, m.created)?;
        }
        RecordCommand::Show { id, format } => {
            let format: RecordFormat = format.parse()?;
            out.write_all(&store.serve_record(&id, format)?)?;
        }
        RecordCommand::Ls => {
            for id in store.list_ids()? {
                writeln!(out, "{id}")?;
            }
        }
    }
    Ok(())
}
