use std::path::{Path, PathBuf};
use std::time::Duration;

use chrono::{DateTime, Utc};
use log::{info, warn};
use wri_core::analytics::{export_report, read_report_json, write_stats_json, ReportFormat};
use wri_core::ingestion::{HttpTransport, SourcesConfig, Transport, WritePolicy};
use wri_core::{
    golden, impute, load_catalog, load_universe, plot_series, run_index, Catalog, Collector, Error,
    FixtureStore, IndexConfig, IndexReport, Mode, Provenance, Result, Snapshot, Universe,
};

use crate::config::RunConfig;
use crate::{CollectArgs, IndexArgs, ReportArgs, VerifyArgs};

pub enum Outcome {
    Success,
    ChecksFailed,
}

const DEFAULT_TOP: usize = 10;

pub const SNAPSHOT_FILE: &str = "snapshot.json";
pub const RANKINGS_FILE: &str = "rankings.csv";
pub const REPORT_FILE: &str = "report.json";
pub const STATS_FILE: &str = "stats.json";
pub const PLOT_FILE: &str = "plot_series.csv";
pub const NORMALIZED_FILE: &str = "normalized.csv";

fn output_dir(flag: &Option<PathBuf>, config: &RunConfig) -> Result<PathBuf> {
    let out = flag
        .clone()
        .or_else(|| config.out.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    std::fs::create_dir_all(&out).map_err(|source| Error::Io {
        path: out.clone(),
        source,
    })?;
    Ok(out)
}

fn either<'a>(flag: &'a Option<PathBuf>, config: &'a Option<PathBuf>) -> Option<&'a Path> {
    flag.as_deref().or(config.as_deref())
}

pub fn collect(args: &CollectArgs, config: &RunConfig) -> Result<Outcome> {
    let mode = args.mode.or(config.mode).unwrap_or_default();
    let catalog = match either(&args.catalog, &config.catalog) {
        Some(p) => load_catalog(p)?,
        None => Catalog::bundled(),
    };
    let universe = match either(&args.universe, &config.universe) {
        Some(p) => load_universe(p)?,
        None => Universe::bundled(),
    };
    let sources = match either(&args.sources, &config.sources) {
        Some(p) => SourcesConfig::load(p)?,
        None => SourcesConfig::bundled(),
    };
    let fixtures = either(&args.fixtures, &config.fixtures);

    let store = match (mode, fixtures) {
        (Mode::Live, _) => None,
        (Mode::Replay, Some(root)) => Some(FixtureStore::replay(root)?),
        (Mode::Record, Some(root)) => {
            let policy = if args.keep_previous {
                WritePolicy::KeepPrevious
            } else {
                WritePolicy::Overwrite
            };
            Some(FixtureStore::record(root, policy)?)
        }
        (_, None) => {
            return Err(Error::Config(format!("--mode {mode} requires --fixtures")));
        }
    };
    let transport: Option<HttpTransport> = (mode != Mode::Replay).then(|| {
        let agent = args
            .user_agent
            .as_deref()
            .or(config.user_agent.as_deref())
            .unwrap_or(&sources.user_agent);
        HttpTransport::new(agent, Duration::from_secs(sources.timeout_secs))
    });

    let mut collector = Collector::from_config(&sources)?;
    if let Some(limit) = args.rate_limit.or(config.rate_limit) {
        collector = collector.with_default_rate_limit(limit);
    }
    let now = if args.deterministic {
        DateTime::<Utc>::UNIX_EPOCH
    } else {
        Utc::now()
    };
    collector = collector.with_fixed_timestamp(now);

    info!("collecting {} companies in {mode} mode", universe.len());
    let collection = collector.collect(
        &universe,
        &catalog,
        mode,
        store.as_ref(),
        transport.as_ref().map(|t| t as &dyn Transport),
    )?;
    for w in &collection.warnings {
        warn!("{w}");
    }

    let total = collection.snapshot.observations.len();
    let missing = collection.snapshot.missing_count();
    let snapshot = if args.no_impute {
        collection.snapshot
    } else {
        let imputation = impute(&collection.snapshot);
        for f in &imputation.flags {
            warn!(
                "{}/{}: {} ({})",
                f.company_id, f.indicator_id, f.value, f.reason
            );
        }
        imputation.snapshot
    };
    let imputed = snapshot.count_by_provenance(Provenance::Imputed);

    let out = output_dir(&args.out, config)?;
    let path = out.join(SNAPSHOT_FILE);
    snapshot.save(&path)?;
    println!(
        "{} companies x {} indicators: {} collected, {} missing, {} imputed, {} warnings",
        snapshot.universe.len(),
        snapshot.catalog.iter().filter(|s| s.included).count(),
        total - missing,
        missing,
        imputed,
        collection.warnings.len(),
    );
    println!("snapshot written to {}", path.display());
    Ok(Outcome::Success)
}

pub fn index(args: &IndexArgs, config: &RunConfig) -> Result<Outcome> {
    let snapshot = Snapshot::load(&args.snapshot)?;
    let index_config = IndexConfig {
        method: args.method.or(config.method).unwrap_or_default(),
        orientation: args.orientation.or(config.orientation).unwrap_or_default(),
        rescale_final: !args.no_rescale && config.rescale_final.unwrap_or(true),
        ..IndexConfig::default()
    };
    let mut run = run_index(&snapshot, &index_config)?;
    if !args.deterministic {
        run.report.generated_at = Some(Utc::now());
    }

    let out = output_dir(&args.out, config)?;
    export_report(&run.report, ReportFormat::Csv, out.join(RANKINGS_FILE))?;
    export_report(&run.report, ReportFormat::Json, out.join(REPORT_FILE))?;
    write_stats_json(&run.report.stats, out.join(STATS_FILE))?;
    plot_series(&run.report.companies).write_csv(out.join(PLOT_FILE))?;
    run.matrix.write_csv(out.join(NORMALIZED_FILE))?;

    print_report(&run.report, args.top.or(config.top).unwrap_or(DEFAULT_TOP));
    println!("reports written to {}", out.display());
    Ok(Outcome::Success)
}

pub fn verify(args: &VerifyArgs) -> Result<Outcome> {
    let rows = match &args.golden {
        Some(p) => golden::load(p)?,
        None => golden::bundled(),
    };
    let checks = golden::verify(&rows)?;
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    for c in &checks {
        println!(
            "{} {:width$}  expected {}  got {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.expected,
            c.actual,
        );
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    if failed == 0 {
        println!("all {} checks passed", checks.len());
        Ok(Outcome::Success)
    } else {
        println!("{failed} of {} checks failed", checks.len());
        Ok(Outcome::ChecksFailed)
    }
}

pub fn report(args: &ReportArgs, config: &RunConfig) -> Result<Outcome> {
    let report = read_report_json(&args.input)?;
    print_report(&report, args.top.or(config.top).unwrap_or(DEFAULT_TOP));
    if let Some(path) = &args.csv {
        export_report(&report, ReportFormat::Csv, path)?;
        println!("ranking written to {}", path.display());
    }
    Ok(Outcome::Success)
}

fn print_report(report: &IndexReport, top: usize) {
    println!(
        "method {}, orientation {}, {}; K = {}, C = {}",
        report.method,
        report.orientation,
        if report.rescaled {
            "rescaled"
        } else {
            "not rescaled"
        },
        report.counts.total,
        report.counts.positive,
    );
    if !report.skipped_indicators.is_empty() {
        println!("skipped: {}", report.skipped_indicators.join(", "));
    }
    let name_width = report
        .companies
        .iter()
        .take(top)
        .map(|c| c.name.chars().count())
        .max()
        .unwrap_or(4)
        .max(4);
    println!("{:>4}  {:<name_width$}  {:>11}", "rank", "name", "wri");
    for c in report.companies.iter().take(top) {
        let pad = name_width - c.name.chars().count();
        println!(
            "{:>4}  {}{}  {:>11.9}",
            c.rank,
            c.name,
            " ".repeat(pad),
            c.wri
        );
    }
    let s = &report.stats;
    println!(
        "n = {}  mean {:.9}  min {:.9}  max {:.9}  sd(pop) {:.9}  sd(sample) {}",
        s.count,
        s.mean,
        s.min,
        s.max,
        s.sd_population,
        s.sd_sample
            .map_or_else(|| "n/a".to_string(), |v| format!("{v:.9}")),
    );
}
