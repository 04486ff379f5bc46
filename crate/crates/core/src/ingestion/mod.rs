//! Snapshot collection from per-source adapters, in live, record or replay
//! mode, followed by imputation of missing cells.
//!
//! Each source runs on its own thread with its own rate limiter. Sources
//! are isolated from each other: a failing or panicking adapter turns its
//! own cells MISSING and is reported as a warning. Observations are sorted
//! by `(company_id, indicator_id)` before the snapshot is sealed, so the
//! result does not depend on thread scheduling.

mod adapter;
mod fixtures;
mod ratelimit;
mod transport;

pub use adapter::{
    expand_endpoint, AdapterError, HtmlPatternAdapter, JsonAdapter, PayloadFormat, SourceAdapter,
    SourceConfig, SourcesConfig,
};
pub use fixtures::{
    CellOrigin, FixtureStore, Manifest, ManifestEntry, StoreMode, WritePolicy, MANIFEST_FILE,
};
pub use ratelimit::{RateLimit, RateLimiter};
pub use transport::{HttpTransport, Transport, TransportError};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Catalog, Company, IndicatorSpec, Observation, Provenance, Snapshot, Universe};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Live,
    /// Live fetch, storing every response in the fixture store first.
    Record,
    #[default]
    Replay,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Live => "live",
            Mode::Record => "record",
            Mode::Replay => "replay",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "live" => Ok(Mode::Live),
            "record" => Ok(Mode::Record),
            "replay" => Ok(Mode::Replay),
            other => Err(Error::Config(format!(
                "unknown mode {other:?} (expected live, record or replay)"
            ))),
        }
    }
}

/// A non-fatal problem met during collection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollectWarning {
    pub source_id: String,
    pub company_id: Option<String>,
    pub message: String,
}

impl fmt::Display for CollectWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.company_id {
            Some(c) => write!(f, "{}/{}: {}", self.source_id, c, self.message),
            None => write!(f, "{}: {}", self.source_id, self.message),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Collection {
    pub snapshot: Snapshot,
    pub warnings: Vec<CollectWarning>,
}

pub struct Collector {
    adapters: BTreeMap<String, Box<dyn SourceAdapter>>,
    rate_limits: BTreeMap<String, RateLimit>,
    default_rate_limit: RateLimit,
    fixed_timestamp: Option<DateTime<Utc>>,
}

impl Collector {
    pub fn new(adapters: Vec<Box<dyn SourceAdapter>>) -> Self {
        Collector {
            adapters: adapters
                .into_iter()
                .map(|a| (a.source_id().to_string(), a))
                .collect(),
            rate_limits: BTreeMap::new(),
            default_rate_limit: RateLimit::default(),
            fixed_timestamp: None,
        }
    }

    /// Adapters and per-source rate limits from a sources file.
    pub fn from_config(config: &SourcesConfig) -> Result<Self> {
        let mut collector = Collector::new(config.build_adapters()?);
        for s in &config.sources {
            if let Some(limit) = s.rate_limit {
                collector.rate_limits.insert(s.id.clone(), limit);
            }
        }
        Ok(collector)
    }

    pub fn with_rate_limit(mut self, source_id: impl Into<String>, limit: RateLimit) -> Self {
        self.rate_limits.insert(source_id.into(), limit);
        self
    }

    pub fn with_default_rate_limit(mut self, limit: RateLimit) -> Self {
        self.default_rate_limit = limit;
        self
    }

    /// Stamps every observation (and the snapshot) with `at` instead of the
    /// wall clock.
    pub fn with_fixed_timestamp(mut self, at: DateTime<Utc>) -> Self {
        self.fixed_timestamp = Some(at);
        self
    }

    fn now(&self) -> DateTime<Utc> {
        self.fixed_timestamp.unwrap_or_else(Utc::now)
    }

    /// Collects one observation per (company, included indicator).
    ///
    /// `Replay` needs `store` and never touches `transport`. `Live` needs
    /// `transport`; `Record` needs both.
    pub fn collect(
        &self,
        universe: &Universe,
        catalog: &Catalog,
        mode: Mode,
        store: Option<&FixtureStore>,
        transport: Option<&dyn Transport>,
    ) -> Result<Collection> {
        // source_id -> included indicators it must supply
        let mut plan: BTreeMap<&str, Vec<&IndicatorSpec>> = BTreeMap::new();
        for spec in catalog.included() {
            let adapter = self.adapters.get(&spec.source_id).ok_or_else(|| {
                Error::Config(format!(
                    "indicator {:?} needs source {:?}, which has no adapter",
                    spec.id, spec.source_id
                ))
            })?;
            if !adapter.indicator_ids().contains(&spec.id.as_str()) {
                return Err(Error::Config(format!(
                    "source {:?} does not provide indicator {:?}",
                    spec.source_id, spec.id
                )));
            }
            plan.entry(spec.source_id.as_str()).or_default().push(spec);
        }

        let store = match (mode, store) {
            (Mode::Replay | Mode::Record, None) => {
                return Err(Error::Config(format!("{mode} mode needs a fixture store")))
            }
            (Mode::Record, Some(s)) if s.mode() != StoreMode::Record => {
                return Err(Error::Config(
                    "record mode needs a store opened for recording".into(),
                ))
            }
            (_, s) => s,
        };
        let transport = match (mode, transport) {
            (Mode::Live | Mode::Record, None) => {
                return Err(Error::Config(format!("{mode} mode needs a transport")))
            }
            (Mode::Replay, _) => None,
            (_, t) => t,
        };

        let run = SourceRun {
            universe,
            mode,
            store,
            transport,
            now: &|| self.now(),
        };
        let outcomes: Vec<(Vec<Observation>, Vec<CollectWarning>)> = std::thread::scope(|scope| {
            let handles: Vec<_> = plan
                .iter()
                .map(|(source_id, specs)| {
                    let adapter = self.adapters[*source_id].as_ref();
                    let limiter = RateLimiter::new(
                        self.rate_limits
                            .get(*source_id)
                            .copied()
                            .unwrap_or(self.default_rate_limit),
                    );
                    let run = &run;
                    let handle = scope.spawn(move || run.source(adapter, specs, &limiter));
                    (source_id, specs, handle)
                })
                .collect();
            handles
                .into_iter()
                .map(|(source_id, specs, handle)| {
                    handle.join().unwrap_or_else(|_| {
                        let warning = CollectWarning {
                            source_id: source_id.to_string(),
                            company_id: None,
                            message: "adapter panicked; its cells are missing".into(),
                        };
                        warn!("{warning}");
                        let at = self.now();
                        let provenance = provenance_for(mode);
                        let observations = universe
                            .companies()
                            .iter()
                            .flat_map(|c| specs.iter().map(move |s| (c, s)))
                            .map(|(c, s)| missing(c, s, at, provenance))
                            .collect();
                        (observations, vec![warning])
                    })
                })
                .collect()
        });

        let mut observations = Vec::new();
        let mut warnings = Vec::new();
        for (obs, warn) in outcomes {
            observations.extend(obs);
            warnings.extend(warn);
        }
        Ok(Collection {
            snapshot: Snapshot::new(universe, catalog, observations, self.now()),
            warnings,
        })
    }
}

fn provenance_for(mode: Mode) -> Provenance {
    match mode {
        Mode::Replay => Provenance::Fixture,
        Mode::Live | Mode::Record => Provenance::Live,
    }
}

fn missing(
    company: &Company,
    spec: &IndicatorSpec,
    at: DateTime<Utc>,
    provenance: Provenance,
) -> Observation {
    Observation {
        company_id: company.id.clone(),
        indicator_id: spec.id.clone(),
        raw_value: None,
        collected_at: at,
        provenance,
    }
}

struct SourceRun<'a> {
    universe: &'a Universe,
    mode: Mode,
    store: Option<&'a FixtureStore>,
    transport: Option<&'a dyn Transport>,
    now: &'a (dyn Fn() -> DateTime<Utc> + Sync),
}

impl SourceRun<'_> {
    fn source(
        &self,
        adapter: &dyn SourceAdapter,
        specs: &[&IndicatorSpec],
        limiter: &RateLimiter,
    ) -> (Vec<Observation>, Vec<CollectWarning>) {
        let source_id = adapter.source_id();
        let provenance = provenance_for(self.mode);
        let mut observations = Vec::new();
        let mut warnings = Vec::new();
        let mut warn = |company: Option<&str>, message: String| {
            let w = CollectWarning {
                source_id: source_id.to_string(),
                company_id: company.map(str::to_string),
                message,
            };
            warn!("{w}");
            warnings.push(w);
        };

        let mut endpoint_warned = false;
        for company in self.universe.companies() {
            let payload = match self.fetch(adapter, company, limiter) {
                Ok(p) => p,
                Err(Fetch::NoEndpoint) => {
                    if !endpoint_warned {
                        warn(
                            None,
                            "no live endpoint configured; cells are missing".into(),
                        );
                        endpoint_warned = true;
                    }
                    None
                }
                Err(Fetch::Failed(message)) => {
                    warn(Some(&company.id), message);
                    None
                }
            };
            let at = (self.now)();
            let parsed = match payload.as_deref().map(|p| adapter.parse(p)) {
                None => BTreeMap::new(),
                Some(Ok(values)) => values,
                Some(Err(e)) => {
                    warn(Some(&company.id), e.to_string());
                    BTreeMap::new()
                }
            };
            for spec in specs {
                let mut value = parsed.get(&spec.id).copied().flatten();
                match value {
                    Some(v) if !v.is_finite() => {
                        warn(
                            Some(&company.id),
                            format!("{}: non-finite value {v}", spec.id),
                        );
                        value = None;
                    }
                    Some(v) if v < 0.0 && spec.is_count() => {
                        warn(
                            Some(&company.id),
                            format!("{}: negative count {v}", spec.id),
                        );
                        value = None;
                    }
                    _ => {}
                }
                observations.push(Observation {
                    raw_value: value,
                    ..missing(company, spec, at, provenance)
                });
            }
        }
        (observations, warnings)
    }

    fn fetch(
        &self,
        adapter: &dyn SourceAdapter,
        company: &Company,
        limiter: &RateLimiter,
    ) -> std::result::Result<Option<Vec<u8>>, Fetch> {
        let source_id = adapter.source_id();
        let ext = adapter.payload_extension();
        match self.mode {
            Mode::Replay => {
                let store = self.store.expect("checked in collect");
                store
                    .load(source_id, &company.id, ext)
                    .map_err(|e| Fetch::Failed(format!("fixture unreadable: {e}")))
            }
            Mode::Live | Mode::Record => {
                let url = adapter.request_url(company).ok_or(Fetch::NoEndpoint)?;
                let transport = self.transport.expect("checked in collect");
                limiter.acquire();
                let payload = transport
                    .get(&url)
                    .map_err(|e| Fetch::Failed(e.to_string()))?;
                if self.mode == Mode::Record {
                    let store = self.store.expect("checked in collect");
                    store
                        .save(source_id, &company.id, ext, &payload)
                        .map_err(|e| Fetch::Failed(format!("could not record fixture: {e}")))?;
                }
                Ok(Some(payload))
            }
        }
    }
}

enum Fetch {
    NoEndpoint,
    Failed(String),
}

/// A cell filled by [`impute`] with something other than zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImputationFlag {
    pub company_id: String,
    pub indicator_id: String,
    pub value: f64,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct Imputation {
    pub snapshot: Snapshot,
    pub flags: Vec<ImputationFlag>,
}

/// Fills every MISSING cell and marks it `imputed`.
///
/// Count-like indicators become 0: an absent page has no views, likes or
/// followers. Rank indicators take the worst (largest) rank observed for
/// that indicator in this snapshot, since 0 would be the best possible rank;
/// each such cell is flagged.
pub fn impute(snapshot: &Snapshot) -> Imputation {
    let ranks: BTreeSet<&str> = snapshot
        .catalog
        .iter()
        .filter(|s| s.is_rank())
        .map(|s| s.id.as_str())
        .collect();
    let mut worst: BTreeMap<&str, f64> = BTreeMap::new();
    for o in &snapshot.observations {
        if let (true, Some(v)) = (ranks.contains(o.indicator_id.as_str()), o.raw_value) {
            if v.is_finite() {
                let w = worst.entry(o.indicator_id.as_str()).or_insert(v);
                *w = w.max(v);
            }
        }
    }

    let mut flags = Vec::new();
    let mut out = snapshot.clone();
    for o in out.observations.iter_mut().filter(|o| o.is_missing()) {
        let value = if ranks.contains(o.indicator_id.as_str()) {
            let (value, reason) = match worst.get(o.indicator_id.as_str()) {
                Some(&w) => (w, "missing rank set to the worst observed rank"),
                None => (0.0, "missing rank with no observed ranks; set to 0"),
            };
            flags.push(ImputationFlag {
                company_id: o.company_id.clone(),
                indicator_id: o.indicator_id.clone(),
                value,
                reason: reason.into(),
            });
            value
        } else {
            0.0
        };
        o.raw_value = Some(value);
        o.provenance = Provenance::Imputed;
    }
    Imputation {
        snapshot: out,
        flags,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Group, Polarity};

    fn spec(id: &str, unit: &str, polarity: Polarity) -> IndicatorSpec {
        IndicatorSpec {
            id: id.into(),
            display_name: id.into(),
            group: Group::Wiki,
            polarity,
            source_id: "s".into(),
            unit: unit.into(),
            included: true,
        }
    }

    fn snapshot(cells: &[(&str, &str, Option<f64>)]) -> Snapshot {
        let universe = Universe::new(
            ["A", "B", "C"]
                .iter()
                .enumerate()
                .map(|(i, id)| Company {
                    id: id.to_string(),
                    name: id.to_string(),
                    website: String::new(),
                    plot_index: i as u32 + 1,
                })
                .collect(),
        )
        .unwrap();
        let catalog = Catalog::new(vec![
            spec("wiki_page_views", "count", Polarity::Positive),
            spec("linkedin_followers", "count", Polarity::Positive),
            spec("alexa_rank_tr", "rank", Polarity::Negative),
        ])
        .unwrap();
        let at = DateTime::<Utc>::UNIX_EPOCH;
        let obs = cells
            .iter()
            .map(|(c, i, v)| Observation {
                company_id: c.to_string(),
                indicator_id: i.to_string(),
                raw_value: *v,
                collected_at: at,
                provenance: Provenance::Fixture,
            })
            .collect();
        Snapshot::new(&universe, &catalog, obs, at)
    }

    #[test]
    fn no_wikipedia_entry_becomes_zero_views() {
        let s = snapshot(&[
            ("A", "wiki_page_views", None),
            ("B", "wiki_page_views", Some(12259.0)),
        ]);
        let out = impute(&s);
        let cell = out.snapshot.cell("A", "wiki_page_views").unwrap();
        assert_eq!(cell.raw_value, Some(0.0));
        assert_eq!(cell.provenance, Provenance::Imputed);
        assert!(out.flags.is_empty());
    }

    #[test]
    fn no_linkedin_page_becomes_zero_followers() {
        let s = snapshot(&[
            ("C", "linkedin_followers", None),
            ("A", "linkedin_followers", Some(68114.0)),
        ]);
        assert_eq!(
            impute(&s)
                .snapshot
                .cell("C", "linkedin_followers")
                .unwrap()
                .raw_value,
            Some(0.0)
        );
    }

    #[test]
    fn complete_snapshot_unchanged() {
        let s = snapshot(&[
            ("A", "wiki_page_views", Some(3.0)),
            ("B", "alexa_rank_tr", Some(24.0)),
        ]);
        let out = impute(&s);
        assert_eq!(out.snapshot, s);
        assert!(out.flags.is_empty());
    }

    #[test]
    fn missing_rank_takes_worst_observed_and_is_flagged() {
        let s = snapshot(&[
            ("A", "alexa_rank_tr", Some(24.0)),
            ("B", "alexa_rank_tr", Some(65836.0)),
            ("C", "alexa_rank_tr", None),
        ]);
        let out = impute(&s);
        assert_eq!(
            out.snapshot.cell("C", "alexa_rank_tr").unwrap().raw_value,
            Some(65836.0)
        );
        assert_eq!(out.flags.len(), 1);
        assert_eq!(out.flags[0].company_id, "C");
    }

    #[test]
    fn impute_is_idempotent() {
        let s = snapshot(&[
            ("A", "alexa_rank_tr", None),
            ("B", "alexa_rank_tr", Some(7.0)),
            ("C", "wiki_page_views", None),
        ]);
        let once = impute(&s).snapshot;
        let twice = impute(&once).snapshot;
        assert_eq!(once, twice);
    }

    #[test]
    fn mode_parses() {
        assert_eq!("replay".parse::<Mode>().unwrap(), Mode::Replay);
        assert!("offline".parse::<Mode>().is_err());
    }
}
