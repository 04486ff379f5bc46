//! Shared data model: indicator catalog, company universe, observations and
//! snapshots.
//!
//! Catalogs and universes are TOML files (`[[indicator]]` / `[[company]]`
//! tables); snapshots are JSON. See `crates/core/data/` for the bundled
//! defaults.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const BUNDLED_CATALOG: &str = include_str!("../data/catalog.toml");
const BUNDLED_UNIVERSE: &str = include_str!("../data/universe.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Group {
    SocialMedia,
    Webometrics,
    Blogs,
    Wiki,
}

impl std::str::FromStr for Group {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "social_media" => Ok(Group::SocialMedia),
            "webometrics" => Ok(Group::Webometrics),
            "blogs" => Ok(Group::Blogs),
            "wiki" => Ok(Group::Wiki),
            other => Err(Error::Validation(format!("unknown group {other:?}"))),
        }
    }
}

/// Direction of an indicator: whether a larger raw value means a better
/// (positive) or worse (negative) reputation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    Positive,
    Negative,
}

impl std::str::FromStr for Polarity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "positive" => Ok(Polarity::Positive),
            "negative" => Ok(Polarity::Negative),
            other => Err(Error::Validation(format!("unknown polarity {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawIndicatorSpec")]
pub struct IndicatorSpec {
    pub id: String,
    pub display_name: String,
    pub group: Group,
    pub polarity: Polarity,
    pub source_id: String,
    pub unit: String,
    pub included: bool,
}

impl IndicatorSpec {
    /// Rank-like indicators, where small values are good and zero is not a
    /// meaningful "absent" value.
    pub fn is_rank(&self) -> bool {
        self.unit == "rank"
    }

    /// Count-like indicators, which can never be negative.
    pub fn is_count(&self) -> bool {
        self.unit == "count"
    }
}

// Group and polarity arrive as plain strings so that an unknown value is a
// validation error rather than a parse error.
#[derive(Deserialize)]
struct RawIndicatorSpec {
    id: String,
    display_name: String,
    group: String,
    polarity: String,
    source_id: String,
    unit: String,
    #[serde(default = "default_true")]
    included: bool,
}

fn default_true() -> bool {
    true
}

impl TryFrom<RawIndicatorSpec> for IndicatorSpec {
    type Error = Error;

    fn try_from(raw: RawIndicatorSpec) -> Result<Self> {
        if raw.id.trim().is_empty() {
            return Err(Error::Validation("indicator with empty id".into()));
        }
        Ok(IndicatorSpec {
            group: raw.group.parse()?,
            polarity: raw.polarity.parse()?,
            id: raw.id,
            display_name: raw.display_name,
            source_id: raw.source_id,
            unit: raw.unit,
            included: raw.included,
        })
    }
}

/// Ordered list of indicator specs with unique ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Catalog {
    #[serde(rename = "indicator")]
    indicators: Vec<IndicatorSpec>,
}

#[derive(Deserialize)]
struct CatalogFile {
    indicator: Vec<IndicatorSpec>,
}

impl Catalog {
    pub fn new(indicators: Vec<IndicatorSpec>) -> Result<Self> {
        if indicators.is_empty() {
            return Err(Error::Validation("catalog has no indicators".into()));
        }
        let mut seen = BTreeSet::new();
        for spec in &indicators {
            if !seen.insert(spec.id.as_str()) {
                return Err(Error::Validation(format!(
                    "duplicate indicator id {:?}",
                    spec.id
                )));
            }
        }
        Ok(Catalog { indicators })
    }

    pub fn bundled() -> Self {
        Self::from_toml_str(BUNDLED_CATALOG, "<bundled catalog>").expect("bundled catalog is valid")
    }

    pub fn from_toml_str(text: &str, origin: &str) -> Result<Self> {
        let file: CatalogFile = toml::from_str(text).map_err(|e| match e.message() {
            // try_from failures surface through serde as custom messages
            m if m.starts_with("validation failed") => Error::Validation(m.to_string()),
            m => Error::parse(origin, m),
        })?;
        Catalog::new(file.indicator)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("catalog serializes to TOML")
    }

    pub fn indicators(&self) -> &[IndicatorSpec] {
        &self.indicators
    }

    pub fn get(&self, id: &str) -> Option<&IndicatorSpec> {
        self.indicators.iter().find(|s| s.id == id)
    }

    pub fn included(&self) -> impl Iterator<Item = &IndicatorSpec> {
        self.indicators.iter().filter(|s| s.included)
    }

    pub fn source_ids(&self) -> BTreeSet<&str> {
        self.indicators
            .iter()
            .map(|s| s.source_id.as_str())
            .collect()
    }

    pub fn len(&self) -> usize {
        self.indicators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indicators.is_empty()
    }
}

/// Reads and validates an indicator catalog file.
pub fn load_catalog(path: impl AsRef<Path>) -> Result<Catalog> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Catalog::from_toml_str(&text, &path.display().to_string())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Company {
    pub id: String,
    pub name: String,
    pub website: String,
    pub plot_index: u32,
}

/// The set of companies being indexed. Ids and plot indices are unique, and
/// plot indices cover exactly `1..=N`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Universe {
    #[serde(rename = "company")]
    companies: Vec<Company>,
}

#[derive(Deserialize)]
struct UniverseFile {
    company: Vec<Company>,
}

impl Universe {
    pub fn new(companies: Vec<Company>) -> Result<Self> {
        if companies.is_empty() {
            return Err(Error::Validation("universe has no companies".into()));
        }
        let mut ids = BTreeSet::new();
        let mut plot = BTreeSet::new();
        for c in &companies {
            if !ids.insert(c.id.as_str()) {
                return Err(Error::Validation(format!(
                    "duplicate company id {:?}",
                    c.id
                )));
            }
            if !plot.insert(c.plot_index) {
                return Err(Error::Validation(format!(
                    "duplicate plot_index {} (company {:?})",
                    c.plot_index, c.id
                )));
            }
        }
        let n = companies.len() as u32;
        if let Some(bad) = plot.iter().find(|&&p| p == 0 || p > n) {
            return Err(Error::Validation(format!(
                "plot_index {bad} outside 1..={n}"
            )));
        }
        Ok(Universe { companies })
    }

    pub fn bundled() -> Self {
        Self::from_toml_str(BUNDLED_UNIVERSE, "<bundled universe>")
            .expect("bundled universe is valid")
    }

    pub fn from_toml_str(text: &str, origin: &str) -> Result<Self> {
        let file: UniverseFile =
            toml::from_str(text).map_err(|e| Error::parse(origin, e.message()))?;
        Universe::new(file.company)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("universe serializes to TOML")
    }

    pub fn companies(&self) -> &[Company] {
        &self.companies
    }

    pub fn get(&self, id: &str) -> Option<&Company> {
        self.companies.iter().find(|c| c.id == id)
    }

    pub fn len(&self) -> usize {
        self.companies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.companies.is_empty()
    }
}

pub fn load_universe(path: impl AsRef<Path>) -> Result<Universe> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Universe::from_toml_str(&text, &path.display().to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Live,
    Fixture,
    Imputed,
}

/// One raw measurement. `raw_value == None` is the MISSING marker; it
/// serializes as JSON `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub company_id: String,
    pub indicator_id: String,
    pub raw_value: Option<f64>,
    pub collected_at: DateTime<Utc>,
    pub provenance: Provenance,
}

impl Observation {
    pub fn is_missing(&self) -> bool {
        self.raw_value.is_none()
    }
}

/// A complete collection run: the company × indicator raw matrix, together
/// with the universe and catalog it was collected against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub created_at: DateTime<Utc>,
    pub universe: Vec<Company>,
    pub catalog: Vec<IndicatorSpec>,
    pub observations: Vec<Observation>,
}

impl Snapshot {
    pub fn new(
        universe: &Universe,
        catalog: &Catalog,
        mut observations: Vec<Observation>,
        created_at: DateTime<Utc>,
    ) -> Self {
        sort_observations(&mut observations);
        Snapshot {
            created_at,
            universe: universe.companies().to_vec(),
            catalog: catalog.indicators().to_vec(),
            observations,
        }
    }

    pub fn universe(&self) -> Result<Universe> {
        Universe::new(self.universe.clone())
    }

    pub fn catalog(&self) -> Result<Catalog> {
        Catalog::new(self.catalog.clone())
    }

    pub fn cell(&self, company_id: &str, indicator_id: &str) -> Option<&Observation> {
        self.observations
            .iter()
            .find(|o| o.company_id == company_id && o.indicator_id == indicator_id)
    }

    /// Index of observations keyed by (company_id, indicator_id).
    pub fn cells(&self) -> BTreeMap<(&str, &str), &Observation> {
        self.observations
            .iter()
            .map(|o| ((o.company_id.as_str(), o.indicator_id.as_str()), o))
            .collect()
    }

    /// Raw values of one indicator in universe order, or `None` for cells
    /// that are absent or MISSING.
    pub fn column(&self, indicator_id: &str) -> Vec<Option<f64>> {
        let cells = self.cells();
        self.universe
            .iter()
            .map(|c| {
                cells
                    .get(&(c.id.as_str(), indicator_id))
                    .and_then(|o| o.raw_value)
            })
            .collect()
    }

    pub fn missing_count(&self) -> usize {
        self.observations.iter().filter(|o| o.is_missing()).count()
    }

    pub fn count_by_provenance(&self, provenance: Provenance) -> usize {
        self.observations
            .iter()
            .filter(|o| o.provenance == provenance)
            .count()
    }

    /// Replaces every timestamp, for byte-stable output.
    pub fn with_timestamp(mut self, at: DateTime<Utc>) -> Self {
        self.created_at = at;
        for o in &mut self.observations {
            o.collected_at = at;
        }
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("snapshot serializes")
    }

    pub fn from_json(text: &str, origin: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::parse(origin, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text, &path.display().to_string())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut text = self.to_json();
        text.push('\n');
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}

pub(crate) fn sort_observations(observations: &mut [Observation]) {
    observations.sort_by(|a, b| {
        (a.company_id.as_str(), a.indicator_id.as_str())
            .cmp(&(b.company_id.as_str(), b.indicator_id.as_str()))
    });
}

/// A problem found by [`validate_snapshot`].
#[derive(Debug, Clone, PartialEq)]
pub enum Defect {
    MissingCell {
        company_id: String,
        indicator_id: String,
    },
    MissingValue {
        company_id: String,
        indicator_id: String,
    },
    NonFinite {
        company_id: String,
        indicator_id: String,
        value: f64,
    },
    DuplicateCell {
        company_id: String,
        indicator_id: String,
    },
    UnknownCompany {
        company_id: String,
    },
    UnknownIndicator {
        indicator_id: String,
    },
    InvalidUniverse(String),
    InvalidCatalog(String),
}

impl fmt::Display for Defect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Defect::MissingCell {
                company_id,
                indicator_id,
            } => {
                write!(f, "missing cell ({company_id}, {indicator_id})")
            }
            Defect::MissingValue {
                company_id,
                indicator_id,
            } => {
                write!(
                    f,
                    "missing value, not imputed ({company_id}, {indicator_id})"
                )
            }
            Defect::NonFinite {
                company_id,
                indicator_id,
                value,
            } => {
                write!(
                    f,
                    "non-finite value {value} at ({company_id}, {indicator_id})"
                )
            }
            Defect::DuplicateCell {
                company_id,
                indicator_id,
            } => {
                write!(f, "duplicate cell ({company_id}, {indicator_id})")
            }
            Defect::UnknownCompany { company_id } => write!(f, "unknown company {company_id:?}"),
            Defect::UnknownIndicator { indicator_id } => {
                write!(f, "unknown indicator {indicator_id:?}")
            }
            Defect::InvalidUniverse(m) => write!(f, "invalid universe: {m}"),
            Defect::InvalidCatalog(m) => write!(f, "invalid catalog: {m}"),
        }
    }
}

/// Checks that a snapshot is a dense, finite matrix over its universe and
/// included indicators. Defects are returned, never raised.
pub fn validate_snapshot(snapshot: &Snapshot) -> std::result::Result<(), Vec<Defect>> {
    let mut defects = Vec::new();
    if let Err(e) = snapshot.universe() {
        defects.push(Defect::InvalidUniverse(e.to_string()));
    }
    if let Err(e) = snapshot.catalog() {
        defects.push(Defect::InvalidCatalog(e.to_string()));
    }

    let companies: BTreeSet<&str> = snapshot.universe.iter().map(|c| c.id.as_str()).collect();
    let indicators: BTreeSet<&str> = snapshot.catalog.iter().map(|s| s.id.as_str()).collect();

    let mut seen = BTreeSet::new();
    let mut unknown_companies = BTreeSet::new();
    let mut unknown_indicators = BTreeSet::new();
    for o in &snapshot.observations {
        let c = o.company_id.as_str();
        let i = o.indicator_id.as_str();
        if !companies.contains(c) {
            if unknown_companies.insert(c) {
                defects.push(Defect::UnknownCompany {
                    company_id: c.to_string(),
                });
            }
            continue;
        }
        if !indicators.contains(i) {
            if unknown_indicators.insert(i) {
                defects.push(Defect::UnknownIndicator {
                    indicator_id: i.to_string(),
                });
            }
            continue;
        }
        if !seen.insert((c, i)) {
            defects.push(Defect::DuplicateCell {
                company_id: c.to_string(),
                indicator_id: i.to_string(),
            });
        }
        match o.raw_value {
            Some(v) if !v.is_finite() => defects.push(Defect::NonFinite {
                company_id: c.to_string(),
                indicator_id: i.to_string(),
                value: v,
            }),
            None => defects.push(Defect::MissingValue {
                company_id: c.to_string(),
                indicator_id: i.to_string(),
            }),
            Some(_) => {}
        }
    }

    for company in &snapshot.universe {
        for spec in snapshot.catalog.iter().filter(|s| s.included) {
            if !seen.contains(&(company.id.as_str(), spec.id.as_str())) {
                defects.push(Defect::MissingCell {
                    company_id: company.id.clone(),
                    indicator_id: spec.id.clone(),
                });
            }
        }
    }

    if defects.is_empty() {
        Ok(())
    } else {
        Err(defects)
    }
}
