//! Source adapters: turn one provider's response for one company into raw
//! indicator values.
//!
//! [`JsonAdapter`] reads structured endpoints through JSON pointers and is
//! the supported path. [`HtmlPatternAdapter`] scrapes pages with regular
//! expressions; it breaks whenever the page layout changes and should only
//! be used where no structured endpoint exists.

use std::collections::BTreeMap;
use std::path::Path;

use regex::Regex;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::ratelimit::RateLimit;
use crate::error::{Error, Result};
use crate::model::Company;

const BUNDLED_SOURCES: &str = include_str!("../../data/sources.toml");

#[derive(Debug, thiserror::Error)]
#[error("{source_id}: {message}")]
pub struct AdapterError {
    pub source_id: String,
    pub message: String,
}

pub trait SourceAdapter: Send + Sync {
    fn source_id(&self) -> &str;

    /// Indicator ids this adapter may emit, in a stable order.
    fn indicator_ids(&self) -> Vec<&str>;

    /// File extension of recorded payloads (`json`, `html`).
    fn payload_extension(&self) -> &str;

    /// URL to query for `company`, or `None` when the source has no live
    /// endpoint configured.
    fn request_url(&self, company: &Company) -> Option<String>;

    /// Extracts a value (or MISSING) for every declared indicator. Entries
    /// the payload does not mention are MISSING.
    fn parse(
        &self,
        payload: &[u8],
    ) -> std::result::Result<BTreeMap<String, Option<f64>>, AdapterError>;
}

/// Expands `{company_id}`, `{name}`, `{website}` and `{domain}` in an
/// endpoint template.
pub fn expand_endpoint(template: &str, company: &Company) -> String {
    let domain = url::Url::parse(&company.website)
        .ok()
        .and_then(|u| {
            u.host_str()
                .map(|h| h.trim_start_matches("www.").to_string())
        })
        .unwrap_or_default();
    let name: String = url::form_urlencoded::byte_serialize(company.name.as_bytes()).collect();
    template
        .replace("{company_id}", &company.id)
        .replace("{name}", &name)
        .replace("{website}", &company.website)
        .replace("{domain}", &domain)
}

pub struct JsonAdapter {
    source_id: String,
    endpoint: Option<String>,
    /// indicator id -> JSON pointer
    fields: BTreeMap<String, String>,
}

impl JsonAdapter {
    pub fn new(
        source_id: impl Into<String>,
        endpoint: Option<String>,
        fields: BTreeMap<String, String>,
    ) -> Self {
        JsonAdapter {
            source_id: source_id.into(),
            endpoint,
            fields,
        }
    }

    fn error(&self, message: impl Into<String>) -> AdapterError {
        AdapterError {
            source_id: self.source_id.clone(),
            message: message.into(),
        }
    }
}

fn json_number(value: &Value) -> std::result::Result<Option<f64>, String> {
    match value {
        Value::Null => Ok(None),
        Value::Number(n) => n
            .as_f64()
            .map(Some)
            .ok_or_else(|| format!("unrepresentable number {n}")),
        Value::Bool(b) => Ok(Some(if *b { 1.0 } else { 0.0 })),
        Value::String(s) => s
            .trim()
            .parse::<f64>()
            .map(Some)
            .map_err(|_| format!("non-numeric string {s:?}")),
        other => Err(format!("expected a number, found {other}")),
    }
}

impl SourceAdapter for JsonAdapter {
    fn source_id(&self) -> &str {
        &self.source_id
    }

    fn indicator_ids(&self) -> Vec<&str> {
        self.fields.keys().map(String::as_str).collect()
    }

    fn payload_extension(&self) -> &str {
        "json"
    }

    fn request_url(&self, company: &Company) -> Option<String> {
        self.endpoint
            .as_deref()
            .map(|t| expand_endpoint(t, company))
    }

    fn parse(
        &self,
        payload: &[u8],
    ) -> std::result::Result<BTreeMap<String, Option<f64>>, AdapterError> {
        let doc: Value = serde_json::from_slice(payload)
            .map_err(|e| self.error(format!("invalid JSON: {e}")))?;
        let mut out = BTreeMap::new();
        for (indicator, pointer) in &self.fields {
            let value = match doc.pointer(pointer) {
                Some(v) => json_number(v).map_err(|m| self.error(format!("{indicator}: {m}")))?,
                None => None,
            };
            out.insert(indicator.clone(), value);
        }
        Ok(out)
    }
}

/// Regex scraping of HTML pages. Fragile by nature.
pub struct HtmlPatternAdapter {
    source_id: String,
    endpoint: Option<String>,
    patterns: BTreeMap<String, Regex>,
}

impl HtmlPatternAdapter {
    pub fn new(
        source_id: impl Into<String>,
        endpoint: Option<String>,
        patterns: BTreeMap<String, String>,
    ) -> Result<Self> {
        let source_id = source_id.into();
        let mut compiled = BTreeMap::new();
        for (indicator, pattern) in patterns {
            let re = Regex::new(&pattern)
                .map_err(|e| Error::Config(format!("{source_id}/{indicator}: bad pattern: {e}")))?;
            if re.captures_len() < 2 {
                return Err(Error::Config(format!(
                    "{source_id}/{indicator}: pattern needs one capture group"
                )));
            }
            compiled.insert(indicator, re);
        }
        Ok(HtmlPatternAdapter {
            source_id,
            endpoint,
            patterns: compiled,
        })
    }
}

impl SourceAdapter for HtmlPatternAdapter {
    fn source_id(&self) -> &str {
        &self.source_id
    }

    fn indicator_ids(&self) -> Vec<&str> {
        self.patterns.keys().map(String::as_str).collect()
    }

    fn payload_extension(&self) -> &str {
        "html"
    }

    fn request_url(&self, company: &Company) -> Option<String> {
        self.endpoint
            .as_deref()
            .map(|t| expand_endpoint(t, company))
    }

    fn parse(
        &self,
        payload: &[u8],
    ) -> std::result::Result<BTreeMap<String, Option<f64>>, AdapterError> {
        let page = String::from_utf8_lossy(payload);
        let mut out = BTreeMap::new();
        for (indicator, re) in &self.patterns {
            let value = match re.captures(&page).and_then(|c| c.get(1)) {
                None => None,
                Some(m) => {
                    // "2,747,255" / "2 747 255" style digit grouping
                    let digits: String = m
                        .as_str()
                        .chars()
                        .filter(|c| !matches!(c, ',' | ' ' | '\u{a0}' | '_'))
                        .collect();
                    Some(digits.parse::<f64>().map_err(|_| AdapterError {
                        source_id: self.source_id.clone(),
                        message: format!("{indicator}: cannot read {:?} as a number", m.as_str()),
                    })?)
                }
            };
            out.insert(indicator.clone(), value);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PayloadFormat {
    #[default]
    Json,
    Html,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceConfig {
    pub id: String,
    #[serde(default)]
    pub format: PayloadFormat,
    #[serde(default)]
    pub endpoint: Option<String>,
    #[serde(default)]
    pub rate_limit: Option<RateLimit>,
    pub fields: BTreeMap<String, String>,
}

/// Contents of `sources.toml`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourcesConfig {
    #[serde(default = "default_user_agent")]
    pub user_agent: String,
    #[serde(default = "default_timeout")]
    pub timeout_secs: u64,
    #[serde(rename = "source", default)]
    pub sources: Vec<SourceConfig>,
}

fn default_user_agent() -> String {
    concat!("wri-indexer/", env!("CARGO_PKG_VERSION")).to_string()
}

fn default_timeout() -> u64 {
    20
}

impl SourcesConfig {
    pub fn bundled() -> Self {
        Self::from_toml_str(BUNDLED_SOURCES, "<bundled sources>").expect("bundled sources parse")
    }

    pub fn from_toml_str(text: &str, origin: &str) -> Result<Self> {
        let config: SourcesConfig =
            toml::from_str(text).map_err(|e| Error::parse(origin, e.message()))?;
        let mut seen = std::collections::BTreeSet::new();
        for s in &config.sources {
            if !seen.insert(s.id.as_str()) {
                return Err(Error::Validation(format!("duplicate source id {:?}", s.id)));
            }
        }
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text, &path.display().to_string())
    }

    pub fn get(&self, id: &str) -> Option<&SourceConfig> {
        self.sources.iter().find(|s| s.id == id)
    }

    pub fn get_mut(&mut self, id: &str) -> Option<&mut SourceConfig> {
        self.sources.iter_mut().find(|s| s.id == id)
    }

    pub fn build_adapters(&self) -> Result<Vec<Box<dyn SourceAdapter>>> {
        self.sources
            .iter()
            .map(|s| -> Result<Box<dyn SourceAdapter>> {
                Ok(match s.format {
                    PayloadFormat::Json => Box::new(JsonAdapter::new(
                        &s.id,
                        s.endpoint.clone(),
                        s.fields.clone(),
                    )),
                    PayloadFormat::Html => Box::new(HtmlPatternAdapter::new(
                        &s.id,
                        s.endpoint.clone(),
                        s.fields.clone(),
                    )?),
                })
            })
            .collect()
    }
}
