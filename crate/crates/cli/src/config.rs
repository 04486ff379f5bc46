//! Run configuration file. Every key is optional; command-line flags win.
//!
//! ```toml
//! catalog = "catalog.toml"
//! universe = "universe.toml"
//! sources = "sources.toml"
//! fixtures = "fixtures"
//! out = "out"
//! mode = "replay"
//! method = "minmax"
//! orientation = "subtract-negatives"
//! rescale_final = true
//! top = 10
//! user_agent = "wri-indexer"
//! rate_limit = { max_requests = 1, per_secs = 1.0 }
//! ```
//!
//! Relative paths are resolved against the directory holding the file.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use wri_core::ingestion::RateLimit;
use wri_core::{Error, Method, Mode, Orientation, Result};

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub catalog: Option<PathBuf>,
    pub universe: Option<PathBuf>,
    pub sources: Option<PathBuf>,
    pub fixtures: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub mode: Option<Mode>,
    pub method: Option<Method>,
    pub orientation: Option<Orientation>,
    pub rescale_final: Option<bool>,
    pub top: Option<usize>,
    pub user_agent: Option<String>,
    pub rate_limit: Option<RateLimit>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut config: RunConfig = toml::from_str(&text).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            message: e.message().to_string(),
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [
            &mut config.catalog,
            &mut config.universe,
            &mut config.sources,
            &mut config.fixtures,
            &mut config.out,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(config)
    }

    pub fn load_optional(path: Option<&Path>) -> Result<Self> {
        path.map_or_else(|| Ok(RunConfig::default()), RunConfig::load)
    }
}

/// Parses `MAX/SECS`, e.g. `2/1.5`. `0/0` disables limiting.
pub fn parse_rate_limit(s: &str) -> std::result::Result<RateLimit, String> {
    let (max, secs) = s
        .split_once('/')
        .ok_or_else(|| format!("expected MAX/SECS, got {s:?}"))?;
    let max_requests = max.trim().parse().map_err(|e| format!("{max:?}: {e}"))?;
    let per_secs: f64 = secs.trim().parse().map_err(|e| format!("{secs:?}: {e}"))?;
    if !per_secs.is_finite() || per_secs < 0.0 {
        return Err(format!(
            "window must be a non-negative number of seconds, got {secs:?}"
        ));
    }
    Ok(RateLimit {
        max_requests,
        per_secs,
    })
}
