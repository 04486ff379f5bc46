//! Descriptive statistics, plot series and report files.
//!
//! Report layouts:
//!
//! * rankings CSV: `company_id,name,wri,rank`
//! * plot CSV: `plot_index,wri`, ascending by `wri`
//! * JSON: the full [`IndexReport`], including per-company contributions
//!   and the statistics block
//!
//! Floats are written in shortest round-trip form so re-reading a report
//! reproduces every value bit for bit.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::{Counts, WriResult};
use crate::normalize::{csv_error, Method, Orientation};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub count: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    /// Divides by `n`.
    pub sd_population: f64,
    /// Divides by `n - 1`; absent for a single value.
    pub sd_sample: Option<f64>,
}

/// Summary statistics of an index vector. Values are summed in sorted order,
/// so the result does not depend on input order.
pub fn describe(values: &[f64]) -> Result<DatasetStats> {
    if values.is_empty() {
        return Err(Error::EmptySeries);
    }
    if let Some((position, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFinite { position, value });
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mean = sorted.iter().sum::<f64>() / n;
    let mut squares: Vec<f64> = sorted.iter().map(|x| (x - mean).powi(2)).collect();
    squares.sort_by(f64::total_cmp);
    let ss: f64 = squares.iter().sum();
    Ok(DatasetStats {
        count: sorted.len(),
        mean,
        min: sorted[0],
        max: sorted[sorted.len() - 1],
        sd_population: (ss / n).sqrt(),
        sd_sample: (sorted.len() > 1).then(|| (ss / (n - 1.0)).sqrt()),
    })
}

/// One company in a finished index run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedCompany {
    pub company_id: String,
    pub name: String,
    pub plot_index: u32,
    pub rank: usize,
    pub wri: f64,
    pub unscaled_wri: f64,
    pub contributions: std::collections::BTreeMap<String, f64>,
}

impl RankedCompany {
    pub fn from_result(result: &WriResult, name: &str, plot_index: u32) -> Self {
        RankedCompany {
            company_id: result.company_id.clone(),
            name: name.to_string(),
            plot_index,
            rank: result.rank,
            wri: result.wri,
            unscaled_wri: result.unscaled_wri,
            contributions: result.contributions.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexReport {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub generated_at: Option<DateTime<Utc>>,
    pub method: Method,
    pub orientation: Orientation,
    pub rescaled: bool,
    pub counts: Counts,
    /// Indicators left out of the aggregation (excluded or degenerate).
    pub skipped_indicators: Vec<String>,
    pub stats: DatasetStats,
    /// Sorted by rank.
    pub companies: Vec<RankedCompany>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlotPoint {
    pub plot_index: u32,
    pub wri: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotSeries {
    pub points: Vec<PlotPoint>,
}

/// Distribution plot data: `(plot_index, wri)` ascending by `wri`, ties by
/// `plot_index`.
pub fn plot_series(companies: &[RankedCompany]) -> PlotSeries {
    let mut points: Vec<PlotPoint> = companies
        .iter()
        .map(|c| PlotPoint {
            plot_index: c.plot_index,
            wri: c.wri,
        })
        .collect();
    points.sort_by(|a, b| {
        a.wri
            .total_cmp(&b.wri)
            .then(a.plot_index.cmp(&b.plot_index))
    });
    PlotSeries { points }
}

impl PlotSeries {
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
        w.write_record(["plot_index", "wri"])
            .map_err(|e| csv_error(path, e))?;
        for p in &self.points {
            w.write_record([p.plot_index.to_string(), p.wri.to_string()])
                .map_err(|e| csv_error(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::Config(format!("unknown report format {other:?}"))),
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingRow {
    pub company_id: String,
    pub name: String,
    pub wri: f64,
    pub rank: usize,
}

pub fn export_report(
    report: &IndexReport,
    format: ReportFormat,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    match format {
        ReportFormat::Json => {
            let mut text = serde_json::to_string_pretty(report).expect("report serializes");
            text.push('\n');
            std::fs::write(path, text).map_err(|e| Error::io(path, e))
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
            for c in &report.companies {
                w.serialize(RankingRow {
                    company_id: c.company_id.clone(),
                    name: c.name.clone(),
                    wri: c.wri,
                    rank: c.rank,
                })
                .map_err(|e| csv_error(path, e))?;
            }
            w.flush().map_err(|e| Error::io(path, e))
        }
    }
}

pub fn read_report_json(path: impl AsRef<Path>) -> Result<IndexReport> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::parse(path.display(), e))
}

pub fn read_rankings_csv(path: impl AsRef<Path>) -> Result<Vec<RankingRow>> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    r.deserialize()
        .map(|row| row.map_err(|e| csv_error(path, e)))
        .collect()
}

pub fn write_stats_json(stats: &DatasetStats, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut text = serde_json::to_string_pretty(stats).expect("stats serialize");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
