//! Per-indicator normalization and polarity orientation.
//!
//! Min-max maps each raw series onto `[0, 1]` via `(x - min) / (max - min)`.
//! A constant series is *degenerate*: it normalizes to all zeros and is
//! flagged so aggregation can leave it out.
//!
//! Orientation does not touch values. It records a sign per indicator
//! (`+1` positive, `-1` negative) that the index applies when summing.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Catalog, Polarity, Snapshot};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    MinMax,
    ZScore,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::MinMax => "minmax",
            Method::ZScore => "zscore",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "minmax" => Ok(Method::MinMax),
            "zscore" => Ok(Method::ZScore),
            other => Err(Error::Config(format!(
                "unknown normalization method {other:?} (expected minmax or zscore)"
            ))),
        }
    }
}

/// How negative-polarity indicators enter the index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    /// Normalize like any other indicator, subtract at aggregation.
    #[default]
    SubtractNegatives,
    /// Multiply raw values by -1, normalize, then add like a positive
    /// indicator.
    InvertThenNormalize,
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orientation::SubtractNegatives => "subtract-negatives",
            Orientation::InvertThenNormalize => "invert-then-normalize",
        })
    }
}

impl FromStr for Orientation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "subtract-negatives" | "formula" => Ok(Orientation::SubtractNegatives),
            "invert-then-normalize" => Ok(Orientation::InvertThenNormalize),
            other => Err(Error::Config(format!(
                "unknown orientation {other:?} (expected subtract-negatives or invert-then-normalize)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinMaxSeries {
    pub values: Vec<f64>,
    pub min: f64,
    pub max: f64,
    pub degenerate: bool,
}

fn check_series(series: &[f64]) -> Result<()> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    if let Some((position, &value)) = series.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFinite { position, value });
    }
    Ok(())
}

pub fn min_max_normalize(series: &[f64]) -> Result<MinMaxSeries> {
    check_series(series)?;
    let min = series.iter().copied().fold(f64::INFINITY, f64::min);
    let max = series.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == min {
        return Ok(MinMaxSeries {
            values: vec![0.0; series.len()],
            min,
            max,
            degenerate: true,
        });
    }
    let range = max - min;
    Ok(MinMaxSeries {
        values: series.iter().map(|x| (x - min) / range).collect(),
        min,
        max,
        degenerate: false,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZScoreSeries {
    pub values: Vec<f64>,
    pub mean: f64,
    /// Population standard deviation.
    pub sd: f64,
    pub degenerate: bool,
}

/// Standard score `(x - mean) / sd` with the population standard deviation.
pub fn z_score_normalize(series: &[f64]) -> Result<ZScoreSeries> {
    check_series(series)?;
    let n = series.len() as f64;
    let mean = series.iter().sum::<f64>() / n;
    let sd = (series.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt();
    // Rounding can leave a tiny positive sd on a constant series.
    if sd == 0.0 || series.iter().all(|&x| x == series[0]) {
        return Ok(ZScoreSeries {
            values: vec![0.0; series.len()],
            mean,
            sd,
            degenerate: true,
        });
    }
    Ok(ZScoreSeries {
        values: series.iter().map(|x| (x - mean) / sd).collect(),
        mean,
        sd,
        degenerate: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+1")]
    Plus,
    #[serde(rename = "-1")]
    Minus,
}

impl Sign {
    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedIndicator {
    pub id: String,
    /// True extremes of the raw series.
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub sd: f64,
    pub degenerate: bool,
    /// Raw values were multiplied by -1 before normalizing.
    pub inverted: bool,
    /// `None` until [`orient`] has run.
    pub sign: Option<Sign>,
    /// Normalized values, aligned with [`NormalizedMatrix::company_ids`].
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedMatrix {
    pub method: Method,
    pub orientation: Orientation,
    pub company_ids: Vec<String>,
    pub indicators: Vec<NormalizedIndicator>,
}

impl NormalizedMatrix {
    pub fn indicator(&self, id: &str) -> Option<&NormalizedIndicator> {
        self.indicators.iter().find(|i| i.id == id)
    }

    pub fn degenerate_ids(&self) -> Vec<&str> {
        self.indicators
            .iter()
            .filter(|i| i.degenerate)
            .map(|i| i.id.as_str())
            .collect()
    }

    /// Writes `company_id,<indicator ids...>` with one row per company.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
        let mut header = vec!["company_id"];
        header.extend(self.indicators.iter().map(|i| i.id.as_str()));
        w.write_record(&header).map_err(|e| csv_error(path, e))?;
        for (row, company) in self.company_ids.iter().enumerate() {
            let mut record = vec![company.clone()];
            record.extend(self.indicators.iter().map(|i| i.values[row].to_string()));
            w.write_record(&record).map_err(|e| csv_error(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

pub(crate) fn csv_error(path: &Path, e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            _ => unreachable!(),
        }
    } else {
        Error::parse(path.display(), e)
    }
}

/// Normalizes every included indicator of a dense snapshot. Indicators are
/// min/maxed cross-sectionally, within this snapshot only.
///
/// The result is unoriented; pass it through [`orient`] before aggregating.
pub fn normalize_snapshot(
    snapshot: &Snapshot,
    method: Method,
    orientation: Orientation,
) -> Result<NormalizedMatrix> {
    let company_ids: Vec<String> = snapshot.universe.iter().map(|c| c.id.clone()).collect();
    let mut indicators = Vec::new();
    for spec in snapshot.catalog.iter().filter(|s| s.included) {
        let column = snapshot.column(&spec.id);
        let mut raw = Vec::with_capacity(column.len());
        for (company, value) in company_ids.iter().zip(&column) {
            match value {
                Some(v) => raw.push(*v),
                None => {
                    return Err(Error::Integrity(format!(
                        "no value for ({company}, {})",
                        spec.id
                    )))
                }
            }
        }
        let inverted =
            orientation == Orientation::InvertThenNormalize && spec.polarity == Polarity::Negative;
        let min = raw.iter().copied().fold(f64::INFINITY, f64::min);
        let max = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let input: Vec<f64> = if inverted {
            raw.iter().map(|v| -v).collect()
        } else {
            raw.clone()
        };
        let (values, mean, sd, degenerate) = match method {
            Method::MinMax => {
                let s = min_max_normalize(&input)
                    .map_err(|e| Error::Integrity(format!("{}: {e}", spec.id)))?;
                let z = z_stats(&raw);
                (s.values, z.0, z.1, s.degenerate)
            }
            Method::ZScore => {
                let s = z_score_normalize(&input)
                    .map_err(|e| Error::Integrity(format!("{}: {e}", spec.id)))?;
                let z = z_stats(&raw);
                (s.values, z.0, z.1, s.degenerate)
            }
        };
        indicators.push(NormalizedIndicator {
            id: spec.id.clone(),
            min,
            max,
            mean,
            sd,
            degenerate,
            inverted,
            sign: None,
            values,
        });
    }
    Ok(NormalizedMatrix {
        method,
        orientation,
        company_ids,
        indicators,
    })
}

fn z_stats(raw: &[f64]) -> (f64, f64) {
    let n = raw.len() as f64;
    let mean = raw.iter().sum::<f64>() / n;
    let sd = (raw.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt();
    (mean, sd)
}

/// Records each indicator's aggregation sign from the catalog polarity.
/// Values are left untouched, so applying this twice is the same as once.
pub fn orient(catalog: &Catalog, matrix: &NormalizedMatrix) -> Result<NormalizedMatrix> {
    let mut out = matrix.clone();
    for ind in &mut out.indicators {
        let spec = catalog.get(&ind.id).ok_or_else(|| {
            Error::Config(format!("indicator {:?} is not in the catalog", ind.id))
        })?;
        ind.sign = Some(match spec.polarity {
            Polarity::Negative if !ind.inverted => Sign::Minus,
            _ => Sign::Plus,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Company, IndicatorSpec, Observation, Provenance, Universe};
    use chrono::{DateTime, Utc};

    const TOL: f64 = 1e-9;

    #[test]
    fn midpoint() {
        let s = min_max_normalize(&[0.0, 5.0, 10.0]).unwrap();
        assert_eq!(s.values, vec![0.0, 0.5, 1.0]);
        assert_eq!((s.min, s.max), (0.0, 10.0));
        assert!(!s.degenerate);
    }

    #[test]
    fn turkcell_likes_is_the_maximum() {
        // Facebook likes: the company without a page has 0, Turkcell holds
        // the maximum of 2,747,255.
        let series = [0.0, 120_000.0, 2_747_255.0, 273_693.0];
        let s = min_max_normalize(&series).unwrap();
        assert_eq!(s.values[2], 1.0);
        assert_eq!(s.values[0], 0.0);
    }

    #[test]
    fn constant_series_is_degenerate() {
        let s = min_max_normalize(&[7.0, 7.0, 7.0]).unwrap();
        assert_eq!(s.values, vec![0.0, 0.0, 0.0]);
        assert!(s.degenerate);
    }

    #[test]
    fn empty_and_non_finite_rejected() {
        assert!(matches!(min_max_normalize(&[]), Err(Error::EmptySeries)));
        assert!(matches!(
            min_max_normalize(&[1.0, f64::NAN]),
            Err(Error::NonFinite { position: 1, .. })
        ));
        assert!(matches!(z_score_normalize(&[]), Err(Error::EmptySeries)));
        assert!(z_score_normalize(&[f64::INFINITY]).is_err());
    }

    #[test]
    fn z_score_one_two_three() {
        // mean 2, population sd sqrt(2/3) = 0.816496580927726
        let s = z_score_normalize(&[1.0, 2.0, 3.0]).unwrap();
        let expected = [-1.224_744_871_391_589, 0.0, 1.224_744_871_391_589];
        for (got, want) in s.values.iter().zip(expected) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
        assert!((s.sd - 0.816_496_580_927_726).abs() < 1e-12);
    }

    #[test]
    fn z_score_constant_is_degenerate() {
        let s = z_score_normalize(&[0.1, 0.1, 0.1]).unwrap();
        assert!(s.degenerate);
        assert_eq!(s.values, vec![0.0; 3]);
    }

    fn spec(id: &str, polarity: Polarity) -> IndicatorSpec {
        IndicatorSpec {
            id: id.into(),
            display_name: id.into(),
            group: crate::model::Group::Webometrics,
            polarity,
            source_id: "s".into(),
            unit: "count".into(),
            included: true,
        }
    }

    fn snapshot(specs: Vec<IndicatorSpec>, rows: &[&[f64]]) -> Snapshot {
        let universe = Universe::new(
            (0..rows.len())
                .map(|i| Company {
                    id: format!("C{i}"),
                    name: format!("C{i}"),
                    website: String::new(),
                    plot_index: i as u32 + 1,
                })
                .collect(),
        )
        .unwrap();
        let at = DateTime::<Utc>::UNIX_EPOCH;
        let mut obs = Vec::new();
        for (r, row) in rows.iter().enumerate() {
            for (s, v) in specs.iter().zip(row.iter()) {
                obs.push(Observation {
                    company_id: format!("C{r}"),
                    indicator_id: s.id.clone(),
                    raw_value: Some(*v),
                    collected_at: at,
                    provenance: Provenance::Fixture,
                });
            }
        }
        let catalog = Catalog::new(specs).unwrap();
        Snapshot::new(&universe, &catalog, obs, at)
    }

    #[test]
    fn orient_records_signs() {
        let specs = vec![
            spec("fb_likes", Polarity::Positive),
            spec("alexa_rank_tr", Polarity::Negative),
        ];
        let snap = snapshot(specs.clone(), &[&[1.0, 24.0], &[5.0, 65_836.0]]);
        let m = normalize_snapshot(&snap, Method::MinMax, Orientation::SubtractNegatives).unwrap();
        let catalog = Catalog::new(specs).unwrap();
        let o = orient(&catalog, &m).unwrap();
        assert_eq!(o.indicator("fb_likes").unwrap().sign, Some(Sign::Plus));
        assert_eq!(
            o.indicator("alexa_rank_tr").unwrap().sign,
            Some(Sign::Minus)
        );
        // values untouched
        assert_eq!(o.indicator("alexa_rank_tr").unwrap().values, vec![0.0, 1.0]);
        assert_eq!(orient(&catalog, &o).unwrap(), o);
    }

    #[test]
    fn orient_all_positive_only_adds_plus_signs() {
        let specs = vec![spec("a", Polarity::Positive), spec("b", Polarity::Positive)];
        let snap = snapshot(specs.clone(), &[&[1.0, 2.0], &[3.0, 0.0]]);
        let m = normalize_snapshot(&snap, Method::MinMax, Orientation::SubtractNegatives).unwrap();
        let o = orient(&Catalog::new(specs).unwrap(), &m).unwrap();
        for (a, b) in m.indicators.iter().zip(&o.indicators) {
            assert_eq!(a.values, b.values);
            assert_eq!(b.sign, Some(Sign::Plus));
        }
    }

    #[test]
    fn orient_rejects_unknown_indicator() {
        let snap = snapshot(vec![spec("a", Polarity::Positive)], &[&[1.0], &[2.0]]);
        let m = normalize_snapshot(&snap, Method::MinMax, Orientation::SubtractNegatives).unwrap();
        let other = Catalog::new(vec![spec("b", Polarity::Positive)]).unwrap();
        assert!(matches!(orient(&other, &m), Err(Error::Config(_))));
    }

    #[test]
    fn invert_then_normalize_flips_negative_series() {
        let specs = vec![spec("rank", Polarity::Negative)];
        let snap = snapshot(specs.clone(), &[&[24.0], &[1000.0], &[512.0]]);
        let m =
            normalize_snapshot(&snap, Method::MinMax, Orientation::InvertThenNormalize).unwrap();
        let o = orient(&Catalog::new(specs).unwrap(), &m).unwrap();
        let ind = o.indicator("rank").unwrap();
        assert!(ind.inverted);
        assert_eq!(ind.sign, Some(Sign::Plus));
        assert_eq!(ind.values[0], 1.0);
        assert_eq!(ind.values[1], 0.0);
        assert!((ind.values[2] - (1000.0 - 512.0) / 976.0).abs() < TOL);
        // stored extremes are those of the raw series
        assert_eq!((ind.min, ind.max), (24.0, 1000.0));
    }

    #[test]
    fn degenerate_indicator_flagged_in_matrix() {
        let specs = vec![
            spec("a", Polarity::Positive),
            spec("flat", Polarity::Positive),
        ];
        let snap = snapshot(specs, &[&[1.0, 3.0], &[2.0, 3.0]]);
        let m = normalize_snapshot(&snap, Method::MinMax, Orientation::SubtractNegatives).unwrap();
        assert_eq!(m.degenerate_ids(), vec!["flat"]);
    }

    #[test]
    fn missing_value_is_integrity_error() {
        let mut snap = snapshot(vec![spec("a", Polarity::Positive)], &[&[1.0], &[2.0]]);
        snap.observations[1].raw_value = None;
        let err =
            normalize_snapshot(&snap, Method::MinMax, Orientation::SubtractNegatives).unwrap_err();
        assert!(err.to_string().contains("(C1, a)"), "{err}");
    }

    #[test]
    fn method_and_orientation_parse() {
        assert_eq!("zscore".parse::<Method>().unwrap(), Method::ZScore);
        assert!("robust".parse::<Method>().is_err());
        assert_eq!(
            "invert-then-normalize".parse::<Orientation>().unwrap(),
            Orientation::InvertThenNormalize
        );
    }
}
