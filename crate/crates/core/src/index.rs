//! Web Reputation Index aggregation and ranking.
//!
//! For each company the index is
//!
//! ```text
//! WRI = (sum of positive N_x  -  sum of negative N_x) / C
//! ```
//!
//! where `N_x` are normalized indicator values, `C` is the number of
//! positive indicators and `K` the total number of indicators taking part.
//! Excluded and degenerate indicators count towards neither.
//!
//! The value is bounded by `[-(K - C) / C, 1]` and is deliberately not
//! clamped.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Catalog;
use crate::normalize::{min_max_normalize, NormalizedMatrix, Sign};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WriResult {
    pub company_id: String,
    pub wri: f64,
    /// Value before any final rescale; equals `sum(contributions) / C`.
    pub unscaled_wri: f64,
    /// 1 = highest index. Zero until [`rank`] runs.
    pub rank: usize,
    /// Signed normalized value of each indicator that was summed.
    pub contributions: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    #[default]
    ByCompanyId,
}

/// Indicator counts used by the aggregation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    /// Positive (sign +1) indicators, the divisor `C`.
    pub positive: usize,
    /// All participating indicators, `K`.
    pub total: usize,
}

impl Counts {
    /// Lower bound on any WRI given these counts: `-(K - C) / C`.
    pub fn lower_bound(&self) -> f64 {
        -((self.total - self.positive) as f64) / self.positive as f64
    }
}

/// Which indicators of an oriented matrix take part in the index.
fn participating<'m>(
    matrix: &'m NormalizedMatrix,
    catalog: &Catalog,
) -> Result<Vec<(&'m str, Sign, &'m [f64])>> {
    let mut out = Vec::new();
    for ind in &matrix.indicators {
        let spec = catalog.get(&ind.id).ok_or_else(|| {
            Error::Config(format!("indicator {:?} is not in the catalog", ind.id))
        })?;
        if !spec.included || ind.degenerate {
            continue;
        }
        let sign = ind.sign.ok_or_else(|| {
            Error::Config(format!("indicator {:?} has not been oriented", ind.id))
        })?;
        out.push((ind.id.as_str(), sign, ind.values.as_slice()));
    }
    Ok(out)
}

pub fn counts(matrix: &NormalizedMatrix, catalog: &Catalog) -> Result<Counts> {
    let parts = participating(matrix, catalog)?;
    Ok(Counts {
        positive: parts.iter().filter(|(_, s, _)| *s == Sign::Plus).count(),
        total: parts.len(),
    })
}

pub fn compute_wri(matrix: &NormalizedMatrix, catalog: &Catalog) -> Result<Vec<WriResult>> {
    let parts = participating(matrix, catalog)?;
    let c = parts.iter().filter(|(_, s, _)| *s == Sign::Plus).count();
    if c == 0 {
        return Err(Error::Config(
            "no positive indicators take part in the index (C = 0)".into(),
        ));
    }

    let mut results = Vec::with_capacity(matrix.company_ids.len());
    for (row, company) in matrix.company_ids.iter().enumerate() {
        let mut positive = 0.0;
        let mut negative = 0.0;
        let mut contributions = BTreeMap::new();
        for (id, sign, values) in &parts {
            let value = match values.get(row) {
                Some(v) if v.is_finite() => *v,
                _ => {
                    return Err(Error::Integrity(format!(
                        "missing normalized value for ({company}, {id})"
                    )))
                }
            };
            match sign {
                Sign::Plus => positive += value,
                Sign::Minus => negative += value,
            }
            contributions.insert((*id).to_string(), sign.as_f64() * value);
        }
        let wri = (positive - negative) / c as f64;
        results.push(WriResult {
            company_id: company.clone(),
            wri,
            unscaled_wri: wri,
            rank: 0,
            contributions,
        });
    }
    Ok(results)
}

/// Min-max rescales the index vector itself onto `[0, 1]`. Order is
/// preserved.
pub fn rescale_index(results: &[WriResult]) -> Result<Vec<WriResult>> {
    if results.len() < 2 {
        return Err(Error::Degenerate(
            "rescaling needs at least two companies".into(),
        ));
    }
    let raw: Vec<f64> = results.iter().map(|r| r.wri).collect();
    let scaled = min_max_normalize(&raw)?;
    if scaled.degenerate {
        return Err(Error::Degenerate(format!(
            "every company has the same index value {}",
            scaled.min
        )));
    }
    Ok(results
        .iter()
        .zip(scaled.values)
        .map(|(r, wri)| WriResult { wri, ..r.clone() })
        .collect())
}

fn descending(a: &WriResult, b: &WriResult, tie_break: TieBreak) -> Ordering {
    b.wri.total_cmp(&a.wri).then_with(|| match tie_break {
        TieBreak::ByCompanyId => a.company_id.cmp(&b.company_id),
    })
}

/// Sorts by descending index and assigns ranks `1..=N`.
pub fn rank(results: &[WriResult], tie_break: TieBreak) -> Vec<WriResult> {
    let mut out = results.to_vec();
    out.sort_by(|a, b| descending(a, b, tie_break));
    for (i, r) in out.iter_mut().enumerate() {
        r.rank = i + 1;
    }
    out
}
