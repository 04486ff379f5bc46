//! Snapshot → normalized matrix → index → ranked report.

use serde::{Deserialize, Serialize};

use crate::analytics::{describe, IndexReport, RankedCompany};
use crate::error::{Error, Result};
use crate::index::{compute_wri, counts, rank, rescale_index, TieBreak};
use crate::model::{validate_snapshot, Snapshot};
use crate::normalize::{normalize_snapshot, orient, Method, NormalizedMatrix, Orientation};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexConfig {
    pub method: Method,
    pub orientation: Orientation,
    /// Min-max rescale the final index vector onto `[0, 1]`.
    pub rescale_final: bool,
    pub tie_break: TieBreak,
}

impl Default for IndexConfig {
    fn default() -> Self {
        IndexConfig {
            method: Method::MinMax,
            orientation: Orientation::SubtractNegatives,
            rescale_final: true,
            tie_break: TieBreak::ByCompanyId,
        }
    }
}

pub struct IndexRun {
    pub matrix: NormalizedMatrix,
    pub report: IndexReport,
}

pub fn run_index(snapshot: &Snapshot, config: &IndexConfig) -> Result<IndexRun> {
    validate_snapshot(snapshot).map_err(Error::InvalidSnapshot)?;
    let catalog = snapshot.catalog()?;
    let universe = snapshot.universe()?;

    let matrix = normalize_snapshot(snapshot, config.method, config.orientation)?;
    let matrix = orient(&catalog, &matrix)?;
    let counts = counts(&matrix, &catalog)?;
    let mut results = compute_wri(&matrix, &catalog)?;
    if config.rescale_final {
        results = rescale_index(&results)?;
    }
    let ranked = rank(&results, config.tie_break);

    let companies: Vec<RankedCompany> = ranked
        .iter()
        .map(|r| {
            let c = universe
                .get(&r.company_id)
                .expect("result ids come from the universe");
            RankedCompany::from_result(r, &c.name, c.plot_index)
        })
        .collect();
    let stats = describe(&companies.iter().map(|c| c.wri).collect::<Vec<_>>())?;

    let mut skipped: Vec<String> = catalog
        .indicators()
        .iter()
        .filter(|s| !s.included)
        .map(|s| s.id.clone())
        .collect();
    skipped.extend(matrix.degenerate_ids().into_iter().map(String::from));

    Ok(IndexRun {
        report: IndexReport {
            generated_at: None,
            method: config.method,
            orientation: config.orientation,
            rescaled: config.rescale_final,
            counts,
            skipped_indicators: skipped,
            stats,
            companies,
        },
        matrix,
    })
}
