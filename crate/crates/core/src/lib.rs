//! Composite web reputation index.
//!
//! The pipeline collects raw web indicators per company ([`ingestion`]),
//! fills gaps ([`ingestion::impute`]), min-max normalizes each indicator
//! ([`normalize`]), combines positive and negative indicators into one index
//! value per company ([`index`]) and summarizes the result ([`analytics`]).

pub mod analytics;
pub mod error;
pub mod golden;
pub mod index;
pub mod ingestion;
pub mod model;
pub mod normalize;
pub mod pipeline;

pub use analytics::{describe, plot_series, DatasetStats, IndexReport, PlotSeries, RankedCompany};
pub use error::{Error, Result};
pub use index::{compute_wri, rank, rescale_index, Counts, TieBreak, WriResult};
pub use ingestion::{impute, Collector, FixtureStore, Mode};
pub use model::{
    load_catalog, load_universe, validate_snapshot, Catalog, Company, Defect, Group, IndicatorSpec,
    Observation, Polarity, Provenance, Snapshot, Universe,
};
pub use normalize::{
    min_max_normalize, orient, z_score_normalize, Method, NormalizedMatrix, Orientation,
};
pub use pipeline::{run_index, IndexConfig, IndexRun};

/// Directory holding the bundled catalog, universe, sources, golden table and
/// replay corpus.
pub fn bundled_data_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data")
}
