//! Seeded synthetic inputs for the benchmarks in `benches/`.

use chrono::{DateTime, Utc};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use wri_core::{
    Catalog, Company, Group, IndicatorSpec, Observation, Polarity, Provenance, Snapshot, Universe,
};

pub fn series(len: usize, seed: u64) -> Vec<f64> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..len).map(|_| rng.gen_range(0.0..1e6)).collect()
}

/// Dense snapshot with every fourth indicator negative.
pub fn snapshot(companies: usize, indicators: usize, seed: u64) -> Snapshot {
    let mut rng = StdRng::seed_from_u64(seed);
    let universe = Universe::new(
        (0..companies)
            .map(|c| Company {
                id: format!("C{c:05}"),
                name: format!("Company {c}"),
                website: format!("https://c{c}.example"),
                plot_index: c as u32 + 1,
            })
            .collect(),
    )
    .expect("synthetic universe is valid");
    let catalog = Catalog::new(
        (0..indicators)
            .map(|i| IndicatorSpec {
                id: format!("ind{i:03}"),
                display_name: format!("indicator {i}"),
                group: Group::Webometrics,
                polarity: if i % 4 == 3 {
                    Polarity::Negative
                } else {
                    Polarity::Positive
                },
                source_id: format!("src{}", i % 5),
                unit: "count".into(),
                included: true,
            })
            .collect(),
    )
    .expect("synthetic catalog is valid");
    let at = DateTime::<Utc>::UNIX_EPOCH;
    let mut observations = Vec::with_capacity(companies * indicators);
    for company in universe.companies() {
        for spec in catalog.indicators() {
            observations.push(Observation {
                company_id: company.id.clone(),
                indicator_id: spec.id.clone(),
                raw_value: Some(rng.gen_range(0.0..1e6_f64).round()),
                collected_at: at,
                provenance: Provenance::Fixture,
            });
        }
    }
    Snapshot::new(&universe, &catalog, observations, at)
}
