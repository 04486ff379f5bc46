use std::collections::BTreeSet;

use chrono::{DateTime, Utc};
use wri_core::golden::corpus;
use wri_core::ingestion::{CellOrigin, Manifest, SourcesConfig};
use wri_core::{bundled_data_dir, Catalog, Collector, FixtureStore, Mode, Snapshot, Universe};

fn replayed() -> Snapshot {
    let store = FixtureStore::replay(bundled_data_dir().join("fixtures")).unwrap();
    Collector::from_config(&SourcesConfig::bundled())
        .unwrap()
        .with_fixed_timestamp(DateTime::<Utc>::UNIX_EPOCH)
        .collect(
            &Universe::bundled(),
            &Catalog::bundled(),
            Mode::Replay,
            Some(&store),
            None,
        )
        .unwrap()
        .snapshot
}

#[test]
fn every_statement_holds() {
    let checks = corpus::check(&replayed()).unwrap();
    assert_eq!(checks.len(), corpus::STATEMENTS.len());
    for (label, check) in checks {
        assert!(
            check.passed,
            "{label}: expected {}, got {}",
            check.expected, check.actual
        );
    }
}

#[test]
fn single_company_without_facebook_or_wikipedia() {
    let snap = replayed();
    let cells = snap.cells();
    // excluded from collection, so read the payloads directly
    let root = bundled_data_dir().join("fixtures/facebook");
    let no_page: Vec<_> = snap
        .universe
        .iter()
        .filter(|c| {
            let text = std::fs::read_to_string(root.join(format!("{}.json", c.id))).unwrap();
            let v: serde_json::Value = serde_json::from_str(&text).unwrap();
            v["has_facebook_page"] == 0
        })
        .map(|c| c.id.as_str())
        .collect();
    assert_eq!(no_page, ["KOZA_MADENCILIK"]);
    assert_eq!(cells[&("KOZA_MADENCILIK", "fb_likes")].raw_value, Some(0.0));
    let no_wiki = snap
        .column("wiki_page_views")
        .iter()
        .filter(|v| **v == Some(0.0))
        .count();
    assert_eq!(no_wiki, 1);
}

#[test]
fn manifest_covers_every_payload() {
    let root = bundled_data_dir().join("fixtures");
    let manifest = Manifest::load(&root).unwrap();
    let universe = Universe::bundled();
    let catalog = Catalog::bundled();
    assert_eq!(manifest.label, "synthetic-constrained");
    assert_eq!(
        manifest.entries.len(),
        universe.len() * catalog.source_ids().len()
    );

    let mut seen = BTreeSet::new();
    for e in &manifest.entries {
        assert!(root.join(&e.path).is_file(), "{}", e.path);
        assert!(seen.insert((e.source_id.clone(), e.company_id.clone())));
        let declared: BTreeSet<_> = catalog
            .indicators()
            .iter()
            .filter(|s| s.source_id == e.source_id)
            .map(|s| s.id.clone())
            .collect();
        let listed: BTreeSet<_> = e.cells.keys().cloned().collect();
        assert_eq!(declared, listed, "{}", e.path);
    }
    let anchored = manifest
        .entries
        .iter()
        .flat_map(|e| e.cells.values())
        .filter(|o| **o == CellOrigin::PaperAnchored)
        .count();
    assert!(anchored > 0);
}
