use chrono::{DateTime, Utc};
use wri_core::golden;
use wri_core::ingestion::SourcesConfig;
use wri_core::{
    bundled_data_dir, impute, run_index, Catalog, Collector, Error, FixtureStore, Group,
    IndexConfig, IndicatorSpec, Method, Mode, Observation, Orientation, Polarity, Provenance,
    Snapshot, Universe,
};

fn epoch() -> DateTime<Utc> {
    DateTime::<Utc>::UNIX_EPOCH
}

fn corpus() -> Snapshot {
    let store = FixtureStore::replay(bundled_data_dir().join("fixtures")).unwrap();
    let collection = Collector::from_config(&SourcesConfig::bundled())
        .unwrap()
        .with_fixed_timestamp(epoch())
        .collect(
            &Universe::bundled(),
            &Catalog::bundled(),
            Mode::Replay,
            Some(&store),
            None,
        )
        .unwrap();
    impute(&collection.snapshot).snapshot
}

fn scale_column(snapshot: &Snapshot, indicator: &str, factor: f64) -> Snapshot {
    let mut out = snapshot.clone();
    for o in &mut out.observations {
        if o.indicator_id == indicator {
            o.raw_value = o.raw_value.map(|v| v * factor);
        }
    }
    out
}

#[test]
fn corpus_run_uses_sixteen_indicators() {
    let run = run_index(&corpus(), &IndexConfig::default()).unwrap();
    let r = &run.report;
    assert_eq!((r.counts.positive, r.counts.total), (13, 16));
    assert_eq!(r.skipped_indicators, ["has_facebook_page"]);
    assert_eq!(r.companies.len(), 30);
    assert_eq!(r.stats.max, 1.0);
    assert_eq!(r.stats.min, 0.0);
    let ranks: Vec<_> = r.companies.iter().map(|c| c.rank).collect();
    assert_eq!(ranks, (1..=30).collect::<Vec<_>>());
    for c in &r.companies {
        let sum: f64 = c.contributions.values().sum();
        assert!(
            (sum / 13.0 - c.unscaled_wri).abs() <= 1e-12,
            "{}",
            c.company_id
        );
        assert_eq!(c.contributions.len(), 16);
    }
}

#[test]
fn scaling_any_raw_column_leaves_index_unchanged() {
    let base = corpus();
    let config = IndexConfig::default();
    let reference = run_index(&base, &config).unwrap().report;
    for spec in Catalog::bundled().included() {
        for factor in [1e-3, 0.37, 2.0, 1e6] {
            let other = run_index(&scale_column(&base, &spec.id, factor), &config)
                .unwrap()
                .report;
            for (a, b) in reference.companies.iter().zip(&other.companies) {
                assert_eq!(a.company_id, b.company_id, "{} x{factor}", spec.id);
                assert_eq!(a.rank, b.rank);
                assert!((a.wri - b.wri).abs() <= 1e-9, "{} x{factor}", spec.id);
            }
        }
    }
}

#[test]
fn no_rescale_keeps_order() {
    let snap = corpus();
    let scaled = run_index(&snap, &IndexConfig::default()).unwrap().report;
    let raw = run_index(
        &snap,
        &IndexConfig {
            rescale_final: false,
            ..IndexConfig::default()
        },
    )
    .unwrap()
    .report;
    let ids = |r: &wri_core::IndexReport| {
        r.companies
            .iter()
            .map(|c| c.company_id.clone())
            .collect::<Vec<_>>()
    };
    assert_eq!(ids(&scaled), ids(&raw));
    assert!(!raw.rescaled);
    assert!(raw.stats.max < 1.0);
    for c in &raw.companies {
        assert_eq!(c.wri, c.unscaled_wri);
    }
}

#[test]
fn zscore_and_invert_modes_run() {
    let snap = corpus();
    let z = run_index(
        &snap,
        &IndexConfig {
            method: Method::ZScore,
            ..IndexConfig::default()
        },
    )
    .unwrap();
    assert_eq!(z.report.method, Method::ZScore);
    assert_eq!(z.matrix.method, Method::ZScore);

    let inv = run_index(
        &snap,
        &IndexConfig {
            orientation: Orientation::InvertThenNormalize,
            ..IndexConfig::default()
        },
    )
    .unwrap();
    assert_eq!(inv.report.counts.positive, inv.report.counts.total);
    assert!(inv
        .report
        .companies
        .iter()
        .all(|c| c.contributions.values().all(|v| *v >= 0.0)));
}

#[test]
fn appendix_as_single_indicator_ranks_garanti_first() {
    let universe = Universe::bundled();
    let catalog = Catalog::new(vec![IndicatorSpec {
        id: "appendix".into(),
        display_name: "appendix".into(),
        group: Group::Webometrics,
        polarity: Polarity::Positive,
        source_id: "golden".into(),
        unit: "score".into(),
        included: true,
    }])
    .unwrap();
    let obs = golden::bundled()
        .into_iter()
        .map(|r| Observation {
            company_id: r.company_id,
            indicator_id: "appendix".into(),
            raw_value: Some(r.wri),
            collected_at: epoch(),
            provenance: Provenance::Fixture,
        })
        .collect();
    let snap = Snapshot::new(&universe, &catalog, obs, epoch());
    let report = run_index(&snap, &IndexConfig::default()).unwrap().report;
    assert_eq!(report.companies[0].name, "GARANTİ");
    assert_eq!(report.companies[29].name, "KOZA MADENCİLİK");
    let expected: Vec<_> = golden::bundled()
        .iter()
        .rev()
        .map(|r| r.company_id.clone())
        .collect();
    let actual: Vec<_> = report
        .companies
        .iter()
        .map(|c| c.company_id.clone())
        .collect();
    assert_eq!(actual, expected);
}

#[test]
fn unimputed_snapshot_is_rejected() {
    let mut snap = corpus();
    snap.observations[0].raw_value = None;
    match run_index(&snap, &IndexConfig::default()) {
        Err(Error::InvalidSnapshot(defects)) => assert_eq!(defects.len(), 1),
        other => panic!("expected invalid snapshot, got {:?}", other.map(|_| ())),
    }
}
