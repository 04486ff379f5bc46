use wri_core::golden::{self, targets};
use wri_core::{describe, plot_series, rank, rescale_index, RankedCompany, TieBreak, Universe};

// Summed independently from the published column.
const APPENDIX_MEAN: f64 = 0.4541799481;
const APPENDIX_SD_POPULATION: f64 = 0.2109927596;
const APPENDIX_SD_SAMPLE: f64 = 0.2145997347;

#[test]
fn appendix_statistics() {
    let values: Vec<f64> = golden::bundled().iter().map(|r| r.wri).collect();
    let s = describe(&values).unwrap();
    assert_eq!(s.count, targets::COUNT);
    assert!((s.mean - APPENDIX_MEAN).abs() < 1e-9, "{}", s.mean);
    assert!((s.sd_population - APPENDIX_SD_POPULATION).abs() < 1e-9);
    assert!((s.sd_sample.unwrap() - APPENDIX_SD_SAMPLE).abs() < 1e-9);
    assert_eq!(s.max, 1.0);
    assert_eq!(s.min, 0.132165144);
}

#[test]
fn sample_convention_matches_published_sd() {
    let values: Vec<f64> = golden::bundled().iter().map(|r| r.wri).collect();
    let s = describe(&values).unwrap();
    let sample = (s.sd_sample.unwrap() - targets::SD).abs();
    let population = (s.sd_population - targets::SD).abs();
    assert!(sample < population);
    assert!(sample <= targets::SD_TOLERANCE);
}

#[test]
fn appendix_ranking_order() {
    let rows = golden::bundled();
    let ranked = rank(&golden::as_results(&rows), TieBreak::ByCompanyId);
    assert_eq!(ranked[0].company_id, "GARANTI");
    assert_eq!(ranked[29].company_id, "KOZA_MADENCILIK");
    let expected: Vec<_> = rows.iter().rev().map(|r| r.company_id.clone()).collect();
    let actual: Vec<_> = ranked.iter().map(|r| r.company_id.clone()).collect();
    assert_eq!(actual, expected);
}

#[test]
fn golden_ids_match_universe() {
    let universe = Universe::bundled();
    for (i, row) in golden::bundled().iter().enumerate() {
        let c = universe.get(&row.company_id).unwrap();
        assert_eq!(c.name, row.name);
        assert_eq!(c.plot_index as usize, i + 1);
    }
}

#[test]
fn rescaling_appendix_moves_only_the_floor() {
    let rescaled = rescale_index(&golden::as_results(&golden::bundled())).unwrap();
    let min = rescaled.iter().map(|r| r.wri).fold(f64::INFINITY, f64::min);
    let max = rescaled
        .iter()
        .map(|r| r.wri)
        .fold(f64::NEG_INFINITY, f64::max);
    assert_eq!((min, max), (0.0, 1.0));
}

#[test]
fn plot_series_from_appendix() {
    let universe = Universe::bundled();
    let ranked = rank(
        &golden::as_results(&golden::bundled()),
        TieBreak::ByCompanyId,
    );
    let companies: Vec<RankedCompany> = ranked
        .iter()
        .map(|r| {
            let c = universe.get(&r.company_id).unwrap();
            RankedCompany::from_result(r, &c.name, c.plot_index)
        })
        .collect();
    let series = plot_series(&companies);
    assert_eq!(series.points.len(), 30);
    assert_eq!(series.points[0].wri, 0.132165144);
    assert_eq!(series.points[29].wri, 1.0);
    assert!(series.points.windows(2).all(|w| w[0].wri <= w[1].wri));
    let mut reversed = companies.clone();
    reversed.reverse();
    assert_eq!(plot_series(&reversed), series);
}
