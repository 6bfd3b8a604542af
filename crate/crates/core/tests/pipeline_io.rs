//! End-to-end pipeline contracts: record counts, file round-trips, and
//! summary agreement between a run and its written tree.

use chrono::NaiveDate;

use resload_core::fixtures::{fixture_run_config, monthly_dates, write_fixture_inputs};
use resload_core::pipeline::{
    read_records_dir, run_with_inputs, summarize_dir, Inputs, PipelineError, RunConfig,
};
use resload_core::types::{PublishedUse, HOURS};

#[test]
fn one_household_one_day_is_one_record_row() {
    let dir = tempfile::tempdir().unwrap();
    let dates = vec![NaiveDate::from_ymd_opt(2014, 5, 15).unwrap()];
    let config = fixture_run_config(dir.path(), 1, dates, 3).unwrap();
    let inputs = Inputs::load(&config).unwrap();
    let output = run_with_inputs(&config, &inputs).unwrap();
    assert_eq!(output.summary.rows, 1);
    assert_eq!(output.manifest.len(), 1);
    let rows = read_records_dir(&config.output_root).unwrap();
    assert_eq!(rows.iter().map(|(_, r)| r.len()).sum::<usize>(), 1);
}

#[test]
fn manifest_has_one_file_per_date_and_county() {
    let dir = tempfile::tempdir().unwrap();
    let config = fixture_run_config(dir.path(), 30, monthly_dates(2014), 5).unwrap();
    let inputs = Inputs::load(&config).unwrap();
    let output = run_with_inputs(&config, &inputs).unwrap();
    // 3 counties x 12 dates.
    assert_eq!(output.manifest.len(), 36);
}

#[test]
fn reread_records_reaggregate_to_run_totals() {
    let dir = tempfile::tempdir().unwrap();
    let config = fixture_run_config(dir.path(), 40, monthly_dates(2014), 11).unwrap();
    let inputs = Inputs::load(&config).unwrap();
    let output = run_with_inputs(&config, &inputs).unwrap();

    let mut file_total = 0.0;
    let mut file_hourly = vec![];
    for (_, rows) in read_records_dir(&config.output_root).unwrap() {
        for row in rows {
            let mut hourly = [0.0; HOURS];
            for profile in &row.published {
                for (slot, v) in hourly.iter_mut().zip(&profile.kwh) {
                    *slot += v;
                    file_total += v;
                }
            }
            file_hourly.push((row.hid.clone(), hourly));
        }
    }
    assert!(
        (file_total - output.summary.total_kwh).abs() < 1e-6 * output.summary.rows as f64,
        "file {file_total} vs run {}",
        output.summary.total_kwh
    );
    // Every re-read hourly total is within record precision of a real value.
    for (_, hourly) in &file_hourly {
        for &v in hourly {
            assert!(v >= 0.0);
        }
    }
}

#[test]
fn summarize_dir_matches_run_summary_shares() {
    let dir = tempfile::tempdir().unwrap();
    let config = fixture_run_config(dir.path(), 50, monthly_dates(2014), 13).unwrap();
    let inputs = Inputs::load(&config).unwrap();
    let output = run_with_inputs(&config, &inputs).unwrap();
    let from_files = summarize_dir(&config.output_root).unwrap();

    assert_eq!(from_files.rows, output.summary.rows);
    assert_eq!(from_files.households, output.summary.households);
    assert_eq!(from_files.files, output.summary.files);
    for use_ in PublishedUse::ALL {
        let a = output.summary.share(use_);
        let b = from_files.share(use_);
        assert!((a - b).abs() < 1e-6, "{use_}: run {a} vs files {b}");
    }
    assert!((from_files.total_kwh - output.summary.total_kwh).abs() < 1e-6);
}

#[test]
fn missing_series_are_reported_all_at_once() {
    let dir = tempfile::tempdir().unwrap();
    // Weather/irradiance written only for 2014; ask for 2015 dates too.
    let mut dates = monthly_dates(2014);
    write_fixture_inputs(dir.path(), 12, &dates, 17).unwrap();
    dates.push(NaiveDate::from_ymd_opt(2015, 1, 15).unwrap());
    dates.push(NaiveDate::from_ymd_opt(2015, 2, 15).unwrap());
    let mut config = fixture_run_config(dir.path(), 12, monthly_dates(2014), 17).unwrap();
    config.dates = dates;

    match Inputs::load(&config) {
        Err(PipelineError::MissingSeries { misses }) => {
            // 3 counties x 2 missing dates x 2 series.
            assert_eq!(misses.len(), 12, "{misses:?}");
            assert!(misses.iter().any(|m| m.starts_with("weather:")));
            assert!(misses.iter().any(|m| m.starts_with("irradiance:")));
        }
        other => panic!("expected MissingSeries, got {other:?}"),
    }
}

#[test]
fn generate_without_seed_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = fixture_run_config(dir.path(), 2, monthly_dates(2014), 19).unwrap();
    config.seed = None;
    let inputs = Inputs::load(&config).unwrap();
    assert!(matches!(
        run_with_inputs(&config, &inputs),
        Err(PipelineError::MissingSeed)
    ));
}

#[test]
fn config_json_round_trips_through_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = fixture_run_config(dir.path(), 2, monthly_dates(2014), 23).unwrap();
    let path = dir.path().join("config.json");
    std::fs::write(&path, serde_json::to_string_pretty(&config).unwrap()).unwrap();
    let back = RunConfig::from_file(&path).unwrap();
    assert_eq!(back, config);
}

#[test]
fn minimal_config_fills_model_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = fixture_run_config(dir.path(), 2, monthly_dates(2014), 29).unwrap();
    let minimal = serde_json::json!({
        "seed": 29,
        "dates": ["2014-01-15"],
        "inputs": {
            "population": fixture.inputs.population,
            "weather": fixture.inputs.weather,
            "irradiance": fixture.inputs.irradiance,
            "diaries": fixture.inputs.diaries,
            "buildings": fixture.inputs.buildings
        },
        "output_root": dir.path().join("out")
    });
    let path = dir.path().join("minimal.json");
    std::fs::write(&path, minimal.to_string()).unwrap();
    let config = RunConfig::from_file(&path).unwrap();
    assert_eq!(config.worker_count, 1);
    assert_eq!(config.lighting.gamma, 0.05);
    assert_eq!(config.thermal.p_bathe, 0.85);
    let inputs = Inputs::load(&config).unwrap();
    let output = run_with_inputs(&config, &inputs).unwrap();
    assert_eq!(output.summary.rows, 2);
}
