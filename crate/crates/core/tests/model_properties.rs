//! Cross-cutting model properties that span modules.

use chrono::NaiveDate;

use resload_core::activities::{events_to_profiles, plan_day, ActivityConfig};
use resload_core::enrichment::OccupancySchedule;
use resload_core::ingest::{Activity, DiaryRecord, DiarySegment, Place};
use resload_core::metrics::{distance_matrix, DistanceMetric, MATRIX_BINS};
use resload_core::pipeline::{ModelTag, RngFactory};
use resload_core::types::{Dwelling, EndUse, HOURS};

fn dwelling() -> Dwelling {
    Dwelling {
        floor_area: 1800.0,
        wall_area: 1350.0,
        stories: 1,
        r_roof: 38.0,
        r_wall: 15.0,
        hvac_efficiency: 0.9,
        heater_efficiency: 0.95,
        setpoint_heat: 68.0,
        setpoint_cool: 76.0,
        has_dishwasher: true,
        has_laundry: true,
        has_ac: true,
        has_electric_water_heater: true,
        water_heater_eta: 0.9,
        lighting_units: vec![],
    }
}

fn diary() -> DiaryRecord {
    DiaryRecord {
        id: "d".into(),
        features: Default::default(),
        segments: vec![
            DiarySegment { start_min: 0, end_min: 420, place: Place::Sleep },
            DiarySegment { start_min: 420, end_min: 540, place: Place::Home },
            DiarySegment { start_min: 540, end_min: 1020, place: Place::Work },
            DiarySegment { start_min: 1020, end_min: 1380, place: Place::Home },
            DiarySegment { start_min: 1380, end_min: 1440, place: Place::Sleep },
        ],
        activities: vec![
            (Activity::Cook, 2),
            (Activity::Dwasher, 1),
            (Activity::Cwasher, 1),
            (Activity::Tv, 1),
            (Activity::Computer, 1),
            (Activity::Cleaning, 1),
        ],
    }
}

/// Appliance energy is independent of region by construction: two
/// populations with identical specs but disjoint RNG streams produce
/// daily-energy distributions within a small Jensen-Shannon distance.
#[test]
fn activity_energy_distributions_match_across_regions() {
    let config = ActivityConfig::default();
    let home = dwelling();
    let donor = diary();
    let occupancy = OccupancySchedule {
        counts: std::array::from_fn(|t| u32::from((7..9).contains(&t) || (17..23).contains(&t))),
    };
    let factory = RngFactory::new(99);
    let dates: Vec<NaiveDate> =
        (0..40).map(|i| NaiveDate::from_ymd_opt(2014, 1, 1).unwrap() + chrono::Days::new(i)).collect();

    let sample_region = |prefix: &str| -> (Vec<f64>, Vec<f64>) {
        let mut cook = Vec::new();
        let mut total = Vec::new();
        for h in 0..500 {
            let hid = format!("{prefix}{h:04}");
            for &date in &dates {
                let mut rng = factory.household_day(&hid, date, ModelTag::Activities);
                let plan = plan_day(&home, &occupancy, &[&donor, &donor], &config, &mut rng);
                let profiles = events_to_profiles(&plan.events);
                cook.push(profiles.get(EndUse::Cook).total());
                total.push(profiles.iter().map(|(_, p)| p.total()).sum());
            }
        }
        (cook, total)
    };

    // 2 x 10^4 household-days per region.
    let (cook_a, total_a) = sample_region("va");
    let (cook_b, total_b) = sample_region("tx");

    for (name, a, b) in [("cook", cook_a, cook_b), ("total", total_a, total_b)] {
        let matrix = distance_matrix(
            &[("a".to_string(), a), ("b".to_string(), b)],
            DistanceMetric::Js,
            MATRIX_BINS,
        )
        .unwrap();
        let js = matrix.values[0][1];
        assert!(js < 0.05, "{name}: JS {js}");
    }
}

/// Planning cost stays linear: a household with many members and a long
/// event list still plans in microseconds, never quadratic blowup.
#[test]
fn plan_day_scales_linearly_with_events() {
    let config = ActivityConfig::default();
    let home = dwelling();
    let donor = diary();
    let occupancy = OccupancySchedule { counts: [3; HOURS] };
    let diaries: Vec<&DiaryRecord> = (0..12).map(|_| &donor).collect();
    let factory = RngFactory::new(1);
    let start = std::time::Instant::now();
    let mut events = 0usize;
    for i in 0..2000 {
        let mut rng = factory.household_day(
            &format!("h{i}"),
            NaiveDate::from_ymd_opt(2014, 6, 1).unwrap(),
            ModelTag::Activities,
        );
        events += plan_day(&home, &occupancy, &diaries, &config, &mut rng).events.len();
    }
    assert!(events > 0);
    // 2000 twelve-member households well under a second.
    assert!(start.elapsed().as_secs_f64() < 1.0, "{:?}", start.elapsed());
}
