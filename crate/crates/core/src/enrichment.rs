//! Enrichment: assign activity diaries to persons and building attributes to
//! households by stratified donor matching, then derive the household
//! occupancy schedule.
//!
//! Donors are partitioned into strata by cross-binning a configured feature
//! list. A synthetic entity draws uniformly from its own stratum; if that
//! stratum holds no donors, the nearest nonempty stratum by L1 distance over
//! bin indices is used instead (ties resolved toward the lower flat index),
//! so a match always exists.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ingest::{BuildingRecord, DiaryRecord};
use crate::types::{BulbKind, ClimateZone, Dwelling, Household, LightingUnit, Person};

#[derive(Debug, thiserror::Error)]
pub enum EnrichError {
    #[error("match spec has no features")]
    EmptySpec,
    #[error("donor pool is empty")]
    EmptyPool,
    #[error("person `{0}` has no diary assigned")]
    DiaryMissing(String),
    #[error("building record `{0}` has nonpositive floor area")]
    NonpositiveFloorArea(String),
}

/// One matching feature: a name resolvable on both donors and synthetic
/// entities, plus ascending cut points. A value lands in the bin equal to
/// the number of cut points at or below it, so `n` cuts give `n + 1` bins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub name: String,
    pub cuts: Vec<f64>,
}

impl FeatureSpec {
    pub fn bin(&self, value: f64) -> usize {
        self.cuts.iter().filter(|&&c| value >= c).count()
    }

    fn bin_count(&self) -> usize {
        self.cuts.len() + 1
    }
}

/// An ordered feature list defining the donor strata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchSpec {
    pub features: Vec<FeatureSpec>,
}

impl MatchSpec {
    pub fn new(features: Vec<FeatureSpec>) -> Result<Self, EnrichError> {
        if features.is_empty() {
            return Err(EnrichError::EmptySpec);
        }
        Ok(MatchSpec { features })
    }

    /// Default diary stratification: worker flag, age tercile, household-size bin.
    pub fn default_diary() -> Self {
        MatchSpec {
            features: vec![
                FeatureSpec { name: "worker".into(), cuts: vec![0.5] },
                FeatureSpec { name: "age".into(), cuts: vec![30.0, 60.0] },
                FeatureSpec { name: "hsize".into(), cuts: vec![1.5, 2.5] },
            ],
        }
    }

    /// Default building stratification: household-size bin, income band.
    pub fn default_building() -> Self {
        MatchSpec {
            features: vec![
                FeatureSpec { name: "hsize".into(), cuts: vec![1.5, 2.5] },
                FeatureSpec { name: "income".into(), cuts: vec![40_000.0, 90_000.0] },
            ],
        }
    }

    fn bin_vector(&self, lookup: impl Fn(&str) -> f64) -> Vec<usize> {
        self.features.iter().map(|f| f.bin(lookup(&f.name))).collect()
    }

    fn flat_index(&self, bins: &[usize]) -> usize {
        let mut idx = 0;
        for (f, &b) in self.features.iter().zip(bins) {
            idx = idx * f.bin_count() + b;
        }
        idx
    }

    fn cell_count(&self) -> usize {
        self.features.iter().map(FeatureSpec::bin_count).product()
    }

    fn unflatten(&self, mut idx: usize) -> Vec<usize> {
        let mut bins = vec![0; self.features.len()];
        for (i, f) in self.features.iter().enumerate().rev() {
            bins[i] = idx % f.bin_count();
            idx /= f.bin_count();
        }
        bins
    }
}

/// Donor indices pre-partitioned into the spec's strata.
#[derive(Debug, Clone)]
pub struct StratifiedPool {
    spec: MatchSpec,
    cells: Vec<Vec<usize>>,
}

impl StratifiedPool {
    pub fn build(
        spec: &MatchSpec,
        donor_features: impl Iterator<Item = BTreeMap<String, f64>>,
    ) -> Result<Self, EnrichError> {
        let mut cells = vec![Vec::new(); spec.cell_count()];
        let mut any = false;
        for (donor_idx, features) in donor_features.enumerate() {
            let bins = spec.bin_vector(|name| features.get(name).copied().unwrap_or(0.0));
            cells[spec.flat_index(&bins)].push(donor_idx);
            any = true;
        }
        if !any {
            return Err(EnrichError::EmptyPool);
        }
        Ok(StratifiedPool { spec: spec.clone(), cells })
    }

    pub fn for_diaries(spec: &MatchSpec, diaries: &[DiaryRecord]) -> Result<Self, EnrichError> {
        Self::build(spec, diaries.iter().map(|d| d.features.clone()))
    }

    pub fn for_buildings(
        spec: &MatchSpec,
        buildings: &[BuildingRecord],
    ) -> Result<Self, EnrichError> {
        Self::build(spec, buildings.iter().map(|b| b.features.clone()))
    }

    /// Uniform draw from the target stratum, falling back to the nearest
    /// nonempty stratum by L1 distance over bin indices.
    pub fn draw(&self, lookup: impl Fn(&str) -> f64, rng: &mut impl Rng) -> usize {
        let target = self.spec.bin_vector(lookup);
        let cell = self.nearest_nonempty(&target);
        let donors = &self.cells[cell];
        donors[rng.random_range(0..donors.len())]
    }

    /// The stratum that would serve a given entity (post-fallback).
    pub fn stratum_of(&self, lookup: impl Fn(&str) -> f64) -> &[usize] {
        let target = self.spec.bin_vector(lookup);
        &self.cells[self.nearest_nonempty(&target)]
    }

    fn nearest_nonempty(&self, target: &[usize]) -> usize {
        let direct = self.spec.flat_index(target);
        if !self.cells[direct].is_empty() {
            return direct;
        }
        let mut best: Option<(usize, usize)> = None; // (distance, flat index)
        for idx in 0..self.cells.len() {
            if self.cells[idx].is_empty() {
                continue;
            }
            let bins = self.spec.unflatten(idx);
            let dist: usize =
                bins.iter().zip(target).map(|(&a, &b)| a.abs_diff(b)).sum();
            match best {
                Some((d, _)) if dist >= d => {}
                _ => best = Some((dist, idx)),
            }
        }
        best.expect("pool construction rejects empty pools").1
    }
}

fn person_feature(person: &Person, household: &Household, name: &str) -> f64 {
    match name {
        "worker" => person.worker as u8 as f64,
        "age" => person.age as f64,
        "hsize" => household.size() as f64,
        "income" => household.income,
        _ => 0.0,
    }
}

fn household_feature(household: &Household, name: &str) -> f64 {
    match name {
        "hsize" => household.size() as f64,
        "income" => household.income,
        _ => 0.0,
    }
}

/// Draws a diary donor for one person. Returns the donor's index into the
/// diary pool the `StratifiedPool` was built over.
pub fn match_diary(
    person: &Person,
    household: &Household,
    pool: &StratifiedPool,
    rng: &mut impl Rng,
) -> usize {
    pool.draw(|name| person_feature(person, household, name), rng)
}

/// Draws a building donor for one household; re-invoked every run so the
/// attribute assignment is itself stochastic.
pub fn match_building(
    household: &Household,
    pool: &StratifiedPool,
    rng: &mut impl Rng,
) -> usize {
    pool.draw(|name| household_feature(household, name), rng)
}

/// Per-zone envelope and thermostat parameters used to realize dwellings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZoneParams {
    pub r_roof: f64,
    pub r_wall: f64,
}

/// Enrichment configuration: strata, envelope parameters, setpoints, and the
/// bulb wattage table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnrichmentConfig {
    pub diary_match: MatchSpec,
    pub building_match: MatchSpec,
    pub zone_params: BTreeMap<ClimateZone, ZoneParams>,
    pub ceiling_height_ft: f64,
    pub setpoint_heat_f: f64,
    pub setpoint_cool_f: f64,
    pub hvac_efficiency: f64,
    pub heater_efficiency: f64,
    /// Water-heater efficiency band; one draw per household per run.
    pub water_heater_eta: (f64, f64),
    pub bulb_watts: BTreeMap<BulbKind, f64>,
}

impl Default for EnrichmentConfig {
    fn default() -> Self {
        let mut zone_params = BTreeMap::new();
        zone_params.insert(ClimateZone::Marine, ZoneParams { r_roof: 38.0, r_wall: 21.0 });
        zone_params.insert(ClimateZone::HotDry, ZoneParams { r_roof: 38.0, r_wall: 13.0 });
        zone_params.insert(ClimateZone::HotHumid, ZoneParams { r_roof: 30.0, r_wall: 13.0 });
        zone_params.insert(ClimateZone::MixedHumid, ZoneParams { r_roof: 38.0, r_wall: 15.0 });
        zone_params.insert(ClimateZone::Cold, ZoneParams { r_roof: 49.0, r_wall: 21.0 });
        let mut bulb_watts = BTreeMap::new();
        bulb_watts.insert(BulbKind::Incandescent, 60.0);
        bulb_watts.insert(BulbKind::Cfl, 14.0);
        bulb_watts.insert(BulbKind::Led, 9.0);
        EnrichmentConfig {
            diary_match: MatchSpec::default_diary(),
            building_match: MatchSpec::default_building(),
            zone_params,
            ceiling_height_ft: 8.0,
            setpoint_heat_f: 68.0,
            setpoint_cool_f: 76.0,
            hvac_efficiency: 0.9,
            heater_efficiency: 0.95,
            water_heater_eta: (0.80, 0.99),
            bulb_watts,
        }
    }
}

/// Realizes a dwelling from a matched building record and zone parameters.
/// Wall area assumes a square footprint:
/// `4 * sqrt(floor_area / stories) * ceiling_height * stories`.
/// Pure in (record, config, eta); the water-heater efficiency is drawn by the
/// caller so this stays replayable.
pub fn realize_dwelling(
    household: &Household,
    record: &BuildingRecord,
    config: &EnrichmentConfig,
    water_heater_eta: f64,
) -> Result<Dwelling, EnrichError> {
    if record.floor_area <= 0.0 {
        return Err(EnrichError::NonpositiveFloorArea(record.id.clone()));
    }
    let stories = record.stories.max(1);
    let side = (record.floor_area / stories as f64).sqrt();
    let wall_area = 4.0 * side * config.ceiling_height_ft * stories as f64;
    let zone = config
        .zone_params
        .get(&household.zone)
        .cloned()
        .unwrap_or(ZoneParams { r_roof: 38.0, r_wall: 15.0 });

    let mut lighting_units = Vec::new();
    let (n_inc, n_cfl, n_led) = record.bulb_counts;
    for (kind, count) in [
        (BulbKind::Incandescent, n_inc),
        (BulbKind::Cfl, n_cfl),
        (BulbKind::Led, n_led),
    ] {
        let watts = config.bulb_watts.get(&kind).copied().unwrap_or(60.0);
        lighting_units.extend(std::iter::repeat(LightingUnit { kind, watts }).take(count as usize));
    }

    Ok(Dwelling {
        floor_area: record.floor_area,
        wall_area,
        stories,
        r_roof: zone.r_roof,
        r_wall: zone.r_wall,
        hvac_efficiency: config.hvac_efficiency,
        heater_efficiency: config.heater_efficiency,
        setpoint_heat: config.setpoint_heat_f,
        setpoint_cool: config.setpoint_cool_f,
        has_dishwasher: record.has_dishwasher,
        has_laundry: record.has_laundry,
        has_ac: record.has_ac,
        has_electric_water_heater: record.has_electric_water_heater(),
        water_heater_eta,
        lighting_units,
    })
}

/// Awake-at-home member counts per hour.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OccupancySchedule {
    pub counts: [u32; 24],
}

impl OccupancySchedule {
    pub fn occupied_hours(&self) -> impl Iterator<Item = usize> + '_ {
        (0..24).filter(move |&t| self.counts[t] > 0)
    }
}

/// Counts members at home and awake per hour, an hour qualifying when at
/// least 30 of its 60 minutes are. Deterministic given the assigned diaries.
pub fn derive_occupancy(
    household: &Household,
    diaries: &[DiaryRecord],
) -> Result<OccupancySchedule, EnrichError> {
    let mut counts = [0u32; 24];
    for person in &household.members {
        let idx = person
            .diary
            .ok_or_else(|| EnrichError::DiaryMissing(person.id.clone()))?;
        let diary = &diaries[idx];
        for (t, count) in counts.iter_mut().enumerate() {
            if diary.home_awake_hour(t) {
                *count += 1;
            }
        }
    }
    Ok(OccupancySchedule { counts })
}

/// Hourly at-home-awake flags for one member, used to place personal
/// hot-water events inside the member's own occupied hours.
pub fn member_home_awake_hours(diary: &DiaryRecord) -> [bool; 24] {
    std::array::from_fn(|t| diary.home_awake_hour(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{DiarySegment, Place};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diary(id: &str, worker: f64, age: f64, hsize: f64, segments: Vec<DiarySegment>) -> DiaryRecord {
        let mut features = BTreeMap::new();
        features.insert("worker".into(), worker);
        features.insert("age".into(), age);
        features.insert("hsize".into(), hsize);
        DiaryRecord { id: id.into(), features, segments, activities: vec![] }
    }

    fn seg(start: u32, end: u32, place: Place) -> DiarySegment {
        DiarySegment { start_min: start, end_min: end, place }
    }

    fn home_all_day() -> Vec<DiarySegment> {
        vec![seg(0, 1440, Place::Home)]
    }

    fn household(size: usize) -> Household {
        Household {
            hid: "h1".into(),
            county_fips: "51013".into(),
            state: "VA".into(),
            zone: ClimateZone::MixedHumid,
            members: (0..size)
                .map(|k| Person { id: format!("h1-p{k}"), age: 34, worker: true, diary: None })
                .collect(),
            dwelling: None,
            income: 85_000.0,
        }
    }

    #[test]
    fn singleton_pool_always_matches() {
        let diaries = vec![diary("d0", 0.0, 70.0, 1.0, home_all_day())];
        let spec = MatchSpec::default_diary();
        let pool = StratifiedPool::for_diaries(&spec, &diaries).unwrap();
        let hh = household(3);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            assert_eq!(match_diary(&hh.members[0], &hh, &pool, &mut rng), 0);
        }
    }

    #[test]
    fn worker_stratum_is_pure() {
        let diaries = vec![
            diary("worker-a", 1.0, 34.0, 3.0, home_all_day()),
            diary("worker-b", 1.0, 40.0, 3.0, home_all_day()),
            diary("retiree", 0.0, 70.0, 3.0, home_all_day()),
        ];
        let spec = MatchSpec::new(vec![FeatureSpec { name: "worker".into(), cuts: vec![0.5] }])
            .unwrap();
        let pool = StratifiedPool::for_diaries(&spec, &diaries).unwrap();
        let hh = household(3);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let idx = match_diary(&hh.members[0], &hh, &pool, &mut rng);
            assert!(diaries[idx].id.starts_with("worker"));
        }
    }

    #[test]
    fn stratum_draws_are_uniform_within_3_sigma() {
        let diaries: Vec<_> =
            (0..8).map(|i| diary(&format!("d{i}"), 1.0, 34.0, 2.0, home_all_day())).collect();
        let spec = MatchSpec::default_diary();
        let pool = StratifiedPool::for_diaries(&spec, &diaries).unwrap();
        let hh = household(2);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 10_000usize;
        let mut counts = [0usize; 8];
        for _ in 0..n {
            counts[match_diary(&hh.members[0], &hh, &pool, &mut rng)] += 1;
        }
        let p = 1.0 / 8.0;
        let mean = n as f64 * p;
        let sigma = (n as f64 * p * (1.0 - p)).sqrt();
        for (i, &c) in counts.iter().enumerate() {
            assert!(
                (c as f64 - mean).abs() <= 3.0 * sigma,
                "donor {i}: count {c} outside 3 sigma of {mean}"
            );
        }
    }

    #[test]
    fn size_five_household_draws_from_top_bin() {
        let buildings = vec![
            BuildingRecord {
                id: "small".into(),
                features: BTreeMap::from([("hsize".into(), 1.0), ("income".into(), 50_000.0)]),
                floor_area: 900.0,
                stories: 1,
                has_dishwasher: false,
                has_laundry: false,
                has_ac: true,
                water_heater_fuel: "electricity".into(),
                bulb_counts: (5, 3, 2),
            },
            BuildingRecord {
                id: "big".into(),
                features: BTreeMap::from([("hsize".into(), 4.0), ("income".into(), 50_000.0)]),
                floor_area: 2600.0,
                stories: 2,
                has_dishwasher: true,
                has_laundry: true,
                has_ac: true,
                water_heater_fuel: "electricity".into(),
                bulb_counts: (10, 6, 4),
            },
        ];
        let spec =
            MatchSpec::new(vec![FeatureSpec { name: "hsize".into(), cuts: vec![1.5, 2.5] }])
                .unwrap();
        let pool = StratifiedPool::for_buildings(&spec, &buildings).unwrap();
        let hh = household(5);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            assert_eq!(match_building(&hh, &pool, &mut rng), 1);
        }
    }

    #[test]
    fn empty_stratum_falls_back_to_nearest() {
        // Donors only in the lowest age bin; an old person must still match.
        let diaries = vec![diary("young", 1.0, 20.0, 2.0, home_all_day())];
        let spec =
            MatchSpec::new(vec![FeatureSpec { name: "age".into(), cuts: vec![30.0, 60.0] }])
                .unwrap();
        let pool = StratifiedPool::for_diaries(&spec, &diaries).unwrap();
        let mut hh = household(1);
        hh.members[0].age = 80;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert_eq!(match_diary(&hh.members[0], &hh, &pool, &mut rng), 0);
    }

    #[test]
    fn fixed_seed_replays_identical_assignment() {
        let diaries: Vec<_> =
            (0..20).map(|i| diary(&format!("d{i}"), (i % 2) as f64, 25.0 + i as f64, 2.0, home_all_day())).collect();
        let spec = MatchSpec::default_diary();
        let pool = StratifiedPool::for_diaries(&spec, &diaries).unwrap();
        let hh = household(4);
        let draw_all = |seed: u64| -> Vec<usize> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            hh.members.iter().map(|p| match_diary(p, &hh, &pool, &mut rng)).collect()
        };
        assert_eq!(draw_all(99), draw_all(99));
    }

    #[test]
    fn wall_area_follows_square_footprint_formula() {
        let record = BuildingRecord {
            id: "b".into(),
            features: BTreeMap::new(),
            floor_area: 2000.0,
            stories: 1,
            has_dishwasher: true,
            has_laundry: true,
            has_ac: true,
            water_heater_fuel: "electricity".into(),
            bulb_counts: (0, 0, 0),
        };
        let hh = household(2);
        let config = EnrichmentConfig::default();
        let dwelling = realize_dwelling(&hh, &record, &config, 0.9).unwrap();
        // 4 * sqrt(2000) * 8 = 1431.08...
        assert!((dwelling.wall_area - 1431.1).abs() < 0.1, "{}", dwelling.wall_area);
    }

    #[test]
    fn zero_floor_area_is_error() {
        let record = BuildingRecord {
            id: "b".into(),
            features: BTreeMap::new(),
            floor_area: 0.0,
            stories: 1,
            has_dishwasher: false,
            has_laundry: false,
            has_ac: false,
            water_heater_fuel: "gas".into(),
            bulb_counts: (0, 0, 0),
        };
        let hh = household(1);
        assert!(matches!(
            realize_dwelling(&hh, &record, &EnrichmentConfig::default(), 0.9),
            Err(EnrichError::NonpositiveFloorArea(_))
        ));
    }

    #[test]
    fn zone_r_values_pass_through() {
        let record = BuildingRecord {
            id: "b".into(),
            features: BTreeMap::new(),
            floor_area: 1500.0,
            stories: 1,
            has_dishwasher: false,
            has_laundry: false,
            has_ac: true,
            water_heater_fuel: "electricity".into(),
            bulb_counts: (1, 1, 1),
        };
        let mut hh = household(1);
        hh.zone = ClimateZone::Cold;
        let config = EnrichmentConfig::default();
        let dwelling = realize_dwelling(&hh, &record, &config, 0.85).unwrap();
        assert_eq!(dwelling.r_roof, 49.0);
        assert_eq!(dwelling.r_wall, 21.0);
    }

    #[test]
    fn occupancy_counts_everyone_home_awake() {
        let diaries = vec![diary("d0", 1.0, 34.0, 2.0, home_all_day())];
        let mut hh = household(3);
        for p in &mut hh.members {
            p.diary = Some(0);
        }
        let occ = derive_occupancy(&hh, &diaries).unwrap();
        assert_eq!(occ.counts, [3; 24]);
    }

    #[test]
    fn occupancy_excludes_sleep_hours() {
        // Asleep 0:00-7:59, home awake the rest of the day.
        let diaries = vec![diary(
            "d0",
            0.0,
            40.0,
            1.0,
            vec![seg(0, 480, Place::Sleep), seg(480, 1440, Place::Home)],
        )];
        let mut hh = household(1);
        hh.members[0].diary = Some(0);
        let occ = derive_occupancy(&hh, &diaries).unwrap();
        for t in 0..8 {
            assert_eq!(occ.counts[t], 0, "hour {t}");
        }
        for t in 8..24 {
            assert_eq!(occ.counts[t], 1, "hour {t}");
        }
    }

    #[test]
    fn occupancy_is_union_of_complementary_shifts() {
        // Day worker: away 9:00-17:00. Night worker: away 21:00-5:00, asleep 8:00-15:00.
        let day = vec![
            seg(0, 420, Place::Sleep),   // 0:00-7:00 asleep
            seg(420, 540, Place::Home),  // 7:00-9:00 home awake
            seg(540, 1020, Place::Work), // 9:00-17:00 work
            seg(1020, 1380, Place::Home), // 17:00-23:00 home awake
            seg(1380, 1440, Place::Sleep),
        ];
        let night = vec![
            seg(0, 300, Place::Work),    // 0:00-5:00 work
            seg(300, 480, Place::Home),  // 5:00-8:00 home awake
            seg(480, 900, Place::Sleep), // 8:00-15:00 asleep
            seg(900, 1260, Place::Home), // 15:00-21:00 home awake
            seg(1260, 1440, Place::Work),
        ];
        let diaries = vec![
            diary("day", 1.0, 34.0, 2.0, day),
            diary("night", 1.0, 34.0, 2.0, night),
        ];
        let mut hh = household(2);
        hh.members[0].diary = Some(0);
        hh.members[1].diary = Some(1);
        let occ = derive_occupancy(&hh, &diaries).unwrap();
        // Hand tabulation of the union above.
        let expect = [
            0, 0, 0, 0, 0, 1, 1, 2, // 0-7: night home-awake from 5, day awake at 7
            1, 0, 0, 0, 0, 0, 0, 1, // 8-15: day home till 9; night asleep till 15
            1, 2, 2, 2, 2, 1, 1, 0, // 16-23: both 17-20, day alone 21-22, day asleep at 23
        ];
        assert_eq!(occ.counts, expect);
    }

    #[test]
    fn missing_diary_is_error() {
        let hh = household(1);
        assert!(matches!(derive_occupancy(&hh, &[]), Err(EnrichError::DiaryMissing(_))));
    }
}
