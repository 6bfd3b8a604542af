//! Deterministic synthetic input generators: a population spread over three
//! climate zones, sinusoidal weather, clear-sky irradiance, and donor pools
//! with archetypal diaries and building stock. Used by the test suites and
//! benchmarks, and handy for demo runs.

use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::pipeline::{InputPaths, RunConfig};
use crate::types::ClimateZone;

/// (zone, county FIPS, state) triples the fixture population cycles over.
pub const FIXTURE_LOCATIONS: [(ClimateZone, &str, &str); 3] = [
    (ClimateZone::Cold, "17031", "IL"),
    (ClimateZone::MixedHumid, "51013", "VA"),
    (ClimateZone::HotHumid, "48201", "TX"),
];

/// The 15th of every month of `year`: one representative day per month.
pub fn monthly_dates(year: i32) -> Vec<NaiveDate> {
    (1..=12).map(|m| NaiveDate::from_ymd_opt(year, m, 15).unwrap()).collect()
}

/// Seasonal mean, seasonal swing, and diurnal swing of the fixture weather
/// for a zone, °F.
fn zone_temps(zone: ClimateZone) -> (f64, f64, f64) {
    match zone {
        ClimateZone::Cold => (48.0, 19.0, 7.0),
        ClimateZone::MixedHumid => (58.0, 17.0, 7.0),
        ClimateZone::HotHumid => (70.0, 14.0, 6.0),
        ClimateZone::HotDry => (68.0, 16.0, 10.0),
        ClimateZone::Marine => (53.0, 9.0, 6.0),
    }
}

fn season_phase(month: u32) -> f64 {
    ((month as f64 - 7.0) / 12.0 * std::f64::consts::TAU).cos()
}

/// Fixture outdoor temperature, °F: annual sinusoid peaking in July plus a
/// diurnal swing peaking at 15:00.
pub fn fixture_temp_f(zone: ClimateZone, month: u32, hour: usize) -> f64 {
    let (base, swing, diurnal) = zone_temps(zone);
    let hour_phase = ((hour as f64 - 15.0) / 24.0 * std::f64::consts::TAU).cos();
    base + swing * season_phase(month) + diurnal * hour_phase
}

/// Fixture global horizontal irradiance, W/m²: a daylight bell between
/// season-dependent sunrise and sunset.
pub fn fixture_ghi(month: u32, hour: usize) -> f64 {
    let daylight_half = 6.0 + 1.5 * season_phase(month); // hours either side of noon
    let sunrise = 12.0 - daylight_half;
    let sunset = 12.0 + daylight_half;
    let h = hour as f64 + 0.5;
    if h <= sunrise || h >= sunset {
        return 0.0;
    }
    let peak = 550.0 + 250.0 * season_phase(month);
    peak * (std::f64::consts::PI * (h - sunrise) / (sunset - sunrise)).sin()
}

struct DiaryArchetype {
    worker: u8,
    age: u32,
    segments: &'static str,
    activities: &'static str,
}

const DIARY_ARCHETYPES: [DiaryArchetype; 6] = [
    // Full-time day worker.
    DiaryArchetype {
        worker: 1,
        age: 38,
        segments: "0-420:sleep|420-510:home|510-1050:work|1050-1380:home|1380-1440:sleep",
        activities: "cook:2|tv:1|computer:1|dwasher:1|cwasher:1|cleaning:1",
    },
    // Part-time worker with errands.
    DiaryArchetype {
        worker: 1,
        age: 45,
        segments: "0-450:sleep|450-600:home|600-900:work|900-960:shop|960-1320:home|1320-1440:sleep",
        activities: "cook:2|tv:1|cleaning:1|dwasher:1|cwasher:1",
    },
    // Homemaker.
    DiaryArchetype {
        worker: 0,
        age: 41,
        segments: "0-420:sleep|420-780:home|780-840:shop|840-1350:home|1350-1440:sleep",
        activities: "cook:2|dwasher:1|cwasher:1|tv:2|cleaning:1|computer:1",
    },
    // Retiree.
    DiaryArchetype {
        worker: 0,
        age: 71,
        segments: "0-480:sleep|480-840:home|840-900:other|900-1320:home|1320-1440:sleep",
        activities: "cook:2|tv:2|dwasher:1|cleaning:1",
    },
    // Student.
    DiaryArchetype {
        worker: 0,
        age: 15,
        segments: "0-450:sleep|450-480:home|480-930:school|930-1380:home|1380-1440:sleep",
        activities: "tv:1|computer:2",
    },
    // Night-shift worker.
    DiaryArchetype {
        worker: 1,
        age: 33,
        segments: "0-360:work|360-480:home|480-900:sleep|900-1320:home|1320-1440:work",
        activities: "cook:1|tv:1|cwasher:1|computer:1",
    },
];

/// Paths of one generated fixture input set.
#[derive(Debug, Clone)]
pub struct FixturePaths {
    pub population: PathBuf,
    pub weather: PathBuf,
    pub irradiance: PathBuf,
    pub diaries: PathBuf,
    pub buildings: PathBuf,
}

impl FixturePaths {
    pub fn input_paths(&self) -> InputPaths {
        InputPaths {
            population: self.population.clone(),
            weather: self.weather.clone(),
            irradiance: self.irradiance.clone(),
            diaries: self.diaries.clone(),
            buildings: self.buildings.clone(),
            inlet_temps: None,
        }
    }
}

fn write_file(path: &Path, contents: &str) -> std::io::Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    file.write_all(contents.as_bytes())?;
    file.flush()
}

/// Writes a complete input set under `dir`:`households` households cycled
/// across the three fixture locations, weather/irradiance for `dates`, and
/// donor pools. Deterministic in `seed`.
pub fn write_fixture_inputs(
    dir: &Path,
    households: usize,
    dates: &[NaiveDate],
    seed: u64,
) -> std::io::Result<FixturePaths> {
    std::fs::create_dir_all(dir)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Population: sizes weighted toward 1-2 person households.
    let mut population = String::from("hid,county_fips,state,zone,size,income,ages\n");
    for i in 0..households {
        let (zone, fips, state) = FIXTURE_LOCATIONS[i % FIXTURE_LOCATIONS.len()];
        let size = match rng.random::<f64>() {
            u if u < 0.26 => 1,
            u if u < 0.60 => 2,
            u if u < 0.76 => 3,
            u if u < 0.91 => 4,
            _ => 5,
        };
        let mut ages: Vec<String> = vec![rng.random_range(23..72).to_string()];
        for k in 1..size {
            let age = if k == 1 {
                rng.random_range(23..72)
            } else {
                rng.random_range(5..18)
            };
            ages.push(age.to_string());
        }
        let income = (rng.random::<f64>().powi(2) * 130_000.0 + 22_000.0).round();
        population.push_str(&format!(
            "h{i:05},{fips},{state},{zone},{size},{income},{}\n",
            ages.join("|")
        ));
    }

    // Weather and irradiance for every (county, date).
    let hour_header: String = (0..24).map(|h| format!(",h{h}")).collect();
    let mut weather = format!("location,date{hour_header}\n");
    let mut irradiance = format!("location,date{hour_header}\n");
    for (zone, fips, _) in FIXTURE_LOCATIONS {
        for date in dates {
            use chrono::Datelike;
            let month = date.month();
            weather.push_str(&format!("{fips},{date}"));
            irradiance.push_str(&format!("{fips},{date}"));
            for hour in 0..24 {
                weather.push_str(&format!(",{:.2}", fixture_temp_f(zone, month, hour)));
                irradiance.push_str(&format!(",{:.1}", fixture_ghi(month, hour)));
            }
            weather.push('\n');
            irradiance.push('\n');
        }
    }

    // Diary donors: archetypes replicated with jittered features so every
    // stratum of the default match spec has donors.
    let mut diaries = String::from("diary_id,worker,age,hsize,segments,activities\n");
    let mut diary_id = 0;
    for replica in 0..6u32 {
        for archetype in &DIARY_ARCHETYPES {
            for hsize in [1u32, 2, 4] {
                let age = archetype.age.saturating_add(replica % 3) + (replica / 3) * 11;
                diaries.push_str(&format!(
                    "d{diary_id:03},{},{},{},{},{}\n",
                    archetype.worker, age, hsize, archetype.segments, archetype.activities
                ));
                diary_id += 1;
            }
        }
    }

    // Building donors: floor area scales with household size band.
    let mut buildings = String::from(
        "building_id,hsize,income,floor_area,stories,has_dishwasher,has_laundry,has_ac,\
         water_heater_fuel,n_incandescent,n_cfl,n_led\n",
    );
    for b in 0..36 {
        let hsize = (b % 5) + 1;
        let income = 25_000.0 + (b % 9) as f64 * 15_000.0;
        let floor = 680.0
            + hsize as f64 * 290.0
            + (rng.random::<f64>() * 320.0).round();
        let stories = if floor > 1900.0 { 2 } else { 1 };
        let has_dishwasher = u8::from(rng.random::<f64>() < 0.80);
        let has_laundry = u8::from(rng.random::<f64>() < 0.90);
        let has_ac = u8::from(rng.random::<f64>() < 0.94);
        let fuel = if rng.random::<f64>() < 0.94 { "electricity" } else { "gas" };
        let n_inc = rng.random_range(7..14) + hsize;
        let n_cfl = rng.random_range(4..10);
        let n_led = rng.random_range(3..8);
        buildings.push_str(&format!(
            "b{b:03},{hsize},{income},{floor},{stories},{has_dishwasher},{has_laundry},\
             {has_ac},{fuel},{n_inc},{n_cfl},{n_led}\n"
        ));
    }

    let paths = FixturePaths {
        population: dir.join("population.csv"),
        weather: dir.join("weather.csv"),
        irradiance: dir.join("irradiance.csv"),
        diaries: dir.join("diaries.csv"),
        buildings: dir.join("buildings.csv"),
    };
    write_file(&paths.population, &population)?;
    write_file(&paths.weather, &weather)?;
    write_file(&paths.irradiance, &irradiance)?;
    write_file(&paths.diaries, &diaries)?;
    write_file(&paths.buildings, &buildings)?;
    Ok(paths)
}

/// Writes fixture inputs and returns a ready run config rooted at `dir`
/// (records land under `dir/records`).
pub fn fixture_run_config(
    dir: &Path,
    households: usize,
    dates: Vec<NaiveDate>,
    seed: u64,
) -> std::io::Result<RunConfig> {
    let paths = write_fixture_inputs(dir, households, &dates, seed)?;
    Ok(RunConfig {
        seed: Some(seed),
        dates,
        inputs: paths.input_paths(),
        output_root: dir.join("records"),
        worker_count: 1,
        enrichment: Default::default(),
        thermal: Default::default(),
        lighting: Default::default(),
        activities: Default::default(),
        refrigerator: Default::default(),
    })
}
