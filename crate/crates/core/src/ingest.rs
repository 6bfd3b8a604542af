//! Parsing and validation for the external CSV inputs: population, weather,
//! irradiance, donor pools, and the inlet-water-temperature table.
//!
//! All inputs are UTF-8 comma-separated files with a header row and `.` as
//! the decimal separator. Weather and irradiance are keyed by county FIPS
//! and must be pre-aligned to household local time.

use std::collections::BTreeMap;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::types::{ClimateZone, Household, Person};

/// Sanity band for hourly temperatures, °F.
pub const TEMP_BAND_F: (f64, f64) = (-60.0, 135.0);
/// Sanity band for inlet water temperatures, °F.
pub const INLET_BAND_F: (f64, f64) = (33.0, 90.0);

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("{path}: missing column `{column}`")]
    MissingColumn { path: String, column: String },
    #[error("{path} row {row}: bad FIPS `{fips}` (expected 5 digits)")]
    BadFips { path: String, row: usize, fips: String },
    #[error("{path} row {row}: household `{hid}` has size 0")]
    EmptyHousehold { path: String, row: usize, hid: String },
    #[error("{path} row {row}: duplicate key ({location}, {date})")]
    DuplicateKey { path: String, row: usize, location: String, date: NaiveDate },
    #[error("{path} row {row}: expected 24 hourly values, found {found}")]
    Not24Hours { path: String, row: usize, found: usize },
    #[error("{path} row {row}: value {value} outside band [{lo}, {hi}]")]
    OutOfBand { path: String, row: usize, value: f64, lo: f64, hi: f64 },
    #[error("{path} row {row}: {message}")]
    BadField { path: String, row: usize, message: String },
    #[error("{path}: inlet table incomplete, missing (month {month}, {zone})")]
    IncompleteInletTable { path: String, month: u32, zone: ClimateZone },
    #[error("{path}: donor pool is empty")]
    EmptyPool { path: String },
    #[error("{path} row {row}: diary segments do not tile 24 hours")]
    SegmentsDoNotTile { path: String, row: usize },
    #[error("csv error in {path}: {source}")]
    Csv { path: String, source: csv::Error },
    #[error("io error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

fn csv_err(path: &Path, source: csv::Error) -> IngestError {
    IngestError::Csv { path: path.display().to_string(), source }
}

fn open_reader(path: &Path) -> Result<csv::Reader<std::fs::File>, IngestError> {
    let file = std::fs::File::open(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(csv::ReaderBuilder::new().has_headers(true).from_reader(file))
}

fn header_index(
    path: &Path,
    headers: &csv::StringRecord,
    column: &str,
) -> Result<usize, IngestError> {
    headers
        .iter()
        .position(|h| h == column)
        .ok_or_else(|| IngestError::MissingColumn {
            path: path.display().to_string(),
            column: column.to_string(),
        })
}

fn parse_field<T: std::str::FromStr>(
    path: &Path,
    row: usize,
    name: &str,
    raw: &str,
) -> Result<T, IngestError> {
    raw.parse().map_err(|_| IngestError::BadField {
        path: path.display().to_string(),
        row,
        message: format!("cannot parse `{raw}` as {name}"),
    })
}

/// 24-hour outdoor temperature series for one location and date, °F.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeatherDay {
    pub location_key: String,
    pub date: NaiveDate,
    pub temp_f: [f64; 24],
}

/// 24-hour global horizontal irradiance series, W/m².
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrradianceDay {
    pub location_key: String,
    pub date: NaiveDate,
    pub ghi: [f64; 24],
}

/// Mains (inlet) water temperature by month and climate zone, °F.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InletTempTable {
    cells: BTreeMap<(u32, ClimateZone), f64>,
}

impl InletTempTable {
    /// Builds a table, checking all 60 (month, zone) cells are present and
    /// inside the sanity band.
    pub fn new(cells: BTreeMap<(u32, ClimateZone), f64>) -> Result<Self, String> {
        for month in 1..=12 {
            for zone in ClimateZone::ALL {
                match cells.get(&(month, zone)) {
                    None => return Err(format!("missing cell (month {month}, {zone})")),
                    Some(&t) if !(INLET_BAND_F.0..=INLET_BAND_F.1).contains(&t) => {
                        return Err(format!(
                            "cell (month {month}, {zone}) = {t} outside [{}, {}]",
                            INLET_BAND_F.0, INLET_BAND_F.1
                        ))
                    }
                    Some(_) => {}
                }
            }
        }
        Ok(InletTempTable { cells })
    }

    /// Built-in default: a smooth seasonal cycle per zone. The values are
    /// illustrative placeholders; override with a CSV for real studies.
    pub fn default_table() -> Self {
        let mut cells = BTreeMap::new();
        for zone in ClimateZone::ALL {
            // (annual mean, seasonal swing), °F
            let (mean, swing) = match zone {
                ClimateZone::Marine => (55.0, 8.0),
                ClimateZone::HotDry => (67.0, 10.0),
                ClimateZone::HotHumid => (72.0, 9.0),
                ClimateZone::MixedHumid => (60.0, 12.0),
                ClimateZone::Cold => (47.0, 12.0),
            };
            for month in 1..=12u32 {
                // Coldest mains water in February, warmest in August.
                let phase = (month as f64 - 2.0) / 12.0 * std::f64::consts::TAU;
                let t = mean - swing * phase.cos();
                cells.insert((month, zone), (t * 10.0).round() / 10.0);
            }
        }
        InletTempTable::new(cells).expect("default table is complete")
    }

    pub fn get(&self, month: u32, zone: ClimateZone) -> f64 {
        lookup_inlet_temp(self, month, zone)
    }
}

/// Exact cell lookup; completeness is enforced at construction.
pub fn lookup_inlet_temp(table: &InletTempTable, month: u32, zone: ClimateZone) -> f64 {
    table.cells[&(month, zone)]
}

/// Where a diary segment places the person, and whether they are awake.
/// Sleep is only modeled at home; time away from home is always `awake`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Place {
    Sleep,
    Home,
    Work,
    School,
    Shop,
    Other,
}

impl Place {
    pub fn at_home_awake(self) -> bool {
        self == Place::Home
    }

    fn parse(s: &str) -> Option<Place> {
        Some(match s {
            "sleep" => Place::Sleep,
            "home" => Place::Home,
            "work" => Place::Work,
            "school" => Place::School,
            "shop" => Place::Shop,
            "other" => Place::Other,
            _ => return None,
        })
    }
}

/// One contiguous span of a diary, minutes since midnight, end exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiarySegment {
    pub start_min: u32,
    pub end_min: u32,
    pub place: Place,
}

/// Activities a diary indicates for the day, used by the activity scheduler.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activity {
    Dwasher,
    Cwasher,
    Cook,
    Tv,
    Computer,
    Cleaning,
}

impl Activity {
    pub const ALL: [Activity; 6] = [
        Activity::Dwasher,
        Activity::Cwasher,
        Activity::Cook,
        Activity::Tv,
        Activity::Computer,
        Activity::Cleaning,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Activity::Dwasher => "dwasher",
            Activity::Cwasher => "cwasher",
            Activity::Cook => "cook",
            Activity::Tv => "tv",
            Activity::Computer => "computer",
            Activity::Cleaning => "cleaning",
        }
    }

    fn parse(s: &str) -> Option<Activity> {
        Activity::ALL.iter().copied().find(|a| a.as_str() == s)
    }
}

/// A time-use diary donor: 24 hours of minute segments, daily activity
/// indicators, and the numeric features the matcher strata are built on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiaryRecord {
    pub id: String,
    pub features: BTreeMap<String, f64>,
    pub segments: Vec<DiarySegment>,
    pub activities: Vec<(Activity, u32)>,
}

impl DiaryRecord {
    /// True if >= 30 of the hour's 60 minutes are at home and awake.
    pub fn home_awake_hour(&self, hour: usize) -> bool {
        self.minutes_home_awake(hour) >= 30
    }

    pub fn minutes_home_awake(&self, hour: usize) -> u32 {
        let (lo, hi) = (hour as u32 * 60, hour as u32 * 60 + 60);
        self.segments
            .iter()
            .filter(|s| s.place.at_home_awake())
            .map(|s| s.end_min.min(hi).saturating_sub(s.start_min.max(lo)))
            .sum()
    }

    pub fn activity_count(&self, activity: Activity) -> u32 {
        self.activities
            .iter()
            .find(|(a, _)| *a == activity)
            .map(|(_, n)| *n)
            .unwrap_or(0)
    }
}

/// A building-attribute donor with its matching features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildingRecord {
    pub id: String,
    pub features: BTreeMap<String, f64>,
    pub floor_area: f64,
    pub stories: u32,
    pub has_dishwasher: bool,
    pub has_laundry: bool,
    pub has_ac: bool,
    /// Water heater fuel; only `electricity` yields h2o energy output.
    pub water_heater_fuel: String,
    /// Installed bulb counts by kind: (incandescent, cfl, led).
    pub bulb_counts: (u32, u32, u32),
}

impl BuildingRecord {
    pub fn has_electric_water_heater(&self) -> bool {
        self.water_heater_fuel == "electricity"
    }
}

/// The two donor pools consumed by enrichment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DonorPool {
    pub diaries: Vec<DiaryRecord>,
    pub buildings: Vec<BuildingRecord>,
}

/// Parses the population CSV: header `hid,county_fips,state,zone,size,income,ages`
/// with ages `|`-separated. Members get ids `<hid>-p<k>`; the worker flag is
/// derived as age in [18, 65) since the population format does not carry it.
pub fn load_population(path: &Path) -> Result<Vec<Household>, IngestError> {
    let mut reader = open_reader(path)?;
    let headers = reader.headers().map_err(|e| csv_err(path, e))?.clone();
    let idx: Vec<usize> = ["hid", "county_fips", "state", "zone", "size", "income", "ages"]
        .iter()
        .map(|c| header_index(path, &headers, c))
        .collect::<Result<_, _>>()?;

    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 2; // 1-based, after header
        let record = record.map_err(|e| csv_err(path, e))?;
        let field = |j: usize| record.get(idx[j]).unwrap_or("").trim();

        let hid = field(0).to_string();
        let fips = field(1).to_string();
        if fips.len() != 5 || !fips.bytes().all(|b| b.is_ascii_digit()) {
            return Err(IngestError::BadFips { path: path.display().to_string(), row, fips });
        }
        let state = field(2).to_string();
        let zone: ClimateZone = parse_field(path, row, "climate zone", field(3))?;
        let size: usize = parse_field(path, row, "size", field(4))?;
        if size == 0 {
            return Err(IngestError::EmptyHousehold {
                path: path.display().to_string(),
                row,
                hid,
            });
        }
        let income: f64 = parse_field(path, row, "income", field(5))?;
        let ages: Vec<u32> = field(6)
            .split('|')
            .map(|a| parse_field(path, row, "age", a))
            .collect::<Result<_, _>>()?;
        if ages.len() != size {
            return Err(IngestError::BadField {
                path: path.display().to_string(),
                row,
                message: format!("size {} does not match {} ages", size, ages.len()),
            });
        }
        let members = ages
            .iter()
            .enumerate()
            .map(|(k, &age)| Person {
                id: format!("{hid}-p{k}"),
                age,
                worker: (18..65).contains(&age),
                diary: None,
            })
            .collect();
        out.push(Household {
            hid,
            county_fips: fips,
            state,
            zone,
            members,
            dwelling: None,
            income,
        });
    }
    Ok(out)
}

type HourlySeriesMap = BTreeMap<(String, NaiveDate), (String, NaiveDate, [f64; 24])>;

fn load_hourly_series(
    path: &Path,
    band: Option<(f64, f64)>,
) -> Result<HourlySeriesMap, IngestError> {
    let mut reader = open_reader(path)?;
    let headers = reader.headers().map_err(|e| csv_err(path, e))?.clone();
    let loc_i = header_index(path, &headers, "location")?;
    let date_i = header_index(path, &headers, "date")?;
    let hour_i: Vec<usize> = (0..24)
        .map(|h| header_index(path, &headers, &format!("h{h}")))
        .collect::<Result<_, _>>()?;

    let mut out = BTreeMap::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 2;
        let record = record.map_err(|e| csv_err(path, e))?;
        let location = record.get(loc_i).unwrap_or("").trim().to_string();
        let date: NaiveDate =
            parse_field(path, row, "date (YYYY-MM-DD)", record.get(date_i).unwrap_or(""))?;
        let mut values = [0.0; 24];
        for (t, &col) in hour_i.iter().enumerate() {
            let raw = record.get(col).unwrap_or("").trim();
            if raw.is_empty() {
                return Err(IngestError::Not24Hours {
                    path: path.display().to_string(),
                    row,
                    found: t,
                });
            }
            let v: f64 = parse_field(path, row, "hourly value", raw)?;
            if let Some((lo, hi)) = band {
                if !(lo..=hi).contains(&v) {
                    return Err(IngestError::OutOfBand {
                        path: path.display().to_string(),
                        row,
                        value: v,
                        lo,
                        hi,
                    });
                }
            }
            values[t] = v;
        }
        let key = (location.clone(), date);
        if out.insert(key, (location.clone(), date, values)).is_some() {
            return Err(IngestError::DuplicateKey {
                path: path.display().to_string(),
                row,
                location,
                date,
            });
        }
    }
    Ok(out)
}

/// Loads the weather CSV (`location,date,h0..h23`, °F) into a keyed map.
pub fn load_weather(
    path: &Path,
) -> Result<BTreeMap<(String, NaiveDate), WeatherDay>, IngestError> {
    Ok(load_hourly_series(path, Some(TEMP_BAND_F))?
        .into_iter()
        .map(|(k, (location_key, date, temp_f))| (k, WeatherDay { location_key, date, temp_f }))
        .collect())
}

/// Loads the irradiance CSV (`location,date,h0..h23`, W/m² >= 0).
pub fn load_irradiance(
    path: &Path,
) -> Result<BTreeMap<(String, NaiveDate), IrradianceDay>, IngestError> {
    Ok(load_hourly_series(path, Some((0.0, f64::INFINITY)))?
        .into_iter()
        .map(|(k, (location_key, date, ghi))| (k, IrradianceDay { location_key, date, ghi }))
        .collect())
}

/// Loads the inlet table CSV (`month,zone,temp_f`) and checks all 60 cells.
pub fn load_inlet_table(path: &Path) -> Result<InletTempTable, IngestError> {
    let mut reader = open_reader(path)?;
    let headers = reader.headers().map_err(|e| csv_err(path, e))?.clone();
    let month_i = header_index(path, &headers, "month")?;
    let zone_i = header_index(path, &headers, "zone")?;
    let temp_i = header_index(path, &headers, "temp_f")?;

    let mut cells = BTreeMap::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 2;
        let record = record.map_err(|e| csv_err(path, e))?;
        let month: u32 = parse_field(path, row, "month", record.get(month_i).unwrap_or(""))?;
        let zone: ClimateZone =
            parse_field(path, row, "climate zone", record.get(zone_i).unwrap_or(""))?;
        let temp: f64 = parse_field(path, row, "temp_f", record.get(temp_i).unwrap_or(""))?;
        if !(INLET_BAND_F.0..=INLET_BAND_F.1).contains(&temp) {
            return Err(IngestError::OutOfBand {
                path: path.display().to_string(),
                row,
                value: temp,
                lo: INLET_BAND_F.0,
                hi: INLET_BAND_F.1,
            });
        }
        cells.insert((month, zone), temp);
    }
    for month in 1..=12 {
        for zone in ClimateZone::ALL {
            if !cells.contains_key(&(month, zone)) {
                return Err(IngestError::IncompleteInletTable {
                    path: path.display().to_string(),
                    month,
                    zone,
                });
            }
        }
    }
    Ok(InletTempTable { cells })
}

fn parse_segments(path: &Path, row: usize, raw: &str) -> Result<Vec<DiarySegment>, IngestError> {
    let bad = |message: String| IngestError::BadField {
        path: path.display().to_string(),
        row,
        message,
    };
    let mut segments = Vec::new();
    for part in raw.split('|') {
        let (span, place) = part
            .split_once(':')
            .ok_or_else(|| bad(format!("segment `{part}` missing `:`")))?;
        let (start, end) = span
            .split_once('-')
            .ok_or_else(|| bad(format!("segment span `{span}` missing `-`")))?;
        let start_min: u32 = start.parse().map_err(|_| bad(format!("bad minute `{start}`")))?;
        let end_min: u32 = end.parse().map_err(|_| bad(format!("bad minute `{end}`")))?;
        let place = Place::parse(place).ok_or_else(|| bad(format!("unknown place `{place}`")))?;
        segments.push(DiarySegment { start_min, end_min, place });
    }
    // Segments must tile [0, 1440) exactly, in order.
    let mut cursor = 0;
    for s in &segments {
        if s.start_min != cursor || s.end_min <= s.start_min {
            return Err(IngestError::SegmentsDoNotTile {
                path: path.display().to_string(),
                row,
            });
        }
        cursor = s.end_min;
    }
    if cursor != 24 * 60 {
        return Err(IngestError::SegmentsDoNotTile { path: path.display().to_string(), row });
    }
    Ok(segments)
}

fn parse_activities(
    path: &Path,
    row: usize,
    raw: &str,
) -> Result<Vec<(Activity, u32)>, IngestError> {
    let bad = |message: String| IngestError::BadField {
        path: path.display().to_string(),
        row,
        message,
    };
    let mut out = Vec::new();
    if raw.is_empty() {
        return Ok(out);
    }
    for part in raw.split('|') {
        let (name, count) = part
            .split_once(':')
            .ok_or_else(|| bad(format!("activity `{part}` missing `:`")))?;
        let activity =
            Activity::parse(name).ok_or_else(|| bad(format!("unknown activity `{name}`")))?;
        let count: u32 = count.parse().map_err(|_| bad(format!("bad count `{count}`")))?;
        out.push((activity, count));
    }
    Ok(out)
}

/// Loads the diary donor CSV: `diary_id,worker,age,hsize,segments,activities`.
/// Segments are `start-end:place` spans (minutes) tiling 24 hours; activities
/// are `name:count` daily indicators. Both lists are `|`-separated.
pub fn load_diaries(path: &Path) -> Result<Vec<DiaryRecord>, IngestError> {
    let mut reader = open_reader(path)?;
    let headers = reader.headers().map_err(|e| csv_err(path, e))?.clone();
    let id_i = header_index(path, &headers, "diary_id")?;
    let seg_i = header_index(path, &headers, "segments")?;
    let act_i = header_index(path, &headers, "activities")?;
    let feature_cols: Vec<(String, usize)> = headers
        .iter()
        .enumerate()
        .filter(|(i, h)| *i != id_i && *i != seg_i && *i != act_i && !h.is_empty())
        .map(|(i, h)| (h.to_string(), i))
        .collect();

    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 2;
        let record = record.map_err(|e| csv_err(path, e))?;
        let mut features = BTreeMap::new();
        for (name, col) in &feature_cols {
            let v: f64 = parse_field(path, row, name, record.get(*col).unwrap_or(""))?;
            features.insert(name.clone(), v);
        }
        out.push(DiaryRecord {
            id: record.get(id_i).unwrap_or("").trim().to_string(),
            features,
            segments: parse_segments(path, row, record.get(seg_i).unwrap_or("").trim())?,
            activities: parse_activities(path, row, record.get(act_i).unwrap_or("").trim())?,
        });
    }
    if out.is_empty() {
        return Err(IngestError::EmptyPool { path: path.display().to_string() });
    }
    Ok(out)
}

/// Loads the building donor CSV: `building_id,hsize,income,floor_area,stories,
/// has_dishwasher,has_laundry,has_ac,water_heater_fuel,n_incandescent,n_cfl,n_led`.
pub fn load_buildings(path: &Path) -> Result<Vec<BuildingRecord>, IngestError> {
    let mut reader = open_reader(path)?;
    let headers = reader.headers().map_err(|e| csv_err(path, e))?.clone();
    let col = |name: &str| header_index(path, &headers, name);
    let id_i = col("building_id")?;
    let hsize_i = col("hsize")?;
    let income_i = col("income")?;
    let floor_i = col("floor_area")?;
    let stories_i = col("stories")?;
    let dw_i = col("has_dishwasher")?;
    let laundry_i = col("has_laundry")?;
    let ac_i = col("has_ac")?;
    let fuel_i = col("water_heater_fuel")?;
    let inc_i = col("n_incandescent")?;
    let cfl_i = col("n_cfl")?;
    let led_i = col("n_led")?;

    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 2;
        let record = record.map_err(|e| csv_err(path, e))?;
        let get = |j: usize| record.get(j).unwrap_or("").trim();
        let flag = |j: usize| -> Result<bool, IngestError> {
            Ok(parse_field::<u8>(path, row, "flag (0/1)", get(j))? != 0)
        };
        let hsize: f64 = parse_field(path, row, "hsize", get(hsize_i))?;
        let income: f64 = parse_field(path, row, "income", get(income_i))?;
        let mut features = BTreeMap::new();
        features.insert("hsize".to_string(), hsize);
        features.insert("income".to_string(), income);
        out.push(BuildingRecord {
            id: get(id_i).to_string(),
            features,
            floor_area: parse_field(path, row, "floor_area", get(floor_i))?,
            stories: parse_field(path, row, "stories", get(stories_i))?,
            has_dishwasher: flag(dw_i)?,
            has_laundry: flag(laundry_i)?,
            has_ac: flag(ac_i)?,
            water_heater_fuel: get(fuel_i).to_string(),
            bulb_counts: (
                parse_field(path, row, "n_incandescent", get(inc_i))?,
                parse_field(path, row, "n_cfl", get(cfl_i))?,
                parse_field(path, row, "n_led", get(led_i))?,
            ),
        });
    }
    if out.is_empty() {
        return Err(IngestError::EmptyPool { path: path.display().to_string() });
    }
    Ok(out)
}
