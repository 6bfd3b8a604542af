//! Domain types shared by every model: households, dwellings, end-uses,
//! hourly profiles, and the aggregation identities over them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Hours in a simulated day. Hour index `t` runs 0..23 starting at midnight;
/// the published record format maps these to columns `h1..h24` at write time.
pub const HOURS: usize = 24;

/// The five U.S. building-climate regions the models are parameterized over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ClimateZone {
    Marine,
    HotDry,
    HotHumid,
    MixedHumid,
    Cold,
}

impl ClimateZone {
    pub const ALL: [ClimateZone; 5] = [
        ClimateZone::Marine,
        ClimateZone::HotDry,
        ClimateZone::HotHumid,
        ClimateZone::MixedHumid,
        ClimateZone::Cold,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ClimateZone::Marine => "Marine",
            ClimateZone::HotDry => "HotDry",
            ClimateZone::HotHumid => "HotHumid",
            ClimateZone::MixedHumid => "MixedHumid",
            ClimateZone::Cold => "Cold",
        }
    }
}

impl fmt::Display for ClimateZone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClimateZone {
    type Err = ParseZoneError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "Marine" => Ok(ClimateZone::Marine),
            "HotDry" => Ok(ClimateZone::HotDry),
            "HotHumid" => Ok(ClimateZone::HotHumid),
            "MixedHumid" => Ok(ClimateZone::MixedHumid),
            "Cold" => Ok(ClimateZone::Cold),
            other => Err(ParseZoneError(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, thiserror::Error)]
#[error("unknown climate zone `{0}` (expected Marine|HotDry|HotHumid|MixedHumid|Cold)")]
pub struct ParseZoneError(pub String);

/// The eleven simulated sub-uses. The published record rolls these up to
/// eight columns (see [`PublishedUse`]): laundry = cwasher + cdryer and
/// misc = tv + computer + cleaning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EndUse {
    Hvac,
    H2o,
    Light,
    Refr,
    Dwasher,
    Cook,
    Cwasher,
    Cdryer,
    Tv,
    Computer,
    Cleaning,
}

impl EndUse {
    /// Enum order fixes floating-point summation order everywhere a total
    /// over sub-uses is formed.
    pub const ALL: [EndUse; 11] = [
        EndUse::Hvac,
        EndUse::H2o,
        EndUse::Light,
        EndUse::Refr,
        EndUse::Dwasher,
        EndUse::Cook,
        EndUse::Cwasher,
        EndUse::Cdryer,
        EndUse::Tv,
        EndUse::Computer,
        EndUse::Cleaning,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EndUse::Hvac => "hvac",
            EndUse::H2o => "h2o",
            EndUse::Light => "light",
            EndUse::Refr => "refr",
            EndUse::Dwasher => "dwasher",
            EndUse::Cook => "cook",
            EndUse::Cwasher => "cwasher",
            EndUse::Cdryer => "cdryer",
            EndUse::Tv => "tv",
            EndUse::Computer => "computer",
            EndUse::Cleaning => "cleaning",
        }
    }
}

impl fmt::Display for EndUse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The eight end-use columns of the published record format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PublishedUse {
    Hvac,
    H2o,
    Light,
    Refr,
    Dwasher,
    Cook,
    Laundry,
    Misc,
}

impl PublishedUse {
    pub const ALL: [PublishedUse; 8] = [
        PublishedUse::Hvac,
        PublishedUse::H2o,
        PublishedUse::Light,
        PublishedUse::Refr,
        PublishedUse::Dwasher,
        PublishedUse::Cook,
        PublishedUse::Laundry,
        PublishedUse::Misc,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PublishedUse::Hvac => "hvac",
            PublishedUse::H2o => "h2o",
            PublishedUse::Light => "light",
            PublishedUse::Refr => "refr",
            PublishedUse::Dwasher => "dwasher",
            PublishedUse::Cook => "cook",
            PublishedUse::Laundry => "laundry",
            PublishedUse::Misc => "misc",
        }
    }
}

impl fmt::Display for PublishedUse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PublishedUse {
    type Err = ParseUseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PublishedUse::ALL
            .iter()
            .copied()
            .find(|u| u.as_str() == s)
            .ok_or_else(|| ParseUseError(s.to_string()))
    }
}

#[derive(Debug, Clone, thiserror::Error)]
#[error("unknown end-use `{0}` (expected hvac|h2o|light|refr|dwasher|cook|laundry|misc)")]
pub struct ParseUseError(pub String);

/// Bulb technologies tracked by the lighting model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BulbKind {
    Incandescent,
    Cfl,
    Led,
}

/// One installed lighting unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LightingUnit {
    pub kind: BulbKind,
    pub watts: f64,
}

/// A member of a synthetic household. `diary` indexes into the diary donor
/// pool and is absent until enrichment assigns one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Person {
    pub id: String,
    pub age: u32,
    pub worker: bool,
    pub diary: Option<usize>,
}

/// Physical and appliance attributes of a dwelling, realized at enrichment
/// from a matched building donor record plus per-zone parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dwelling {
    /// Conditioned floor area, ft².
    pub floor_area: f64,
    /// Exterior wall area, ft², extrapolated from floor area.
    pub wall_area: f64,
    pub stories: u32,
    /// Roof insulation, ft²·°F·h/BTU.
    pub r_roof: f64,
    /// Wall insulation, ft²·°F·h/BTU.
    pub r_wall: f64,
    /// Cooling equipment efficiency, dimensionless in (0, 1].
    pub hvac_efficiency: f64,
    /// Heating equipment efficiency, dimensionless in (0, 1].
    pub heater_efficiency: f64,
    /// Thermostat heating setpoint, °F.
    pub setpoint_heat: f64,
    /// Thermostat cooling setpoint, °F.
    pub setpoint_cool: f64,
    pub has_dishwasher: bool,
    pub has_laundry: bool,
    pub has_ac: bool,
    pub has_electric_water_heater: bool,
    /// Water-heater efficiency, drawn once per household at enrichment.
    pub water_heater_eta: f64,
    pub lighting_units: Vec<LightingUnit>,
}

/// A synthetic household: the unit of simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Household {
    pub hid: String,
    /// 5-digit county FIPS code; also the weather/irradiance location key.
    pub county_fips: String,
    /// 2-letter state code.
    pub state: String,
    pub zone: ClimateZone,
    pub members: Vec<Person>,
    /// Unset until enrichment realizes it from a matched building record.
    pub dwelling: Option<Dwelling>,
    /// Annual income, USD.
    pub income: f64,
}

impl Household {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

/// 24 hourly kWh values for one end-use of one household-day.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndUseProfile {
    pub kwh: [f64; HOURS],
}

impl EndUseProfile {
    pub fn zero() -> Self {
        EndUseProfile { kwh: [0.0; HOURS] }
    }

    pub fn total(&self) -> f64 {
        self.kwh.iter().sum()
    }

    pub fn add_assign(&mut self, other: &EndUseProfile) {
        for t in 0..HOURS {
            self.kwh[t] += other.kwh[t];
        }
    }
}

impl Default for EndUseProfile {
    fn default() -> Self {
        Self::zero()
    }
}

/// Profiles for all eleven sub-uses, always fully populated (zero profiles
/// for inactive uses) and iterated in [`EndUse::ALL`] order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndUseMap {
    profiles: [EndUseProfile; 11],
}

impl EndUseMap {
    pub fn zero() -> Self {
        EndUseMap {
            profiles: [EndUseProfile::zero(); 11],
        }
    }

    pub fn get(&self, use_: EndUse) -> &EndUseProfile {
        &self.profiles[use_.index()]
    }

    pub fn get_mut(&mut self, use_: EndUse) -> &mut EndUseProfile {
        &mut self.profiles[use_.index()]
    }

    pub fn set(&mut self, use_: EndUse, profile: EndUseProfile) {
        self.profiles[use_.index()] = profile;
    }

    pub fn iter(&self) -> impl Iterator<Item = (EndUse, &EndUseProfile)> {
        EndUse::ALL.iter().map(move |&u| (u, self.get(u)))
    }
}

impl Default for EndUseMap {
    fn default() -> Self {
        Self::zero()
    }
}

/// Simulation output for one household on one date.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HouseholdDayResult {
    pub hid: String,
    pub date: chrono::NaiveDate,
    pub profiles: EndUseMap,
    /// Hot water drawn per hour, gallons. Nonzero even for households whose
    /// water heater is not electric (those emit a zero h2o energy profile).
    pub gallons_hot_water: [f64; HOURS],
}

/// Hourwise sum of all eleven sub-uses, summed in [`EndUse::ALL`] order so
/// the aggregation identities are bit-reproducible.
pub fn aggregate_total(result: &HouseholdDayResult) -> EndUseProfile {
    let mut total = EndUseProfile::zero();
    for use_ in EndUse::ALL {
        total.add_assign(result.profiles.get(use_));
    }
    total
}

/// Rolls the eleven sub-uses up to the eight published end-uses:
/// laundry = cwasher + cdryer, misc = tv + computer + cleaning, the other
/// six pass through.
pub fn rollup_published(result: &HouseholdDayResult) -> [EndUseProfile; 8] {
    let mut out = [EndUseProfile::zero(); 8];
    for use_ in PublishedUse::ALL {
        let mut profile = EndUseProfile::zero();
        for sub in rollup_members(use_) {
            profile.add_assign(result.profiles.get(*sub));
        }
        out[use_.index()] = profile;
    }
    out
}

/// The sub-uses contributing to one published end-use, in summation order.
pub fn rollup_members(use_: PublishedUse) -> &'static [EndUse] {
    match use_ {
        PublishedUse::Hvac => &[EndUse::Hvac],
        PublishedUse::H2o => &[EndUse::H2o],
        PublishedUse::Light => &[EndUse::Light],
        PublishedUse::Refr => &[EndUse::Refr],
        PublishedUse::Dwasher => &[EndUse::Dwasher],
        PublishedUse::Cook => &[EndUse::Cook],
        PublishedUse::Laundry => &[EndUse::Cwasher, EndUse::Cdryer],
        PublishedUse::Misc => &[EndUse::Tv, EndUse::Computer, EndUse::Cleaning],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;
    use proptest::prelude::*;

    fn result_with(profiles: EndUseMap) -> HouseholdDayResult {
        HouseholdDayResult {
            hid: "h1".into(),
            date: NaiveDate::from_ymd_opt(2014, 1, 15).unwrap(),
            profiles,
            gallons_hot_water: [0.0; HOURS],
        }
    }

    #[test]
    fn total_of_zero_profiles_is_zero() {
        let total = aggregate_total(&result_with(EndUseMap::zero()));
        assert_eq!(total.kwh, [0.0; HOURS]);
    }

    #[test]
    fn total_sums_two_terms() {
        let mut map = EndUseMap::zero();
        map.get_mut(EndUse::Hvac).kwh[7] = 1.0;
        map.get_mut(EndUse::Tv).kwh[7] = 0.2;
        let total = aggregate_total(&result_with(map));
        assert_eq!(total.kwh[7], 1.2);
        for t in 0..HOURS {
            if t != 7 {
                assert_eq!(total.kwh[t], 0.0);
            }
        }
    }

    #[test]
    fn laundry_rollup_is_washer_plus_dryer() {
        let mut map = EndUseMap::zero();
        map.get_mut(EndUse::Cwasher).kwh[20] = 0.4;
        map.get_mut(EndUse::Cdryer).kwh[20] = 2.5;
        let rollup = rollup_published(&result_with(map));
        assert_eq!(rollup[PublishedUse::Laundry.index()].kwh[20], 2.9);
    }

    #[test]
    fn rollup_of_zero_result_is_zero() {
        let rollup = rollup_published(&result_with(EndUseMap::zero()));
        for profile in &rollup {
            assert_eq!(profile.kwh, [0.0; HOURS]);
        }
    }

    #[test]
    fn zone_parse_format_round_trips() {
        for zone in ClimateZone::ALL {
            assert_eq!(zone.to_string().parse::<ClimateZone>().unwrap(), zone);
        }
        assert!("Tropical".parse::<ClimateZone>().is_err());
    }

    #[test]
    fn core_types_serialize_round_trip() {
        let mut map = EndUseMap::zero();
        map.get_mut(EndUse::Cook).kwh[12] = 0.731;
        let result = result_with(map);
        let json = serde_json::to_string(&result).unwrap();
        let back: HouseholdDayResult = serde_json::from_str(&json).unwrap();
        assert_eq!(back, result);
    }

    proptest! {
        #[test]
        fn total_matches_independent_summation(values in proptest::collection::vec(0.0f64..5.0, 11 * HOURS)) {
            let mut map = EndUseMap::zero();
            for (i, use_) in EndUse::ALL.iter().enumerate() {
                for t in 0..HOURS {
                    map.get_mut(*use_).kwh[t] = values[i * HOURS + t];
                }
            }
            let result = result_with(map);
            let total = aggregate_total(&result);
            // Oracle: plain loop over the raw value vector, same order.
            for t in 0..HOURS {
                let mut expect = 0.0;
                for i in 0..11 {
                    expect += values[i * HOURS + t];
                }
                prop_assert!((total.kwh[t] - expect).abs() < 1e-12);
            }
        }

        #[test]
        fn rollups_sum_to_aggregate_total(values in proptest::collection::vec(0.0f64..5.0, 11 * HOURS)) {
            let mut map = EndUseMap::zero();
            for (i, use_) in EndUse::ALL.iter().enumerate() {
                for t in 0..HOURS {
                    map.get_mut(*use_).kwh[t] = values[i * HOURS + t];
                }
            }
            let result = result_with(map);
            let total = aggregate_total(&result);
            let rollup = rollup_published(&result);
            for t in 0..HOURS {
                let sum: f64 = rollup.iter().map(|p| p.kwh[t]).sum();
                prop_assert!((sum - total.kwh[t]).abs() < 1e-9);
            }
        }
    }
}
