//! The two thermostatically controlled loads: HVAC and domestic hot water.

use rand::Rng;
use rand_distr::{Distribution, Normal, Uniform};
use serde::{Deserialize, Serialize};

use crate::dist::SampledDist;
use crate::ingest::InletTempTable;
use crate::types::{ClimateZone, Dwelling, HOURS};

/// BTU in one kWh; the envelope balance is computed in BTU/h and converted.
pub const BTU_PER_KWH: f64 = 3412.14;
/// Energy to raise one gallon of water by one °F, kWh.
pub const DHW_KWH_PER_GAL_F: f64 = 0.00189;

/// Hourly HVAC energy, kWh. Zero inside the thermostat deadband; outside it,
/// the envelope loss `dT/eta * (floor/R_roof + wall/R_wall)` in BTU/h,
/// converted to kWh. Heating uses the heater efficiency; cooling uses the
/// HVAC efficiency and requires air conditioning to be present.
pub fn hvac_hour(dwelling: &Dwelling, t_out_f: f64) -> f64 {
    let (delta_t, eta) = if t_out_f < dwelling.setpoint_heat {
        (dwelling.setpoint_heat - t_out_f, dwelling.heater_efficiency)
    } else if t_out_f > dwelling.setpoint_cool {
        if !dwelling.has_ac {
            return 0.0;
        }
        (t_out_f - dwelling.setpoint_cool, dwelling.hvac_efficiency)
    } else {
        return 0.0;
    };
    let btu_per_h = delta_t / eta
        * (dwelling.floor_area / dwelling.r_roof + dwelling.wall_area / dwelling.r_wall);
    btu_per_h / BTU_PER_KWH
}

/// Hot-water event categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DhwEventKind {
    Shower,
    Bath,
    Dishwasher,
    ClothesWasher,
}

/// Flow, duration, and delivery-temperature parameters for one event kind.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DhwEventParams {
    pub flow_gpm_mean: f64,
    pub flow_gpm_sd: f64,
    pub duration_min: SampledDist,
    /// Hot delivery temperature range, °F; drawn uniformly per event.
    pub t_hot_range: (f64, f64),
}

/// Hot-water model configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ThermalConfig {
    pub shower: DhwEventParams,
    pub bath: DhwEventParams,
    pub dishwasher: DhwEventParams,
    pub clothes_washer: DhwEventParams,
    /// Probability a member bathes on a given day.
    pub p_bathe: f64,
    /// Probability the bathe event is a bath rather than a shower.
    pub p_bath: f64,
    /// Negative flow draws are capped to this, gpm.
    pub min_flow_gpm: f64,
    /// Negative duration draws are capped to this, minutes.
    pub min_duration_min: f64,
}

impl Default for ThermalConfig {
    fn default() -> Self {
        ThermalConfig {
            shower: DhwEventParams {
                flow_gpm_mean: 2.25,
                flow_gpm_sd: 0.68,
                duration_min: SampledDist::normal(7.81, 3.52),
                t_hot_range: (105.0, 116.0),
            },
            bath: DhwEventParams {
                flow_gpm_mean: 4.40,
                flow_gpm_sd: 1.17,
                duration_min: SampledDist::normal(5.65, 2.09),
                t_hot_range: (105.0, 116.0),
            },
            dishwasher: DhwEventParams {
                flow_gpm_mean: 1.39,
                flow_gpm_sd: 0.20,
                duration_min: SampledDist::log_normal(1.53, 0.41),
                t_hot_range: (120.0, 140.0),
            },
            clothes_washer: DhwEventParams {
                flow_gpm_mean: 2.20,
                flow_gpm_sd: 0.62,
                duration_min: SampledDist::normal(3.05, 1.62),
                t_hot_range: (60.0, 130.0),
            },
            p_bathe: 0.85,
            p_bath: 0.10,
            min_flow_gpm: 0.05,
            min_duration_min: 1.0,
        }
    }
}

impl ThermalConfig {
    pub fn params(&self, kind: DhwEventKind) -> &DhwEventParams {
        match kind {
            DhwEventKind::Shower => &self.shower,
            DhwEventKind::Bath => &self.bath,
            DhwEventKind::Dishwasher => &self.dishwasher,
            DhwEventKind::ClothesWasher => &self.clothes_washer,
        }
    }
}

/// Energy to lift `gallons` from the mains temperature to the delivery
/// temperature at heater efficiency `eta`. The lift is floored at zero: when
/// the mains water already arrives at or above delivery temperature no
/// heating energy is spent.
pub fn dhw_energy_kwh(gallons: f64, t_hot_f: f64, t_cold_f: f64, eta: f64) -> f64 {
    gallons * (t_hot_f - t_cold_f).max(0.0) / eta * DHW_KWH_PER_GAL_F
}

/// One realized hot-water draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DhwDraw {
    pub gallons: f64,
    pub kwh: f64,
    pub t_hot_f: f64,
}

/// Samples one hot-water event: flow and duration from the kind's
/// distributions (capped below at the configured minimums), delivery
/// temperature uniform over the kind's range, mains temperature from the
/// month/zone inlet table.
pub fn dhw_event(
    kind: DhwEventKind,
    month: u32,
    zone: ClimateZone,
    inlet: &InletTempTable,
    eta: f64,
    config: &ThermalConfig,
    rng: &mut impl Rng,
) -> DhwDraw {
    let params = config.params(kind);
    let flow = Normal::new(params.flow_gpm_mean, params.flow_gpm_sd)
        .expect("valid normal")
        .sample(rng)
        .max(config.min_flow_gpm);
    let duration = params.duration_min.sample(rng).max(config.min_duration_min);
    let t_hot = Uniform::new_inclusive(params.t_hot_range.0, params.t_hot_range.1)
        .expect("valid range")
        .sample(rng);
    let gallons = flow * duration;
    let t_cold = inlet.get(month, zone);
    DhwDraw { gallons, kwh: dhw_energy_kwh(gallons, t_hot, t_cold, eta), t_hot_f: t_hot }
}

/// Hot-water usage for one household-day: hourly gallons and kWh, plus the
/// count of bathe events dropped for lack of an occupied hour.
#[derive(Debug, Clone, PartialEq)]
pub struct DhwDayProfile {
    pub gallons: [f64; HOURS],
    pub kwh: [f64; HOURS],
    pub dropped_events: u32,
}

/// Schedules a day of hot-water events. Each member bathes with probability
/// `p_bathe` (bath vs. shower by `p_bath`), placed uniformly in that member's
/// own at-home-awake hours; members with no such hour are skipped. Appliance
/// events are booked at the hour the appliance runs. All energy and gallons
/// are booked in the event's start hour. Households without an electric
/// water heater spend no energy but still draw the gallons.
#[allow(clippy::too_many_arguments)]
pub fn schedule_dhw_day(
    dwelling: &Dwelling,
    member_home_awake: &[[bool; HOURS]],
    appliance_events: &[(DhwEventKind, usize)],
    month: u32,
    zone: ClimateZone,
    inlet: &InletTempTable,
    config: &ThermalConfig,
    rng: &mut impl Rng,
) -> DhwDayProfile {
    let mut profile =
        DhwDayProfile { gallons: [0.0; HOURS], kwh: [0.0; HOURS], dropped_events: 0 };
    let electric = dwelling.has_electric_water_heater;
    let eta = dwelling.water_heater_eta;

    let book = |hour: usize, draw: DhwDraw, out: &mut DhwDayProfile| {
        out.gallons[hour] += draw.gallons;
        if electric {
            out.kwh[hour] += draw.kwh;
        }
    };

    for hours in member_home_awake {
        let available: Vec<usize> = (0..HOURS).filter(|&t| hours[t]).collect();
        if rng.random::<f64>() >= config.p_bathe {
            continue;
        }
        let kind = if rng.random::<f64>() < config.p_bath {
            DhwEventKind::Bath
        } else {
            DhwEventKind::Shower
        };
        if available.is_empty() {
            profile.dropped_events += 1;
            continue;
        }
        let hour = available[rng.random_range(0..available.len())];
        let draw = dhw_event(kind, month, zone, inlet, eta, config, rng);
        book(hour, draw, &mut profile);
    }

    for &(kind, hour) in appliance_events {
        let draw = dhw_event(kind, month, zone, inlet, eta, config, rng);
        book(hour, draw, &mut profile);
    }
    profile
}
