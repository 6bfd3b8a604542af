//! Household appliance and activity scheduling (dishwasher, laundry, cooking,
//! TV, computer, cleaning) plus the temperature-driven refrigerator model.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dist::SampledDist;
use crate::enrichment::OccupancySchedule;
use crate::ingest::{Activity, DiaryRecord};
use crate::types::{ClimateZone, Dwelling, EndUse, EndUseMap, HOURS};

#[derive(Debug, thiserror::Error)]
pub enum ActivityError {
    #[error("regression design matrix is singular")]
    SingularDesign,
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
}

/// How an appliance runs once started.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperationMode {
    Automatic,
    SemiAutomatic,
    Manual,
}

/// A named power rating alternative (e.g. oven vs. microwave for cooking).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerOption {
    pub name: String,
    pub weight: f64,
    pub power_w: SampledDist,
}

/// Power rating source for an activity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PowerSource {
    Single(SampledDist),
    Mixture(Vec<PowerOption>),
}

impl PowerSource {
    fn draw(&self, rng: &mut impl Rng) -> f64 {
        match self {
            PowerSource::Single(dist) => dist.sample_positive(rng),
            PowerSource::Mixture(options) => {
                let total: f64 = options.iter().map(|o| o.weight).sum();
                let mut u = rng.random::<f64>() * total;
                for option in options {
                    u -= option.weight;
                    if u < 0.0 {
                        return option.power_w.sample_positive(rng);
                    }
                }
                options.last().expect("nonempty mixture").power_w.sample_positive(rng)
            }
        }
    }
}

/// Behavior of one modeled activity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActivitySpec {
    pub mode: OperationMode,
    /// Daily event cap; `None` leaves the count to the diaries.
    pub max_daily: Option<u32>,
    pub duration_min: SampledDist,
    pub power_w: PowerSource,
    pub needs_hot_water: bool,
}

/// Activity model configuration. Defaults reproduce the modeled appliance
/// behaviors table; the TV minute budget and computer session cap are
/// guardrails against pathological diaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ActivityConfig {
    pub dwasher: ActivitySpec,
    pub cwasher: ActivitySpec,
    pub cdryer: ActivitySpec,
    pub cook: ActivitySpec,
    pub tv: ActivitySpec,
    pub computer: ActivitySpec,
    pub cleaning: ActivitySpec,
    /// Cumulative TV minutes allowed per household-day.
    pub tv_max_daily_minutes: f64,
}

impl Default for ActivityConfig {
    fn default() -> Self {
        ActivityConfig {
            dwasher: ActivitySpec {
                mode: OperationMode::SemiAutomatic,
                max_daily: Some(2),
                duration_min: SampledDist::normal(90.0, 30.0),
                power_w: PowerSource::Single(SampledDist::normal(900.0, 100.0)),
                needs_hot_water: true,
            },
            cwasher: ActivitySpec {
                mode: OperationMode::SemiAutomatic,
                max_daily: Some(2),
                duration_min: SampledDist::normal(45.0, 20.0),
                power_w: PowerSource::Single(SampledDist::normal(400.0, 50.0)),
                needs_hot_water: true,
            },
            cdryer: ActivitySpec {
                mode: OperationMode::SemiAutomatic,
                max_daily: Some(2),
                duration_min: SampledDist::normal(45.0, 20.0),
                power_w: PowerSource::Single(SampledDist::normal(2500.0, 200.0)),
                needs_hot_water: false,
            },
            cook: ActivitySpec {
                mode: OperationMode::SemiAutomatic,
                max_daily: Some(3),
                duration_min: SampledDist::log_normal(3.0, 0.96),
                power_w: PowerSource::Mixture(vec![
                    PowerOption {
                        name: "oven".into(),
                        weight: 0.20,
                        power_w: SampledDist::normal(1426.0, 13.3),
                    },
                    PowerOption {
                        name: "microwave".into(),
                        weight: 0.30,
                        power_w: SampledDist::normal(880.0, 14.0),
                    },
                    PowerOption {
                        name: "cooktop_large".into(),
                        weight: 0.25,
                        power_w: SampledDist::normal(213.0, 1.2),
                    },
                    PowerOption {
                        name: "cooktop_small".into(),
                        weight: 0.25,
                        power_w: SampledDist::normal(393.0, 3.1),
                    },
                ]),
                needs_hot_water: false,
            },
            tv: ActivitySpec {
                mode: OperationMode::Manual,
                max_daily: None,
                duration_min: SampledDist::log_normal(4.24, 0.79),
                power_w: PowerSource::Single(SampledDist::normal(120.0, 20.0)),
                needs_hot_water: false,
            },
            computer: ActivitySpec {
                mode: OperationMode::Manual,
                max_daily: Some(4),
                duration_min: SampledDist::normal(90.0, 30.0),
                power_w: PowerSource::Mixture(vec![
                    PowerOption {
                        name: "desktop".into(),
                        weight: 0.5,
                        power_w: SampledDist::normal(191.5, 32.7),
                    },
                    PowerOption {
                        name: "notebook".into(),
                        weight: 0.5,
                        power_w: SampledDist::normal(60.5, 20.5),
                    },
                ]),
                needs_hot_water: false,
            },
            cleaning: ActivitySpec {
                mode: OperationMode::Manual,
                max_daily: Some(1),
                duration_min: SampledDist::normal(30.0, 15.0),
                power_w: PowerSource::Single(SampledDist::normal(1200.0, 300.0)),
                needs_hot_water: false,
            },
            tv_max_daily_minutes: 600.0,
        }
    }
}

impl ActivityConfig {
    pub fn spec(&self, activity: Activity) -> &ActivitySpec {
        match activity {
            Activity::Dwasher => &self.dwasher,
            Activity::Cwasher => &self.cwasher,
            Activity::Cook => &self.cook,
            Activity::Tv => &self.tv,
            Activity::Computer => &self.computer,
            Activity::Cleaning => &self.cleaning,
        }
    }
}

/// Whether an event belongs to one member or the household as a whole.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventScope {
    Member(usize),
    Household,
}

/// One scheduled appliance run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActivityEvent {
    pub activity: EndUse,
    pub start_hour: usize,
    pub duration_min: f64,
    pub power_w: f64,
    pub scope: EventScope,
    pub needs_hot_water: bool,
}

/// A day of planned events plus the count of infeasible ones dropped.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DayPlan {
    pub events: Vec<ActivityEvent>,
    pub dropped: u32,
}

fn activity_enduse(activity: Activity) -> EndUse {
    match activity {
        Activity::Dwasher => EndUse::Dwasher,
        Activity::Cwasher => EndUse::Cwasher,
        Activity::Cook => EndUse::Cook,
        Activity::Tv => EndUse::Tv,
        Activity::Computer => EndUse::Computer,
        Activity::Cleaning => EndUse::Cleaning,
    }
}

/// Plans a household-day of activity events from the members' diary
/// indicators. Three constraints always hold: every event starts in an hour
/// with at least one occupant home, per-activity daily counts respect the
/// configured caps, and appliance-bound activities require the appliance.
/// Dryer runs follow clothes-washer runs one-for-one, starting no earlier
/// than the washer finishes. Durations are truncated at midnight so a day's
/// profile conserves its events' energy exactly.
pub fn plan_day(
    dwelling: &Dwelling,
    occupancy: &OccupancySchedule,
    diaries: &[&DiaryRecord],
    config: &ActivityConfig,
    rng: &mut impl Rng,
) -> DayPlan {
    let mut plan = DayPlan::default();
    let occupied: Vec<usize> = occupancy.occupied_hours().collect();
    if occupied.is_empty() {
        // Constraint 1: nobody home all day means no events of any kind,
        // but the indicated events still count as dropped.
        plan.dropped = diaries
            .iter()
            .flat_map(|d| d.activities.iter())
            .map(|(_, n)| n)
            .sum();
        return plan;
    }

    let mut tv_minutes_left = config.tv_max_daily_minutes;

    for activity in Activity::ALL {
        let spec = config.spec(activity);
        let has_appliance = match activity {
            Activity::Dwasher => dwelling.has_dishwasher,
            Activity::Cwasher => dwelling.has_laundry,
            _ => true,
        };
        let indicated: u32 = diaries.iter().map(|d| d.activity_count(activity)).sum();
        if indicated == 0 {
            continue;
        }
        if !has_appliance {
            plan.dropped += indicated;
            continue;
        }
        let capped = match spec.max_daily {
            Some(cap) => indicated.min(cap),
            None => indicated,
        };
        plan.dropped += indicated - capped;

        for _ in 0..capped {
            let start_hour = occupied[rng.random_range(0..occupied.len())];
            let mut duration = spec.duration_min.sample_positive(rng);
            duration = duration.min((HOURS - start_hour) as f64 * 60.0);
            if activity == Activity::Tv {
                duration = duration.min(tv_minutes_left);
                if duration <= 0.0 {
                    plan.dropped += 1;
                    continue;
                }
                tv_minutes_left -= duration;
            }
            let power_w = spec.power_w.draw(rng);
            plan.events.push(ActivityEvent {
                activity: activity_enduse(activity),
                start_hour,
                duration_min: duration,
                power_w,
                scope: EventScope::Household,
                needs_hot_water: spec.needs_hot_water,
            });

            if activity == Activity::Cwasher {
                // The dryer starts at the first occupied hour after the
                // washer finishes.
                let washer_end_hour = start_hour + (duration / 60.0).ceil() as usize;
                match occupied.iter().copied().find(|&h| h >= washer_end_hour) {
                    Some(dryer_start) => {
                        let dryer_spec = &config.cdryer;
                        let mut dryer_duration = dryer_spec.duration_min.sample_positive(rng);
                        dryer_duration =
                            dryer_duration.min((HOURS - dryer_start) as f64 * 60.0);
                        let dryer_power = dryer_spec.power_w.draw(rng);
                        plan.events.push(ActivityEvent {
                            activity: EndUse::Cdryer,
                            start_hour: dryer_start,
                            duration_min: dryer_duration,
                            power_w: dryer_power,
                            scope: EventScope::Household,
                            needs_hot_water: dryer_spec.needs_hot_water,
                        });
                    }
                    None => plan.dropped += 1,
                }
            }
        }
    }
    plan
}

/// Spreads each event's energy across the hours it spans, proportionally to
/// the minutes it occupies in each.
pub fn events_to_profiles(events: &[ActivityEvent]) -> EndUseMap {
    let mut map = EndUseMap::zero();
    for event in events {
        let kwh_total = event.power_w * event.duration_min / 60.0 / 1000.0;
        if event.duration_min <= 0.0 {
            continue;
        }
        let start_min = event.start_hour as f64 * 60.0;
        let end_min = start_min + event.duration_min;
        let profile = map.get_mut(event.activity);
        let mut hour = event.start_hour;
        while hour < HOURS && (hour as f64) * 60.0 < end_min {
            let lo = (hour as f64 * 60.0).max(start_min);
            let hi = ((hour + 1) as f64 * 60.0).min(end_min);
            profile.kwh[hour] += kwh_total * (hi - lo) / event.duration_min;
            hour += 1;
        }
    }
    map
}

/// Fitted refrigerator regression: daily kWh as a linear function of daily
/// mean outdoor temperature with additive per-zone offsets. The first zone
/// seen in the training data is the reference with offset zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RefrigeratorCoeffs {
    pub intercept: f64,
    pub temp_slope: f64,
    pub zone_offsets: BTreeMap<ClimateZone, f64>,
    pub r_squared: Option<f64>,
}

impl Default for RefrigeratorCoeffs {
    fn default() -> Self {
        // Illustrative defaults sized to a typical single-refrigerator
        // household; refit from metered data for real studies.
        let mut zone_offsets = BTreeMap::new();
        zone_offsets.insert(ClimateZone::Marine, 0.0);
        zone_offsets.insert(ClimateZone::HotDry, 0.08);
        zone_offsets.insert(ClimateZone::HotHumid, 0.10);
        zone_offsets.insert(ClimateZone::MixedHumid, 0.05);
        zone_offsets.insert(ClimateZone::Cold, 0.0);
        RefrigeratorCoeffs {
            intercept: 0.70,
            temp_slope: 0.005,
            zone_offsets,
            r_squared: None,
        }
    }
}

/// Refrigerator configuration: regression coefficients plus the relative
/// hourly noise applied when disaggregating the daily value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RefrigeratorConfig {
    pub coeffs: RefrigeratorCoeffs,
    pub noise_frac: f64,
}

impl Default for RefrigeratorConfig {
    fn default() -> Self {
        RefrigeratorConfig { coeffs: RefrigeratorCoeffs::default(), noise_frac: 0.1 }
    }
}

/// Daily refrigerator energy, kWh/day, floored at zero. Independent of
/// occupancy: the appliance runs unattended.
pub fn refrigerator_daily(coeffs: &RefrigeratorCoeffs, t_avg_f: f64, zone: ClimateZone) -> f64 {
    let offset = coeffs.zone_offsets.get(&zone).copied().unwrap_or(0.0);
    (coeffs.intercept + coeffs.temp_slope * t_avg_f + offset).max(0.0)
}

/// Disaggregates a daily refrigerator value into 24 hours: flat base plus
/// Gaussian noise, clamped nonnegative, then rescaled so the day sums back
/// to the daily value exactly.
pub fn refrigerator_profile(
    daily_kwh: f64,
    noise_frac: f64,
    rng: &mut impl Rng,
) -> [f64; HOURS] {
    let base = daily_kwh / HOURS as f64;
    if daily_kwh <= 0.0 {
        return [0.0; HOURS];
    }
    let mut hours = [0.0; HOURS];
    let sd = noise_frac * base;
    for slot in hours.iter_mut() {
        let noise = if sd > 0.0 {
            SampledDist::normal(0.0, sd).sample(rng)
        } else {
            0.0
        };
        *slot = (base + noise).max(0.0);
    }
    let sum: f64 = hours.iter().sum();
    if sum > 0.0 {
        let scale = daily_kwh / sum;
        for slot in hours.iter_mut() {
            *slot *= scale;
        }
    } else {
        hours = [base; HOURS];
    }
    hours
}

/// Ordinary least squares for the refrigerator model on
/// `[1, t_avg, zone dummies]`, the first zone present acting as reference.
pub fn fit_refrigerator(
    samples: &[(f64, f64, ClimateZone)],
) -> Result<RefrigeratorCoeffs, ActivityError> {
    let mut zones: Vec<ClimateZone> = Vec::new();
    for (_, _, z) in samples {
        if !zones.contains(z) {
            zones.push(*z);
        }
    }
    zones.sort();
    let p = 2 + zones.len().saturating_sub(1);
    if samples.len() < p + 1 {
        return Err(ActivityError::TooFewSamples { needed: p + 1, got: samples.len() });
    }

    // Normal equations X'X b = X'y, solved by Gauss-Jordan with pivoting.
    let design_row = |t: f64, z: ClimateZone| -> Vec<f64> {
        let mut row = vec![1.0, t];
        for zone in &zones[1..] {
            row.push(if z == *zone { 1.0 } else { 0.0 });
        }
        row
    };
    let mut xtx = vec![vec![0.0; p]; p];
    let mut xty = vec![0.0; p];
    for &(y, t, z) in samples {
        let row = design_row(t, z);
        for i in 0..p {
            xty[i] += row[i] * y;
            for j in 0..p {
                xtx[i][j] += row[i] * row[j];
            }
        }
    }
    let beta = solve_linear(&mut xtx, &mut xty)?;

    let mut zone_offsets = BTreeMap::new();
    zone_offsets.insert(zones[0], 0.0);
    for (k, zone) in zones[1..].iter().enumerate() {
        zone_offsets.insert(*zone, beta[2 + k]);
    }
    let coeffs = RefrigeratorCoeffs {
        intercept: beta[0],
        temp_slope: beta[1],
        zone_offsets,
        r_squared: None,
    };

    let mean_y: f64 = samples.iter().map(|s| s.0).sum::<f64>() / samples.len() as f64;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for &(y, t, z) in samples {
        let offset = coeffs.zone_offsets.get(&z).copied().unwrap_or(0.0);
        let fit = coeffs.intercept + coeffs.temp_slope * t + offset;
        ss_res += (y - fit) * (y - fit);
        ss_tot += (y - mean_y) * (y - mean_y);
    }
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok(RefrigeratorCoeffs { r_squared: Some(r_squared), ..coeffs })
}

#[allow(clippy::needless_range_loop)]
fn solve_linear(a: &mut [Vec<f64>], b: &mut [f64]) -> Result<Vec<f64>, ActivityError> {
    let n = b.len();
    let scale: f64 = a
        .iter()
        .flat_map(|row| row.iter().map(|v| v.abs()))
        .fold(0.0, f64::max)
        .max(1.0);
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("nonempty range");
        if a[pivot_row][col].abs() < 1e-10 * scale {
            return Err(ActivityError::SingularDesign);
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        let pivot = a[col][col];
        for slot in a[col].iter_mut() {
            *slot /= pivot;
        }
        b[col] /= pivot;
        for i in 0..n {
            if i != col {
                let factor = a[i][col];
                for j in 0..n {
                    let head = a[col][j];
                    a[i][j] -= factor * head;
                }
                b[i] -= factor * b[col];
            }
        }
    }
    Ok(b.to_vec())
}
