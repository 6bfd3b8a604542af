//! Stochastic lighting model: bulb switch-on events driven by irradiance and
//! effective occupancy.
//!
//! Every bulb consumes exactly two uniform draws per hour (trigger test and
//! duration pick) whether or not it can ignite, so a simulation replayed with
//! common random numbers under a pointwise-higher irradiance series stays
//! draw-aligned; a trigger on an already-lit bulb extends its remaining
//! minutes rather than restarting it. Together these make realized daily
//! energy monotone nonincreasing in the irradiance series, not just its
//! expectation.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::types::{LightingUnit, HOURS};

#[derive(Debug, thiserror::Error)]
pub enum LightingError {
    #[error("effective-occupancy table must map one active occupant to exactly 1.0")]
    TableMissingOne,
}

/// Lighting model configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LightingConfig {
    /// Calibration constant scaling every switch-on probability.
    pub gamma: f64,
    /// Switch-on duration support, minutes.
    pub duration_minutes: Vec<u32>,
    /// Relative weights over `duration_minutes`; normalized at use.
    pub duration_weights: Vec<f64>,
    /// Active-occupant count to effective-occupancy multiplier.
    pub effective_occupancy: BTreeMap<u32, f64>,
    /// Per-day irradiance threshold distribution, W/m².
    pub irr_threshold_mean: f64,
    pub irr_threshold_sd: f64,
}

impl Default for LightingConfig {
    fn default() -> Self {
        let mut effective_occupancy = BTreeMap::new();
        effective_occupancy.insert(1, 1.0);
        effective_occupancy.insert(2, 1.44);
        effective_occupancy.insert(3, 1.70);
        effective_occupancy.insert(4, 1.90);
        LightingConfig {
            gamma: 0.05,
            duration_minutes: vec![1, 15, 30, 60, 120, 240],
            duration_weights: vec![1.0, 0.8, 0.64, 0.512, 0.4096, 0.32768],
            effective_occupancy,
            irr_threshold_mean: 60.0,
            irr_threshold_sd: 10.0,
        }
    }
}

/// Effective occupancy for `n_active` awake members at home: exact table
/// lookup, linear interpolation between table keys, and linear extension
/// beyond the last key. Zero active occupants always map to zero and the
/// table must pin one occupant to exactly 1.0.
pub fn effective_occupancy(
    n_active: u32,
    table: &BTreeMap<u32, f64>,
) -> Result<f64, LightingError> {
    if table.get(&1) != Some(&1.0) {
        return Err(LightingError::TableMissingOne);
    }
    if n_active == 0 {
        return Ok(0.0);
    }
    if let Some(&v) = table.get(&n_active) {
        return Ok(v);
    }
    let below = table.range(..n_active).next_back();
    let above = table.range(n_active + 1..).next();
    Ok(match (below, above) {
        (Some((&k0, &v0)), Some((&k1, &v1))) => {
            v0 + (v1 - v0) * (n_active - k0) as f64 / (k1 - k0) as f64
        }
        // Beyond the table: extend using the slope of the last two entries.
        (Some((&k1, &v1)), None) => {
            let slope = table
                .range(..k1)
                .next_back()
                .map(|(&k0, &v0)| (v1 - v0) / (k1 - k0) as f64)
                .unwrap_or(0.0);
            v1 + slope * (n_active - k1) as f64
        }
        // n_active below the smallest key can only be 0, handled above; the
        // table always holds key 1.
        _ => 1.0,
    })
}

/// Relative usage weights for `n` bulbs, most-used first: rank `r` gets
/// weight proportional to `ln((n + 1) / r)`, normalized to sum to one.
pub fn bulb_weights(n_bulbs: usize) -> Vec<f64> {
    let raw: Vec<f64> =
        (1..=n_bulbs).map(|r| ((n_bulbs as f64 + 1.0) / r as f64).ln()).collect();
    let sum: f64 = raw.iter().sum();
    raw.iter().map(|w| w / sum).collect()
}

/// Switch-on probability of one bulb for one hour, clamped to [0, 1].
pub fn switch_on_probability(
    dark: bool,
    occupied: bool,
    weight: f64,
    eff_occupancy: f64,
    gamma: f64,
) -> f64 {
    if !dark || !occupied {
        return 0.0;
    }
    (weight * eff_occupancy * gamma).clamp(0.0, 1.0)
}

/// Per-day lighting state for one household.
#[derive(Debug, Clone)]
pub struct LightingState {
    watts: Vec<f64>,
    weights: Vec<f64>,
    remaining_min: Vec<f64>,
    /// Darkness threshold for the day, W/m².
    pub irr_threshold: f64,
}

impl LightingState {
    /// Starts a fresh day: usage weights from the log curve, all bulbs off,
    /// threshold drawn from the configured normal.
    pub fn start_day(units: &[LightingUnit], config: &LightingConfig, rng: &mut impl Rng) -> Self {
        let threshold = Normal::new(config.irr_threshold_mean, config.irr_threshold_sd)
            .expect("valid normal")
            .sample(rng);
        LightingState {
            watts: units.iter().map(|u| u.watts).collect(),
            weights: bulb_weights(units.len()),
            remaining_min: vec![0.0; units.len()],
            irr_threshold: threshold,
        }
    }

    fn pick_duration(config: &LightingConfig, u: f64) -> f64 {
        let total: f64 = config.duration_weights.iter().sum();
        let mut acc = 0.0;
        for (minutes, w) in config.duration_minutes.iter().zip(&config.duration_weights) {
            acc += w / total;
            if u < acc {
                return *minutes as f64;
            }
        }
        config.duration_minutes.last().copied().unwrap_or(60) as f64
    }

    /// Advances one hour and returns the energy burned in it, kWh.
    pub fn step_hour(
        &mut self,
        irr_t: f64,
        n_active: u32,
        config: &LightingConfig,
        rng: &mut impl Rng,
    ) -> f64 {
        let dark = irr_t <= self.irr_threshold;
        let occupied = n_active >= 1;
        let eff = effective_occupancy(n_active, &config.effective_occupancy)
            .expect("config validated at load");
        let mut kwh = 0.0;
        for b in 0..self.watts.len() {
            // Fixed draw budget per bulb-hour: trigger test then duration.
            let u_trigger = rng.random::<f64>();
            let u_duration = rng.random::<f64>();
            let p_on =
                switch_on_probability(dark, occupied, self.weights[b], eff, config.gamma);
            if u_trigger < p_on {
                let duration = Self::pick_duration(config, u_duration);
                self.remaining_min[b] = self.remaining_min[b].max(duration);
            }
            let burn = self.remaining_min[b].min(60.0);
            self.remaining_min[b] -= burn;
            kwh += self.watts[b] * burn / 60.0 / 1000.0;
        }
        kwh
    }
}

/// One household-day of lighting: threshold draw, then 24 hourly steps.
pub fn simulate_lighting_day(
    units: &[LightingUnit],
    irradiance: &[f64; HOURS],
    occupancy: &[u32; HOURS],
    config: &LightingConfig,
    rng: &mut impl Rng,
) -> [f64; HOURS] {
    let mut state = LightingState::start_day(units, config, rng);
    std::array::from_fn(|t| state.step_hour(irradiance[t], occupancy[t], config, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::BulbKind;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn units(n: usize) -> Vec<LightingUnit> {
        (0..n)
            .map(|i| LightingUnit {
                kind: if i % 2 == 0 { BulbKind::Incandescent } else { BulbKind::Cfl },
                watts: if i % 2 == 0 { 60.0 } else { 14.0 },
            })
            .collect()
    }

    #[test]
    fn effective_occupancy_edge_values() {
        let table = LightingConfig::default().effective_occupancy;
        assert_eq!(effective_occupancy(0, &table).unwrap(), 0.0);
        assert_eq!(effective_occupancy(1, &table).unwrap(), 1.0);
        assert_eq!(effective_occupancy(4, &table).unwrap(), 1.90);
    }

    #[test]
    fn effective_occupancy_extends_linearly() {
        let table = LightingConfig::default().effective_occupancy;
        // Last slope is (1.90 - 1.70) / 1 = 0.20 per extra occupant.
        let v6 = effective_occupancy(6, &table).unwrap();
        assert!((v6 - 2.30).abs() < 1e-12, "{v6}");
    }

    #[test]
    fn table_without_unity_anchor_is_rejected() {
        let mut table = BTreeMap::new();
        table.insert(1u32, 1.2);
        assert!(matches!(effective_occupancy(1, &table), Err(LightingError::TableMissingOne)));
    }

    #[test]
    fn single_bulb_weight_is_one() {
        assert_eq!(bulb_weights(1), vec![1.0]);
    }

    #[test]
    fn two_bulb_weights_match_hand_value() {
        // ln(3)/[ln(3)+ln(1.5)] = 0.7304..., ln(1.5)/[...] = 0.2695...
        let w = bulb_weights(2);
        assert!((w[0] - 0.7304).abs() < 1e-4, "{:?}", w);
        assert!((w[1] - 0.2696).abs() < 1e-4, "{:?}", w);
    }

    #[test]
    fn weights_normalize_and_decrease() {
        for n in 1..40 {
            let w = bulb_weights(n);
            let sum: f64 = w.iter().sum();
            assert!((sum - 1.0).abs() < 1e-12);
            for pair in w.windows(2) {
                assert!(pair[0] > pair[1]);
            }
            assert!(w.iter().all(|&x| x > 0.0));
        }
    }

    #[test]
    fn switch_on_probability_is_the_direct_product() {
        let p = switch_on_probability(true, true, 0.2, 1.5, 0.05);
        assert!((p - 0.015).abs() < 1e-12);
        assert_eq!(switch_on_probability(false, true, 0.2, 1.5, 0.05), 0.0);
        assert_eq!(switch_on_probability(true, false, 0.2, 1.5, 0.05), 0.0);
        // Large products clamp to a probability.
        assert_eq!(switch_on_probability(true, true, 0.9, 2.0, 10.0), 1.0);
    }

    #[test]
    fn bright_hours_only_burn_carry_over() {
        let config = LightingConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut state = LightingState::start_day(&units(10), &config, &mut rng);
        state.irr_threshold = 60.0;
        // Bright hour with no carry-over burns nothing.
        let kwh = state.step_hour(100.0, 3, &config, &mut rng);
        assert_eq!(kwh, 0.0);
    }

    #[test]
    fn empty_house_all_day_is_dark_but_unlit() {
        let config = LightingConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let day = simulate_lighting_day(&units(12), &[0.0; HOURS], &[0; HOURS], &config, &mut rng);
        assert_eq!(day, [0.0; HOURS]);
    }

    #[test]
    fn gamma_zero_is_identically_dark() {
        let config = LightingConfig { gamma: 0.0, ..LightingConfig::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let day = simulate_lighting_day(&units(12), &[0.0; HOURS], &[3; HOURS], &config, &mut rng);
        assert_eq!(day, [0.0; HOURS]);
    }

    #[test]
    fn higher_irradiance_never_burns_more_under_common_draws() {
        let config = LightingConfig::default();
        for seed in 0..50 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let base: [f64; HOURS] = std::array::from_fn(|_| rng.random::<f64>() * 120.0);
            let bump: [f64; HOURS] =
                std::array::from_fn(|t| base[t] + rng.random::<f64>() * 40.0);
            let occupancy: [u32; HOURS] = std::array::from_fn(|_| rng.random_range(0..4));

            let run = |irr: &[f64; HOURS]| {
                let mut r = ChaCha8Rng::seed_from_u64(1000 + seed);
                simulate_lighting_day(&units(15), irr, &occupancy, &config, &mut r)
            };
            let low = run(&base);
            let high = run(&bump);
            let low_total: f64 = low.iter().sum();
            let high_total: f64 = high.iter().sum();
            assert!(
                high_total <= low_total + 1e-12,
                "seed {seed}: {high_total} > {low_total}"
            );
        }
    }

    #[test]
    fn evening_occupancy_lights_evenings() {
        // Daylight midday, dark mornings/evenings; occupants home evenings.
        let config = LightingConfig::default();
        let mut gamma_up = config.clone();
        gamma_up.gamma = 5.0;
        let irr: [f64; HOURS] =
            std::array::from_fn(|t| if (7..19).contains(&t) { 500.0 } else { 5.0 });
        let occupancy: [u32; HOURS] =
            std::array::from_fn(|t| if (18..=23).contains(&t) { 2 } else { 0 });
        let mut mean = [0.0; HOURS];
        for seed in 0..200 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let day = simulate_lighting_day(&units(15), &irr, &occupancy, &gamma_up, &mut rng);
            for t in 0..HOURS {
                mean[t] += day[t] / 200.0;
            }
        }
        let argmax = (0..HOURS).max_by(|&a, &b| mean[a].total_cmp(&mean[b])).unwrap();
        assert!((18..=23).contains(&argmax), "peak at hour {argmax}");
    }

    #[test]
    fn same_seed_replays_identically() {
        let config = LightingConfig::default();
        let irr: [f64; HOURS] = std::array::from_fn(|t| (t as f64 - 12.0).abs() * 30.0);
        let run = |seed: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            simulate_lighting_day(&units(9), &irr, &[2; HOURS], &config, &mut rng)
        };
        assert_eq!(run(6), run(6));
    }
}
