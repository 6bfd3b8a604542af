use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use resload_core::fixtures::{fixture_run_config, monthly_dates};
use resload_core::lighting::{simulate_lighting_day, LightingConfig};
use resload_core::pipeline::{simulate_all, Inputs, RunConfig};
use resload_core::thermal::hvac_hour;
use resload_core::types::{BulbKind, Dwelling, LightingUnit, HOURS};

fn bench_dwelling() -> Dwelling {
    Dwelling {
        floor_area: 2000.0,
        wall_area: 1431.1,
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

fn hvac(c: &mut Criterion) {
    let dwelling = bench_dwelling();
    c.bench_function("hvac_hour", |b| {
        b.iter(|| {
            let mut total = 0.0;
            for t in 0..240 {
                total += hvac_hour(black_box(&dwelling), black_box(20.0 + (t % 80) as f64));
            }
            total
        })
    });
}

fn lighting_day(c: &mut Criterion) {
    use rand::SeedableRng;
    let units: Vec<LightingUnit> = (0..20)
        .map(|i| LightingUnit {
            kind: BulbKind::Incandescent,
            watts: [60.0, 14.0, 9.0][i % 3],
        })
        .collect();
    let config = LightingConfig { gamma: 5.0, ..LightingConfig::default() };
    let irr: [f64; HOURS] = std::array::from_fn(|t| ((t as f64 - 12.0).abs() * 40.0).min(400.0));
    let occupancy: [u32; HOURS] = std::array::from_fn(|t| u32::from((17..23).contains(&t)) * 2);
    c.bench_function("lighting_household_day", |b| {
        b.iter_batched(
            || rand_chacha::ChaCha8Rng::seed_from_u64(7),
            |mut rng| simulate_lighting_day(&units, &irr, &occupancy, &config, &mut rng),
            BatchSize::SmallInput,
        )
    });
}

fn pipeline_run(c: &mut Criterion) {
    let dir = tempfile::tempdir().unwrap();
    let config: RunConfig =
        fixture_run_config(dir.path(), 100, monthly_dates(2014), 1234).unwrap();
    let inputs = Inputs::load(&config).unwrap();
    // 100 households x 12 days = 1200 household-days per iteration.
    c.bench_function("simulate_1200_household_days", |b| {
        b.iter(|| simulate_all(black_box(&config), black_box(&inputs)).unwrap())
    });
}

criterion_group!(benches, hvac, lighting_day, pipeline_run);
criterion_main!(benches);
