//! Counter-style RNG streams keyed by (seed, household, date, model), so
//! every draw is independent of household ordering and worker scheduling.

use chrono::{Datelike, NaiveDate};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Which model a stream feeds; part of the derivation key.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelTag {
    Enrich,
    Dhw,
    Lighting,
    Activities,
    Refrigerator,
}

impl ModelTag {
    fn key(self) -> u64 {
        match self {
            ModelTag::Enrich => 0x45_4e_52,
            ModelTag::Dhw => 0x44_48_57,
            ModelTag::Lighting => 0x4c_49_54,
            ModelTag::Activities => 0x41_43_54,
            ModelTag::Refrigerator => 0x52_45_46,
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01B3);
    }
    hash
}

/// Derives independent, replayable ChaCha streams from the run seed.
#[derive(Debug, Clone, Copy)]
pub struct RngFactory {
    seed: u64,
}

impl RngFactory {
    pub fn new(seed: u64) -> Self {
        RngFactory { seed }
    }

    fn derive(&self, hid: &str, date_key: u64, tag: ModelTag) -> ChaCha8Rng {
        let mut state = splitmix64(self.seed);
        state = splitmix64(state ^ fnv1a64(hid.as_bytes()));
        state = splitmix64(state ^ date_key);
        state = splitmix64(state ^ tag.key());
        let mut key = [0u8; 32];
        for (i, chunk) in key.chunks_exact_mut(8).enumerate() {
            chunk.copy_from_slice(&splitmix64(state.wrapping_add(i as u64 + 1)).to_le_bytes());
        }
        ChaCha8Rng::from_seed(key)
    }

    /// Run-scoped stream for one household (enrichment draws happen once per
    /// run, not per simulated day).
    pub fn household_run(&self, hid: &str, tag: ModelTag) -> ChaCha8Rng {
        self.derive(hid, u64::MAX, tag)
    }

    /// Day-scoped stream for one household and model.
    pub fn household_day(&self, hid: &str, date: NaiveDate, tag: ModelTag) -> ChaCha8Rng {
        let date_key = (date.year() as u64) * 10_000 + (date.month() as u64) * 100
            + date.day() as u64;
        self.derive(hid, date_key, tag)
    }
}
