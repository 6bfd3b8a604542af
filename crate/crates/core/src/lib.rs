//! Bottom-up synthesis of hourly residential electricity demand.
//!
//! Households from a synthetic population are enriched with donor diaries
//! and building attributes, then six end-use models (HVAC, hot water,
//! lighting, refrigeration, appliance activities) produce dis-aggregated
//! 24-hour kWh profiles per household-day, written as partitioned CSV
//! records. The [`metrics`] module carries the validation toolkit:
//! distribution distances and load-shape clustering with coverage and
//! closeness comparisons.

pub mod activities;
pub mod dist;
pub mod enrichment;
pub mod fixtures;
pub mod ingest;
pub mod lighting;
pub mod metrics;
pub mod pipeline;
pub mod thermal;
pub mod types;

pub use pipeline::{run, RunConfig, RunSummary};
pub use types::{
    aggregate_total, rollup_published, ClimateZone, Dwelling, EndUse, EndUseMap, EndUseProfile,
    Household, HouseholdDayResult, Person, PublishedUse, HOURS,
};
