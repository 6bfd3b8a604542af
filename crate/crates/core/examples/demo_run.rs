//! Generates a synthetic input set, runs the pipeline on it, and prints the
//! summary. Handy for smoke-testing a checkout:
//!
//! ```text
//! cargo run --release -p resload-core --example demo_run -- /tmp/demo 200 42
//! ```

use std::path::PathBuf;

use resload_core::fixtures::{fixture_run_config, monthly_dates};
use resload_core::pipeline;

fn main() {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "demo".into()));
    let households: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(200);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(42);

    let config = fixture_run_config(&dir, households, monthly_dates(2014), seed)
        .expect("write fixture inputs");
    let output = pipeline::run(&config).expect("pipeline run");
    println!("{}", output.summary);
    println!("wrote {} record files under {}", output.manifest.len(), config.output_root.display());
}
