//! `resload`: generate synthetic residential demand records and validate
//! them against other datasets.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error.

mod inputs;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use resload_core::activities::fit_refrigerator;
use resload_core::metrics::{
    assign, closeness, coverage, distance_matrix, kmeans, DistanceMetric, CLOSENESS_BINS,
    MATRIX_BINS,
};
use resload_core::pipeline::{self, calibrate_gamma, Inputs, PipelineError, RunConfig};
use resload_core::types::ClimateZone;

#[derive(Parser)]
#[command(name = "resload", version, about = "Synthetic residential electricity demand generator and validation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and write the partitioned record tree.
    Generate(GenerateArgs),
    /// Fit the refrigerator regression from a metered-usage CSV.
    FitRefrigerator(FitRefrigeratorArgs),
    /// Bisect the lighting calibration constant against an annual-kWh table.
    CalibrateGamma(CalibrateGammaArgs),
    /// Pairwise distance matrix between daily end-use distributions.
    DistanceMatrix(DistanceMatrixArgs),
    /// Cluster load shapes and report coverage/closeness both ways.
    ShapeValidate(ShapeValidateArgs),
    /// Per-end-use share table for a written record tree.
    Summarize(SummarizeArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Run configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Seed override; required here if the config has none.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker count override.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct FitRefrigeratorArgs {
    /// CSV with header `kwh_day,t_avg_f,zone`.
    #[arg(long)]
    data: PathBuf,
    /// Where to write the fitted coefficients (JSON).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CalibrateGammaArgs {
    /// Run configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// CSV with header `hsize,annual_kwh`.
    #[arg(long)]
    targets: PathBuf,
}

#[derive(Args)]
struct DistanceMatrixArgs {
    /// Distance to compute: js or hellinger.
    #[arg(long)]
    metric: DistanceMetric,
    /// End-use to compare: hvac|h2o|light|refr|dwasher|cook|laundry|misc|total.
    #[arg(long)]
    enduse: String,
    /// Datasets as name=path; a record tree directory or a CSV with a
    /// `value` column. Repeatable.
    #[arg(long, required = true, num_args = 1..)]
    inputs: Vec<String>,
    /// Where to write the matrix CSV.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ShapeValidateArgs {
    /// Reference shapes: record tree or CSV with h1..h24 columns.
    #[arg(long = "ref")]
    reference: PathBuf,
    /// Compared shapes, same formats.
    #[arg(long)]
    other: PathBuf,
    /// Cluster counts to sweep, comma separated.
    #[arg(long, default_value = "5,10,15,20", value_delimiter = ',')]
    k: Vec<usize>,
    /// Clustering seed.
    #[arg(long)]
    seed: u64,
    /// Where to write the report CSV.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SummarizeArgs {
    /// Root of a record tree written by `generate`.
    #[arg(long)]
    records: PathBuf,
}

/// Failures split by exit code.
enum CliError {
    Usage(String),
    Data(String),
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::MissingSeed => CliError::Usage(e.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not errors.
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(message)) => {
            eprintln!("usage error: {message}");
            ExitCode::from(1)
        }
        Err(CliError::Data(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Generate(args) => generate(args),
        Command::FitRefrigerator(args) => fit_refrigerator_cmd(args),
        Command::CalibrateGamma(args) => calibrate_gamma_cmd(args),
        Command::DistanceMatrix(args) => distance_matrix_cmd(args),
        Command::ShapeValidate(args) => shape_validate_cmd(args),
        Command::Summarize(args) => summarize_cmd(args),
    }
}

fn generate(args: GenerateArgs) -> Result<(), CliError> {
    let mut config = RunConfig::from_file(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = Some(seed);
    }
    if let Some(workers) = args.workers {
        config.worker_count = workers;
    }
    config.seed()?; // fail before the expensive load
    let output = pipeline::run(&config)?;
    print!("{}", output.summary);
    println!(
        "wrote {} record files under {}",
        output.manifest.len(),
        config.output_root.display()
    );
    Ok(())
}

fn fit_refrigerator_cmd(args: FitRefrigeratorArgs) -> Result<(), CliError> {
    let mut reader = csv::Reader::from_path(&args.data)
        .map_err(|e| CliError::Data(format!("{}: {e}", args.data.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| CliError::Data(e.to_string()))?
        .clone();
    let col = |name: &str| -> Result<usize, CliError> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Data(format!("{}: missing column `{name}`", args.data.display())))
    };
    let (kwh_i, temp_i, zone_i) = (col("kwh_day")?, col("t_avg_f")?, col("zone")?);
    let mut samples = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Data(e.to_string()))?;
        let parse = |j: usize, what: &str| -> Result<f64, CliError> {
            record
                .get(j)
                .unwrap_or("")
                .trim()
                .parse()
                .map_err(|_| CliError::Data(format!("row {}: bad {what}", i + 2)))
        };
        let zone: ClimateZone = record
            .get(zone_i)
            .unwrap_or("")
            .trim()
            .parse()
            .map_err(|e| CliError::Data(format!("row {}: {e}", i + 2)))?;
        samples.push((parse(kwh_i, "kwh_day")?, parse(temp_i, "t_avg_f")?, zone));
    }
    let coeffs = fit_refrigerator(&samples).map_err(|e| CliError::Data(e.to_string()))?;
    let json = serde_json::to_string_pretty(&coeffs).expect("serializable");
    std::fs::write(&args.out, &json)
        .map_err(|e| CliError::Data(format!("{}: {e}", args.out.display())))?;
    println!(
        "fit {} samples: intercept {:.6}, temp slope {:.6}, r2 {:.6}",
        samples.len(),
        coeffs.intercept,
        coeffs.temp_slope,
        coeffs.r_squared.unwrap_or(f64::NAN)
    );
    println!("coefficients written to {}", args.out.display());
    Ok(())
}

fn calibrate_gamma_cmd(args: CalibrateGammaArgs) -> Result<(), CliError> {
    let config = RunConfig::from_file(&args.config)?;
    config.seed()?;
    let mut reader = csv::Reader::from_path(&args.targets)
        .map_err(|e| CliError::Data(format!("{}: {e}", args.targets.display())))?;
    let headers = reader.headers().map_err(|e| CliError::Data(e.to_string()))?.clone();
    let hsize_i = headers
        .iter()
        .position(|h| h == "hsize")
        .ok_or_else(|| CliError::Data("targets: missing column `hsize`".into()))?;
    let kwh_i = headers
        .iter()
        .position(|h| h == "annual_kwh")
        .ok_or_else(|| CliError::Data("targets: missing column `annual_kwh`".into()))?;
    let mut targets = BTreeMap::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Data(e.to_string()))?;
        let hsize: usize = record
            .get(hsize_i)
            .unwrap_or("")
            .trim()
            .parse()
            .map_err(|_| CliError::Data(format!("targets row {}: bad hsize", i + 2)))?;
        let kwh: f64 = record
            .get(kwh_i)
            .unwrap_or("")
            .trim()
            .parse()
            .map_err(|_| CliError::Data(format!("targets row {}: bad annual_kwh", i + 2)))?;
        targets.insert(hsize, kwh);
    }
    let inputs = Inputs::load(&config)?;
    let result = calibrate_gamma(&config, &inputs, &targets)?;
    println!(
        "gamma = {:.6} after {} iterations (annual lighting kWh: achieved {:.1}, target {:.1})",
        result.gamma, result.iterations, result.achieved_annual_kwh, result.target_annual_kwh
    );
    for (size, kwh) in &result.per_size_annual_kwh {
        println!("  size {size}: {kwh:.1} kWh/yr");
    }
    Ok(())
}

fn distance_matrix_cmd(args: DistanceMatrixArgs) -> Result<(), CliError> {
    let named = inputs::parse_named_inputs(&args.inputs)?;
    let mut datasets = Vec::new();
    for (name, path) in named {
        let values = inputs::load_daily_values(&path, &args.enduse)?;
        datasets.push((name, values));
    }
    let matrix = distance_matrix(&datasets, args.metric, MATRIX_BINS)
        .map_err(|e| CliError::Data(e.to_string()))?;
    let file = std::fs::File::create(&args.out)
        .map_err(|e| CliError::Data(format!("{}: {e}", args.out.display())))?;
    matrix
        .to_csv(std::io::BufWriter::new(file))
        .map_err(|e| CliError::Data(e.to_string()))?;
    for (i, name) in matrix.names.iter().enumerate() {
        let row: Vec<String> = matrix.values[i].iter().map(|v| format!("{v:.4}")).collect();
        println!("{name:<16} {}", row.join(" "));
    }
    println!("matrix written to {}", args.out.display());
    Ok(())
}

fn shape_validate_cmd(args: ShapeValidateArgs) -> Result<(), CliError> {
    if args.k.is_empty() {
        return Err(CliError::Usage("at least one k is required".into()));
    }
    let reference = inputs::load_shapes(&args.reference)?;
    let other = inputs::load_shapes(&args.other)?;

    let mut report = String::from("k,clustered_on,coverage,closeness\n");
    for &k in &args.k {
        // Case 1: clusters from the reference set, the other set assigned.
        let ref_clusters = kmeans(&reference, k, args.seed).map_err(|e| CliError::Data(e.to_string()))?;
        let (labels, distances) = assign(&other, &ref_clusters.centers);
        let cov = coverage(&ref_clusters, &labels);
        let close = closeness(&ref_clusters.distances, &distances, CLOSENESS_BINS)
            .map_err(|e| CliError::Data(e.to_string()))?;
        report.push_str(&format!("{k},ref,{cov:.6},{close:.6}\n"));
        println!("k={k} clustered on ref:   coverage {cov:.4}  closeness {close:.4}");

        // Case 2: clusters from the other set, the reference assigned.
        let other_clusters = kmeans(&other, k, args.seed).map_err(|e| CliError::Data(e.to_string()))?;
        let (labels, distances) = assign(&reference, &other_clusters.centers);
        let cov = coverage(&other_clusters, &labels);
        let close = closeness(&other_clusters.distances, &distances, CLOSENESS_BINS)
            .map_err(|e| CliError::Data(e.to_string()))?;
        report.push_str(&format!("{k},other,{cov:.6},{close:.6}\n"));
        println!("k={k} clustered on other: coverage {cov:.4}  closeness {close:.4}");
    }
    std::fs::write(&args.out, &report)
        .map_err(|e| CliError::Data(format!("{}: {e}", args.out.display())))?;
    println!("report written to {}", args.out.display());
    Ok(())
}

fn summarize_cmd(args: SummarizeArgs) -> Result<(), CliError> {
    let summary = pipeline::summarize_dir(&args.records)?;
    print!("{summary}");
    Ok(())
}
