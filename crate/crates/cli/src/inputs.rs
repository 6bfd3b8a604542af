//! Input adapters for the validation subcommands: both accept either a
//! record tree written by `generate` or a plain CSV, so real metered data
//! plugs in through the same shapes.

use std::path::{Path, PathBuf};

use resload_core::metrics::{normalize_shape, LoadShape};
use resload_core::pipeline::read_records_dir;
use resload_core::types::{PublishedUse, HOURS};

use crate::CliError;

/// Parses repeated `name=path` arguments.
pub fn parse_named_inputs(raw: &[String]) -> Result<Vec<(String, PathBuf)>, CliError> {
    raw.iter()
        .map(|spec| {
            spec.split_once('=')
                .map(|(name, path)| (name.to_string(), PathBuf::from(path)))
                .ok_or_else(|| {
                    CliError::Usage(format!("input `{spec}` is not of the form name=path"))
                })
        })
        .collect()
}

fn parse_enduse(enduse: &str) -> Result<Option<PublishedUse>, CliError> {
    if enduse == "total" {
        return Ok(None);
    }
    enduse
        .parse()
        .map(Some)
        .map_err(|_| {
            CliError::Usage(format!(
                "unknown end-use `{enduse}` (expected hvac|h2o|light|refr|dwasher|cook|laundry|misc|total)"
            ))
        })
}

/// One daily kWh value per household-day: from a record tree this sums the
/// chosen end-use's 24 hours per row; from a CSV it reads the `value` column.
pub fn load_daily_values(path: &Path, enduse: &str) -> Result<Vec<f64>, CliError> {
    let use_ = parse_enduse(enduse)?;
    if path.is_dir() {
        let mut values = Vec::new();
        for (_, rows) in read_records_dir(path).map_err(|e| CliError::Data(e.to_string()))? {
            for row in rows {
                let v = match use_ {
                    Some(u) => row.published[u.index()].total(),
                    None => row.published.iter().map(|p| p.total()).sum(),
                };
                values.push(v);
            }
        }
        if values.is_empty() {
            return Err(CliError::Data(format!("{}: no record rows", path.display())));
        }
        return Ok(values);
    }

    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let headers = reader.headers().map_err(|e| CliError::Data(e.to_string()))?.clone();
    let value_i = headers
        .iter()
        .position(|h| h == "value")
        .ok_or_else(|| CliError::Data(format!("{}: missing column `value`", path.display())))?;
    let mut values = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Data(e.to_string()))?;
        let v: f64 = record
            .get(value_i)
            .unwrap_or("")
            .trim()
            .parse()
            .map_err(|_| CliError::Data(format!("{} row {}: bad value", path.display(), i + 2)))?;
        values.push(v);
    }
    if values.is_empty() {
        return Err(CliError::Data(format!("{}: no values", path.display())));
    }
    Ok(values)
}

/// Total-normalized 24-hour load shapes: from a record tree each row's eight
/// end-uses are summed hourwise and normalized (zero-total rows skipped);
/// from a CSV the `h1..h24` columns are normalized directly.
pub fn load_shapes(path: &Path) -> Result<Vec<LoadShape>, CliError> {
    let mut shapes = Vec::new();
    if path.is_dir() {
        for (_, rows) in read_records_dir(path).map_err(|e| CliError::Data(e.to_string()))? {
            for row in rows {
                let mut total = [0.0; HOURS];
                for profile in &row.published {
                    for (slot, v) in total.iter_mut().zip(&profile.kwh) {
                        *slot += v;
                    }
                }
                if let Ok(shape) = normalize_shape(&total) {
                    shapes.push(shape);
                }
            }
        }
    } else {
        let mut reader = csv::Reader::from_path(path)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        let headers = reader.headers().map_err(|e| CliError::Data(e.to_string()))?.clone();
        let hour_i: Vec<usize> = (1..=HOURS)
            .map(|h| {
                headers.iter().position(|x| x == format!("h{h}")).ok_or_else(|| {
                    CliError::Data(format!("{}: missing column `h{h}`", path.display()))
                })
            })
            .collect::<Result<_, _>>()?;
        for (i, record) in reader.records().enumerate() {
            let record = record.map_err(|e| CliError::Data(e.to_string()))?;
            let mut values = [0.0; HOURS];
            for (t, &col) in hour_i.iter().enumerate() {
                values[t] = record.get(col).unwrap_or("").trim().parse().map_err(|_| {
                    CliError::Data(format!("{} row {}: bad h{}", path.display(), i + 2, t + 1))
                })?;
            }
            if let Ok(shape) = normalize_shape(&values) {
                shapes.push(shape);
            }
        }
    }
    if shapes.is_empty() {
        return Err(CliError::Data(format!(
            "{}: no usable (nonzero) load shapes",
            path.display()
        )));
    }
    Ok(shapes)
}
