//! The published record format: one CSV per (date, state, county) under
//! `<root>/<YYYY-MM-DD>/<STATE>/energy_use_<FIPS>_<YYYY-MM-DD>.csv`, one row
//! per household with metadata plus 24 hourly kWh columns for each of the
//! eight published end-uses (`h1` starts at midnight).

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;

use crate::types::{ClimateZone, EndUseProfile, PublishedUse, HOURS};

use super::PipelineError;

/// One simulated household-day ready for publication.
#[derive(Debug, Clone, PartialEq)]
pub struct DayRecord {
    pub hid: String,
    pub county_fips: String,
    pub state: String,
    pub zone: ClimateZone,
    pub size: usize,
    pub income: f64,
    pub floor_area: f64,
    pub date: NaiveDate,
    /// Eight published profiles, indexed by [`PublishedUse::index`], already
    /// quantized to record precision (6 decimals).
    pub published: [EndUseProfile; 8],
    /// Daily hot water drawn, gallons.
    pub gallons: f64,
}

impl DayRecord {
    pub fn total_kwh(&self) -> f64 {
        self.published.iter().map(EndUseProfile::total).sum()
    }
}

fn io_err(path: &Path, source: std::io::Error) -> PipelineError {
    PipelineError::Io { path: path.display().to_string(), source }
}

pub(crate) fn record_header() -> String {
    let mut header = String::from("hid,size,income,floor_area,zone");
    for use_ in PublishedUse::ALL {
        for h in 1..=HOURS {
            header.push_str(&format!(",{}_h{}", use_.as_str(), h));
        }
    }
    header
}

/// Writes records grouped by (date, state, county); rows sorted by hid,
/// energy formatted with 6 decimal places. Returns the sorted manifest of
/// files written.
pub fn write_records(records: &[DayRecord], root: &Path) -> Result<Vec<PathBuf>, PipelineError> {
    let mut groups: BTreeMap<(NaiveDate, String, String), Vec<&DayRecord>> = BTreeMap::new();
    for record in records {
        groups
            .entry((record.date, record.state.clone(), record.county_fips.clone()))
            .or_default()
            .push(record);
    }

    let mut manifest = Vec::new();
    for ((date, state, fips), mut rows) in groups {
        rows.sort_by(|a, b| a.hid.cmp(&b.hid));
        let dir = root.join(date.format("%Y-%m-%d").to_string()).join(&state);
        std::fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
        let path = dir.join(format!("energy_use_{}_{}.csv", fips, date.format("%Y-%m-%d")));
        let file = std::fs::File::create(&path).map_err(|e| io_err(&path, e))?;
        let mut out = std::io::BufWriter::new(file);

        writeln!(out, "{}", record_header()).map_err(|e| io_err(&path, e))?;
        for row in rows {
            write!(
                out,
                "{},{},{},{},{}",
                row.hid, row.size, row.income, row.floor_area, row.zone
            )
            .map_err(|e| io_err(&path, e))?;
            for profile in &row.published {
                for t in 0..HOURS {
                    write!(out, ",{:.6}", profile.kwh[t]).map_err(|e| io_err(&path, e))?;
                }
            }
            writeln!(out).map_err(|e| io_err(&path, e))?;
        }
        out.flush().map_err(|e| io_err(&path, e))?;
        manifest.push(path);
    }
    manifest.sort();
    Ok(manifest)
}

/// A record row read back from a published file.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordRow {
    pub hid: String,
    pub size: usize,
    pub income: f64,
    pub floor_area: f64,
    pub zone: ClimateZone,
    pub published: [EndUseProfile; 8],
}

/// Reads one record file.
pub fn read_record_file(path: &Path) -> Result<Vec<RecordRow>, PipelineError> {
    let file = std::fs::File::open(path).map_err(|e| io_err(path, e))?;
    let mut lines = std::io::BufReader::new(file).lines();
    let header = lines
        .next()
        .transpose()
        .map_err(|e| io_err(path, e))?
        .ok_or_else(|| PipelineError::Config(format!("{}: empty record file", path.display())))?;
    if header != record_header() {
        return Err(PipelineError::Config(format!(
            "{}: unexpected record header",
            path.display()
        )));
    }

    let mut rows = Vec::new();
    for line in lines {
        let line = line.map_err(|e| io_err(path, e))?;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let expected = 5 + 8 * HOURS;
        if fields.len() != expected {
            return Err(PipelineError::Config(format!(
                "{}: expected {} columns, found {}",
                path.display(),
                expected,
                fields.len()
            )));
        }
        let parse_f64 = |s: &str| -> Result<f64, PipelineError> {
            s.parse().map_err(|_| {
                PipelineError::Config(format!("{}: bad number `{s}`", path.display()))
            })
        };
        let mut published = [EndUseProfile::zero(); 8];
        for (u, profile) in published.iter_mut().enumerate() {
            for t in 0..HOURS {
                profile.kwh[t] = parse_f64(fields[5 + u * HOURS + t])?;
            }
        }
        rows.push(RecordRow {
            hid: fields[0].to_string(),
            size: fields[1].parse().map_err(|_| {
                PipelineError::Config(format!("{}: bad size `{}`", path.display(), fields[1]))
            })?,
            income: parse_f64(fields[2])?,
            floor_area: parse_f64(fields[3])?,
            zone: fields[4].parse().map_err(|_| {
                PipelineError::Config(format!("{}: bad zone `{}`", path.display(), fields[4]))
            })?,
            published,
        });
    }
    Ok(rows)
}

/// Walks a record tree and reads every file, sorted by path.
pub fn read_records_dir(root: &Path) -> Result<Vec<(PathBuf, Vec<RecordRow>)>, PipelineError> {
    let mut paths = Vec::new();
    collect_csv_paths(root, &mut paths)?;
    paths.sort();
    let mut out = Vec::with_capacity(paths.len());
    for path in paths {
        let rows = read_record_file(&path)?;
        out.push((path, rows));
    }
    Ok(out)
}

fn collect_csv_paths(dir: &Path, out: &mut Vec<PathBuf>) -> Result<(), PipelineError> {
    let entries = std::fs::read_dir(dir).map_err(|e| io_err(dir, e))?;
    for entry in entries {
        let entry = entry.map_err(|e| io_err(dir, e))?;
        let path = entry.path();
        if path.is_dir() {
            collect_csv_paths(&path, out)?;
        } else if path.extension().is_some_and(|ext| ext == "csv") {
            out.push(path);
        }
    }
    Ok(())
}
