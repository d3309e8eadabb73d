//! Panel loading from M4-style wide CSV and long `(series_id, step, value)`
//! CSV, plus the CSV result store.

mod store;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs::File;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use log::warn;
use thiserror::Error;

use crate::domain::{Frequency, TimeSeries};

pub use store::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PanelFormat {
    M4Wide,
    Long,
}

impl PanelFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            PanelFormat::M4Wide => "m4",
            PanelFormat::Long => "long",
        }
    }
}

impl fmt::Display for PanelFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PanelFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "m4" | "m4wide" | "wide" => Ok(PanelFormat::M4Wide),
            "long" => Ok(PanelFormat::Long),
            other => Err(format!("unknown panel format `{other}` (expected m4 or long)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PanelSource {
    pub path: PathBuf,
    pub format: PanelFormat,
    pub frequency: Frequency,
}

/// A series excluded before or during gating, as written to `rejects.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct Reject {
    pub series_id: String,
    /// `ingest` for parse failures, otherwise the failed gate.
    pub gate: String,
    pub reason: String,
}

impl Reject {
    fn ingest(id: &str, reason: impl Into<String>) -> Self {
        Reject {
            series_id: id.to_string(),
            gate: "ingest".to_string(),
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LoadedPanel {
    /// Sorted by id.
    pub series: Vec<TimeSeries>,
    pub rejects: Vec<Reject>,
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: line {line}: {message}")]
    Format {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error("{0}: no usable series")]
    EmptyPanel(PathBuf),
}

fn csv_error(path: &Path, e: csv::Error) -> IngestError {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(source) => IngestError::File {
            path: path.to_path_buf(),
            source,
        },
        kind => IngestError::Format {
            path: path.to_path_buf(),
            line,
            message: format!("{kind:?}"),
        },
    }
}

fn parse_value(cell: &str) -> Result<f64, String> {
    let v: f64 = cell
        .trim()
        .parse()
        .map_err(|_| format!("non-numeric value `{cell}`"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("non-finite value `{cell}`"))
    }
}

fn looks_numeric(cell: &str) -> bool {
    cell.trim().parse::<f64>().is_ok()
}

pub fn load_panel(source: &PanelSource) -> Result<LoadedPanel, IngestError> {
    let file = File::open(&source.path).map_err(|e| IngestError::File {
        path: source.path.clone(),
        source: e,
    })?;
    let panel = match source.format {
        PanelFormat::M4Wide => parse_m4_wide(file, source.frequency, &source.path)?,
        PanelFormat::Long => parse_long(file, source.frequency, &source.path)?,
    };
    if panel.series.is_empty() {
        return Err(IngestError::EmptyPanel(source.path.clone()));
    }
    for r in &panel.rejects {
        warn!("rejected series {}: {}", r.series_id, r.reason);
    }
    Ok(panel)
}

/// Loads a training file and appends the matching test-file observations to
/// each series. Test rows without a training series are ignored with a
/// warning.
pub fn load_panel_with_test(train: &PanelSource, test: &Path) -> Result<LoadedPanel, IngestError> {
    let base = load_panel(train)?;
    let tail = load_panel(&PanelSource {
        path: test.to_path_buf(),
        ..train.clone()
    })?;
    let mut tails: HashMap<&str, &TimeSeries> = tail.series.iter().map(|s| (s.id(), s)).collect();
    let series = base
        .series
        .iter()
        .map(|s| match tails.remove(s.id()) {
            Some(t) => {
                let mut values = s.values().to_vec();
                values.extend_from_slice(t.values());
                TimeSeries::new(s.id(), values, s.frequency()).expect("finite non-empty values")
            }
            None => s.clone(),
        })
        .collect();
    let mut orphans: Vec<&str> = tails.into_keys().collect();
    orphans.sort_unstable();
    for id in orphans {
        warn!("test series {id} has no training series; ignored");
    }
    let mut rejects = base.rejects;
    rejects.extend(tail.rejects);
    Ok(LoadedPanel { series, rejects })
}

fn finish(
    parsed: BTreeMap<String, Result<Vec<f64>, String>>,
    mut rejects: Vec<Reject>,
    frequency: Frequency,
) -> LoadedPanel {
    let mut series = Vec::with_capacity(parsed.len());
    for (id, r) in parsed {
        match r.and_then(|v| TimeSeries::new(id.clone(), v, frequency).map_err(|e| e.to_string())) {
            Ok(s) => series.push(s),
            Err(reason) => rejects.push(Reject::ingest(&id, reason)),
        }
    }
    rejects.sort_by(|a, b| a.series_id.cmp(&b.series_id));
    LoadedPanel { series, rejects }
}

/// One series per row: id, then observations. Empty cells are skipped. A
/// first row whose second cell is non-numeric is taken as a header.
pub fn parse_m4_wide<R: Read>(reader: R, frequency: Frequency, path: &Path) -> Result<LoadedPanel, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut parsed: BTreeMap<String, Result<Vec<f64>, String>> = BTreeMap::new();
    let mut rejects = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row.map_err(|e| csv_error(path, e))?;
        let line = row.position().map_or(i as u64 + 1, |p| p.line());
        if i == 0 && row.get(1).is_some_and(|c| !c.trim().is_empty() && !looks_numeric(c)) {
            continue;
        }
        let id = row.get(0).unwrap_or("").trim();
        if id.is_empty() {
            if row.iter().all(|c| c.trim().is_empty()) {
                continue;
            }
            return Err(IngestError::Format {
                path: path.to_path_buf(),
                line,
                message: "row has no series id".into(),
            });
        }
        let values: Result<Vec<f64>, String> = row
            .iter()
            .skip(1)
            .filter(|c| !c.trim().is_empty())
            .map(parse_value)
            .collect();
        if parsed.contains_key(id) {
            rejects.push(Reject::ingest(id, format!("duplicate id at line {line}")));
            continue;
        }
        parsed.insert(id.to_string(), values);
    }
    Ok(finish(parsed, rejects, frequency))
}

/// Rows of `(series_id, step, value)` with steps 1..=n per series in any
/// row order. A first row with a non-integer step is taken as a header.
pub fn parse_long<R: Read>(reader: R, frequency: Frequency, path: &Path) -> Result<LoadedPanel, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut cells: BTreeMap<String, Result<Vec<(usize, f64)>, String>> = BTreeMap::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row.map_err(|e| csv_error(path, e))?;
        let line = row.position().map_or(i as u64 + 1, |p| p.line());
        if row.iter().all(|c| c.trim().is_empty()) {
            continue;
        }
        if row.len() != 3 {
            return Err(IngestError::Format {
                path: path.to_path_buf(),
                line,
                message: format!("expected 3 columns (series_id,step,value), found {}", row.len()),
            });
        }
        if i == 0 && row[1].trim().parse::<usize>().is_err() {
            continue;
        }
        let id = row[0].trim();
        let entry = cells.entry(id.to_string()).or_insert_with(|| Ok(Vec::new()));
        let Ok(points) = entry else { continue };
        let step = row[1]
            .trim()
            .parse::<usize>()
            .map_err(|_| format!("invalid step `{}` at line {line}", &row[1]));
        match step.and_then(|s| parse_value(&row[2]).map(|v| (s, v))) {
            Ok(p) => points.push(p),
            Err(reason) => *entry = Err(reason),
        }
    }
    let parsed = cells
        .into_iter()
        .map(|(id, r)| {
            let values = r.and_then(|mut points| {
                points.sort_by_key(|p| p.0);
                for (expected, p) in (1..).zip(&points) {
                    if p.0 != expected {
                        return Err(format!("steps not dense from 1: expected {expected}, found {}", p.0));
                    }
                }
                Ok(points.into_iter().map(|p| p.1).collect())
            });
            (id, values)
        })
        .collect();
    Ok(finish(parsed, Vec::new(), frequency))
}
