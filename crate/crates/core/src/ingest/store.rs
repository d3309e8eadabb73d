use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::ami::AmiProfile;
use crate::analytics::{StratumRow, TercileTable, TriageLabel, ValidationSummary};
use crate::domain::Frequency;
use crate::eval::EvalRecord;
use crate::gates::{GateReport, SurvivorPanel};

use super::Reject;

pub const AMI_PROFILES: &str = "ami_profiles.csv";
pub const SURVIVORS: &str = "survivors.csv";
pub const REJECTS: &str = "rejects.csv";
pub const SMAPE: &str = "smape.csv";
pub const SMAPE_MEAN: &str = "smape_mean.csv";
pub const VALIDATION: &str = "validation.csv";
pub const VALIDATION_SUMMARY: &str = "validation_summary.csv";
pub const TERCILES: &str = "terciles.csv";
pub const STRATA: &str = "strata.csv";
pub const HEATMAP: &str = "heatmap.csv";
pub const TRIAGE: &str = "triage.csv";

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("missing input {0}")]
    Missing(PathBuf),
}

/// Writes result tables into one output directory. Every write replaces the
/// file; rows are emitted in the order given, which callers keep sorted.
#[derive(Debug, Clone)]
pub struct ResultStore {
    dir: PathBuf,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl ResultStore {
    pub fn create(dir: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|source| StoreError::Io {
            path: dir.clone(),
            source,
        })?;
        Ok(ResultStore { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn write_table<I>(&self, name: &str, header: &[&str], rows: I) -> Result<PathBuf, StoreError>
    where
        I: IntoIterator<Item = Vec<String>>,
    {
        let path = self.path(name);
        let io_err = |e: csv::Error, path: &Path| StoreError::Io {
            path: path.to_path_buf(),
            source: match e.into_kind() {
                csv::ErrorKind::Io(e) => e,
                other => io::Error::other(format!("{other:?}")),
            },
        };
        let mut w = csv::Writer::from_path(&path).map_err(|e| io_err(e, &path))?;
        w.write_record(header).map_err(|e| io_err(e, &path))?;
        for row in rows {
            w.write_record(&row).map_err(|e| io_err(e, &path))?;
        }
        w.flush().map_err(|source| StoreError::Io {
            path: path.clone(),
            source,
        })?;
        Ok(path)
    }

    pub fn write_ami_profiles(&self, frequency: Frequency, profiles: &[AmiProfile]) -> Result<PathBuf, StoreError> {
        let rows = profiles.iter().flat_map(|p| {
            p.entries.iter().map(move |(h, e)| {
                vec![
                    p.series_id.clone(),
                    frequency.to_string(),
                    h.to_string(),
                    e.n_eff.to_string(),
                    e.ami_nats.to_string(),
                ]
            })
        });
        self.write_table(AMI_PROFILES, &["series_id", "frequency", "h", "n_eff", "ami_nats"], rows)
    }

    pub fn write_survivors(&self, panel: &SurvivorPanel) -> Result<PathBuf, StoreError> {
        let rows = panel.survivors.iter().map(|s| {
            vec![
                s.series.id().to_string(),
                panel.frequency.to_string(),
                s.layout.t_base.to_string(),
                s.scale0.to_string(),
            ]
        });
        self.write_table(SURVIVORS, &["series_id", "frequency", "t_base", "scale0"], rows)
    }

    pub fn write_rejects(&self, rejects: &[Reject]) -> Result<PathBuf, StoreError> {
        let rows = rejects
            .iter()
            .map(|r| vec![r.series_id.clone(), r.gate.clone(), r.reason.clone()]);
        self.write_table(REJECTS, &["series_id", "gate", "reason"], rows)
    }

    pub fn write_smape(&self, frequency: Frequency, records: &[EvalRecord]) -> Result<PathBuf, StoreError> {
        let rows = records.iter().flat_map(|r| {
            r.per_origin_smape.iter().enumerate().map(move |(origin, v)| {
                vec![
                    r.series_id.clone(),
                    frequency.to_string(),
                    r.model.clone(),
                    r.h.to_string(),
                    origin.to_string(),
                    v.to_string(),
                ]
            })
        });
        self.write_table(SMAPE, &["series_id", "frequency", "model", "h", "origin", "smape_pct"], rows)
    }

    pub fn write_smape_mean(&self, frequency: Frequency, records: &[EvalRecord]) -> Result<PathBuf, StoreError> {
        let rows = records.iter().map(|r| {
            vec![
                r.series_id.clone(),
                frequency.to_string(),
                r.model.clone(),
                r.h.to_string(),
                r.mean_smape.to_string(),
            ]
        });
        self.write_table(SMAPE_MEAN, &["series_id", "frequency", "model", "h", "mean_smape_pct"], rows)
    }

    pub fn write_validation(&self, summaries: &[ValidationSummary]) -> Result<PathBuf, StoreError> {
        let rows = summaries.iter().flat_map(|s| {
            s.per_h.iter().map(move |(h, r)| {
                vec![
                    s.frequency.to_string(),
                    s.model.clone(),
                    h.to_string(),
                    r.rho.to_string(),
                    r.n_series.to_string(),
                ]
            })
        });
        self.write_table(VALIDATION, &["frequency", "model", "h", "rho", "n_series"], rows)
    }

    pub fn write_validation_summary(&self, summaries: &[ValidationSummary]) -> Result<PathBuf, StoreError> {
        let rows = summaries.iter().map(|s| {
            vec![
                s.frequency.to_string(),
                s.model.clone(),
                s.mean_rho.to_string(),
                s.median_rho.to_string(),
                opt(s.pooled_rho),
            ]
        });
        self.write_table(
            VALIDATION_SUMMARY,
            &["frequency", "model", "mean_rho", "median_rho", "pooled_rho"],
            rows,
        )
    }

    pub fn write_heatmap(&self, summaries: &[ValidationSummary]) -> Result<PathBuf, StoreError> {
        let rows = summaries.iter().flat_map(|s| {
            s.per_h
                .iter()
                .map(move |(h, r)| vec![s.frequency.to_string(), s.model.clone(), h.to_string(), r.rho.to_string()])
        });
        self.write_table(HEATMAP, &["frequency", "model", "h", "rho"], rows)
    }

    pub fn write_terciles(&self, tables: &[TercileTable]) -> Result<PathBuf, StoreError> {
        let rows = tables.iter().flat_map(|t| {
            t.rows.iter().map(move |r| {
                vec![
                    t.frequency.to_string(),
                    t.model.clone(),
                    r.tercile.to_string(),
                    r.median_smape.to_string(),
                ]
            })
        });
        self.write_table(TERCILES, &["frequency", "model", "tercile", "median_smape_pct"], rows)
    }

    pub fn write_strata(&self, frequency: Frequency, strata: &[(String, Vec<StratumRow>)]) -> Result<PathBuf, StoreError> {
        let rows = strata.iter().flat_map(|(model, rows)| {
            rows.iter().map(move |r| {
                vec![
                    frequency.to_string(),
                    model.clone(),
                    r.stratum.length_label().to_string(),
                    r.rho.to_string(),
                ]
            })
        });
        self.write_table(STRATA, &["frequency", "model", "tercile_by_length", "rho"], rows)
    }

    pub fn write_triage(&self, frequency: Frequency, labels: &[TriageLabel]) -> Result<PathBuf, StoreError> {
        let rows = labels.iter().map(|l| {
            vec![
                l.series_id.clone(),
                frequency.to_string(),
                l.ami_tercile.to_string(),
                l.action.as_str().to_string(),
            ]
        });
        self.write_table(TRIAGE, &["series_id", "frequency", "tercile", "action"], rows)
    }
}

/// Rejects for every gate failure, in report order.
pub fn gate_rejects(reports: &[GateReport]) -> Vec<Reject> {
    reports
        .iter()
        .filter_map(|r| {
            let gate = r.failed_gate?;
            Some(Reject {
                series_id: r.series_id.clone(),
                gate: gate.as_str().to_string(),
                reason: r.reason.clone().unwrap_or_default(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurvivorRow {
    pub series_id: String,
    pub frequency: Frequency,
    pub t_base: usize,
    pub scale0: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmiRow {
    pub series_id: String,
    pub frequency: Frequency,
    pub h: usize,
    pub n_eff: usize,
    pub ami_nats: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmapeMeanRow {
    pub series_id: String,
    pub frequency: Frequency,
    pub model: String,
    pub h: usize,
    pub mean_smape: f64,
}

fn read_table<T>(
    path: &Path,
    header: &[&str],
    mut parse: impl FnMut(&csv::StringRecord) -> Result<T, String>,
) -> Result<Vec<T>, StoreError> {
    if !path.exists() {
        return Err(StoreError::Missing(path.to_path_buf()));
    }
    let parse_err = |message: String| StoreError::Parse {
        path: path.to_path_buf(),
        message,
    };
    let mut rdr = csv::Reader::from_path(path).map_err(|e| parse_err(e.to_string()))?;
    let found = rdr.headers().map_err(|e| parse_err(e.to_string()))?.clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(parse_err(format!("unexpected header {:?}, expected {:?}", found, header)));
    }
    rdr.records()
        .map(|r| {
            let r = r.map_err(|e| parse_err(e.to_string()))?;
            let line = r.position().map_or(0, |p| p.line());
            parse(&r).map_err(|m| parse_err(format!("line {line}: {m}")))
        })
        .collect()
}

fn field<T: std::str::FromStr>(r: &csv::StringRecord, i: usize, name: &str) -> Result<T, String> {
    let cell = r.get(i).ok_or_else(|| format!("missing column {name}"))?;
    cell.parse().map_err(|_| format!("invalid {name} `{cell}`"))
}

pub fn read_survivors(path: &Path) -> Result<Vec<SurvivorRow>, StoreError> {
    read_table(path, &["series_id", "frequency", "t_base", "scale0"], |r| {
        Ok(SurvivorRow {
            series_id: field(r, 0, "series_id")?,
            frequency: field(r, 1, "frequency")?,
            t_base: field(r, 2, "t_base")?,
            scale0: field(r, 3, "scale0")?,
        })
    })
}

pub fn read_ami_profiles(path: &Path) -> Result<Vec<AmiRow>, StoreError> {
    read_table(path, &["series_id", "frequency", "h", "n_eff", "ami_nats"], |r| {
        Ok(AmiRow {
            series_id: field(r, 0, "series_id")?,
            frequency: field(r, 1, "frequency")?,
            h: field(r, 2, "h")?,
            n_eff: field(r, 3, "n_eff")?,
            ami_nats: field(r, 4, "ami_nats")?,
        })
    })
}

pub fn read_smape_means(path: &Path) -> Result<Vec<SmapeMeanRow>, StoreError> {
    read_table(path, &["series_id", "frequency", "model", "h", "mean_smape_pct"], |r| {
        Ok(SmapeMeanRow {
            series_id: field(r, 0, "series_id")?,
            frequency: field(r, 1, "frequency")?,
            model: field(r, 2, "model")?,
            h: field(r, 3, "h")?,
            mean_smape: field(r, 4, "mean_smape_pct")?,
        })
    })
}

pub fn read_rejects(path: &Path) -> Result<Vec<Reject>, StoreError> {
    read_table(path, &["series_id", "gate", "reason"], |r| {
        Ok(Reject {
            series_id: field(r, 0, "series_id")?,
            gate: field(r, 1, "gate")?,
            reason: field(r, 2, "reason")?,
        })
    })
}

/// Writes a panel in long format (`series_id,step,value`).
pub fn write_long_panel(path: &Path, series: &[crate::domain::TimeSeries]) -> Result<(), StoreError> {
    let io_err = |e: csv::Error| StoreError::Io {
        path: path.to_path_buf(),
        source: io::Error::other(e.to_string()),
    };
    let mut w = csv::Writer::from_path(path).map_err(io_err)?;
    w.write_record(["series_id", "step", "value"]).map_err(io_err)?;
    for s in series {
        for (i, v) in s.values().iter().enumerate() {
            w.write_record([s.id(), &(i + 1).to_string(), &v.to_string()])
                .map_err(io_err)?;
        }
    }
    w.flush().map_err(|source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    })
}
