use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Path, PathBuf};

use forecastability::ami::{ami_profile, AmiEntry, AmiProfile};
use forecastability::analytics::{
    join_observations, length_strata, tercile_analysis, triage, validate, SeriesObservation, StratumRow, TercileTable,
    ValidationSummary,
};
use forecastability::domain::{layout, TimeSeries, WindowLayout};
use forecastability::eval::{rolling_eval, EvalRecord};
use forecastability::gates::run_gates;
use forecastability::ingest::{
    gate_rejects, load_panel, load_panel_with_test, read_ami_profiles, read_rejects, read_smape_means,
    read_survivors, AmiRow, IngestError, PanelSource, Reject, ResultStore, SmapeMeanRow, StoreError, SurvivorRow,
    AMI_PROFILES, REJECTS, SMAPE_MEAN, SURVIVORS,
};
use forecastability::probes::probe_by_name;
use log::{info, warn};
use rayon::prelude::*;
use thiserror::Error;

use crate::args::PipelineArgs;
use crate::report;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Whether every series/model made it through a stage. Rejected series do
/// not count as failures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Outcome {
    Complete,
    Partial,
}

fn require<T>(
    store: &ResultStore,
    name: &str,
    producer: &str,
    read: impl FnOnce(&Path) -> Result<T, StoreError>,
) -> Result<T, CliError> {
    match read(&store.path(name)) {
        Err(StoreError::Missing(path)) => Err(CliError::Usage(format!(
            "missing {}; run `{producer}` first",
            path.display()
        ))),
        other => Ok(other?),
    }
}

fn load_input(args: &PipelineArgs) -> Result<Vec<TimeSeries>, CliError> {
    let (panel, _) = load_input_with_rejects(args)?;
    Ok(panel)
}

fn load_input_with_rejects(args: &PipelineArgs) -> Result<(Vec<TimeSeries>, Vec<Reject>), CliError> {
    let path = args
        .input
        .clone()
        .ok_or_else(|| CliError::Usage("--input is required for this command".into()))?;
    let source = PanelSource {
        path,
        format: args.format.into(),
        frequency: args.frequency,
    };
    let loaded = match &args.with_test {
        Some(test) => load_panel_with_test(&source, test)?,
        None => load_panel(&source)?,
    };
    info!("loaded {} series from {}", loaded.series.len(), source.path.display());
    Ok((loaded.series, loaded.rejects))
}

pub fn gates(args: &PipelineArgs, store: &ResultStore) -> Result<Outcome, CliError> {
    let (series, mut rejects) = load_input_with_rejects(args)?;
    let total = series.len() + rejects.len();
    let (panel, reports) = run_gates(&series, &args.frequency.profile(), &args.run_config());
    rejects.extend(gate_rejects(&reports));
    rejects.sort_by(|a, b| a.series_id.cmp(&b.series_id));
    store.write_survivors(&panel)?;
    store.write_rejects(&rejects)?;
    info!(
        "{}: {} of {} series survive the gates (scale floor {})",
        args.frequency,
        panel.survivors.len(),
        total,
        panel.scale_floor.map_or("undefined".to_string(), |f| f.to_string())
    );
    Ok(Outcome::Complete)
}

struct Located {
    series: TimeSeries,
    layout: WindowLayout,
}

/// Survivors from `survivors.csv`, matched against the input panel and the
/// current window configuration.
fn located_survivors(args: &PipelineArgs, store: &ResultStore) -> Result<Vec<Located>, CliError> {
    let rows = require(store, SURVIVORS, "gates", read_survivors)?;
    let mut by_id: HashMap<String, TimeSeries> = load_input(args)?
        .into_iter()
        .map(|s| (s.id().to_string(), s))
        .collect();
    let profile = args.frequency.profile();
    let config = args.run_config();
    rows.into_iter()
        .map(|row| {
            if row.frequency != args.frequency {
                return Err(CliError::Usage(format!(
                    "{} lists {} as {}, but --frequency is {}",
                    SURVIVORS, row.series_id, row.frequency, args.frequency
                )));
            }
            let series = by_id.remove(&row.series_id).ok_or_else(|| {
                CliError::Usage(format!("survivor {} is not in the input panel", row.series_id))
            })?;
            let layout = layout(series.len(), &profile, &config)
                .ok()
                .filter(|l| l.t_base == row.t_base)
                .ok_or_else(|| {
                    CliError::Usage(format!(
                        "{SURVIVORS} was produced with a different window configuration (series {})",
                        row.series_id
                    ))
                })?;
            Ok(Located { series, layout })
        })
        .collect()
}

pub fn ami(args: &PipelineArgs, store: &ResultStore) -> Result<Outcome, CliError> {
    let survivors = located_survivors(args, store)?;
    let profile = args.frequency.profile();
    let config = args.run_config();
    let results: Vec<_> = survivors
        .par_iter()
        .map(|s| ami_profile(&s.series, &s.layout, &profile, &config).map_err(|e| (s.series.id(), e)))
        .collect();
    let mut outcome = Outcome::Complete;
    let mut profiles = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(p) => profiles.push(p),
            Err((id, e)) => {
                warn!("AMI failed for survivor {id}: {e}");
                outcome = Outcome::Partial;
            }
        }
    }
    store.write_ami_profiles(args.frequency, &profiles)?;
    info!("{}: AMI profiles for {} series", args.frequency, profiles.len());
    Ok(outcome)
}

pub fn evaluate(args: &PipelineArgs, store: &ResultStore) -> Result<Outcome, CliError> {
    let probes = args
        .models
        .iter()
        .map(|name| probe_by_name(name).ok_or_else(|| CliError::Usage(format!("unknown model `{name}`"))))
        .collect::<Result<Vec<_>, _>>()?;
    let survivors = located_survivors(args, store)?;
    let profile = args.frequency.profile();
    let mut outcome = Outcome::Complete;
    let mut records: Vec<EvalRecord> = Vec::new();
    for probe in &probes {
        info!("{}: evaluating {} on {} series", args.frequency, probe.name(), survivors.len());
        let results: Vec<_> = survivors
            .par_iter()
            .map(|s| (s.series.id(), rolling_eval(&s.series, &s.layout, probe.as_ref(), &profile)))
            .collect();
        for (id, r) in results {
            match r {
                Ok(recs) => records.extend(recs),
                Err(e) => {
                    warn!("{id}: {e}; records dropped");
                    outcome = Outcome::Partial;
                }
            }
        }
    }
    records.sort_by(|a, b| {
        (a.series_id.as_str(), a.model.as_str(), a.h).cmp(&(b.series_id.as_str(), b.model.as_str(), b.h))
    });
    store.write_smape(args.frequency, &records)?;
    store.write_smape_mean(args.frequency, &records)?;
    Ok(outcome)
}

/// Profiles rebuilt from `ami_profiles.csv`; the base length follows from
/// `n_eff = t_base − h`.
fn read_profiles(args: &PipelineArgs, store: &ResultStore) -> Result<Vec<AmiProfile>, CliError> {
    let rows: Vec<AmiRow> = require(store, AMI_PROFILES, "ami", read_ami_profiles)?;
    let mut by_id: BTreeMap<String, AmiProfile> = BTreeMap::new();
    for row in rows {
        if row.frequency != args.frequency {
            return Err(CliError::Usage(format!(
                "{AMI_PROFILES} holds {} rows, but --frequency is {}",
                row.frequency, args.frequency
            )));
        }
        let p = by_id.entry(row.series_id.clone()).or_insert_with(|| AmiProfile {
            series_id: row.series_id.clone(),
            entries: BTreeMap::new(),
            k_used: args.k,
            base_len: row.n_eff + row.h,
        });
        p.entries.insert(
            row.h,
            AmiEntry {
                ami_nats: row.ami_nats,
                n_eff: row.n_eff,
            },
        );
    }
    Ok(by_id.into_values().collect())
}

/// Observations per model, models in name order.
fn observations(args: &PipelineArgs, store: &ResultStore) -> Result<Vec<(String, Vec<SeriesObservation>)>, CliError> {
    let smape: Vec<SmapeMeanRow> = require(store, SMAPE_MEAN, "evaluate", read_smape_means)?;
    let profiles = read_profiles(args, store)?;
    let models: BTreeSet<&str> = smape.iter().map(|r| r.model.as_str()).collect();
    Ok(models
        .into_iter()
        .map(|model| {
            let rows = smape
                .iter()
                .filter(|r| r.model == model)
                .map(|r| (r.series_id.as_str(), r.h, r.mean_smape));
            (model.to_string(), join_observations(&profiles, rows))
        })
        .collect())
}

fn summaries(
    args: &PipelineArgs,
    per_model: &[(String, Vec<SeriesObservation>)],
) -> (Vec<ValidationSummary>, Outcome) {
    let mut outcome = Outcome::Complete;
    let mut out = Vec::new();
    for (model, obs) in per_model {
        match validate(obs, args.frequency, model) {
            Ok(s) => out.push(s),
            Err(e) => {
                warn!("{}/{model}: {e}", args.frequency);
                outcome = Outcome::Partial;
            }
        }
    }
    (out, outcome)
}

pub fn validate_stage(args: &PipelineArgs, store: &ResultStore) -> Result<Outcome, CliError> {
    let per_model = observations(args, store)?;
    let (summaries, outcome) = summaries(args, &per_model);
    store.write_validation(&summaries)?;
    store.write_validation_summary(&summaries)?;
    store.write_heatmap(&summaries)?;
    for s in &summaries {
        info!(
            "{}/{}: mean rho {:.3}, median rho {:.3}",
            s.frequency, s.model, s.mean_rho, s.median_rho
        );
    }
    Ok(outcome)
}

pub fn triage_stage(args: &PipelineArgs, store: &ResultStore) -> Result<Outcome, CliError> {
    let profiles = read_profiles(args, store)?;
    let labels = triage(&profiles, args.triage_stat());
    if labels.len() < profiles.len() {
        warn!(
            "{} series lack AMI at the requested horizon and were not labelled",
            profiles.len() - labels.len()
        );
    }
    store.write_triage(args.frequency, &labels)?;
    Ok(Outcome::Complete)
}

pub fn report_stage(args: &PipelineArgs, store: &ResultStore) -> Result<Outcome, CliError> {
    let per_model = observations(args, store)?;
    let survivors: Vec<SurvivorRow> = require(store, SURVIVORS, "gates", read_survivors)?;
    let rejects: Vec<Reject> = require(store, REJECTS, "gates", read_rejects)?;
    let profiles = read_profiles(args, store)?;

    let mut outcome = Outcome::Complete;
    let mut terciles: Vec<TercileTable> = Vec::new();
    let mut strata: Vec<(String, Vec<StratumRow>)> = Vec::new();
    for (model, obs) in &per_model {
        match tercile_analysis(obs, args.frequency, model) {
            Ok(t) => terciles.push(t),
            Err(e) => {
                warn!("{}/{model}: terciles: {e}", args.frequency);
                outcome = Outcome::Partial;
            }
        }
        strata.push((model.clone(), length_strata(obs, args.frequency, model)));
    }
    let (summaries, validated) = summaries(args, &per_model);
    store.write_terciles(&terciles)?;
    store.write_strata(args.frequency, &strata)?;

    let labels = triage(&profiles, args.triage_stat());
    let text = report::render(&report::ReportInput {
        frequency: args.frequency,
        survivors: survivors.len(),
        rejects: &rejects,
        summaries: &summaries,
        terciles: &terciles,
        strata: &strata,
        triage: &labels,
    });
    let path = store.path(report::REPORT);
    std::fs::write(&path, text).map_err(|source| CliError::Io { path, source })?;
    Ok(outcome.max(validated))
}

pub fn run_all(args: &PipelineArgs, store: &ResultStore) -> Result<Outcome, CliError> {
    type Stage = fn(&PipelineArgs, &ResultStore) -> Result<Outcome, CliError>;
    let stages: [(&str, Stage); 6] = [
        ("gates", gates),
        ("ami", ami),
        ("evaluate", evaluate),
        ("validate", validate_stage),
        ("triage", triage_stage),
        ("report", report_stage),
    ];
    let mut outcome = Outcome::Complete;
    for (name, stage) in stages {
        info!("stage {name}");
        outcome = outcome.max(stage(args, store)?);
    }
    Ok(outcome)
}
