//! Validation of AMI against realized error: per-horizon Spearman ρ with
//! mean/median/pooled aggregation, tercile decision-utility tables,
//! training-length strata and triage labels.

mod spearman;
mod terciles;

use std::collections::{BTreeMap, HashMap};

use log::warn;
use thiserror::Error;

use crate::ami::AmiProfile;
use crate::domain::Frequency;

pub use spearman::{average_ranks, spearman};
pub use terciles::{assign_terciles, Tercile};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticsError {
    #[error("inputs differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("input is constant; rank correlation undefined")]
    DegenerateInput,
    #[error("non-finite input")]
    NonFinite,
}

/// Everything the analytics need about one (series, probe) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesObservation {
    pub series_id: String,
    /// Base training length, the stratification variable.
    pub t_base: usize,
    pub ami: BTreeMap<usize, f64>,
    pub smape: BTreeMap<usize, f64>,
}

impl SeriesObservation {
    /// Horizons where both AMI and a complete mean sMAPE exist.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        self.ami
            .iter()
            .filter_map(|(&h, &a)| self.smape.get(&h).map(|&s| (h, a, s)))
    }
}

/// Joins AMI profiles with `(series_id, h, mean_smape)` rows of one probe.
/// Series with no sMAPE rows are left out.
pub fn join_observations<'a>(
    profiles: &[AmiProfile],
    smape_means: impl IntoIterator<Item = (&'a str, usize, f64)>,
) -> Vec<SeriesObservation> {
    let mut by_id: HashMap<&str, BTreeMap<usize, f64>> = HashMap::new();
    for (id, h, v) in smape_means {
        by_id.entry(id).or_default().insert(h, v);
    }
    let mut out: Vec<SeriesObservation> = profiles
        .iter()
        .filter_map(|p| {
            let smape = by_id.remove(p.series_id.as_str())?;
            Some(SeriesObservation {
                series_id: p.series_id.clone(),
                t_base: p.base_len,
                ami: p.entries.iter().map(|(&h, e)| (h, e.ami_nats)).collect(),
                smape,
            })
        })
        .collect();
    out.sort_by(|a, b| a.series_id.cmp(&b.series_id));
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HorizonRho {
    pub rho: f64,
    pub n_series: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationSummary {
    pub frequency: Frequency,
    pub model: String,
    pub per_h: BTreeMap<usize, HorizonRho>,
    pub mean_rho: f64,
    pub median_rho: f64,
    /// Single ρ over all valid (series, h) pairs; `None` if undefined.
    pub pooled_rho: Option<f64>,
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Spearman ρ between AMI(h) and mean sMAPE(h) across series for each
/// horizon, then averaged across horizons. Horizons with fewer than three
/// valid pairs or constant inputs are skipped.
pub fn validate(
    observations: &[SeriesObservation],
    frequency: Frequency,
    model: &str,
) -> Result<ValidationSummary, AnalyticsError> {
    let mut by_h: BTreeMap<usize, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for obs in observations {
        for (h, a, s) in obs.pairs() {
            let e = by_h.entry(h).or_default();
            e.0.push(a);
            e.1.push(s);
        }
    }

    let mut per_h = BTreeMap::new();
    for (h, (ami, err)) in &by_h {
        match spearman(ami, err) {
            Ok(rho) => {
                per_h.insert(
                    *h,
                    HorizonRho {
                        rho,
                        n_series: ami.len(),
                    },
                );
            }
            Err(e) => warn!("{frequency}/{model}: horizon {h} skipped: {e}"),
        }
    }
    if per_h.is_empty() {
        return Err(AnalyticsError::InsufficientData(format!(
            "{frequency}/{model}: no horizon with a defined correlation"
        )));
    }

    let mut rhos: Vec<f64> = per_h.values().map(|r| r.rho).collect();
    let mean_rho = mean(&rhos);
    let median_rho = median(&mut rhos);

    let (all_ami, all_err): (Vec<f64>, Vec<f64>) =
        by_h.values().flat_map(|(a, e)| a.iter().copied().zip(e.iter().copied())).unzip();
    let pooled_rho = spearman(&all_ami, &all_err).ok();

    Ok(ValidationSummary {
        frequency,
        model: model.to_string(),
        per_h,
        mean_rho,
        median_rho,
        pooled_rho,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TercileRow {
    pub tercile: Tercile,
    pub median_smape: f64,
    pub n_pairs: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TercileTable {
    pub frequency: Frequency,
    pub model: String,
    /// Non-empty terciles in Low → High order.
    pub rows: Vec<TercileRow>,
}

/// Median sMAPE by AMI tercile, terciles drawn over all valid (series, h)
/// pairs of the panel.
pub fn tercile_analysis(
    observations: &[SeriesObservation],
    frequency: Frequency,
    model: &str,
) -> Result<TercileTable, AnalyticsError> {
    let (ami, err): (Vec<f64>, Vec<f64>) = observations
        .iter()
        .flat_map(|o| o.pairs().map(|(_, a, s)| (a, s)))
        .unzip();
    if ami.len() < 3 {
        return Err(AnalyticsError::InsufficientData(format!(
            "{frequency}/{model}: {} valid pairs",
            ami.len()
        )));
    }
    let labels = assign_terciles(&ami);
    let mut groups: BTreeMap<Tercile, Vec<f64>> = BTreeMap::new();
    for (t, s) in labels.into_iter().zip(err) {
        groups.entry(t).or_default().push(s);
    }
    if groups.len() < 3 {
        warn!("{frequency}/{model}: AMI ties collapse the terciles to {} group(s)", groups.len());
    }
    let rows = groups
        .into_iter()
        .map(|(tercile, mut v)| TercileRow {
            tercile,
            n_pairs: v.len(),
            median_smape: median(&mut v),
        })
        .collect();
    Ok(TercileTable {
        frequency,
        model: model.to_string(),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StratumRow {
    /// Low = shortest base windows.
    pub stratum: Tercile,
    pub rho: f64,
    pub n_series: usize,
}

/// Mean per-horizon ρ within terciles of base training length.
pub fn length_strata(
    observations: &[SeriesObservation],
    frequency: Frequency,
    model: &str,
) -> Vec<StratumRow> {
    if observations.is_empty() {
        return Vec::new();
    }
    let lengths: Vec<f64> = observations.iter().map(|o| o.t_base as f64).collect();
    let labels = assign_terciles(&lengths);
    let mut groups: BTreeMap<Tercile, Vec<SeriesObservation>> = BTreeMap::new();
    for (t, o) in labels.into_iter().zip(observations) {
        groups.entry(t).or_default().push(o.clone());
    }
    if groups.len() < 3 {
        warn!("{frequency}/{model}: training lengths collapse the strata to {} group(s)", groups.len());
    }
    groups
        .into_iter()
        .filter_map(|(stratum, obs)| match validate(&obs, frequency, model) {
            Ok(summary) => Some(StratumRow {
                stratum,
                rho: summary.mean_rho,
                n_series: obs.len(),
            }),
            Err(e) => {
                warn!("{frequency}/{model}: stratum {} skipped: {e}", stratum.length_label());
                None
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriageAction {
    InvestInModelling,
    ModelCautiously,
    ManageUncertainty,
}

impl TriageAction {
    pub fn for_tercile(t: Tercile) -> Self {
        match t {
            Tercile::High => TriageAction::InvestInModelling,
            Tercile::Mid => TriageAction::ModelCautiously,
            Tercile::Low => TriageAction::ManageUncertainty,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TriageAction::InvestInModelling => "invest_in_modelling",
            TriageAction::ModelCautiously => "model_cautiously",
            TriageAction::ManageUncertainty => "manage_uncertainty",
        }
    }
}

/// Per-series scalar used for triage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TriageStat {
    /// Mean AMI over the defined horizons.
    #[default]
    Mean,
    /// AMI at one horizon.
    AtHorizon(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriageLabel {
    pub series_id: String,
    pub ami_tercile: Tercile,
    pub action: TriageAction,
}

/// Terciles of the per-series AMI summary within the panel, mapped to
/// actions. Series lacking the requested statistic are skipped.
pub fn triage(profiles: &[AmiProfile], stat: TriageStat) -> Vec<TriageLabel> {
    let scored: Vec<(&str, f64)> = profiles
        .iter()
        .filter_map(|p| {
            let v = match stat {
                TriageStat::Mean => p.mean_ami(),
                TriageStat::AtHorizon(h) => p.get(h),
            };
            v.map(|v| (p.series_id.as_str(), v))
        })
        .collect();
    let values: Vec<f64> = scored.iter().map(|s| s.1).collect();
    let mut out: Vec<TriageLabel> = assign_terciles(&values)
        .into_iter()
        .zip(scored)
        .map(|(t, (id, _))| TriageLabel {
            series_id: id.to_string(),
            ami_tercile: t,
            action: TriageAction::for_tercile(t),
        })
        .collect();
    out.sort_by(|a, b| a.series_id.cmp(&b.series_id));
    out
}
