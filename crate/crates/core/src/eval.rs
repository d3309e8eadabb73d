//! Expanding-window rolling-origin evaluation and sMAPE scoring.

use rayon::prelude::*;
use thiserror::Error;

use crate::domain::{FrequencyProfile, TimeSeries, WindowLayout};
use crate::gates::SurvivorPanel;
use crate::probes::{ProbeError, ProbeModel};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("actual and forecast differ in length ({actual} vs {forecast})")]
    LengthMismatch { actual: usize, forecast: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("probe `{model}` failed at origin {origin}: {source}")]
    ProbeFailure {
        model: String,
        origin: usize,
        source: ProbeError,
    },
    #[error("probe `{model}` returned {got} forecasts at origin {origin}, expected {expected}")]
    ShortForecast {
        model: String,
        origin: usize,
        got: usize,
        expected: usize,
    },
}

/// Single sMAPE term in percent; 0 when both values are 0.
#[inline]
pub fn smape_term(actual: f64, forecast: f64) -> f64 {
    let denom = actual.abs() + forecast.abs();
    if denom == 0.0 {
        0.0
    } else {
        200.0 * ((forecast - actual).abs() / denom)
    }
}

/// `(200 / H) Σ |F − A| / (|A| + |F|)`, in percent.
pub fn smape(actual: &[f64], forecast: &[f64]) -> Result<f64, EvalError> {
    if actual.len() != forecast.len() {
        return Err(EvalError::LengthMismatch {
            actual: actual.len(),
            forecast: forecast.len(),
        });
    }
    if actual.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let sum: f64 = actual
        .iter()
        .zip(forecast)
        .map(|(&a, &f)| smape_term(a, f))
        .sum();
    Ok(sum / actual.len() as f64)
}

/// Per-horizon sMAPE of one (series, probe) pair across all origins.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalRecord {
    pub series_id: String,
    pub model: String,
    pub h: usize,
    /// One value per origin, in origin order.
    pub per_origin_smape: Vec<f64>,
    pub mean_smape: f64,
}

/// Forecasts from every origin of `layout` and scores each horizon. Any
/// origin failure voids the whole record set: no partial averages.
pub fn rolling_eval(
    series: &TimeSeries,
    layout: &WindowLayout,
    probe: &dyn ProbeModel,
    profile: &FrequencyProfile,
) -> Result<Vec<EvalRecord>, EvalError> {
    let values = series.values();
    let h_max = profile.h_max;
    let mut per_h: Vec<Vec<f64>> = vec![Vec::with_capacity(layout.rolls()); h_max];
    for (origin, &train_len) in layout.origins.iter().enumerate() {
        let history = &values[..train_len];
        let forecast = probe
            .fit_and_forecast(history, profile.m, h_max)
            .map_err(|source| EvalError::ProbeFailure {
                model: probe.name().to_string(),
                origin,
                source,
            })?;
        if forecast.len() < h_max {
            return Err(EvalError::ShortForecast {
                model: probe.name().to_string(),
                origin,
                got: forecast.len(),
                expected: h_max,
            });
        }
        if let Some(h) = forecast[..h_max].iter().position(|v| !v.is_finite()) {
            return Err(EvalError::ProbeFailure {
                model: probe.name().to_string(),
                origin,
                source: ProbeError::NonFiniteForecast(h + 1),
            });
        }
        for (h, scores) in per_h.iter_mut().enumerate() {
            scores.push(smape_term(values[train_len + h], forecast[h]));
        }
    }
    Ok(per_h
        .into_iter()
        .enumerate()
        .map(|(i, scores)| EvalRecord {
            series_id: series.id().to_string(),
            model: probe.name().to_string(),
            h: i + 1,
            mean_smape: scores.iter().sum::<f64>() / scores.len() as f64,
            per_origin_smape: scores,
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalFailure {
    pub series_id: String,
    pub model: String,
    pub error: EvalError,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PanelEval {
    /// Sorted by (series id, h).
    pub records: Vec<EvalRecord>,
    pub failures: Vec<EvalFailure>,
}

/// Rolling evaluation of every survivor with one probe, parallel across series.
pub fn evaluate_panel(
    panel: &SurvivorPanel,
    probe: &dyn ProbeModel,
    profile: &FrequencyProfile,
) -> PanelEval {
    let results: Vec<_> = panel
        .survivors
        .par_iter()
        .map(|s| (s.series.id(), rolling_eval(&s.series, &s.layout, probe, profile)))
        .collect();
    let mut out = PanelEval::default();
    for (id, r) in results {
        match r {
            Ok(records) => out.records.extend(records),
            Err(error) => out.failures.push(EvalFailure {
                series_id: id.to_string(),
                model: probe.name().to_string(),
                error,
            }),
        }
    }
    out.records
        .sort_by(|a, b| a.series_id.cmp(&b.series_id).then(a.h.cmp(&b.h)));
    out.failures.sort_by(|a, b| a.series_id.cmp(&b.series_id));
    out
}
