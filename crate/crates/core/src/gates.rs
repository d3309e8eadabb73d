//! Feasibility gates applied once per series, in order:
//!
//! 1. rolling-origin feasibility (the series hosts every evaluation window),
//! 2. a defined scale proxy on the base window,
//! 3. the scale proxy is not below the per-frequency floor,
//! 4. AMI is estimable at the maximum horizon.
//!
//! The first failing gate is recorded. AMI profiles of survivors are kept so
//! that nothing downstream re-estimates them.

use rayon::prelude::*;
use thiserror::Error;

use crate::ami::{ami_profile, AmiProfile};
use crate::domain::{
    layout, Frequency, FrequencyProfile, QuantileMethod, RunConfig, TimeSeries, WindowLayout,
};

#[derive(Debug, Error, PartialEq)]
pub enum GateError {
    #[error("scale proxy undefined: {0}")]
    ScaleUndefined(String),
    #[error("empty input")]
    EmptyInput,
    #[error("quantile must lie in (0, 1), got {0}")]
    InvalidQuantile(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gate {
    RollingFeasibility,
    ScaleDefined,
    ScaleFloor,
    AmiAtHmax,
}

impl Gate {
    pub fn as_str(self) -> &'static str {
        match self {
            Gate::RollingFeasibility => "rolling_feasibility",
            Gate::ScaleDefined => "scale_defined",
            Gate::ScaleFloor => "scale_floor",
            Gate::AmiAtHmax => "ami_at_hmax",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateReport {
    pub series_id: String,
    pub passed: bool,
    pub failed_gate: Option<Gate>,
    pub scale0: Option<f64>,
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Survivor {
    pub series: TimeSeries,
    pub layout: WindowLayout,
    pub ami: AmiProfile,
    pub scale0: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurvivorPanel {
    pub frequency: Frequency,
    /// Survivors sorted by series id.
    pub survivors: Vec<Survivor>,
    /// `None` when no series passed gate (ii).
    pub scale_floor: Option<f64>,
}

/// Mean absolute lag-`m` difference of the base window.
pub fn scale_proxy(base_window: &[f64], m: usize) -> Result<f64, GateError> {
    let m = m.max(1);
    if base_window.len() <= m {
        return Err(GateError::ScaleUndefined(format!(
            "{} values leave no lag-{m} difference",
            base_window.len()
        )));
    }
    let diffs = &base_window[m..];
    let sum: f64 = diffs
        .iter()
        .zip(base_window)
        .map(|(now, then)| (now - then).abs())
        .sum();
    let scale = sum / diffs.len() as f64;
    if scale.is_finite() {
        Ok(scale)
    } else {
        Err(GateError::ScaleUndefined("non-finite mean difference".into()))
    }
}

/// Empirical `q`-quantile of `scales`.
pub fn scale_floor(scales: &[f64], q: f64, method: QuantileMethod) -> Result<f64, GateError> {
    if scales.is_empty() {
        return Err(GateError::EmptyInput);
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(GateError::InvalidQuantile(q));
    }
    let mut sorted = scales.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    Ok(match method {
        QuantileMethod::Linear => {
            let pos = (n - 1) as f64 * q;
            let lo = pos.floor() as usize;
            let hi = (lo + 1).min(n - 1);
            let frac = pos - lo as f64;
            sorted[lo] + frac * (sorted[hi] - sorted[lo])
        }
        QuantileMethod::NearestRank => {
            let rank = (q * n as f64).ceil() as usize;
            sorted[rank.clamp(1, n) - 1]
        }
    })
}

enum Stage1 {
    Failed(GateReport),
    Scaled {
        series: TimeSeries,
        layout: WindowLayout,
        scale0: f64,
    },
}

fn failed(id: &str, gate: Gate, scale0: Option<f64>, reason: String) -> GateReport {
    GateReport {
        series_id: id.to_string(),
        passed: false,
        failed_gate: Some(gate),
        scale0,
        reason: Some(reason),
    }
}

fn gates_one_and_two(series: &TimeSeries, profile: &FrequencyProfile, config: &RunConfig) -> Stage1 {
    let id = series.id();
    let layout = match layout(series.len(), profile, config) {
        Ok(l) => l,
        Err(e) => return Stage1::Failed(failed(id, Gate::RollingFeasibility, None, e.to_string())),
    };
    let base = &series.values()[..layout.t_base];
    // A constant base window has no usable scale (and no standardization).
    if base.iter().all(|&v| v == base[0]) {
        return Stage1::Failed(failed(
            id,
            Gate::ScaleDefined,
            None,
            "constant base window".into(),
        ));
    }
    match scale_proxy(base, profile.m) {
        Ok(scale0) => Stage1::Scaled {
            series: series.clone(),
            layout,
            scale0,
        },
        Err(e) => Stage1::Failed(failed(id, Gate::ScaleDefined, None, e.to_string())),
    }
}

/// Runs all four gates over a single-frequency panel. The profile governs;
/// the series' own frequency tags are not consulted. Reports and survivors
/// come back sorted by series id, independent of input order.
pub fn run_gates(
    panel: &[TimeSeries],
    profile: &FrequencyProfile,
    config: &RunConfig,
) -> (SurvivorPanel, Vec<GateReport>) {
    let stage1: Vec<Stage1> = panel
        .par_iter()
        .map(|s| gates_one_and_two(s, profile, config))
        .collect();

    let scales: Vec<f64> = stage1
        .iter()
        .filter_map(|s| match s {
            Stage1::Scaled { scale0, .. } => Some(*scale0),
            Stage1::Failed(_) => None,
        })
        .collect();
    let floor = scale_floor(&scales, config.scale_floor_quantile, config.quantile_method).ok();

    let results: Vec<Result<Survivor, GateReport>> = stage1
        .into_par_iter()
        .map(|s| match s {
            Stage1::Failed(report) => Err(report),
            Stage1::Scaled {
                series,
                layout,
                scale0,
            } => {
                let floor = floor.expect("a scaled series contributes to the floor");
                if scale0 < floor {
                    return Err(failed(
                        series.id(),
                        Gate::ScaleFloor,
                        Some(scale0),
                        format!("scale0 {scale0} below floor {floor}"),
                    ));
                }
                match ami_profile(&series, &layout, profile, config) {
                    Ok(ami) => Ok(Survivor {
                        series,
                        layout,
                        ami,
                        scale0,
                    }),
                    Err(e) => Err(failed(
                        series.id(),
                        Gate::AmiAtHmax,
                        Some(scale0),
                        e.to_string(),
                    )),
                }
            }
        })
        .collect();

    let mut survivors = Vec::new();
    let mut reports = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(s) => {
                reports.push(GateReport {
                    series_id: s.series.id().to_string(),
                    passed: true,
                    failed_gate: None,
                    scale0: Some(s.scale0),
                    reason: None,
                });
                survivors.push(s);
            }
            Err(report) => reports.push(report),
        }
    }
    survivors.sort_by(|a, b| a.series.id().cmp(b.series.id()));
    reports.sort_by(|a, b| a.series_id.cmp(&b.series_id));

    (
        SurvivorPanel {
            frequency: profile.frequency,
            survivors,
            scale_floor: floor,
        },
        reports,
    )
}
