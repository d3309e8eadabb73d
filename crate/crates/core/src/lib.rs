//! Horizon-specific forecastability diagnostics for univariate time series.
//!
//! Auto-mutual information (AMI) is estimated with the KSG k-nearest-neighbour
//! estimator on a base training window, screened by four feasibility gates,
//! and checked against realized rolling-origin sMAPE of probe forecasters.
//! Per-series AMI terciles drive a three-way triage.
//!
//! ```
//! use forecastability::{ksg_mi, synth::{generate_path, SynthKind}};
//!
//! let x = generate_path(SynthKind::Ar1 { phi: 0.8 }, 1000, 1, 0);
//! let mi = ksg_mi(&x[..999], &x[1..], 8).unwrap();
//! assert!((mi - 0.51).abs() < 0.15);
//! ```

pub mod ami;
pub mod analytics;
pub mod domain;
pub mod eval;
pub mod gates;
pub mod ingest;
pub mod probes;
pub mod synth;

pub use ami::{ami_profile, ksg_mi, standardize, AmiEntry, AmiError, AmiProfile, KsgError};
pub use analytics::{
    spearman, tercile_analysis, triage, validate, SeriesObservation, Tercile, TriageAction, TriageLabel, TriageStat,
    ValidationSummary,
};
pub use domain::{
    layout, ConfigError, Frequency, FrequencyProfile, LayoutError, QuantileMethod, RunConfig, SeriesError, TimeSeries,
    WindowLayout,
};
pub use eval::{evaluate_panel, rolling_eval, smape, EvalRecord, PanelEval};
pub use gates::{run_gates, Gate, GateReport, Survivor, SurvivorPanel};
pub use ingest::{load_panel, PanelFormat, PanelSource, ResultStore};
pub use probes::{probe_by_name, Ets, ProbeModel, SeasonalNaive};
