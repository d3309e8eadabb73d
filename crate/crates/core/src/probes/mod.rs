//! Probe forecasters. A probe sees only the history prefix handed to it and
//! returns point forecasts for horizons `1..=h_max`.

mod ets;
mod simplex;

use thiserror::Error;

pub use ets::{
    ets_fit_forecast, fit_ets, Ets, EtsCandidate, EtsFit, EtsParams, InitialStates, SeasonalKind,
    TrendKind,
};
pub use simplex::{minimize_box, SimplexResult};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProbeError {
    #[error("history of length {len} is shorter than the seasonal period {m}")]
    HistoryTooShort { len: usize, m: usize },
    #[error("no ETS candidate could be fitted")]
    AllCandidatesFailed,
    #[error("probe produced a non-finite forecast at h = {0}")]
    NonFiniteForecast(usize),
}

pub trait ProbeModel: Send + Sync {
    fn name(&self) -> &str;

    fn fit_and_forecast(
        &self,
        history: &[f64],
        m: usize,
        h_max: usize,
    ) -> Result<Vec<f64>, ProbeError>;
}

/// `ŷ(T + h) = y(T + h − k·m)` with `k = ⌈h / m⌉`.
pub fn seasonal_naive(history: &[f64], m: usize, h_max: usize) -> Result<Vec<f64>, ProbeError> {
    let m = m.max(1);
    let n = history.len();
    if n < m || n == 0 {
        return Err(ProbeError::HistoryTooShort { len: n, m });
    }
    Ok((1..=h_max)
        .map(|h| {
            let k = h.div_ceil(m);
            history[n + h - k * m - 1]
        })
        .collect())
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SeasonalNaive;

impl ProbeModel for SeasonalNaive {
    fn name(&self) -> &str {
        "seasonal-naive"
    }

    fn fit_and_forecast(
        &self,
        history: &[f64],
        m: usize,
        h_max: usize,
    ) -> Result<Vec<f64>, ProbeError> {
        seasonal_naive(history, m, h_max)
    }
}

/// Probe names accepted on the command line.
pub const PROBE_NAMES: [&str; 2] = ["seasonal-naive", "ets"];

pub fn probe_by_name(name: &str) -> Option<Box<dyn ProbeModel>> {
    match name {
        "seasonal-naive" => Some(Box::new(SeasonalNaive)),
        "ets" => Some(Box::new(Ets)),
        _ => None,
    }
}
