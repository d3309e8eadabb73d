//! Shared domain types: series, per-frequency constants, run configuration
//! and the rolling-origin window layout.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Sampling frequency of a series. Horizons and seasonal periods are counted
/// in observation steps, never in calendar time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Frequency {
    Yearly,
    Quarterly,
    Monthly,
    Weekly,
    Daily,
    Hourly,
}

impl Frequency {
    pub const ALL: [Frequency; 6] = [
        Frequency::Yearly,
        Frequency::Quarterly,
        Frequency::Monthly,
        Frequency::Weekly,
        Frequency::Daily,
        Frequency::Hourly,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Frequency::Yearly => "yearly",
            Frequency::Quarterly => "quarterly",
            Frequency::Monthly => "monthly",
            Frequency::Weekly => "weekly",
            Frequency::Daily => "daily",
            Frequency::Hourly => "hourly",
        }
    }

    pub fn profile(self) -> FrequencyProfile {
        let (h_max, m, n_eff_min) = match self {
            Frequency::Yearly => (6, 1, 30),
            Frequency::Quarterly => (8, 4, 80),
            Frequency::Monthly => (18, 12, 100),
            Frequency::Weekly => (13, 52, 120),
            Frequency::Daily => (14, 7, 250),
            Frequency::Hourly => (48, 24, 400),
        };
        FrequencyProfile {
            frequency: self,
            h_max,
            m,
            n_eff_min,
        }
    }

    /// Number of series of this frequency in the M4 competition panel.
    pub fn m4_series_count(self) -> usize {
        match self {
            Frequency::Yearly => 23_000,
            Frequency::Quarterly => 24_000,
            Frequency::Monthly => 48_000,
            Frequency::Weekly => 359,
            Frequency::Daily => 4_227,
            Frequency::Hourly => 414,
        }
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error)]
#[error("unknown frequency `{0}` (expected yearly, quarterly, monthly, weekly, daily or hourly)")]
pub struct ParseFrequencyError(String);

impl FromStr for Frequency {
    type Err = ParseFrequencyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Frequency::ALL
            .into_iter()
            .find(|f| f.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| ParseFrequencyError(s.to_string()))
    }
}

/// Per-frequency protocol constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrequencyProfile {
    pub frequency: Frequency,
    /// Maximum forecast horizon.
    pub h_max: usize,
    /// Seasonal period.
    pub m: usize,
    /// Minimum effective sample size `t_base - h` for an AMI estimate.
    pub n_eff_min: usize,
}

#[derive(Debug, Error, PartialEq)]
pub enum SeriesError {
    #[error("series `{0}` has no observations")]
    Empty(String),
    #[error("series `{id}` has a non-finite value at position {index}")]
    NonFinite { id: String, index: usize },
}

/// A univariate series in observation order.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    id: String,
    values: Vec<f64>,
    frequency: Frequency,
}

impl TimeSeries {
    pub fn new(
        id: impl Into<String>,
        values: Vec<f64>,
        frequency: Frequency,
    ) -> Result<Self, SeriesError> {
        let id = id.into();
        if values.is_empty() {
            return Err(SeriesError::Empty(id));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(SeriesError::NonFinite { id, index });
        }
        Ok(Self {
            id,
            values,
            frequency,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn frequency(&self) -> Frequency {
        self.frequency
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// How the scale floor quantile is read off the empirical distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QuantileMethod {
    /// Linear interpolation between order statistics ("type 7").
    #[default]
    Linear,
    /// Smallest value whose empirical CDF reaches `q`.
    NearestRank,
}

impl QuantileMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            QuantileMethod::Linear => "linear",
            QuantileMethod::NearestRank => "nearest-rank",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Number of rolling origins.
    pub rolls: usize,
    /// Step between consecutive origins.
    pub roll_step: usize,
    /// Neighbour count of the KSG estimator.
    pub k_neighbors: usize,
    /// Quantile of the scale proxy used as the exclusion floor.
    pub scale_floor_quantile: f64,
    pub quantile_method: QuantileMethod,
    /// Optional uniform jitter amplitude added to standardized values before
    /// MI estimation. Off by default.
    pub ksg_jitter: Option<f64>,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            rolls: 10,
            roll_step: 1,
            k_neighbors: 8,
            scale_floor_quantile: 0.05,
            quantile_method: QuantileMethod::Linear,
            ksg_jitter: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("rolls must be positive")]
    ZeroRolls,
    #[error("roll_step must be positive")]
    ZeroRollStep,
    #[error("k_neighbors must be positive")]
    ZeroNeighbors,
    #[error("scale_floor_quantile must lie in (0, 1), got {0}")]
    Quantile(f64),
    #[error("ksg jitter must be finite and positive, got {0}")]
    Jitter(f64),
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.rolls == 0 {
            return Err(ConfigError::ZeroRolls);
        }
        if self.roll_step == 0 {
            return Err(ConfigError::ZeroRollStep);
        }
        if self.k_neighbors == 0 {
            return Err(ConfigError::ZeroNeighbors);
        }
        let q = self.scale_floor_quantile;
        if !(q > 0.0 && q < 1.0) {
            return Err(ConfigError::Quantile(q));
        }
        if let Some(eps) = self.ksg_jitter {
            if !(eps.is_finite() && eps > 0.0) {
                return Err(ConfigError::Jitter(eps));
            }
        }
        Ok(())
    }
}

/// Placement of the base training window and the rolling origins inside a
/// series of length `t_total`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowLayout {
    pub t_total: usize,
    pub pool_len: usize,
    /// Length of the base training prefix (AMI, scale proxy).
    pub t_base: usize,
    /// Training-prefix length at each origin, in origin order.
    pub origins: Vec<usize>,
}

impl WindowLayout {
    pub fn rolls(&self) -> usize {
        self.origins.len()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LayoutError {
    #[error(
        "series of length {series_len} cannot host {rolls} full evaluation windows \
         (pool_len = {pool_len})"
    )]
    InfeasibleLength {
        series_len: usize,
        pool_len: usize,
        rolls: usize,
    },
}

/// Lays out `config.rolls` expanding-window origins so that the last
/// origin's evaluation window ends exactly at the end of the series.
pub fn layout(
    series_len: usize,
    profile: &FrequencyProfile,
    config: &RunConfig,
) -> Result<WindowLayout, LayoutError> {
    let pool_len = profile.h_max + (config.rolls.saturating_sub(1)) * config.roll_step;
    if series_len <= pool_len {
        return Err(LayoutError::InfeasibleLength {
            series_len,
            pool_len,
            rolls: config.rolls,
        });
    }
    let t_base = series_len - pool_len;
    let origins = (0..config.rolls)
        .map(|j| t_base + j * config.roll_step)
        .collect();
    Ok(WindowLayout {
        t_total: series_len,
        pool_len,
        t_base,
        origins,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn profiles_match_protocol_table() {
        let rows: Vec<_> = Frequency::ALL
            .iter()
            .map(|f| {
                let p = f.profile();
                (p.h_max, p.m, p.n_eff_min)
            })
            .collect();
        assert_eq!(
            rows,
            vec![
                (6, 1, 30),
                (8, 4, 80),
                (18, 12, 100),
                (13, 52, 120),
                (14, 7, 250),
                (48, 24, 400)
            ]
        );
        let total: usize = Frequency::ALL.iter().map(|f| f.m4_series_count()).sum();
        assert_eq!(total, 100_000);
    }

    #[test]
    fn yearly_layout_of_100() {
        let l = layout(100, &Frequency::Yearly.profile(), &RunConfig::default()).unwrap();
        assert_eq!(l.pool_len, 15);
        assert_eq!(l.t_base, 85);
        assert_eq!(l.origins, (85..=94).collect::<Vec<_>>());
    }

    #[test]
    fn yearly_layout_of_15_is_infeasible() {
        let err = layout(15, &Frequency::Yearly.profile(), &RunConfig::default()).unwrap_err();
        assert_eq!(
            err,
            LayoutError::InfeasibleLength {
                series_len: 15,
                pool_len: 15,
                rolls: 10
            }
        );
    }

    #[test]
    fn hourly_layout_of_200() {
        let l = layout(200, &Frequency::Hourly.profile(), &RunConfig::default()).unwrap();
        assert_eq!((l.pool_len, l.t_base), (57, 143));
    }

    #[test]
    fn series_rejects_non_finite_and_empty() {
        assert_eq!(
            TimeSeries::new("a", vec![], Frequency::Daily).unwrap_err(),
            SeriesError::Empty("a".into())
        );
        assert!(matches!(
            TimeSeries::new("a", vec![1.0, f64::NAN], Frequency::Daily),
            Err(SeriesError::NonFinite { index: 1, .. })
        ));
    }

    #[test]
    fn frequency_parses_case_insensitively() {
        assert_eq!("Monthly".parse::<Frequency>().unwrap(), Frequency::Monthly);
        assert!("fortnightly".parse::<Frequency>().is_err());
    }

    #[test]
    fn config_validation() {
        assert!(RunConfig::default().validate().is_ok());
        let bad = RunConfig {
            scale_floor_quantile: 1.0,
            ..RunConfig::default()
        };
        assert_eq!(bad.validate(), Err(ConfigError::Quantile(1.0)));
    }

    proptest! {
        #[test]
        fn feasible_layouts_end_at_series_end(
            len in 1usize..5000,
            rolls in 1usize..15,
            step in 1usize..4,
            freq in 0usize..6,
        ) {
            let profile = Frequency::ALL[freq].profile();
            let config = RunConfig { rolls, roll_step: step, ..RunConfig::default() };
            if let Ok(l) = layout(len, &profile, &config) {
                prop_assert!(l.t_base >= 1);
                prop_assert_eq!(l.t_base + (rolls - 1) * step + profile.h_max, len);
                prop_assert_eq!(*l.origins.last().unwrap() + profile.h_max, len);
                let next = layout(len + 1, &profile, &config).unwrap();
                prop_assert_eq!(next.t_base, l.t_base + 1);
                prop_assert_eq!(next.pool_len, l.pool_len);
            }
        }
    }
}
