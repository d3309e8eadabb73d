//! Horizon-indexed auto-mutual information computed once per series on the
//! standardized base training window.

mod digamma;
mod ksg;

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

use crate::domain::{FrequencyProfile, RunConfig, TimeSeries, WindowLayout};

pub use digamma::{digamma, DigammaTable, EULER_GAMMA};
pub use ksg::{ksg_mi, KsgError};

#[derive(Debug, Error, PartialEq)]
pub enum AmiError {
    #[error("standardization needs at least 2 values, got {0}")]
    TooShort(usize),
    #[error("window has zero or non-finite standard deviation")]
    DegenerateSeries,
    #[error("AMI undefined at h_max = {h_max}: n_eff = {n_eff} < {n_eff_min}")]
    GateIvFailure {
        h_max: usize,
        n_eff: usize,
        n_eff_min: usize,
    },
    #[error(transparent)]
    Ksg(#[from] KsgError),
}

/// A window rescaled to zero sample mean and unit sample variance.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardizedWindow {
    values: Vec<f64>,
    original_len: usize,
}

impl StandardizedWindow {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn original_len(&self) -> usize {
        self.original_len
    }
}

/// `(x - mean) / sd` with the n-1 sample standard deviation.
pub fn standardize(window: &[f64]) -> Result<StandardizedWindow, AmiError> {
    let n = window.len();
    if n < 2 {
        return Err(AmiError::TooShort(n));
    }
    let nf = n as f64;
    let rough = window.iter().sum::<f64>() / nf;
    // second pass corrects the rounding of the first
    let mean = rough + window.iter().map(|v| v - rough).sum::<f64>() / nf;
    let ss: f64 = window.iter().map(|v| (v - mean) * (v - mean)).sum();
    let sd = (ss / (nf - 1.0)).sqrt();
    if !(sd.is_finite() && sd > 0.0) {
        return Err(AmiError::DegenerateSeries);
    }
    Ok(StandardizedWindow {
        values: window.iter().map(|v| (v - mean) / sd).collect(),
        original_len: n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmiEntry {
    pub ami_nats: f64,
    pub n_eff: usize,
}

/// AMI by horizon for one series. Built once from the base window.
#[derive(Debug, Clone, PartialEq)]
pub struct AmiProfile {
    pub series_id: String,
    pub entries: BTreeMap<usize, AmiEntry>,
    pub k_used: usize,
    /// Length of the base training window the profile was estimated on.
    pub base_len: usize,
}

impl AmiProfile {
    pub fn get(&self, h: usize) -> Option<f64> {
        self.entries.get(&h).map(|e| e.ami_nats)
    }

    /// Mean AMI over the horizons that are defined.
    pub fn mean_ami(&self) -> Option<f64> {
        if self.entries.is_empty() {
            return None;
        }
        let sum: f64 = self.entries.values().map(|e| e.ami_nats).sum();
        Some(sum / self.entries.len() as f64)
    }
}

/// AMI(h) = I(z_t; z_{t+h}) on the standardized base window `z`, for every
/// `h` in `1..=h_max` whose effective sample size `t_base - h` reaches the
/// frequency minimum. Fails if `h_max` itself is not estimable.
pub fn ami_profile(
    series: &TimeSeries,
    layout: &WindowLayout,
    profile: &FrequencyProfile,
    config: &RunConfig,
) -> Result<AmiProfile, AmiError> {
    let t_base = layout.t_base;
    let base = &series.values()[..t_base.min(series.len())];
    let mut z = standardize(base)?.values;
    if let Some(eps) = config.ksg_jitter {
        jitter(&mut z, eps, config.seed, series.id());
    }

    let k = config.k_neighbors;
    let mut entries = BTreeMap::new();
    for h in 1..=profile.h_max {
        let Some(n_eff) = t_base.checked_sub(h) else {
            break;
        };
        if n_eff < profile.n_eff_min || n_eff <= k {
            continue;
        }
        let ami_nats = ksg_mi(&z[..n_eff], &z[h..t_base], k)?;
        entries.insert(h, AmiEntry { ami_nats, n_eff });
    }

    if !entries.contains_key(&profile.h_max) {
        return Err(AmiError::GateIvFailure {
            h_max: profile.h_max,
            n_eff: t_base.saturating_sub(profile.h_max),
            n_eff_min: profile.n_eff_min,
        });
    }
    Ok(AmiProfile {
        series_id: series.id().to_string(),
        entries,
        k_used: k,
        base_len: t_base,
    })
}

fn jitter(values: &mut [f64], eps: f64, seed: u64, id: &str) {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(fnv1a(id.as_bytes()));
    for v in values {
        *v += eps * rng.random_range(-1.0..1.0);
    }
}

pub(crate) fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}
