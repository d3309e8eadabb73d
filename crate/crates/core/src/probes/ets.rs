//! Exponential smoothing with automatic selection over trend {none, additive,
//! additive damped} × seasonal {none, additive, multiplicative} by AIC.
//!
//! Each candidate is fitted by minimizing the in-sample one-step SSE over its
//! smoothing parameters with a bounded simplex search from three fixed starts.
//! Initial states come from a first-cycle decomposition. The seasonal period
//! is supplied by the caller and never estimated; no Box–Cox transform.
//!
//! Recursions, with `base = l + φ·b`:
//!
//! ```text
//! additive seasonal        multiplicative seasonal
//! ŷ = base + s             ŷ = base · s
//! l' = α(y − s) + (1−α)base      l' = α(y / s) + (1−α)base
//! b' = β(l' − l) + (1−β)φb
//! s' = γ(y − base) + (1−γ)s      s' = γ(y / base) + (1−γ)s
//! ```
//!
//! AIC = n·ln(SSE/n) + 2·(smoothing parameters + initial states).

use log::warn;

use super::simplex::minimize_box;
use super::{seasonal_naive, ProbeError, ProbeModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrendKind {
    None,
    Additive,
    AdditiveDamped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeasonalKind {
    None,
    Additive,
    Multiplicative,
}

impl TrendKind {
    const ALL: [TrendKind; 3] = [TrendKind::None, TrendKind::Additive, TrendKind::AdditiveDamped];

    fn code(self) -> &'static str {
        match self {
            TrendKind::None => "N",
            TrendKind::Additive => "A",
            TrendKind::AdditiveDamped => "Ad",
        }
    }
}

impl SeasonalKind {
    const ALL: [SeasonalKind; 3] = [
        SeasonalKind::None,
        SeasonalKind::Additive,
        SeasonalKind::Multiplicative,
    ];

    fn code(self) -> &'static str {
        match self {
            SeasonalKind::None => "N",
            SeasonalKind::Additive => "A",
            SeasonalKind::Multiplicative => "M",
        }
    }
}

/// Smoothing parameters. Components absent from a candidate keep their
/// neutral values (β = γ = 0, φ = 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtsParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialStates {
    pub level: f64,
    pub trend: f64,
    /// Seasonal states for positions `0..m` of the first cycle.
    pub seasonal: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EtsCandidate {
    pub trend: TrendKind,
    pub seasonal: SeasonalKind,
    pub params: EtsParams,
    pub initial: InitialStates,
    pub sse: f64,
    pub aic: f64,
    /// Smoothing parameters estimated.
    pub n_params: usize,
    pub n_initial_states: usize,
    m: usize,
    n_obs: usize,
    final_state: State,
}

#[derive(Debug, Clone, PartialEq)]
struct State {
    level: f64,
    trend: f64,
    seasonal: Vec<f64>,
}

impl EtsCandidate {
    /// Trend and seasonal codes, e.g. `Ad,M`.
    pub fn label(&self) -> String {
        format!("{},{}", self.trend.code(), self.seasonal.code())
    }

    pub fn forecast(&self, h_max: usize) -> Vec<f64> {
        let st = &self.final_state;
        let phi = self.params.phi;
        let mut damp_sum = 0.0;
        let mut phi_pow = 1.0;
        (1..=h_max)
            .map(|h| {
                let trend_mult = match self.trend {
                    TrendKind::None => 0.0,
                    TrendKind::Additive => h as f64,
                    TrendKind::AdditiveDamped => {
                        phi_pow *= phi;
                        damp_sum += phi_pow;
                        damp_sum
                    }
                };
                let base = st.level + trend_mult * st.trend;
                let pos = (self.n_obs + h - 1) % self.m;
                match self.seasonal {
                    SeasonalKind::None => base,
                    SeasonalKind::Additive => base + st.seasonal[pos],
                    SeasonalKind::Multiplicative => base * st.seasonal[pos],
                }
            })
            .collect()
    }
}

/// All converged candidates of one fit, in enumeration order.
#[derive(Debug, Clone, PartialEq)]
pub struct EtsFit {
    pub candidates: Vec<EtsCandidate>,
    pub selected: usize,
    /// Admissible combinations whose fit failed.
    pub failed: Vec<(TrendKind, SeasonalKind)>,
}

impl EtsFit {
    pub fn selected(&self) -> &EtsCandidate {
        &self.candidates[self.selected]
    }
}

const MIN_HISTORY: usize = 3;
const STARTS: [EtsParams; 3] = [
    EtsParams {
        alpha: 0.5,
        beta: 0.1,
        gamma: 0.1,
        phi: 0.9,
    },
    EtsParams {
        alpha: 0.2,
        beta: 0.05,
        gamma: 0.3,
        phi: 0.95,
    },
    EtsParams {
        alpha: 0.9,
        beta: 0.3,
        gamma: 0.05,
        phi: 0.85,
    },
];
const PHI_BOUNDS: (f64, f64) = (0.8, 0.98);

/// Whether a seasonal candidate may be fitted on `n` observations.
fn seasonal_admissible(n: usize, m: usize) -> bool {
    m > 1 && n >= (2 * m).max(10)
}

fn admissible(history: &[f64], m: usize) -> Vec<(TrendKind, SeasonalKind)> {
    let n = history.len();
    let positive = history.iter().all(|&v| v > 0.0);
    let mut out = Vec::new();
    for seasonal in SeasonalKind::ALL {
        let ok = match seasonal {
            SeasonalKind::None => true,
            SeasonalKind::Additive => seasonal_admissible(n, m),
            SeasonalKind::Multiplicative => seasonal_admissible(n, m) && positive,
        };
        if ok {
            out.extend(TrendKind::ALL.iter().map(|&t| (t, seasonal)));
        }
    }
    out
}

fn initial_states(
    y: &[f64],
    m: usize,
    trend: TrendKind,
    seasonal: SeasonalKind,
) -> Option<InitialStates> {
    let n = y.len();
    let cycle = if seasonal != SeasonalKind::None || (m > 1 && n >= 2 * m) {
        m
    } else {
        1
    };
    let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
    let first = mean(&y[..cycle]);
    let slope = if n >= 2 * cycle {
        (mean(&y[cycle..2 * cycle]) - first) / cycle as f64
    } else {
        0.0
    };
    let centre = (cycle as f64 - 1.0) / 2.0;

    let (level, b0) = match trend {
        TrendKind::None => (first, 0.0),
        _ => (first - (centre + 1.0) * slope, slope),
    };

    let seasonal_states = match seasonal {
        SeasonalKind::None => Vec::new(),
        SeasonalKind::Additive => {
            let raw: Vec<f64> = (0..m)
                .map(|i| y[i] - (first + (i as f64 - centre) * slope))
                .collect();
            let avg = mean(&raw);
            raw.into_iter().map(|s| s - avg).collect()
        }
        SeasonalKind::Multiplicative => {
            let mut raw = Vec::with_capacity(m);
            for (i, &v) in y.iter().enumerate().take(m) {
                let line = first + (i as f64 - centre) * slope;
                if line <= 0.0 {
                    return None;
                }
                raw.push(v / line);
            }
            let avg = mean(&raw);
            if avg <= 0.0 {
                return None;
            }
            raw.into_iter().map(|s| s / avg).collect()
        }
    };
    Some(InitialStates {
        level,
        trend: b0,
        seasonal: seasonal_states,
    })
}

/// One-step in-sample SSE and the state after the last observation.
fn run_filter(
    y: &[f64],
    m: usize,
    trend: TrendKind,
    seasonal: SeasonalKind,
    p: &EtsParams,
    init: &InitialStates,
    seasonal_buf: &mut Vec<f64>,
) -> (f64, f64, f64) {
    let (alpha, beta, gamma) = (p.alpha, p.beta, p.gamma);
    let phi = match trend {
        TrendKind::None => 0.0,
        TrendKind::Additive => 1.0,
        TrendKind::AdditiveDamped => p.phi,
    };
    let mut l = init.level;
    let mut b = init.trend;
    seasonal_buf.clear();
    seasonal_buf.extend_from_slice(&init.seasonal);
    let mut sse = 0.0;
    for (t, &obs) in y.iter().enumerate() {
        let base = l + phi * b;
        let new_l;
        match seasonal {
            SeasonalKind::None => {
                let e = obs - base;
                sse += e * e;
                new_l = base + alpha * e;
            }
            SeasonalKind::Additive => {
                let idx = t % m;
                let s = seasonal_buf[idx];
                let e = obs - base - s;
                sse += e * e;
                new_l = alpha * (obs - s) + (1.0 - alpha) * base;
                seasonal_buf[idx] = gamma * (obs - base) + (1.0 - gamma) * s;
            }
            SeasonalKind::Multiplicative => {
                let idx = t % m;
                let s = seasonal_buf[idx];
                if base <= 0.0 || s <= 0.0 {
                    return (f64::INFINITY, l, b);
                }
                let e = obs - base * s;
                sse += e * e;
                new_l = alpha * (obs / s) + (1.0 - alpha) * base;
                seasonal_buf[idx] = gamma * (obs / base) + (1.0 - gamma) * s;
            }
        }
        if trend != TrendKind::None {
            b = beta * (new_l - l) + (1.0 - beta) * phi * b;
        }
        l = new_l;
    }
    if !sse.is_finite() {
        return (f64::INFINITY, l, b);
    }
    (sse, l, b)
}

fn pack_bounds(trend: TrendKind, seasonal: SeasonalKind) -> (Vec<f64>, Vec<f64>) {
    let mut lo = vec![0.0];
    let mut hi = vec![1.0];
    if trend != TrendKind::None {
        lo.push(0.0);
        hi.push(1.0);
    }
    if trend == TrendKind::AdditiveDamped {
        lo.push(PHI_BOUNDS.0);
        hi.push(PHI_BOUNDS.1);
    }
    if seasonal != SeasonalKind::None {
        lo.push(0.0);
        hi.push(1.0);
    }
    (lo, hi)
}

fn pack(p: &EtsParams, trend: TrendKind, seasonal: SeasonalKind) -> Vec<f64> {
    let mut v = vec![p.alpha];
    if trend != TrendKind::None {
        v.push(p.beta);
    }
    if trend == TrendKind::AdditiveDamped {
        v.push(p.phi);
    }
    if seasonal != SeasonalKind::None {
        v.push(p.gamma);
    }
    v
}

fn unpack(v: &[f64], trend: TrendKind, seasonal: SeasonalKind) -> EtsParams {
    let mut it = v.iter().copied();
    let alpha = it.next().unwrap_or(0.0);
    let beta = if trend != TrendKind::None {
        it.next().unwrap_or(0.0)
    } else {
        0.0
    };
    let phi = if trend == TrendKind::AdditiveDamped {
        it.next().unwrap_or(1.0)
    } else {
        1.0
    };
    let gamma = if seasonal != SeasonalKind::None {
        it.next().unwrap_or(0.0)
    } else {
        0.0
    };
    EtsParams {
        alpha,
        beta,
        gamma,
        phi,
    }
}

fn fit_candidate(
    y: &[f64],
    m: usize,
    trend: TrendKind,
    seasonal: SeasonalKind,
    sigma2_floor: f64,
    max_evals: usize,
) -> Option<EtsCandidate> {
    let init = initial_states(y, m, trend, seasonal)?;
    let (lo, hi) = pack_bounds(trend, seasonal);
    let dim = lo.len();
    let mut buf = Vec::with_capacity(m);

    let mut best: Option<(Vec<f64>, f64)> = None;
    for start in &STARTS {
        let x0 = pack(start, trend, seasonal);
        let r = minimize_box(
            |x| {
                let p = unpack(x, trend, seasonal);
                run_filter(y, m, trend, seasonal, &p, &init, &mut buf).0
            },
            &x0,
            &lo,
            &hi,
            max_evals,
            1e-10,
        );
        if best.as_ref().is_none_or(|(_, v)| r.value < *v) {
            best = Some((r.x, r.value));
        }
    }
    let (x, sse) = best?;
    if !sse.is_finite() {
        return None;
    }
    let params = unpack(&x, trend, seasonal);
    let (sse, level, trend_state) = run_filter(y, m, trend, seasonal, &params, &init, &mut buf);
    if !sse.is_finite() {
        return None;
    }

    let n = y.len() as f64;
    let n_initial_states = 1 + usize::from(trend != TrendKind::None) + init.seasonal.len();
    let aic = n * (sse / n).max(sigma2_floor).ln() + 2.0 * (dim + n_initial_states) as f64;
    Some(EtsCandidate {
        trend,
        seasonal,
        params,
        sse,
        aic,
        n_params: dim,
        n_initial_states,
        m: m.max(1),
        n_obs: y.len(),
        final_state: State {
            level,
            trend: trend_state,
            seasonal: buf,
        },
        initial: init,
    })
}

fn evals_for(trend: TrendKind, seasonal: SeasonalKind) -> usize {
    let dim = pack_bounds(trend, seasonal).0.len();
    60 + 40 * dim
}

/// Fits every admissible candidate and selects the minimum-AIC one.
pub fn fit_ets(history: &[f64], m: usize) -> Result<EtsFit, ProbeError> {
    let m = m.max(1);
    if history.len() < MIN_HISTORY || history.iter().any(|v| !v.is_finite()) {
        return Err(ProbeError::AllCandidatesFailed);
    }
    let mean_sq = history.iter().map(|v| v * v).sum::<f64>() / history.len() as f64;
    let sigma2_floor = (1e-20 * mean_sq).max(f64::MIN_POSITIVE);

    let mut candidates = Vec::new();
    let mut failed = Vec::new();
    for (trend, seasonal) in admissible(history, m) {
        match fit_candidate(
            history,
            m,
            trend,
            seasonal,
            sigma2_floor,
            evals_for(trend, seasonal),
        ) {
            Some(c) => candidates.push(c),
            None => failed.push((trend, seasonal)),
        }
    }
    let selected = candidates
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.aic.total_cmp(&b.1.aic))
        .map(|(i, _)| i)
        .ok_or(ProbeError::AllCandidatesFailed)?;
    Ok(EtsFit {
        candidates,
        selected,
        failed,
    })
}

/// Forecasts from the AIC-selected candidate; falls back to seasonal naïve
/// when no candidate can be fitted.
pub fn ets_fit_forecast(history: &[f64], m: usize, h_max: usize) -> Result<Vec<f64>, ProbeError> {
    match fit_ets(history, m) {
        Ok(fit) => {
            let f = fit.selected().forecast(h_max);
            if let Some(h) = f.iter().position(|v| !v.is_finite()) {
                return Err(ProbeError::NonFiniteForecast(h + 1));
            }
            Ok(f)
        }
        Err(ProbeError::AllCandidatesFailed) => {
            warn!(
                "ETS: no candidate fitted on {} observations, using seasonal naive",
                history.len()
            );
            seasonal_naive(history, m, h_max)
        }
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Ets;

impl ProbeModel for Ets {
    fn name(&self) -> &str {
        "ets"
    }

    fn fit_and_forecast(
        &self,
        history: &[f64],
        m: usize,
        h_max: usize,
    ) -> Result<Vec<f64>, ProbeError> {
        ets_fit_forecast(history, m, h_max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_trend_is_continued() {
        let y: Vec<f64> = (0..40).map(|t| 2.0 * t as f64).collect();
        let fit = fit_ets(&y, 1).unwrap();
        let sel = fit.selected();
        assert_ne!(sel.trend, TrendKind::None, "selected {}", sel.label());
        let f = sel.forecast(6);
        let last = (y.len() - 1) as f64;
        for (i, v) in f.iter().enumerate() {
            let truth = 2.0 * (last + (i + 1) as f64);
            assert!(((v - truth) / truth).abs() < 1e-3, "h={}: {v} vs {truth}", i + 1);
        }
    }

    #[test]
    fn multiplicative_beats_additive_on_growing_amplitude() {
        let m = 4;
        let pattern = [0.6, 1.4, 1.1, 0.9];
        let y: Vec<f64> = (0..48)
            .map(|t| (1.0 + 0.1 * t as f64) * pattern[t % m] * 10.0)
            .collect();
        let fit = fit_ets(&y, m).unwrap();
        let sse = |t, s| {
            fit.candidates
                .iter()
                .find(|c| c.trend == t && c.seasonal == s)
                .map(|c| c.sse)
                .unwrap()
        };
        for trend in TrendKind::ALL {
            assert!(
                sse(trend, SeasonalKind::Multiplicative) < sse(trend, SeasonalKind::Additive),
                "trend {trend:?}"
            );
        }
    }

    #[test]
    fn zero_excludes_multiplicative() {
        let mut y: Vec<f64> = (0..40).map(|t| 5.0 + (t % 4) as f64).collect();
        y[17] = 0.0;
        let fit = fit_ets(&y, 4).unwrap();
        assert!(fit
            .candidates
            .iter()
            .all(|c| c.seasonal != SeasonalKind::Multiplicative));
        assert!(fit.candidates.iter().any(|c| c.seasonal == SeasonalKind::Additive));
    }

    #[test]
    fn short_history_drops_seasonal_candidates() {
        let y: Vec<f64> = (0..60).map(|t| 10.0 + (t % 7) as f64).collect();
        let fit = fit_ets(&y, 52).unwrap();
        assert_eq!(fit.candidates.len() + fit.failed.len(), 3);
        assert!(fit.candidates.iter().all(|c| c.seasonal == SeasonalKind::None));
    }

    #[test]
    fn selection_minimizes_aic_and_respects_bounds() {
        let y: Vec<f64> = (0..80)
            .map(|t| 50.0 + 0.3 * t as f64 + 4.0 * ((t % 12) as f64 - 5.5).abs() + ((t * 37) % 11) as f64 * 0.4)
            .collect();
        let fit = fit_ets(&y, 12).unwrap();
        let best = fit.selected().aic;
        for c in &fit.candidates {
            assert!(best <= c.aic);
            let p = c.params;
            for v in [p.alpha, p.beta, p.gamma] {
                assert!((0.0..=1.0).contains(&v));
            }
            if c.trend == TrendKind::AdditiveDamped {
                assert!((0.8..=0.98).contains(&p.phi));
            }
        }
        assert_eq!(fit.candidates.len() + fit.failed.len(), 9);
    }

    #[test]
    fn too_short_falls_back_to_seasonal_naive() {
        assert_eq!(ets_fit_forecast(&[4.0, 5.0], 1, 3).unwrap(), vec![5.0, 5.0, 5.0]);
    }

    #[test]
    fn forecasts_are_deterministic() {
        let y: Vec<f64> = (0..50).map(|t| 20.0 + ((t * 13) % 7) as f64).collect();
        assert_eq!(ets_fit_forecast(&y, 4, 8), ets_fit_forecast(&y, 4, 8));
    }
}
