//! Fixtures shared by the benchmarks.

use forecastability::synth::{generate_path, SynthKind};

/// Lag-1 pairs of a Gaussian AR(1) path.
pub fn lag_pairs(n: usize, phi: f64, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let path = generate_path(SynthKind::Ar1 { phi }, n + 1, seed, 0);
    (path[..n].to_vec(), path[1..].to_vec())
}

/// Positive seasonal history: level 50, period `m`, AR(1) noise.
pub fn seasonal_history(n: usize, m: usize, seed: u64) -> Vec<f64> {
    generate_path(SynthKind::Ar1 { phi: 0.4 }, n, seed, 0)
        .into_iter()
        .enumerate()
        .map(|(t, e)| 50.0 + 8.0 * (std::f64::consts::TAU * (t % m) as f64 / m as f64).sin() + e)
        .collect()
}
