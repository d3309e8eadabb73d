use forecastability::ami::{ami_profile, ksg_mi};
use forecastability::analytics::spearman;
use forecastability::domain::{layout, Frequency, FrequencyProfile, RunConfig, TimeSeries};
use forecastability::synth::{generate_path, SynthKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

fn gaussian_pair(r: f64, n: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let c = (1.0 - r * r).sqrt();
    (0..n)
        .map(|_| {
            let a: f64 = rng.sample(StandardNormal);
            let b: f64 = rng.sample(StandardNormal);
            (a, r * a + c * b)
        })
        .unzip()
}

fn gaussian_mi(r: f64) -> f64 {
    -0.5 * (1.0 - r * r).ln()
}

/// Profile with a custom n_eff threshold so long synthetic windows qualify.
fn profile_of(values: Vec<f64>, h_max: usize) -> forecastability::AmiProfile {
    let fp = FrequencyProfile {
        frequency: Frequency::Yearly,
        h_max,
        m: 1,
        n_eff_min: 30,
    };
    let config = RunConfig::default();
    let series = TimeSeries::new("x", values, Frequency::Yearly).unwrap();
    let l = layout(series.len(), &fp, &config).unwrap();
    ami_profile(&series, &l, &fp, &config).unwrap()
}

#[test]
fn independent_uniforms_near_zero() {
    let mut rng = ChaCha20Rng::seed_from_u64(11);
    let x: Vec<f64> = (0..2000).map(|_| rng.random::<f64>()).collect();
    let y: Vec<f64> = (0..2000).map(|_| rng.random::<f64>()).collect();
    let mi = ksg_mi(&x, &y, 8).unwrap();
    assert!(mi.abs() < 0.03, "{mi}");
}

#[test]
fn gaussian_pairs_match_closed_form() {
    for (r, tol) in [(0.9, 0.08), (0.5, 0.05)] {
        let (x, y) = gaussian_pair(r, 2000, 1);
        let mi = ksg_mi(&x, &y, 8).unwrap();
        assert!((mi - gaussian_mi(r)).abs() < tol, "r={r}: {mi}");
    }
}

#[test]
fn error_shrinks_with_sample_size() {
    let r = 0.9;
    let mean_abs_err = |n: usize| {
        (0..8)
            .map(|s| {
                let (x, y) = gaussian_pair(r, n, 100 + s);
                (ksg_mi(&x, &y, 8).unwrap() - gaussian_mi(r)).abs()
            })
            .sum::<f64>()
            / 8.0
    };
    let small = mean_abs_err(500);
    let large = mean_abs_err(8000);
    assert!(large < 0.6 * small, "N=500: {small}, N=8000: {large}");
}

#[test]
fn ar1_profile_tracks_lag_correlation() {
    // t_base = 2000 after the 15-step evaluation pool
    let values = generate_path(SynthKind::Ar1 { phi: 0.8 }, 2015, 3, 0);
    let p = profile_of(values, 6);
    assert_eq!(p.base_len, 2000);
    for h in [1, 2, 3] {
        let truth = gaussian_mi(0.8f64.powi(h as i32));
        let est = p.get(h).unwrap();
        assert!((est - truth).abs() < 0.08, "h={h}: {est} vs {truth}");
    }
}

#[test]
fn white_noise_profile_near_zero() {
    let values = generate_path(SynthKind::WhiteNoise, 2015, 4, 0);
    let p = profile_of(values, 6);
    for (h, e) in &p.entries {
        assert!(e.ami_nats.abs() < 0.05, "h={h}: {}", e.ami_nats);
        assert_eq!(e.n_eff, 2000 - h);
    }
}

#[test]
fn median_ami_decays_with_lag() {
    let h_max = 12;
    let profiles: Vec<_> = (0..15)
        .map(|i| profile_of(generate_path(SynthKind::Ar1 { phi: 0.7 }, 600, 9, i), h_max))
        .collect();
    let hs: Vec<f64> = (1..=h_max).map(|h| h as f64).collect();
    let medians: Vec<f64> = (1..=h_max)
        .map(|h| {
            let mut v: Vec<f64> = profiles.iter().map(|p| p.get(h).unwrap()).collect();
            v.sort_by(f64::total_cmp);
            v[v.len() / 2]
        })
        .collect();
    let rho = spearman(&hs, &medians).unwrap();
    assert!(rho < 0.0, "{rho}: {medians:?}");
}

#[test]
fn affine_maps_leave_profile_bit_identical() {
    let values = generate_path(SynthKind::Ar1 { phi: 0.6 }, 400, 5, 0);
    let mapped: Vec<f64> = values.iter().map(|v| 3.7 * v - 12.5).collect();
    let a = profile_of(values, 6);
    let b = profile_of(mapped, 6);
    for (h, e) in &a.entries {
        assert_eq!(e.ami_nats.to_bits(), b.entries[h].ami_nats.to_bits(), "h={h}");
    }
}

#[test]
fn repeated_estimates_are_identical() {
    let (x, y) = gaussian_pair(0.3, 1500, 8);
    let first = ksg_mi(&x, &y, 8).unwrap();
    for _ in 0..3 {
        assert_eq!(ksg_mi(&x, &y, 8).unwrap().to_bits(), first.to_bits());
    }
}
