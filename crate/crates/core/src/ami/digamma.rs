//! Digamma function for the KSG estimator.

use std::f64::consts::PI;

/// Euler–Mascheroni constant, `-ψ(1)`.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// ψ(x) for real `x`. Poles at non-positive integers return NaN.
pub fn digamma(x: f64) -> f64 {
    if x.is_nan() || x == f64::NEG_INFINITY {
        return f64::NAN;
    }
    if x <= 0.0 {
        if x == x.floor() {
            return f64::NAN;
        }
        // reflection: ψ(1 - x) - ψ(x) = π cot(πx)
        return digamma(1.0 - x) - PI / (PI * x).tan();
    }
    let mut x = x;
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // asymptotic series in 1/x², Bernoulli coefficients B_2k / 2k
    const COEFFS: [f64; 7] = [
        1.0 / 12.0,
        -1.0 / 120.0,
        1.0 / 252.0,
        -1.0 / 240.0,
        1.0 / 132.0,
        -691.0 / 32760.0,
        1.0 / 12.0,
    ];
    let tail = inv2 * COEFFS.iter().rev().fold(0.0, |t, &c| c + inv2 * t);
    acc + x.ln() - 0.5 * inv - tail
}

/// ψ(n) for n = 0..=max via ψ(n + 1) = ψ(n) + 1/n. Entry 0 is NaN.
#[derive(Debug, Clone)]
pub struct DigammaTable {
    values: Vec<f64>,
}

impl DigammaTable {
    pub fn new(max: usize) -> Self {
        let mut values = Vec::with_capacity(max + 1);
        values.push(f64::NAN);
        if max >= 1 {
            values.push(-EULER_GAMMA);
        }
        for n in 1..max {
            let prev = values[n];
            values.push(prev + 1.0 / n as f64);
        }
        Self { values }
    }

    #[inline]
    pub fn get(&self, n: usize) -> f64 {
        self.values[n]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert!((digamma(1.0) + EULER_GAMMA).abs() < 1e-14);
        assert!((digamma(0.5) - (-EULER_GAMMA - 2.0 * 2f64.ln())).abs() < 1e-13);
        assert!((digamma(5.0) - 1.506_117_668_431_800_3).abs() < 1e-13);
        assert!((digamma(20.0) - 2.970_523_992_242_149).abs() < 1e-13);
        assert!((digamma(123.4) - 4.811_373_775_116_277).abs() < 1e-12);
        assert!((digamma(0.2) - (-5.289_039_896_592_188)).abs() < 1e-12);
        assert!((digamma(-0.5) - 0.036_489_973_978_576_52).abs() < 1e-12);
        assert!(digamma(0.0).is_nan());
        assert!(digamma(-3.0).is_nan());
    }

    #[test]
    fn matches_statrs_over_a_grid() {
        for i in 1..4000 {
            let x = i as f64 * 0.37;
            let ours = digamma(x);
            let reference = statrs::function::gamma::digamma(x);
            assert!(
                (ours - reference).abs() <= 1e-12 * reference.abs().max(1.0),
                "x={x}: {ours} vs {reference}"
            );
        }
    }

    #[test]
    fn table_agrees_with_series() {
        let table = DigammaTable::new(20_000);
        for n in [1usize, 2, 3, 8, 9, 100, 1999, 2000, 19_999, 20_000] {
            assert!((table.get(n) - digamma(n as f64)).abs() < 1e-11, "n={n}");
        }
    }
}
