use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tercile {
    Low,
    Mid,
    High,
}

impl Tercile {
    pub fn as_str(self) -> &'static str {
        match self {
            Tercile::Low => "low",
            Tercile::Mid => "mid",
            Tercile::High => "high",
        }
    }

    /// Label when the tercile is over training lengths.
    pub fn length_label(self) -> &'static str {
        match self {
            Tercile::Low => "short",
            Tercile::Mid => "medium",
            Tercile::High => "long",
        }
    }
}

impl fmt::Display for Tercile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Equal-frequency terciles. Boundaries are the sorted values at positions
/// ceil(n/3) and ceil(2n/3); a value equal to a boundary takes the lower
/// tercile.
pub fn assign_terciles(values: &[f64]) -> Vec<Tercile> {
    let n = values.len();
    if n == 0 {
        return Vec::new();
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let low_max = sorted[n.div_ceil(3) - 1];
    let mid_max = sorted[(2 * n).div_ceil(3) - 1];
    values
        .iter()
        .map(|&v| {
            if v <= low_max {
                Tercile::Low
            } else if v <= mid_max {
                Tercile::Mid
            } else {
                Tercile::High
            }
        })
        .collect()
}
