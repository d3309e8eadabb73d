//! Kraskov–Stögbauer–Grassberger mutual information estimator (algorithm 1)
//! for scalar pairs.
//!
//! For every point the distance `ε_i` to its k-th nearest neighbour is taken
//! in the max-norm of the joint `(x, y)` space. The marginal counts `n_x(i)`
//! and `n_y(i)` are the numbers of other points strictly closer than `ε_i` in
//! each coordinate, and
//!
//! ```text
//! I(X; Y) = ψ(k) + ψ(N) − ⟨ψ(n_x + 1) + ψ(n_y + 1)⟩
//! ```
//!
//! in nats. Neighbour search is exact: points are swept in x order and the
//! sweep stops once the x gap alone exceeds the current k-th distance.

use thiserror::Error;

use super::digamma::{digamma, DigammaTable};

#[derive(Debug, Error, PartialEq)]
pub enum KsgError {
    #[error("x and y differ in length ({x} vs {y})")]
    LengthMismatch { x: usize, y: usize },
    #[error("k = {k} needs at least k + 1 points, got {n}")]
    TooFewPoints { k: usize, n: usize },
    #[error("k must be at least 1")]
    ZeroNeighbors,
    #[error("non-finite input at position {0}")]
    NonFinite(usize),
}

/// KSG estimate of I(X; Y) in nats. Small negative values are returned as-is.
pub fn ksg_mi(x: &[f64], y: &[f64], k: usize) -> Result<f64, KsgError> {
    if x.len() != y.len() {
        return Err(KsgError::LengthMismatch {
            x: x.len(),
            y: y.len(),
        });
    }
    if k == 0 {
        return Err(KsgError::ZeroNeighbors);
    }
    let n = x.len();
    if k >= n {
        return Err(KsgError::TooFewPoints { k, n });
    }
    if let Some(i) = x
        .iter()
        .zip(y)
        .position(|(a, b)| !a.is_finite() || !b.is_finite())
    {
        return Err(KsgError::NonFinite(i));
    }

    let radii = kth_neighbor_radii(x, y, k);

    let mut xs = x.to_vec();
    let mut ys = y.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);

    let table = DigammaTable::new(n);
    let mut acc = 0.0;
    for i in 0..n {
        let eps = radii[i];
        let nx = strict_count(&xs, x[i], eps);
        let ny = strict_count(&ys, y[i], eps);
        acc += table.get(nx + 1) + table.get(ny + 1);
    }
    Ok(digamma(k as f64) + table.get(n) - acc / n as f64)
}

/// Number of values `v` in sorted `values` with `|v - center| < eps`,
/// excluding one copy of `center` itself.
fn strict_count(values: &[f64], center: f64, eps: f64) -> usize {
    if eps <= 0.0 {
        return 0;
    }
    // Both predicates are monotone over the sorted slice because floating
    // subtraction is monotone in each argument.
    let lo = values.partition_point(|&v| v < center && center - v >= eps);
    let hi = values.partition_point(|&v| v <= center || v - center < eps);
    hi - lo - 1
}

/// Max-norm distance from each point to its k-th nearest other point.
fn kth_neighbor_radii(x: &[f64], y: &[f64], k: usize) -> Vec<f64> {
    let n = x.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(y[a].total_cmp(&y[b])).then(a.cmp(&b)));
    let sx: Vec<f64> = order.iter().map(|&i| x[i]).collect();
    let sy: Vec<f64> = order.iter().map(|&i| y[i]).collect();

    let mut radii = vec![0.0; n];
    let mut best = KBest::new(k);
    for p in 0..n {
        best.clear();
        let (px, py) = (sx[p], sy[p]);
        let mut left = p;
        let mut right = p + 1;
        loop {
            let dl = if left > 0 { Some(px - sx[left - 1]) } else { None };
            let dr = if right < n { Some(sx[right] - px) } else { None };
            let (dx, idx) = match (dl, dr) {
                (Some(a), Some(b)) if a <= b => (a, left - 1),
                (Some(_), Some(b)) => (b, right),
                (Some(a), None) => (a, left - 1),
                (None, Some(b)) => (b, right),
                (None, None) => break,
            };
            if best.is_full() && dx >= best.worst() {
                break;
            }
            let d = dx.max((sy[idx] - py).abs());
            best.offer(d);
            if idx < p {
                left -= 1;
            } else {
                right += 1;
            }
        }
        radii[order[p]] = best.worst();
    }
    radii
}

/// The k smallest distances seen so far, kept sorted ascending.
struct KBest {
    k: usize,
    dists: Vec<f64>,
}

impl KBest {
    fn new(k: usize) -> Self {
        Self {
            k,
            dists: Vec::with_capacity(k + 1),
        }
    }

    fn clear(&mut self) {
        self.dists.clear();
    }

    fn is_full(&self) -> bool {
        self.dists.len() == self.k
    }

    fn worst(&self) -> f64 {
        *self.dists.last().expect("at least one neighbour offered")
    }

    fn offer(&mut self, d: f64) {
        if self.is_full() && d >= self.worst() {
            return;
        }
        let pos = self.dists.partition_point(|&v| v <= d);
        self.dists.insert(pos, d);
        if self.dists.len() > self.k {
            self.dists.pop();
        }
    }
}
