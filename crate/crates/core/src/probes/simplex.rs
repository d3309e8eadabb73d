//! Nelder–Mead simplex search on a box. Trial points are clamped into the
//! box before evaluation.

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
}

pub fn minimize_box<F>(
    mut f: F,
    start: &[f64],
    lower: &[f64],
    upper: &[f64],
    max_evals: usize,
    ftol: f64,
) -> SimplexResult
where
    F: FnMut(&[f64]) -> f64,
{
    let d = start.len();
    let clamp = |x: &mut [f64]| {
        for i in 0..x.len() {
            x[i] = x[i].clamp(lower[i], upper[i]);
        }
    };
    let mut evals = 0;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut x0 = start.to_vec();
    clamp(&mut x0);
    if d == 0 {
        let value = eval(&x0, &mut evals);
        return SimplexResult {
            x: x0,
            value,
            evaluations: evals,
        };
    }

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    let v0 = eval(&x0, &mut evals);
    simplex.push((x0.clone(), v0));
    for i in 0..d {
        let mut x = x0.clone();
        let step = 0.1 * (upper[i] - lower[i]);
        x[i] = if x[i] + step <= upper[i] { x[i] + step } else { x[i] - step };
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }

    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[d].1;
        if (worst - best).abs() <= ftol * (best.abs() + ftol) && worst.is_finite() {
            break;
        }

        let mut centroid = vec![0.0; d];
        for (x, _) in &simplex[..d] {
            for j in 0..d {
                centroid[j] += x[j] / d as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            let mut p: Vec<f64> = (0..d)
                .map(|j| centroid[j] + t * (simplex[d].0[j] - centroid[j]))
                .collect();
            clamp(&mut p);
            p
        };

        let reflected = along(-1.0);
        let fr = eval(&reflected, &mut evals);
        if fr < simplex[0].1 {
            let expanded = along(-2.0);
            let fe = eval(&expanded, &mut evals);
            simplex[d] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
            continue;
        }
        if fr < simplex[d - 1].1 {
            simplex[d] = (reflected, fr);
            continue;
        }
        let (contracted, fc) = if fr < simplex[d].1 {
            let c = along(-0.5);
            let v = eval(&c, &mut evals);
            (c, v)
        } else {
            let c = along(0.5);
            let v = eval(&c, &mut evals);
            (c, v)
        };
        if fc < simplex[d].1.min(fr) {
            simplex[d] = (contracted, fc);
            continue;
        }
        // shrink towards the best vertex
        let best_x = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let mut x: Vec<f64> = (0..d)
                .map(|j| best_x[j] + 0.5 * (vertex.0[j] - best_x[j]))
                .collect();
            clamp(&mut x);
            let v = eval(&x, &mut evals);
            *vertex = (x, v);
        }
    }

    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    SimplexResult {
        x,
        value,
        evaluations: evals,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_interior_minimum() {
        let r = minimize_box(
            |x| (x[0] - 0.3).powi(2) + 2.0 * (x[1] - 0.7).powi(2),
            &[0.5, 0.5],
            &[0.0, 0.0],
            &[1.0, 1.0],
            2000,
            1e-14,
        );
        assert!((r.x[0] - 0.3).abs() < 1e-4 && (r.x[1] - 0.7).abs() < 1e-4, "{r:?}");
    }

    #[test]
    fn respects_bounds() {
        let r = minimize_box(|x| -x[0] - x[1], &[0.5, 0.9], &[0.0, 0.8], &[1.0, 0.98], 500, 1e-12);
        assert!(r.x[0] <= 1.0 && r.x[1] <= 0.98);
        assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] - 0.98).abs() < 1e-6);
    }

    #[test]
    fn nan_objective_is_treated_as_infinite() {
        let r = minimize_box(
            |x| if x[0] > 0.5 { f64::NAN } else { (x[0] - 0.2).powi(2) },
            &[0.4],
            &[0.0],
            &[1.0],
            500,
            1e-12,
        );
        assert!((r.x[0] - 0.2).abs() < 1e-3);
    }
}
