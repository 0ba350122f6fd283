//! Derivative-free simplex minimization with box constraints.
//!
//! Plain Nelder-Mead with candidate points projected into the box. Fully
//! deterministic: no restarts, no randomness. Objectives may return
//! non-finite values (e.g. rejected parameter regions); they are treated
//! as +infinity.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Stopping rules and simplex sizing.
#[derive(Debug, Clone)]
pub struct OptimConfig {
    pub max_iters: usize,
    /// Relative spread of simplex function values at which to stop.
    pub f_tol: f64,
    /// Simplex diameter (relative to the best point) at which to stop.
    pub x_tol: f64,
    /// Per-coordinate initial simplex step; defaults to a tenth of the
    /// coordinate scale.
    pub init_step: Option<Vec<f64>>,
}

impl Default for OptimConfig {
    fn default() -> Self {
        OptimConfig {
            max_iters: 4000,
            f_tol: 1e-12,
            x_tol: 1e-10,
            init_step: None,
        }
    }
}

/// Result of a simplex search; `x` is the best point seen even when the
/// iteration budget ran out (`converged` then reports false).
#[derive(Debug, Clone)]
pub struct OptimResult {
    pub x: Vec<f64>,
    pub fval: f64,
    pub iters: usize,
    pub evals: usize,
    pub converged: bool,
}

fn sanitize(f: f64) -> f64 {
    if f.is_nan() {
        f64::INFINITY
    } else {
        f
    }
}

fn clamp_into(x: &mut [f64], lower: &[f64], upper: &[f64]) {
    for ((xi, lo), hi) in x.iter_mut().zip(lower.iter()).zip(upper.iter()) {
        *xi = xi.clamp(*lo, *hi);
    }
}

/// Minimizes `f` over the box `[lower, upper]` starting near `init`.
pub fn nelder_mead_box<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    init: &[f64],
    lower: &[f64],
    upper: &[f64],
    cfg: &OptimConfig,
) -> Result<OptimResult> {
    let dim = init.len();
    if dim == 0 || lower.len() != dim || upper.len() != dim {
        return Err(Error::DimensionMismatch("init/lower/upper lengths disagree".to_string()));
    }
    if lower.iter().zip(upper.iter()).any(|(lo, hi)| !(lo < hi)) {
        return Err(Error::InvalidInput("box needs lower < upper".to_string()));
    }
    if let Some(steps) = &cfg.init_step {
        if steps.len() != dim {
            return Err(Error::DimensionMismatch("init_step length disagrees".to_string()));
        }
    }

    let mut evals = 0usize;
    let eval = |x: &[f64], f: &mut F, evals: &mut usize| -> f64 {
        *evals += 1;
        sanitize(f(x))
    };

    // Initial simplex: clamped start point plus one step per coordinate,
    // flipped when the step would leave the box.
    let mut x0 = init.to_vec();
    clamp_into(&mut x0, lower, upper);
    let mut simplex: Vec<Vec<f64>> = vec![x0.clone()];
    for i in 0..dim {
        let scale = match &cfg.init_step {
            Some(steps) => steps[i],
            None => 0.1 * x0[i].abs().max(0.1),
        };
        let mut v = x0.clone();
        if v[i] + scale <= upper[i] {
            v[i] += scale;
        } else {
            v[i] -= scale;
        }
        clamp_into(&mut v, lower, upper);
        simplex.push(v);
    }
    let mut fvals: Vec<f64> = simplex.iter().map(|v| eval(v, &mut f, &mut evals)).collect();

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut iters = 0usize;
    let mut converged = false;

    while iters < cfg.max_iters {
        iters += 1;

        // Order the simplex: best first.
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| fvals[a].partial_cmp(&fvals[b]).unwrap_or(core::cmp::Ordering::Equal));
        let reordered: Vec<Vec<f64>> = order.iter().map(|&i| simplex[i].clone()).collect();
        let refvals: Vec<f64> = order.iter().map(|&i| fvals[i]).collect();
        simplex = reordered;
        fvals = refvals;

        // Convergence: function spread and simplex diameter.
        let f_best = fvals[0];
        let f_worst = fvals[dim];
        let f_spread = if f_best.is_finite() && f_worst.is_finite() {
            (f_worst - f_best).abs()
        } else {
            f64::INFINITY
        };
        let x_scale = 1.0 + simplex[0].iter().map(|v| v.abs()).fold(0.0, f64::max);
        let diam = simplex[1..]
            .iter()
            .map(|v| {
                v.iter()
                    .zip(simplex[0].iter())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if f_spread <= cfg.f_tol * (1.0 + f_best.abs()) && diam <= cfg.x_tol * x_scale {
            converged = true;
            break;
        }

        // Centroid of all but the worst vertex.
        let mut centroid = vec![0.0; dim];
        for v in simplex.iter().take(dim) {
            for (c, vi) in centroid.iter_mut().zip(v.iter()) {
                *c += vi / dim as f64;
            }
        }

        let move_point = |coef: f64, from: &[f64]| -> Vec<f64> {
            let mut p: Vec<f64> = centroid
                .iter()
                .zip(from.iter())
                .map(|(c, w)| c + coef * (c - w))
                .collect();
            clamp_into(&mut p, lower, upper);
            p
        };

        let reflected = move_point(alpha, &simplex[dim]);
        let f_reflected = eval(&reflected, &mut f, &mut evals);

        if f_reflected < fvals[0] {
            let expanded = move_point(gamma, &simplex[dim]);
            let f_expanded = eval(&expanded, &mut f, &mut evals);
            if f_expanded < f_reflected {
                simplex[dim] = expanded;
                fvals[dim] = f_expanded;
            } else {
                simplex[dim] = reflected;
                fvals[dim] = f_reflected;
            }
        } else if f_reflected < fvals[dim - 1] {
            simplex[dim] = reflected;
            fvals[dim] = f_reflected;
        } else {
            // Contraction: toward the reflected point when it improved on
            // the worst vertex, toward the worst vertex otherwise.
            let toward = if f_reflected < fvals[dim] {
                reflected.clone()
            } else {
                simplex[dim].clone()
            };
            let mut point: Vec<f64> = centroid
                .iter()
                .zip(toward.iter())
                .map(|(c, w)| c + rho * (w - c))
                .collect();
            clamp_into(&mut point, lower, upper);
            let value = eval(&point, &mut f, &mut evals);
            if value < fvals[dim].min(f_reflected) {
                simplex[dim] = point;
                fvals[dim] = value;
            } else {
                // Shrink toward the best vertex.
                for i in 1..=dim {
                    let mut v: Vec<f64> = simplex[0]
                        .iter()
                        .zip(simplex[i].iter())
                        .map(|(b, w)| b + sigma * (w - b))
                        .collect();
                    clamp_into(&mut v, lower, upper);
                    fvals[i] = eval(&v, &mut f, &mut evals);
                    simplex[i] = v;
                }
            }
        }
    }

    // Best vertex after the final ordering.
    let mut best = 0;
    for i in 1..=dim {
        if fvals[i] < fvals[best] {
            best = i;
        }
    }
    Ok(OptimResult {
        x: simplex[best].clone(),
        fval: fvals[best],
        iters,
        evals,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn quadratic_bowl() {
        let r = nelder_mead_box(
            |x| (x[0] - 1.5).powi(2) + 3.0 * (x[1] + 0.5).powi(2),
            &[0.0, 0.0],
            &[-10.0, -10.0],
            &[10.0, 10.0],
            &OptimConfig::default(),
        )
        .unwrap();
        assert!(r.converged);
        assert_abs_diff_eq!(r.x[0], 1.5, epsilon = 1e-6);
        assert_abs_diff_eq!(r.x[1], -0.5, epsilon = 1e-6);
    }

    #[test]
    fn optimum_on_box_face() {
        // Unconstrained minimum at 3, box caps at 2.
        let r = nelder_mead_box(
            |x| (x[0] - 3.0).powi(2),
            &[0.0],
            &[-2.0],
            &[2.0],
            &OptimConfig::default(),
        )
        .unwrap();
        assert_abs_diff_eq!(r.x[0], 2.0, epsilon = 1e-6);
    }

    #[test]
    fn init_outside_box_is_projected() {
        let r = nelder_mead_box(
            |x| x[0] * x[0],
            &[50.0],
            &[-1.0],
            &[1.0],
            &OptimConfig::default(),
        )
        .unwrap();
        assert_abs_diff_eq!(r.x[0], 0.0, epsilon = 1e-6);
    }

    #[test]
    fn infinite_regions_are_avoided() {
        // Objective rejects x < 0 entirely.
        let r = nelder_mead_box(
            |x| {
                if x[0] < 0.0 {
                    f64::INFINITY
                } else {
                    (x[0] - 0.3).powi(2)
                }
            },
            &[0.9],
            &[-5.0],
            &[5.0],
            &OptimConfig::default(),
        )
        .unwrap();
        assert_abs_diff_eq!(r.x[0], 0.3, epsilon = 1e-6);
        assert!(r.fval.is_finite());
    }

    #[test]
    fn rosenbrock_reasonable() {
        let r = nelder_mead_box(
            |x| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2),
            &[-1.2, 1.0],
            &[-5.0, -5.0],
            &[5.0, 5.0],
            &OptimConfig { max_iters: 20_000, ..OptimConfig::default() },
        )
        .unwrap();
        assert_abs_diff_eq!(r.x[0], 1.0, epsilon = 1e-4);
        assert_abs_diff_eq!(r.x[1], 1.0, epsilon = 1e-4);
    }

    #[test]
    fn result_never_worse_than_projected_init() {
        let f = |x: &[f64]| (x[0] - 0.2).powi(2) + (x[1] * x[1] - 0.5).powi(2);
        let init = [3.0, -3.0];
        let lower = [-1.0, -1.0];
        let upper = [1.0, 1.0];
        let r = nelder_mead_box(f, &init, &lower, &upper, &OptimConfig::default()).unwrap();
        let mut proj = init.to_vec();
        clamp_into(&mut proj, &lower, &upper);
        assert!(r.fval <= f(&proj));
    }

    #[test]
    fn rejects_bad_box() {
        assert!(nelder_mead_box(|x| x[0], &[0.0], &[1.0], &[0.0], &OptimConfig::default()).is_err());
    }
}
