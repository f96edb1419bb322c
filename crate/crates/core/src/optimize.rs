//! Grid search followed by golden-section refinement on `[a, b]`.

use serde::Serialize;
use thiserror::Error;

use crate::expr::Evaluable;
use crate::quad::Interval;

pub const DEFAULT_GRID: usize = 257;
pub const DEFAULT_REFINE_TOL: f64 = 1e-10;

// 1/phi
const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimumResult {
    pub x_star: f64,
    pub value: f64,
    pub evaluations: usize,
    /// Whether golden-section refinement improved on the best grid sample.
    pub refined: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum OptimizeError {
    #[error("grid needs at least 3 points, got {0}")]
    GridTooSmall(usize),
    #[error("refinement tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("objective not evaluable at any grid point")]
    NoEvaluablePoint,
}

/// Minimizes `phi` over `iv`. Ties on the grid resolve to the lowest `x`.
pub fn minimize_scalar<F: Evaluable + ?Sized>(
    phi: &F,
    iv: Interval,
    n_grid: usize,
    refine_tol: f64,
) -> Result<OptimumResult, OptimizeError> {
    search(|x| phi.value_at(x).ok(), iv, n_grid, refine_tol)
}

/// Maximizes `phi` over `iv` by minimizing `-phi`.
pub fn maximize_scalar<F: Evaluable + ?Sized>(
    phi: &F,
    iv: Interval,
    n_grid: usize,
    refine_tol: f64,
) -> Result<OptimumResult, OptimizeError> {
    let mut r = search(|x| phi.value_at(x).ok().map(|v| -v), iv, n_grid, refine_tol)?;
    r.value = -r.value;
    Ok(r)
}

fn search<G>(
    objective: G,
    iv: Interval,
    n_grid: usize,
    refine_tol: f64,
) -> Result<OptimumResult, OptimizeError>
where
    G: Fn(f64) -> Option<f64>,
{
    if n_grid < 3 {
        return Err(OptimizeError::GridTooSmall(n_grid));
    }
    if !(refine_tol > 0.0 && refine_tol.is_finite()) {
        return Err(OptimizeError::InvalidTolerance(refine_tol));
    }
    let xs = iv.grid(n_grid);
    let mut evaluations = 0;
    let mut best: Option<(usize, f64)> = None;
    for (i, &x) in xs.iter().enumerate() {
        evaluations += 1;
        if let Some(v) = objective(x) {
            if best.map_or(true, |(_, b)| v < b) {
                best = Some((i, v));
            }
        }
    }
    let (k, grid_value) = best.ok_or(OptimizeError::NoEvaluablePoint)?;

    let mut lo = xs[k.saturating_sub(1)];
    let mut hi = xs[(k + 1).min(xs.len() - 1)];
    let width_goal = refine_tol * iv.width();
    let eval = |x: f64| objective(x).unwrap_or(f64::INFINITY);

    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = eval(x1);
    let mut f2 = eval(x2);
    evaluations += 2;
    while hi - lo > width_goal {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = eval(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = eval(x2);
        }
        evaluations += 1;
    }
    let (x_gold, f_gold) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };

    if f_gold < grid_value {
        Ok(OptimumResult {
            x_star: x_gold.clamp(iv.a(), iv.b()),
            value: f_gold,
            evaluations,
            refined: true,
        })
    } else {
        Ok(OptimumResult {
            x_star: xs[k],
            value: grid_value,
            evaluations,
            refined: false,
        })
    }
}
