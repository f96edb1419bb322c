//! Numeric tolerances shared by every operation.

use serde::{Deserialize, Serialize};

use crate::convexity::{Grid, DEFAULT_CERTIFY_TOL};
use crate::optimize::{DEFAULT_GRID, DEFAULT_REFINE_TOL};
use crate::quad::DEFAULT_REL_TOL;

pub const DEFAULT_VERIFY_TOL: f64 = 1e-9;
pub const DEFAULT_MONOTONE_SAMPLES: usize = 101;

/// Every tunable numeric decision, echoed verbatim into reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub quad_tol: f64,
    pub certify_tol: f64,
    /// Absolute floor; the effective tolerance is `max(verify_tol, 10 * quad_error)`.
    pub verify_tol: f64,
    pub opt_grid: usize,
    pub opt_tol: f64,
    pub grid: Grid,
    pub monotone_samples: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            quad_tol: DEFAULT_REL_TOL,
            certify_tol: DEFAULT_CERTIFY_TOL,
            verify_tol: DEFAULT_VERIFY_TOL,
            opt_grid: DEFAULT_GRID,
            opt_tol: DEFAULT_REFINE_TOL,
            grid: Grid::DEFAULT,
            monotone_samples: DEFAULT_MONOTONE_SAMPLES,
        }
    }
}

impl Settings {
    pub fn effective_verify_tol(&self, quad_error: f64) -> f64 {
        self.verify_tol.max(10.0 * quad_error)
    }
}
