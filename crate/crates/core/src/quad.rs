//! Adaptive composite Gauss–Legendre quadrature.
//!
//! Each panel is integrated with the 5-point Gauss–Legendre rule, once over
//! the whole panel and once as the sum over its two halves. The difference
//! of the two is the panel's error estimate. Panels are bisected worst-first
//! until the summed estimate drops below `max(rel_tol * |value|, 1e-14)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{DomainFault, EvalOutcome, Evaluable};

pub const DEFAULT_REL_TOL: f64 = 1e-10;
pub const MAX_DEPTH: u32 = 40;
/// Absolute floor on the requested accuracy.
pub const ABS_FLOOR: f64 = 1e-14;
const MAX_PANELS: usize = 1 << 16;

const GL5_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const GL5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_08,
    0.478_628_670_499_366_47,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_47,
    0.236_926_885_056_189_08,
];

/// Closed interval `[a, b]` with `a < b`, both finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInterval")]
pub struct Interval {
    a: f64,
    b: f64,
}

#[derive(Deserialize)]
struct RawInterval {
    a: f64,
    b: f64,
}

impl TryFrom<RawInterval> for Interval {
    type Error = IntervalError;

    fn try_from(raw: RawInterval) -> Result<Self, Self::Error> {
        Interval::new(raw.a, raw.b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum IntervalError {
    #[error("interval endpoints must be finite, got [{a}, {b}]")]
    NonFinite { a: f64, b: f64 },
    #[error("interval requires a < b, got [{a}, {b}]")]
    NotIncreasing { a: f64, b: f64 },
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self, IntervalError> {
        if !a.is_finite() || !b.is_finite() {
            return Err(IntervalError::NonFinite { a, b });
        }
        if a >= b {
            return Err(IntervalError::NotIncreasing { a, b });
        }
        Ok(Interval { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    /// `a + (b - a) / 2`.
    pub fn midpoint(&self) -> f64 {
        self.a + (self.b - self.a) / 2.0
    }

    /// `n` equispaced points with both endpoints included exactly.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        match n {
            0 => Vec::new(),
            1 => vec![self.a],
            _ => {
                let step = self.width() / (n - 1) as f64;
                (0..n)
                    .map(|i| if i == n - 1 { self.b } else { self.a + i as f64 * step })
                    .collect()
            }
        }
    }

    /// `a + b - x`, the reflection of `x` about the midpoint.
    pub fn reflect(&self, x: f64) -> f64 {
        (self.a + self.b) - x
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    /// Sum of the last refinement deltas over all accepted panels.
    pub err_estimate: f64,
    /// Number of bisections beyond the initial whole-interval comparison.
    pub subdivisions: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("relative tolerance {0} outside [1e-14, 1e-2]")]
    InvalidTolerance(f64),
    #[error("integrand not evaluable at x = {abscissa}: {fault}")]
    DomainFault { abscissa: f64, fault: DomainFault },
    #[error("no convergence after {} subdivisions (best value {}, error estimate {})", best.subdivisions, best.value, best.err_estimate)]
    NotConverged { best: QuadResult },
}

impl QuadError {
    /// The best available value, when the failure was non-convergence.
    pub fn best(&self) -> Option<QuadResult> {
        match self {
            QuadError::NotConverged { best } => Some(*best),
            _ => None,
        }
    }
}

fn gl5<F: Evaluable + ?Sized>(f: &F, lo: f64, hi: f64) -> Result<f64, QuadError> {
    let half = 0.5 * (hi - lo);
    let centre = lo + half;
    let mut sum = 0.0;
    for (node, weight) in GL5_NODES.iter().zip(GL5_WEIGHTS.iter()) {
        let x = centre + half * node;
        let y = f
            .value_at(x)
            .map_err(|fault| QuadError::DomainFault { abscissa: x, fault })?;
        sum += weight * y;
    }
    Ok(half * sum)
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    left: f64,
    right: f64,
    err: f64,
    depth: u32,
    // insertion order, for a deterministic heap
    seq: usize,
}

impl Panel {
    fn build<F: Evaluable + ?Sized>(
        f: &F,
        lo: f64,
        hi: f64,
        coarse: f64,
        depth: u32,
        seq: usize,
    ) -> Result<Self, QuadError> {
        let mid = lo + 0.5 * (hi - lo);
        let left = gl5(f, lo, mid)?;
        let right = gl5(f, mid, hi)?;
        Ok(Panel {
            lo,
            hi,
            left,
            right,
            err: ((left + right) - coarse).abs(),
            depth,
            seq,
        })
    }

    fn value(&self) -> f64 {
        self.left + self.right
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

fn summarize(panels: &mut [Panel], subdivisions: usize) -> QuadResult {
    panels.sort_by(|p, q| p.lo.total_cmp(&q.lo));
    QuadResult {
        value: panels.iter().map(Panel::value).sum(),
        err_estimate: panels.iter().map(|p| p.err).sum(),
        subdivisions,
    }
}

/// Integrates `f` over `iv` to relative tolerance `rel_tol`.
pub fn integrate<F: Evaluable + ?Sized>(
    f: &F,
    iv: Interval,
    rel_tol: f64,
) -> Result<QuadResult, QuadError> {
    if !(1e-14..=1e-2).contains(&rel_tol) {
        return Err(QuadError::InvalidTolerance(rel_tol));
    }
    let coarse = gl5(f, iv.a, iv.b)?;
    let mut seq = 0;
    let root = Panel::build(f, iv.a, iv.b, coarse, 0, seq)?;
    let mut total = root.value();
    let mut total_err = root.err;
    let mut heap = BinaryHeap::from([root]);
    let mut subdivisions = 0;

    loop {
        if total_err <= (rel_tol * total.abs()).max(ABS_FLOOR) {
            break;
        }
        let worst = match heap.peek() {
            Some(p) => *p,
            None => break,
        };
        if worst.depth >= MAX_DEPTH || heap.len() >= MAX_PANELS {
            let mut panels = heap.into_vec();
            let best = summarize(&mut panels, subdivisions);
            return Err(QuadError::NotConverged { best });
        }
        heap.pop();
        let mid = worst.lo + 0.5 * (worst.hi - worst.lo);
        seq += 1;
        let l = Panel::build(f, worst.lo, mid, worst.left, worst.depth + 1, seq)?;
        seq += 1;
        let r = Panel::build(f, mid, worst.hi, worst.right, worst.depth + 1, seq)?;
        total += l.value() + r.value() - worst.value();
        total_err += l.err + r.err - worst.err;
        heap.push(l);
        heap.push(r);
        subdivisions += 1;
    }

    let mut panels = heap.into_vec();
    Ok(summarize(&mut panels, subdivisions))
}

/// Integral of `x -> f(x) f(a+b-x) + g(x) g(a+b-x)` over `iv`.
pub fn integrate_symmetric_product<F, G>(
    f: &F,
    g: &G,
    iv: Interval,
    rel_tol: f64,
) -> Result<QuadResult, QuadError>
where
    F: Evaluable + ?Sized,
    G: Evaluable + ?Sized,
{
    let integrand = |x: f64| -> EvalOutcome {
        let xr = iv.reflect(x);
        Ok(f.value_at(x)? * f.value_at(xr)? + g.value_at(x)? * g.value_at(xr)?)
    };
    integrate(&integrand, iv, rel_tol)
}
