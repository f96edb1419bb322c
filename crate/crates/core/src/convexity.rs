//! Grid-based certification of convexity-class membership.
//!
//! A certificate is one-sided: `Certified` means no violation larger than
//! the tolerance was found on the sampled grid, not a proof.
//!
//! Slack is measured per class:
//! - log classes compare logarithms, `ln f(z) - [t ln f(x) + (1-t) ln f(y)]`,
//!   so the tolerance is relative to the size of `f`;
//! - convex, m-convex and (alpha, m)-convex compare values directly,
//!   `f(z) - [t^a f(x) + m (1 - t^a) f(y)]` with `z = t x + m (1-t) y`,
//!   divided by `max(1, |f(x)|, |f(y)|, |f(z)|)`. For values of unit size
//!   or smaller this is the plain absolute slack.

use std::cell::RefCell;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{DomainFault, Evaluable, Expr};
use crate::quad::Interval;

pub const DEFAULT_CERTIFY_TOL: f64 = 1e-9;

/// Resolution of the sampling grid: `n_xy` points for each of `x` and `y`,
/// `n_t` values of `t` in `[0, 1]`, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    pub n_xy: usize,
    pub n_t: usize,
}

impl Grid {
    pub const DEFAULT: Grid = Grid { n_xy: 41, n_t: 21 };

    pub fn new(n_xy: usize, n_t: usize) -> Result<Self, ClassError> {
        if n_xy < 2 || n_t < 2 {
            return Err(ClassError::GridTooSmall { n_xy, n_t });
        }
        Ok(Grid { n_xy, n_t })
    }
}

impl Default for Grid {
    fn default() -> Self {
        Grid::DEFAULT
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ClassError {
    #[error("parameter {name} = {value} outside (0, 1]")]
    ParameterOutOfRange { name: &'static str, value: f64 },
    #[error("grid needs at least 2 points per axis, got ({n_xy}, {n_t})")]
    GridTooSmall { n_xy: usize, n_t: usize },
}

/// Which defining inequality to check, with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", try_from = "RawClassSpec")]
pub enum ClassSpec {
    Convex,
    LogConvex,
    LogConcave,
    MConvex { m: f64 },
    AlphaMConvex { alpha: f64, m: f64 },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum RawClassSpec {
    Convex,
    LogConvex,
    LogConcave,
    MConvex { m: f64 },
    AlphaMConvex { alpha: f64, m: f64 },
}

impl TryFrom<RawClassSpec> for ClassSpec {
    type Error = ClassError;

    fn try_from(raw: RawClassSpec) -> Result<Self, Self::Error> {
        match raw {
            RawClassSpec::Convex => Ok(ClassSpec::Convex),
            RawClassSpec::LogConvex => Ok(ClassSpec::LogConvex),
            RawClassSpec::LogConcave => Ok(ClassSpec::LogConcave),
            RawClassSpec::MConvex { m } => ClassSpec::m_convex(m),
            RawClassSpec::AlphaMConvex { alpha, m } => ClassSpec::alpha_m_convex(alpha, m),
        }
    }
}

fn unit_param(name: &'static str, value: f64) -> Result<f64, ClassError> {
    if value > 0.0 && value <= 1.0 {
        Ok(value)
    } else {
        Err(ClassError::ParameterOutOfRange { name, value })
    }
}

impl ClassSpec {
    pub fn m_convex(m: f64) -> Result<Self, ClassError> {
        Ok(ClassSpec::MConvex {
            m: unit_param("m", m)?,
        })
    }

    pub fn alpha_m_convex(alpha: f64, m: f64) -> Result<Self, ClassError> {
        Ok(ClassSpec::AlphaMConvex {
            alpha: unit_param("alpha", alpha)?,
            m: unit_param("m", m)?,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            ClassSpec::Convex => "convex",
            ClassSpec::LogConvex => "log_convex",
            ClassSpec::LogConcave => "log_concave",
            ClassSpec::MConvex { .. } => "m_convex",
            ClassSpec::AlphaMConvex { .. } => "alpha_m_convex",
        }
    }

    fn is_log(&self) -> bool {
        matches!(self, ClassSpec::LogConvex | ClassSpec::LogConcave)
    }

    /// `(alpha, m)` for the value-space classes.
    fn alpha_m(&self) -> (f64, f64) {
        match *self {
            ClassSpec::MConvex { m } => (1.0, m),
            ClassSpec::AlphaMConvex { alpha, m } => (alpha, m),
            _ => (1.0, 1.0),
        }
    }

    /// The point at which the left-hand side is evaluated.
    pub fn combined_point(&self, x: f64, y: f64, t: f64) -> f64 {
        let (_, m) = self.alpha_m();
        t * x + m * (1.0 - t) * y
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Certified,
    Refuted,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CounterexampleKind {
    /// The defining inequality fails by more than the tolerance.
    Inequality,
    /// A log class met a non-positive value at `x`.
    NonPositive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub x: f64,
    pub y: f64,
    pub t: f64,
    pub kind: CounterexampleKind,
    /// Slack at the point; absent for `NonPositive`.
    pub violation: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FaultLocation {
    pub x: f64,
    pub fault: DomainFault,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityCertificate {
    pub spec: ClassSpec,
    pub domain: Interval,
    pub grid: Grid,
    pub certify_tol: f64,
    /// Largest slack over the grid; `<= certify_tol` means satisfied.
    /// Absent when the check stopped before any inequality was evaluated.
    pub worst_violation: Option<f64>,
    pub verdict: Verdict,
    pub counterexample: Option<Counterexample>,
    /// Range of abscissae actually evaluated (combined points may leave the domain).
    pub evaluation_range: (f64, f64),
    pub fault: Option<FaultLocation>,
    /// `f(0)`, for the m-classes, when evaluable.
    pub f_at_zero: Option<f64>,
    /// Membership in K_m(b) / K_m^alpha(b): certified and `f(0) <= 0`.
    #[serde(rename = "in_K_class")]
    pub in_k_class: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    NonIncreasing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityCertificate {
    pub direction: Direction,
    pub domain: Interval,
    pub samples: usize,
    pub certify_tol: f64,
    pub worst_violation: Option<f64>,
    pub verdict: Verdict,
    /// Adjacent samples `(x_i, x_{i+1})` with the largest increase.
    pub counterexample: Option<(f64, f64)>,
    pub fault: Option<FaultLocation>,
}

/// Why the defining inequality could not be evaluated at a point.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum PointError {
    #[error("f({x}) = {value} is not positive")]
    NonPositive { x: f64, value: f64 },
    #[error("f not evaluable at {x}: {fault}")]
    Fault { x: f64, fault: DomainFault },
}

fn sample<F: Evaluable + ?Sized>(f: &F, x: f64) -> Result<f64, PointError> {
    f.value_at(x).map_err(|fault| PointError::Fault { x, fault })
}

fn log_sample<F: Evaluable + ?Sized>(f: &F, x: f64) -> Result<f64, PointError> {
    let v = sample(f, x)?;
    if v > 0.0 {
        Ok(v.ln())
    } else {
        Err(PointError::NonPositive { x, value: v })
    }
}

fn value_slack(fz: f64, fx: f64, fy: f64, t_alpha: f64, m: f64) -> f64 {
    let rhs = t_alpha * fx + m * ((1.0 - t_alpha) * fy);
    let scale = 1f64.max(fx.abs()).max(fy.abs()).max(fz.abs());
    (fz - rhs) / scale
}

fn log_slack(spec: &ClassSpec, lz: f64, lx: f64, ly: f64, t: f64) -> f64 {
    let chord = t * lx + (1.0 - t) * ly;
    match spec {
        ClassSpec::LogConcave => chord - lz,
        _ => lz - chord,
    }
}

/// Slack of the defining inequality of `spec` at `(x, y, t)`; positive
/// means the inequality fails there.
pub fn violation_at<F: Evaluable + ?Sized>(
    f: &F,
    spec: &ClassSpec,
    x: f64,
    y: f64,
    t: f64,
) -> Result<f64, PointError> {
    let z = spec.combined_point(x, y, t);
    if spec.is_log() {
        let lx = log_sample(f, x)?;
        let ly = log_sample(f, y)?;
        let lz = log_sample(f, z)?;
        Ok(log_slack(spec, lz, lx, ly, t))
    } else {
        let (alpha, m) = spec.alpha_m();
        let fx = sample(f, x)?;
        let fy = sample(f, y)?;
        let fz = sample(f, z)?;
        Ok(value_slack(fz, fx, fy, t_pow(t, alpha), m))
    }
}

fn t_pow(t: f64, alpha: f64) -> f64 {
    if alpha == 1.0 {
        t
    } else {
        t.powf(alpha)
    }
}

/// Checks the defining inequality of `spec` on the tensor grid.
pub fn certify<F: Evaluable + ?Sized>(
    f: &F,
    spec: ClassSpec,
    domain: Interval,
    grid: Grid,
    certify_tol: f64,
) -> ConvexityCertificate {
    run_certify(f, spec, domain, grid, certify_tol, false)
}

/// As [`certify`], but stops at the first violation above tolerance.
/// The reported worst violation is then only a lower bound.
pub fn certify_fast_reject<F: Evaluable + ?Sized>(
    f: &F,
    spec: ClassSpec,
    domain: Interval,
    grid: Grid,
    certify_tol: f64,
) -> ConvexityCertificate {
    run_certify(f, spec, domain, grid, certify_tol, true)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct MemoKey {
    expr: String,
    class: &'static str,
    params: [u64; 2],
    domain: [u64; 2],
    grid: (usize, usize),
    tol: u64,
}

thread_local! {
    static MEMO: RefCell<Option<HashMap<MemoKey, ConvexityCertificate>>> =
        const { RefCell::new(None) };
}

struct MemoScope(Option<HashMap<MemoKey, ConvexityCertificate>>);

impl Drop for MemoScope {
    fn drop(&mut self) {
        let previous = self.0.take();
        MEMO.with(|m| *m.borrow_mut() = previous);
    }
}

/// Runs `body` with certificates from [`certify_expr`] memoized on this
/// thread. Memoized results are identical to recomputed ones.
pub fn with_memo<R>(body: impl FnOnce() -> R) -> R {
    let previous = MEMO.with(|m| m.borrow_mut().replace(HashMap::new()));
    let _scope = MemoScope(previous);
    body()
}

/// [`certify`] or [`certify_fast_reject`] for an expression, consulting the
/// memo inside [`with_memo`]. A fast-reject run is stored only when it
/// certifies, since only then did it scan the whole grid.
pub fn certify_expr(
    f: &Expr,
    spec: ClassSpec,
    domain: Interval,
    grid: Grid,
    certify_tol: f64,
    fast_reject: bool,
) -> ConvexityCertificate {
    let active = MEMO.with(|m| m.borrow().is_some());
    if !active {
        return run_certify(&f.compile(), spec, domain, grid, certify_tol, fast_reject);
    }
    let (alpha, m) = spec.alpha_m();
    let key = MemoKey {
        expr: f.pretty(),
        class: spec.name(),
        params: [alpha.to_bits(), m.to_bits()],
        domain: [domain.a().to_bits(), domain.b().to_bits()],
        grid: (grid.n_xy, grid.n_t),
        tol: certify_tol.to_bits(),
    };
    if let Some(hit) = MEMO.with(|m| m.borrow().as_ref().and_then(|map| map.get(&key).cloned())) {
        return hit;
    }
    let cert = run_certify(&f.compile(), spec, domain, grid, certify_tol, fast_reject);
    if !fast_reject || cert.verdict == Verdict::Certified {
        MEMO.with(|m| {
            if let Some(map) = m.borrow_mut().as_mut() {
                map.insert(key, cert.clone());
            }
        });
    }
    cert
}

fn run_certify<F: Evaluable + ?Sized>(
    f: &F,
    spec: ClassSpec,
    domain: Interval,
    grid: Grid,
    certify_tol: f64,
    stop_early: bool,
) -> ConvexityCertificate {
    let mut cert = ConvexityCertificate {
        spec,
        domain,
        grid,
        certify_tol,
        worst_violation: None,
        verdict: Verdict::Inconclusive,
        counterexample: None,
        evaluation_range: (domain.a(), domain.b()),
        fault: None,
        f_at_zero: None,
        in_k_class: None,
    };
    let points = domain.grid(grid.n_xy);
    let ts = Interval::new(0.0, 1.0).expect("unit interval").grid(grid.n_t);

    // values (or logs) at the grid abscissae, shared by x and y
    let transform = |x: f64| {
        if spec.is_log() {
            log_sample(f, x)
        } else {
            sample(f, x)
        }
    };
    let mut at_grid = Vec::with_capacity(points.len());
    for &x in &points {
        match transform(x) {
            Ok(v) => at_grid.push(v),
            Err(e) => {
                record_point_error(&mut cert, e);
                return finish_k_class(f, cert);
            }
        }
    }

    let (alpha, m) = spec.alpha_m();
    let t_alpha: Vec<f64> = ts.iter().map(|&t| t_pow(t, alpha)).collect();
    let mut worst = f64::NEG_INFINITY;
    let mut worst_at = (0.0, 0.0, 0.0);
    let (mut lo, mut hi) = (domain.a(), domain.b());

    'outer: for (i, &x) in points.iter().enumerate() {
        for (j, &y) in points.iter().enumerate() {
            for (k, &t) in ts.iter().enumerate() {
                let z = spec.combined_point(x, y, t);
                lo = lo.min(z);
                hi = hi.max(z);
                let slack = match transform(z) {
                    Ok(vz) => {
                        if spec.is_log() {
                            log_slack(&spec, vz, at_grid[i], at_grid[j], t)
                        } else {
                            value_slack(vz, at_grid[i], at_grid[j], t_alpha[k], m)
                        }
                    }
                    Err(e) => {
                        cert.evaluation_range = (lo, hi);
                        if worst.is_finite() {
                            cert.worst_violation = Some(worst);
                        }
                        record_point_error(&mut cert, e);
                        return finish_k_class(f, cert);
                    }
                };
                if slack > worst {
                    worst = slack;
                    worst_at = (x, y, t);
                    if stop_early && worst > certify_tol {
                        break 'outer;
                    }
                }
            }
        }
    }

    cert.evaluation_range = (lo, hi);
    cert.worst_violation = Some(worst);
    if worst <= certify_tol {
        cert.verdict = Verdict::Certified;
    } else {
        cert.verdict = Verdict::Refuted;
        cert.counterexample = Some(Counterexample {
            x: worst_at.0,
            y: worst_at.1,
            t: worst_at.2,
            kind: CounterexampleKind::Inequality,
            violation: Some(worst),
        });
    }
    finish_k_class(f, cert)
}

fn record_point_error(cert: &mut ConvexityCertificate, e: PointError) {
    match e {
        PointError::NonPositive { x, .. } => {
            cert.verdict = Verdict::Refuted;
            cert.counterexample = Some(Counterexample {
                x,
                y: x,
                t: 1.0,
                kind: CounterexampleKind::NonPositive,
                violation: None,
            });
        }
        PointError::Fault { x, fault } => {
            cert.verdict = Verdict::Inconclusive;
            cert.fault = Some(FaultLocation { x, fault });
        }
    }
}

fn finish_k_class<F: Evaluable + ?Sized>(
    f: &F,
    mut cert: ConvexityCertificate,
) -> ConvexityCertificate {
    if matches!(
        cert.spec,
        ClassSpec::MConvex { .. } | ClassSpec::AlphaMConvex { .. }
    ) {
        if let Ok(f0) = f.value_at(0.0) {
            cert.f_at_zero = Some(f0);
            cert.in_k_class = Some(cert.verdict == Verdict::Certified && f0 <= 0.0);
        }
    }
    cert
}

/// Checks `f(x_i) >= f(x_{i+1}) - tol` over `n` equispaced samples.
pub fn certify_monotone<F: Evaluable + ?Sized>(
    f: &F,
    domain: Interval,
    n: usize,
    certify_tol: f64,
) -> MonotonicityCertificate {
    let mut cert = MonotonicityCertificate {
        direction: Direction::NonIncreasing,
        domain,
        samples: n,
        certify_tol,
        worst_violation: None,
        verdict: Verdict::Inconclusive,
        counterexample: None,
        fault: None,
    };
    let points = domain.grid(n.max(2));
    let mut values = Vec::with_capacity(points.len());
    for &x in &points {
        match f.value_at(x) {
            Ok(v) => values.push(v),
            Err(fault) => {
                cert.fault = Some(FaultLocation { x, fault });
                return cert;
            }
        }
    }
    let mut worst = f64::NEG_INFINITY;
    let mut worst_at = (points[0], points[1]);
    for (w, p) in values.windows(2).zip(points.windows(2)) {
        let scale = 1f64.max(w[0].abs()).max(w[1].abs());
        let rise = (w[1] - w[0]) / scale;
        if rise > worst {
            worst = rise;
            worst_at = (p[0], p[1]);
        }
    }
    cert.worst_violation = Some(worst);
    if worst <= certify_tol {
        cert.verdict = Verdict::Certified;
    } else {
        cert.verdict = Verdict::Refuted;
        cert.counterexample = Some(worst_at);
    }
    cert
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn iv(a: f64, b: f64) -> Interval {
        Interval::new(a, b).unwrap()
    }

    fn run(src: &str, spec: ClassSpec, a: f64, b: f64) -> ConvexityCertificate {
        certify(&parse(src).unwrap(), spec, iv(a, b), Grid::DEFAULT, DEFAULT_CERTIFY_TOL)
    }

    #[test]
    fn exp_is_log_convex_with_equality() {
        let c = run("exp(x)", ClassSpec::LogConvex, 0.0, 1.0);
        assert_eq!(c.verdict, Verdict::Certified);
        assert!(c.worst_violation.unwrap().abs() <= 1e-15);
    }

    #[test]
    fn identity_is_m_convex_with_equality() {
        let c = run("x", ClassSpec::m_convex(0.5).unwrap(), 0.0, 2.0);
        assert_eq!(c.verdict, Verdict::Certified);
        assert!(c.worst_violation.unwrap().abs() <= 1e-15);
        assert_eq!(c.f_at_zero, Some(0.0));
        assert_eq!(c.in_k_class, Some(true));
    }

    #[test]
    fn decaying_exponential_is_not_half_convex() {
        let f = parse("exp(-x)").unwrap();
        let spec = ClassSpec::m_convex(0.5).unwrap();
        let c = certify(&f, spec, iv(0.0, 2.0), Grid::DEFAULT, DEFAULT_CERTIFY_TOL);
        assert_eq!(c.verdict, Verdict::Refuted);
        let cx = c.counterexample.unwrap();
        // worst slack sits at t = 0, y = 0: f(0) - 0.5 f(0) = 0.5
        assert_eq!(cx.t, 0.0);
        assert!((cx.violation.unwrap() - 0.5).abs() < 1e-15);
        let at_two = violation_at(&f, &spec, 0.7, 2.0, 0.0).unwrap();
        let expected = (-1f64).exp() - 0.5 * (-2f64).exp();
        assert!((at_two - expected).abs() < 1e-15);
    }

    #[test]
    fn negative_gaussian_is_not_log_convex() {
        let c = run("exp(-x^2)", ClassSpec::LogConvex, 0.0, 1.0);
        assert_eq!(c.verdict, Verdict::Refuted);
        let cx = c.counterexample.unwrap();
        let again = violation_at(&parse("exp(-x^2)").unwrap(), &c.spec, cx.x, cx.y, cx.t).unwrap();
        assert!(again > DEFAULT_CERTIFY_TOL);
        assert_eq!(run("exp(-x^2)", ClassSpec::LogConcave, 0.0, 1.0).verdict, Verdict::Certified);
    }

    #[test]
    fn non_positive_refutes_log_classes() {
        let c = run("x-0.5", ClassSpec::LogConvex, 0.0, 1.0);
        assert_eq!(c.verdict, Verdict::Refuted);
        let cx = c.counterexample.unwrap();
        assert_eq!(cx.kind, CounterexampleKind::NonPositive);
        assert_eq!(cx.x, 0.0);
    }

    #[test]
    fn faults_are_inconclusive() {
        let c = run("log(x-0.5)", ClassSpec::Convex, 0.0, 1.0);
        assert_eq!(c.verdict, Verdict::Inconclusive);
        assert_eq!(c.fault.unwrap().x, 0.0);
    }

    #[test]
    fn combined_points_below_domain_are_recorded() {
        let c = run("x^2", ClassSpec::m_convex(0.5).unwrap(), 1.0, 2.0);
        assert!((c.evaluation_range.0 - 0.5).abs() < 1e-15);
        assert_eq!(c.evaluation_range.1, 2.0);
    }

    #[test]
    fn tie_at_tolerance_certifies() {
        // the endpoint grid forces slack 0 at t = 0 and t = 1
        let c = certify(
            &parse("x").unwrap(),
            ClassSpec::Convex,
            iv(0.0, 1.0),
            Grid::DEFAULT,
            0.0,
        );
        assert_eq!(c.verdict, Verdict::Certified);
    }

    #[test]
    fn alpha_one_matches_m_convex_bit_exact() {
        let f = parse("(3-x)^4 + 0.2*x").unwrap();
        for &m in &[0.3, 0.75, 1.0] {
            let a = certify(&f, ClassSpec::m_convex(m).unwrap(), iv(0.5, 2.5), Grid::DEFAULT, 1e-9);
            let b = certify(
                &f,
                ClassSpec::alpha_m_convex(1.0, m).unwrap(),
                iv(0.5, 2.5),
                Grid::DEFAULT,
                1e-9,
            );
            assert_eq!(
                a.worst_violation.unwrap().to_bits(),
                b.worst_violation.unwrap().to_bits()
            );
        }
        let c = certify(&f, ClassSpec::Convex, iv(0.5, 2.5), Grid::DEFAULT, 1e-9);
        let d = certify(
            &f,
            ClassSpec::alpha_m_convex(1.0, 1.0).unwrap(),
            iv(0.5, 2.5),
            Grid::DEFAULT,
            1e-9,
        );
        assert_eq!(c.worst_violation, d.worst_violation);
        assert_eq!(c.verdict, d.verdict);
    }

    #[test]
    fn parameters_are_validated() {
        assert!(ClassSpec::m_convex(0.0).is_err());
        assert!(ClassSpec::m_convex(1.5).is_err());
        assert!(ClassSpec::alpha_m_convex(0.5, -1.0).is_err());
        assert!(serde_json::from_str::<ClassSpec>(r#"{"kind":"m_convex","m":2.0}"#).is_err());
        let ok: ClassSpec = serde_json::from_str(r#"{"kind":"alpha_m_convex","alpha":0.5,"m":1.0}"#).unwrap();
        assert_eq!(ok, ClassSpec::alpha_m_convex(0.5, 1.0).unwrap());
        assert!(Grid::new(1, 5).is_err());
    }

    #[test]
    fn monotone_examples() {
        let c = certify_monotone(&parse("(2-x)^2").unwrap(), iv(0.0, 1.0), 101, 1e-9);
        assert_eq!(c.verdict, Verdict::Certified);
        let c = certify_monotone(&parse("exp(x)").unwrap(), iv(0.0, 1.0), 101, 1e-9);
        assert_eq!(c.verdict, Verdict::Refuted);
        let (x0, x1) = c.counterexample.unwrap();
        assert!(x1 > x0 && (x1 - x0 - 0.01).abs() < 1e-12);
        let c = certify_monotone(&parse("5").unwrap(), iv(0.0, 1.0), 101, 1e-9);
        assert_eq!(c.verdict, Verdict::Certified);
        assert_eq!(c.worst_violation, Some(0.0));
        let c = certify_monotone(&parse("1/(x-0.5)").unwrap(), iv(0.0, 1.0), 101, 1e-9);
        assert_eq!(c.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn fast_reject_agrees_on_verdict() {
        for src in ["exp(-x)", "x^2", "exp(x)", "(2-x)^2"] {
            let f = parse(src).unwrap();
            let spec = ClassSpec::m_convex(0.5).unwrap();
            let full = certify(&f, spec, iv(0.0, 2.0), Grid::DEFAULT, 1e-9);
            let fast = certify_fast_reject(&f, spec, iv(0.0, 2.0), Grid::DEFAULT, 1e-9);
            assert_eq!(full.verdict, fast.verdict, "{src}");
        }
    }
}
