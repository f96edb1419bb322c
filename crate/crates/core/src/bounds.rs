//! Closed-form Hadamard-type bounds, evaluated and checked against
//! quadrature of the integral side.
//!
//! Every operation certifies its hypotheses first. When a hypothesis is not
//! certified the numbers are still computed and reported, but the verdict is
//! `HypothesesUnmet` and no inequality claim is made.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::convexity::{self, ClassSpec, ClassError, Verdict};
use crate::expr::{EvalOutcome, Evaluable, Expr};
use crate::means::log_mean;
use crate::optimize::{self, OptimumResult};
use crate::quad::{self, Interval, QuadError};
use crate::settings::Settings;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremId {
    Classic,
    Gill,
    Cor1,
    Thm21Product,
    Cor22,
    Thm22Sandwich,
    Thm23Sandwich,
    Thm24Mconvex,
    Thm25Alpham,
}

impl TheoremId {
    pub const ALL: [TheoremId; 9] = [
        TheoremId::Classic,
        TheoremId::Gill,
        TheoremId::Cor1,
        TheoremId::Thm21Product,
        TheoremId::Cor22,
        TheoremId::Thm22Sandwich,
        TheoremId::Thm23Sandwich,
        TheoremId::Thm24Mconvex,
        TheoremId::Thm25Alpham,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::Classic => "classic",
            TheoremId::Gill => "gill",
            TheoremId::Cor1 => "cor1",
            TheoremId::Thm21Product => "thm21_product",
            TheoremId::Cor22 => "cor22",
            TheoremId::Thm22Sandwich => "thm22_sandwich",
            TheoremId::Thm23Sandwich => "thm23_sandwich",
            TheoremId::Thm24Mconvex => "thm24_mconvex",
            TheoremId::Thm25Alpham => "thm25_alpham",
        }
    }
}

impl std::fmt::Display for TheoremId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for TheoremId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TheoremId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| format!("unknown theorem id `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundVerdict {
    Holds,
    Violated,
    HypothesesUnmet,
}

/// Which side of the split-point corollaries to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitDirection {
    MinLogconvex,
    MaxLogconcave,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BoundInputs {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub fi: Vec<String>,
    pub a: f64,
    pub b: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
}

/// Flattened view of one hypothesis check attached to a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateSummary {
    /// Which input the check is about (`f`, `g`, `f1`, ...).
    pub subject: String,
    /// Class name, `non_increasing`, `non_negative`, `domain` or `evaluation`.
    pub check: String,
    pub verdict: Verdict,
    pub worst_violation: Option<f64>,
    /// `[x, y, t]` for class checks, `[x_i, x_i+1]` for monotonicity, `[x]` otherwise.
    pub counterexample: Option<Vec<f64>>,
    pub checked_domain: Option<[f64; 2]>,
    pub detail: Option<String>,
}

impl CertificateSummary {
    pub fn from_convexity(subject: &str, c: &convexity::ConvexityCertificate) -> Self {
        CertificateSummary {
            subject: subject.to_string(),
            check: c.spec.name().to_string(),
            verdict: c.verdict,
            worst_violation: c.worst_violation,
            counterexample: c.counterexample.map(|cx| vec![cx.x, cx.y, cx.t]),
            checked_domain: Some([c.domain.a(), c.domain.b()]),
            detail: c.fault.map(|fl| format!("not evaluable at {}: {}", fl.x, fl.fault)),
        }
    }

    pub fn from_monotone(subject: &str, c: &convexity::MonotonicityCertificate) -> Self {
        CertificateSummary {
            subject: subject.to_string(),
            check: "non_increasing".to_string(),
            verdict: c.verdict,
            worst_violation: c.worst_violation,
            counterexample: c.counterexample.map(|(x0, x1)| vec![x0, x1]),
            checked_domain: Some([c.domain.a(), c.domain.b()]),
            detail: c.fault.map(|fl| format!("not evaluable at {}: {}", fl.x, fl.fault)),
        }
    }

    fn evaluation_fault(subject: &str, x: Option<f64>, detail: String) -> Self {
        CertificateSummary {
            subject: subject.to_string(),
            check: "evaluation".to_string(),
            verdict: Verdict::Inconclusive,
            worst_violation: None,
            counterexample: x.map(|x| vec![x]),
            checked_domain: None,
            detail: Some(detail),
        }
    }
}

/// One evaluated theorem instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub theorem_id: TheoremId,
    pub inputs: BoundInputs,
    pub quantities: BTreeMap<String, f64>,
    /// Quadrature error estimate on the integral-mean scale.
    pub quad_error: f64,
    pub certificates: Vec<CertificateSummary>,
    pub verdict: BoundVerdict,
    /// `RHS - LHS` at the tightest link; absent when not computable.
    pub margin: Option<f64>,
    /// Effective tolerance, `max(settings.verify_tol, 10 * quad_error)`.
    pub verify_tol: f64,
    pub settings: Settings,
    pub notes: Vec<String>,
}

impl BoundReport {
    pub fn quantity(&self, name: &str) -> Option<f64> {
        self.quantities.get(name).copied()
    }

    /// Hypothesis checks that did not certify.
    pub fn unmet(&self) -> impl Iterator<Item = &CertificateSummary> {
        self.certificates
            .iter()
            .filter(|c| c.verdict != Verdict::Certified)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundError {
    #[error("at least one function is required")]
    NoFunctions,
    #[error(transparent)]
    Parameter(#[from] ClassError),
    #[error("elementary inequality needs non-negative inputs, got ({0}, {1})")]
    NegativeInput(f64, f64),
}

/// Accumulates certificates, quantities and quadrature error for one report.
struct Assembly {
    report: BoundReport,
    ok: bool,
}

impl Assembly {
    fn new(theorem_id: TheoremId, inputs: BoundInputs, settings: &Settings) -> Self {
        Assembly {
            report: BoundReport {
                theorem_id,
                inputs,
                quantities: BTreeMap::new(),
                quad_error: 0.0,
                certificates: Vec::new(),
                verdict: BoundVerdict::HypothesesUnmet,
                margin: None,
                verify_tol: settings.verify_tol,
                settings: *settings,
                notes: Vec::new(),
            },
            ok: true,
        }
    }

    fn settings(&self) -> Settings {
        self.report.settings
    }

    fn set(&mut self, name: &str, value: f64) {
        self.report.quantities.insert(name.to_string(), value);
    }

    fn note(&mut self, text: String) {
        self.report.notes.push(text);
    }

    fn certify_class(&mut self, subject: &str, f: &Expr, spec: ClassSpec, iv: Interval) {
        let s = self.settings();
        let c = convexity::certify_expr(f, spec, iv, s.grid, s.certify_tol, false);
        self.ok &= c.verdict == Verdict::Certified;
        self.report
            .certificates
            .push(CertificateSummary::from_convexity(subject, &c));
    }

    fn certify_non_increasing(&mut self, subject: &str, f: &Expr, iv: Interval) {
        let s = self.settings();
        let c = convexity::certify_monotone(f, iv, s.monotone_samples, s.certify_tol);
        self.ok &= c.verdict == Verdict::Certified;
        self.report
            .certificates
            .push(CertificateSummary::from_monotone(subject, &c));
    }

    fn certify_non_negative(&mut self, subject: &str, f: &Expr, iv: Interval) {
        let s = self.settings();
        let mut worst = f64::NEG_INFINITY;
        let mut at = None;
        let mut verdict = Verdict::Certified;
        let mut detail = None;
        for x in iv.grid(s.monotone_samples) {
            match f.eval(x) {
                Ok(v) => {
                    if -v > worst {
                        worst = -v;
                        at = Some(x);
                    }
                }
                Err(fault) => {
                    verdict = Verdict::Inconclusive;
                    detail = Some(format!("not evaluable at {x}: {fault}"));
                    at = Some(x);
                    break;
                }
            }
        }
        if verdict == Verdict::Certified && worst > s.certify_tol {
            verdict = Verdict::Refuted;
        }
        self.ok &= verdict == Verdict::Certified;
        self.report.certificates.push(CertificateSummary {
            subject: subject.to_string(),
            check: "non_negative".to_string(),
            verdict,
            worst_violation: worst.is_finite().then_some(worst),
            counterexample: (verdict != Verdict::Certified).then(|| at.into_iter().collect()),
            checked_domain: Some([iv.a(), iv.b()]),
            detail,
        });
    }

    fn require(&mut self, subject: &str, check: &str, holds: bool, detail: String) {
        self.ok &= holds;
        self.report.certificates.push(CertificateSummary {
            subject: subject.to_string(),
            check: check.to_string(),
            verdict: if holds { Verdict::Certified } else { Verdict::Refuted },
            worst_violation: None,
            counterexample: None,
            checked_domain: None,
            detail: Some(detail),
        });
    }

    /// Evaluates `f(x)`; a fault is recorded and yields `None`.
    fn eval<F: Evaluable + ?Sized>(&mut self, subject: &str, f: &F, x: f64) -> Option<f64> {
        match f.value_at(x) {
            Ok(v) => Some(v),
            Err(fault) => {
                self.ok = false;
                self.report.certificates.push(CertificateSummary::evaluation_fault(
                    subject,
                    Some(x),
                    format!("not evaluable at {x}: {fault}"),
                ));
                None
            }
        }
    }

    fn fail(&mut self, subject: &str, detail: String) {
        self.ok = false;
        self.report
            .certificates
            .push(CertificateSummary::evaluation_fault(subject, None, detail));
    }

    /// Integral mean of `integrand` over `iv`, accumulating the error estimate.
    fn integral_mean<F: Evaluable + ?Sized>(
        &mut self,
        label: &str,
        integrand: &F,
        iv: Interval,
    ) -> Option<f64> {
        let tol = self.settings().quad_tol;
        let result = match quad::integrate(integrand, iv, tol) {
            Ok(r) => r,
            Err(QuadError::NotConverged { best }) => {
                self.note(format!(
                    "quadrature for {label} did not converge; using best value with error estimate {}",
                    best.err_estimate
                ));
                best
            }
            Err(QuadError::DomainFault { abscissa, fault }) => {
                self.ok = false;
                self.report.certificates.push(CertificateSummary::evaluation_fault(
                    label,
                    Some(abscissa),
                    format!("integrand not evaluable at {abscissa}: {fault}"),
                ));
                return None;
            }
            Err(e) => {
                self.fail(label, e.to_string());
                return None;
            }
        };
        let w = iv.width();
        self.report.quad_error += result.err_estimate / w;
        Some(result.value / w)
    }

    fn log_mean(&mut self, label: &str, p: f64, q: f64) -> Option<f64> {
        match log_mean(p, q) {
            Ok(v) => Some(v.value()),
            Err(e) => {
                self.fail(label, e.to_string());
                None
            }
        }
    }

    /// Closes the report. Each link `(name, smaller, larger)` claims `smaller <= larger`.
    fn finish(mut self, links: Option<&[(&str, f64, f64)]>) -> BoundReport {
        let tol = self.report.settings.effective_verify_tol(self.report.quad_error);
        self.report.verify_tol = tol;
        let links = match links {
            Some(l) => l,
            None => {
                self.report.verdict = BoundVerdict::HypothesesUnmet;
                return self.report;
            }
        };
        let mut margin = f64::INFINITY;
        let mut violated = Vec::new();
        for &(name, smaller, larger) in links {
            let slack = larger - smaller;
            margin = margin.min(slack);
            if slack < -tol {
                violated.push(name);
            }
        }
        self.report.margin = margin.is_finite().then_some(margin);
        self.report.verdict = if !self.ok {
            BoundVerdict::HypothesesUnmet
        } else if violated.is_empty() {
            BoundVerdict::Holds
        } else {
            self.note(format!("violated links: {}", violated.join(", ")));
            BoundVerdict::Violated
        };
        self.report
    }
}

fn inputs_fg(f: &Expr, g: Option<&Expr>, iv: Interval) -> BoundInputs {
    BoundInputs {
        f: Some(f.pretty()),
        g: g.map(Expr::pretty),
        a: iv.a(),
        b: iv.b(),
        ..BoundInputs::default()
    }
}

fn product_at(fs: &[Expr], x: f64) -> EvalOutcome {
    let mut acc = fs[0].eval(x)?;
    for f in &fs[1..] {
        acc *= f.eval(x)?;
    }
    Ok(acc)
}

/// `f((a+b)/2) <= mean of f <= (f(a)+f(b))/2` for convex `f`.
pub fn classic_hadamard(f: &Expr, iv: Interval, settings: &Settings) -> BoundReport {
    let mut asm = Assembly::new(TheoremId::Classic, inputs_fg(f, None, iv), settings);
    asm.certify_class("f", f, ClassSpec::Convex, iv);
    let mid = iv.midpoint();
    let fm = asm.eval("f", f, mid);
    let fa = asm.eval("f", f, iv.a());
    let fb = asm.eval("f", f, iv.b());
    let mean = asm.integral_mean("f", f, iv);
    let (Some(fm), Some(fa), Some(fb), Some(mean)) = (fm, fa, fb, mean) else {
        return asm.finish(None);
    };
    let rhs = (fa + fb) / 2.0;
    asm.set("f_a", fa);
    asm.set("f_b", fb);
    asm.set("lhs", fm);
    asm.set("integral_mean", mean);
    asm.set("rhs", rhs);
    asm.finish(Some(&[("lhs<=integral_mean", fm, mean), ("integral_mean<=rhs", mean, rhs)]))
}

fn log_class(concave: bool) -> ClassSpec {
    if concave {
        ClassSpec::LogConcave
    } else {
        ClassSpec::LogConvex
    }
}

fn factor_name(i: usize, n: usize) -> String {
    if n == 1 {
        "f".to_string()
    } else {
        format!("f{}", i + 1)
    }
}

fn product_common(
    id: TheoremId,
    fs: &[Expr],
    iv: Interval,
    concave_variant: bool,
    settings: &Settings,
) -> Result<BoundReport, BoundError> {
    if fs.is_empty() {
        return Err(BoundError::NoFunctions);
    }
    let mut inputs = BoundInputs {
        a: iv.a(),
        b: iv.b(),
        variant: Some(if concave_variant { "log_concave" } else { "log_convex" }.to_string()),
        ..BoundInputs::default()
    };
    if id == TheoremId::Gill {
        inputs.f = Some(fs[0].pretty());
    } else {
        inputs.fi = fs.iter().map(Expr::pretty).collect();
        inputs.n = Some(fs.len());
    }
    let mut asm = Assembly::new(id, inputs, settings);
    for (i, f) in fs.iter().enumerate() {
        asm.certify_class(&factor_name(i, fs.len()), f, log_class(concave_variant), iv);
    }
    let integrand = |x: f64| product_at(fs, x);
    let pa = asm.eval("product", &integrand, iv.a());
    let pb = asm.eval("product", &integrand, iv.b());
    let mean = asm.integral_mean("product", &integrand, iv);
    let (Some(pa), Some(pb), Some(mean)) = (pa, pb, mean) else {
        return Ok(asm.finish(None));
    };
    let Some(rhs) = asm.log_mean("L(P(a),P(b))", pa, pb) else {
        return Ok(asm.finish(None));
    };
    asm.set("product_a", pa);
    asm.set("product_b", pb);
    asm.set("integral_mean", mean);
    asm.set("rhs", rhs);
    let links: [(&str, f64, f64); 1] = if concave_variant {
        [("rhs<=integral_mean", rhs, mean)]
    } else {
        [("integral_mean<=rhs", mean, rhs)]
    };
    Ok(asm.finish(Some(&links)))
}

/// Integral mean of a log-convex `f` against `L(f(a), f(b))`; reversed when
/// `concave_variant`.
pub fn gill_bound(
    f: &Expr,
    iv: Interval,
    concave_variant: bool,
    settings: &Settings,
) -> BoundReport {
    product_common(
        TheoremId::Gill,
        std::slice::from_ref(f),
        iv,
        concave_variant,
        settings,
    )
    .expect("one function")
}

/// Integral mean of `f_1 ... f_n` against `L(P(a), P(b))` with `P` the product.
pub fn product_bound(
    fs: &[Expr],
    iv: Interval,
    concave_variant: bool,
    settings: &Settings,
) -> Result<BoundReport, BoundError> {
    product_common(TheoremId::Thm21Product, fs, iv, concave_variant, settings)
}

/// `phi(x) = [(x-a) L(P(a),P(x)) + (b-x) L(P(x),P(b))] / (b-a)`, formed as
/// `L_left + (b-x)/(b-a) * (L_right - L_left)`.
pub fn split_point_profile(pa: f64, px: f64, pb: f64, x: f64, iv: Interval) -> EvalOutcome {
    let to_fault = |_| crate::expr::DomainFault::NonFinite;
    let left = log_mean(pa, px).map_err(to_fault)?.value();
    let right = log_mean(px, pb).map_err(to_fault)?.value();
    // exact when the two means coincide
    Ok(left + (iv.b() - x) * (right - left) / iv.width())
}

fn split_common(
    id: TheoremId,
    fs: &[Expr],
    iv: Interval,
    direction: SplitDirection,
    settings: &Settings,
) -> Result<BoundReport, BoundError> {
    if fs.is_empty() {
        return Err(BoundError::NoFunctions);
    }
    let concave = direction == SplitDirection::MaxLogconcave;
    let mut inputs = BoundInputs {
        a: iv.a(),
        b: iv.b(),
        variant: Some(
            match direction {
                SplitDirection::MinLogconvex => "min_logconvex",
                SplitDirection::MaxLogconcave => "max_logconcave",
            }
            .to_string(),
        ),
        ..BoundInputs::default()
    };
    if id == TheoremId::Cor1 {
        inputs.f = Some(fs[0].pretty());
    } else {
        inputs.fi = fs.iter().map(Expr::pretty).collect();
        inputs.n = Some(fs.len());
    }
    let mut asm = Assembly::new(id, inputs, settings);
    for (i, f) in fs.iter().enumerate() {
        asm.certify_class(&factor_name(i, fs.len()), f, log_class(concave), iv);
    }
    let product = |x: f64| product_at(fs, x);
    let pa = asm.eval("product", &product, iv.a());
    let pb = asm.eval("product", &product, iv.b());
    let mean = asm.integral_mean("product", &product, iv);
    let (Some(pa), Some(pb), Some(mean)) = (pa, pb, mean) else {
        return Ok(asm.finish(None));
    };
    let Some(gill) = asm.log_mean("L(P(a),P(b))", pa, pb) else {
        return Ok(asm.finish(None));
    };
    let phi = |x: f64| split_point_profile(pa, product(x)?, pb, x, iv);

    let s = asm.settings();
    let opt: Result<OptimumResult, _> = match direction {
        SplitDirection::MinLogconvex => optimize::minimize_scalar(&phi, iv, s.opt_grid, s.opt_tol),
        SplitDirection::MaxLogconcave => optimize::maximize_scalar(&phi, iv, s.opt_grid, s.opt_tol),
    };
    let opt = match opt {
        Ok(o) => o,
        Err(e) => {
            asm.fail("optimizer", e.to_string());
            return Ok(asm.finish(None));
        }
    };
    let samples: Vec<f64> = iv
        .grid(s.opt_grid)
        .into_iter()
        .filter_map(|x| phi(x).ok())
        .collect();
    let spread = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - samples.iter().cloned().fold(f64::INFINITY, f64::min);

    asm.set("product_a", pa);
    asm.set("product_b", pb);
    asm.set("integral_mean", mean);
    asm.set("gill_value", gill);
    asm.set("optimum", opt.value);
    asm.set(
        match direction {
            SplitDirection::MinLogconvex => "minimizer_x",
            SplitDirection::MaxLogconcave => "maximizer_x",
        },
        opt.x_star,
    );
    asm.set("optimizer_evaluations", opt.evaluations as f64);
    asm.set("phi_spread", spread);
    if spread <= 1e-12 * gill.abs().max(1.0) {
        asm.note("split-point profile is constant on the optimizer grid".to_string());
    }
    let links: [(&str, f64, f64); 2] = match direction {
        SplitDirection::MinLogconvex => [
            ("integral_mean<=optimum", mean, opt.value),
            ("optimum<=gill_value", opt.value, gill),
        ],
        SplitDirection::MaxLogconcave => [
            ("optimum<=integral_mean", opt.value, mean),
            ("gill_value<=optimum", gill, opt.value),
        ],
    };
    Ok(asm.finish(Some(&links)))
}

/// Split-point refinement of the logarithmic-mean bound for a single function.
pub fn single_split_point_bound(
    f: &Expr,
    iv: Interval,
    direction: SplitDirection,
    settings: &Settings,
) -> BoundReport {
    split_common(TheoremId::Cor1, std::slice::from_ref(f), iv, direction, settings)
        .expect("one function")
}

/// Split-point refinement for a product of functions.
pub fn split_point_bound(
    fs: &[Expr],
    iv: Interval,
    direction: SplitDirection,
    settings: &Settings,
) -> Result<BoundReport, BoundError> {
    split_common(TheoremId::Cor22, fs, iv, direction, settings)
}

/// `f(m)g(m) <= (1/2) mean[f(x)f(a+b-x) + g(x)g(a+b-x)] <= (f(a)f(b)+g(a)g(b))/2`.
pub fn sandwich_e9(f: &Expr, g: &Expr, iv: Interval, settings: &Settings) -> BoundReport {
    let mut asm = Assembly::new(TheoremId::Thm22Sandwich, inputs_fg(f, Some(g), iv), settings);
    asm.certify_class("f", f, ClassSpec::LogConvex, iv);
    asm.certify_class("g", g, ClassSpec::LogConvex, iv);
    let mid = iv.midpoint();
    let vals = [
        asm.eval("f", f, mid),
        asm.eval("g", g, mid),
        asm.eval("f", f, iv.a()),
        asm.eval("f", f, iv.b()),
        asm.eval("g", g, iv.a()),
        asm.eval("g", g, iv.b()),
    ];
    let integrand = |x: f64| -> EvalOutcome {
        let xr = iv.reflect(x);
        Ok(f.eval(x)? * f.eval(xr)? + g.eval(x)? * g.eval(xr)?)
    };
    let mean = asm.integral_mean("symmetric_product", &integrand, iv);
    let ([Some(fm), Some(gm), Some(fa), Some(fb), Some(ga), Some(gb)], Some(mean)) = (vals, mean)
    else {
        return asm.finish(None);
    };
    let lhs = fm * gm;
    let middle = 0.5 * mean;
    let rhs = (fa * fb + ga * gb) / 2.0;
    asm.set("lhs", lhs);
    asm.set("symmetric_integral_mean", mean);
    asm.set("middle", middle);
    asm.set("rhs", rhs);
    // the middle term carries a factor 1/2 of the quadrature error
    asm.finish(Some(&[("lhs<=middle", lhs, middle), ("middle<=rhs", middle, rhs)]))
}

/// `2 f(m) g(m) <= mean(f^2 + g^2) <= A(f(a),f(b)) L(f(a),f(b)) + A(g(a),g(b)) L(g(a),g(b))`.
pub fn sandwich_e17(f: &Expr, g: &Expr, iv: Interval, settings: &Settings) -> BoundReport {
    let mut asm = Assembly::new(TheoremId::Thm23Sandwich, inputs_fg(f, Some(g), iv), settings);
    asm.certify_class("f", f, ClassSpec::LogConvex, iv);
    asm.certify_class("g", g, ClassSpec::LogConvex, iv);
    let mid = iv.midpoint();
    let vals = [
        asm.eval("f", f, mid),
        asm.eval("g", g, mid),
        asm.eval("f", f, iv.a()),
        asm.eval("f", f, iv.b()),
        asm.eval("g", g, iv.a()),
        asm.eval("g", g, iv.b()),
    ];
    let integrand = |x: f64| -> EvalOutcome {
        let fx = f.eval(x)?;
        let gx = g.eval(x)?;
        Ok(fx * fx + gx * gx)
    };
    let mean = asm.integral_mean("f^2+g^2", &integrand, iv);
    let ([Some(fm), Some(gm), Some(fa), Some(fb), Some(ga), Some(gb)], Some(mean)) = (vals, mean)
    else {
        return asm.finish(None);
    };
    let (Some(lf), Some(lg)) = (
        asm.log_mean("L(f(a),f(b))", fa, fb),
        asm.log_mean("L(g(a),g(b))", ga, gb),
    ) else {
        return asm.finish(None);
    };
    let lhs = 2.0 * fm * gm;
    let rhs = (fa + fb) / 2.0 * lf + (ga + gb) / 2.0 * lg;
    asm.set("lhs", lhs);
    asm.set("middle", mean);
    asm.set("rhs", rhs);
    asm.set("L_f", lf);
    asm.set("L_g", lg);
    asm.finish(Some(&[("lhs<=middle", lhs, mean), ("middle<=rhs", mean, rhs)]))
}

/// Endpoint values feeding one of S1/S2 (or E1/E2): `near` is the endpoint
/// itself, `far` the opposite endpoint divided by the function's `m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SideValues {
    pub f_near: f64,
    pub f_far: f64,
    pub g_near: f64,
    pub g_far: f64,
}

fn side_terms(v: SideValues, m1: f64, m2: f64) -> [f64; 6] {
    [
        v.f_near * v.f_near,
        v.g_near * v.g_near,
        m1 * v.f_near * v.f_far,
        m2 * v.g_near * v.g_far,
        m1 * m1 * v.f_far * v.f_far,
        m2 * m2 * v.g_far * v.g_far,
    ]
}

/// S1 (near = a, far = b/m) or S2 (near = b, far = a/m).
pub fn s_value(v: SideValues, m1: f64, m2: f64) -> f64 {
    let t = side_terms(v, m1, m2);
    (t[0] + t[1] + t[2] + t[3] + t[4] + t[5]) / 6.0
}

/// Coefficients `(1/(2a+1), 2a^2/((a+1)(2a+1)), 2a/((a+1)(2a+1)))` of the
/// squared-value, squared-far and cross terms.
pub fn alpha_coefficients(alpha: f64) -> (f64, f64, f64) {
    let d = (alpha + 1.0) * (2.0 * alpha + 1.0);
    ((alpha + 1.0) / d, 2.0 * alpha * alpha / d, 2.0 * alpha / d)
}

/// E1 (near = a, far = b/m) or E2 (near = b, far = a/m).
///
/// With equal exponents the six terms share one denominator and are summed
/// in the same order as [`s_value`], so `alpha = 1` reproduces S exactly.
pub fn e_value(v: SideValues, alpha1: f64, m1: f64, alpha2: f64, m2: f64) -> f64 {
    let t = side_terms(v, m1, m2);
    let d1 = (alpha1 + 1.0) * (2.0 * alpha1 + 1.0);
    let d2 = (alpha2 + 1.0) * (2.0 * alpha2 + 1.0);
    let w = |a: f64| (a + 1.0, 2.0 * a, 2.0 * a * a);
    let (sq1, cross1, far1) = w(alpha1);
    let (sq2, cross2, far2) = w(alpha2);
    if d1 == d2 {
        let num = sq1 * t[0] + sq2 * t[1] + cross1 * t[2] + cross2 * t[3] + far1 * t[4] + far2 * t[5];
        num / (2.0 * d1)
    } else {
        let f_part = (sq1 * t[0] + cross1 * t[2] + far1 * t[4]) / d1;
        let g_part = (sq2 * t[1] + cross2 * t[3] + far2 * t[5]) / d2;
        (f_part + g_part) / 2.0
    }
}

struct ScaledValues {
    fa: f64,
    fb: f64,
    ga: f64,
    gb: f64,
    f_b_m: f64,
    f_a_m: f64,
    g_b_m: f64,
    g_a_m: f64,
}

#[allow(clippy::too_many_arguments)]
fn scaled_common(
    asm: &mut Assembly,
    f: &Expr,
    g: &Expr,
    iv: Interval,
    spec_f: ClassSpec,
    spec_g: ClassSpec,
    m1: f64,
    m2: f64,
) -> (Option<f64>, Option<ScaledValues>) {
    asm.require(
        "interval",
        "domain",
        iv.a() >= 0.0,
        format!("requires 0 <= a, got a = {}", iv.a()),
    );
    asm.certify_class("f", f, spec_f, iv);
    asm.certify_non_increasing("f", f, iv);
    asm.certify_non_negative("f", f, iv);
    asm.certify_class("g", g, spec_g, iv);
    asm.certify_non_increasing("g", g, iv);
    asm.certify_non_negative("g", g, iv);

    let (a, b) = (iv.a(), iv.b());
    let hi = (b / m1).max(b / m2);
    let lo = (a / m1).min(a / m2).min(a);
    if hi > b {
        asm.note(format!(
            "bound evaluates f and g on [{lo}, {hi}], beyond the certified domain [{a}, {b}]"
        ));
    }

    let fg = |x: f64| -> EvalOutcome { Ok(f.eval(x)? * g.eval(x)?) };
    let mean = asm.integral_mean("f*g", &fg, iv);
    let vals = [
        asm.eval("f", f, a),
        asm.eval("f", f, b),
        asm.eval("g", g, a),
        asm.eval("g", g, b),
        asm.eval("f", f, b / m1),
        asm.eval("f", f, a / m1),
        asm.eval("g", g, b / m2),
        asm.eval("g", g, a / m2),
    ];
    let [Some(fa), Some(fb), Some(ga), Some(gb), Some(f_b_m), Some(f_a_m), Some(g_b_m), Some(g_a_m)] =
        vals
    else {
        return (mean, None);
    };
    asm.set("f_a", fa);
    asm.set("f_b", fb);
    asm.set("g_a", ga);
    asm.set("g_b", gb);
    asm.set("f_b_over_m1", f_b_m);
    asm.set("f_a_over_m1", f_a_m);
    asm.set("g_b_over_m2", g_b_m);
    asm.set("g_a_over_m2", g_a_m);
    (
        mean,
        Some(ScaledValues {
            fa,
            fb,
            ga,
            gb,
            f_b_m,
            f_a_m,
            g_b_m,
            g_a_m,
        }),
    )
}

impl ScaledValues {
    fn side_a(&self) -> SideValues {
        SideValues {
            f_near: self.fa,
            f_far: self.f_b_m,
            g_near: self.ga,
            g_far: self.g_b_m,
        }
    }

    fn side_b(&self) -> SideValues {
        SideValues {
            f_near: self.fb,
            f_far: self.f_a_m,
            g_near: self.gb,
            g_far: self.g_a_m,
        }
    }
}

/// Mean of `f g` against `min(S1, S2)` for non-increasing m-convex `f`, `g`.
pub fn mconvex_bound(
    f: &Expr,
    g: &Expr,
    iv: Interval,
    m1: f64,
    m2: f64,
    settings: &Settings,
) -> Result<BoundReport, BoundError> {
    let spec_f = ClassSpec::m_convex(m1)?;
    let spec_g = ClassSpec::m_convex(m2)?;
    let mut inputs = inputs_fg(f, Some(g), iv);
    inputs.m1 = Some(m1);
    inputs.m2 = Some(m2);
    let mut asm = Assembly::new(TheoremId::Thm24Mconvex, inputs, settings);
    let (mean, vals) = scaled_common(&mut asm, f, g, iv, spec_f, spec_g, m1, m2);
    let Some(v) = vals else {
        return Ok(asm.finish(None));
    };
    let s1 = s_value(v.side_a(), m1, m2);
    let s2 = s_value(v.side_b(), m1, m2);
    let rhs = s1.min(s2);
    asm.set("S1", s1);
    asm.set("S2", s2);
    asm.set("rhs", rhs);
    let Some(mean) = mean else {
        return Ok(asm.finish(None));
    };
    asm.set("lhs", mean);
    Ok(asm.finish(Some(&[("lhs<=min(S1,S2)", mean, rhs)])))
}

/// Mean of `f g` against `min(E1, E2)` for non-increasing (alpha, m)-convex `f`, `g`.
#[allow(clippy::too_many_arguments)]
pub fn alpham_bound(
    f: &Expr,
    g: &Expr,
    iv: Interval,
    alpha1: f64,
    m1: f64,
    alpha2: f64,
    m2: f64,
    settings: &Settings,
) -> Result<BoundReport, BoundError> {
    let spec_f = ClassSpec::alpha_m_convex(alpha1, m1)?;
    let spec_g = ClassSpec::alpha_m_convex(alpha2, m2)?;
    let mut inputs = inputs_fg(f, Some(g), iv);
    inputs.m1 = Some(m1);
    inputs.m2 = Some(m2);
    inputs.alpha1 = Some(alpha1);
    inputs.alpha2 = Some(alpha2);
    let mut asm = Assembly::new(TheoremId::Thm25Alpham, inputs, settings);
    let (mean, vals) = scaled_common(&mut asm, f, g, iv, spec_f, spec_g, m1, m2);
    let Some(v) = vals else {
        return Ok(asm.finish(None));
    };
    let e1 = e_value(v.side_a(), alpha1, m1, alpha2, m2);
    let e2 = e_value(v.side_b(), alpha1, m1, alpha2, m2);
    let rhs = e1.min(e2);
    asm.set("E1", e1);
    asm.set("E2", e2);
    asm.set("rhs", rhs);
    let Some(mean) = mean else {
        return Ok(asm.finish(None));
    };
    asm.set("lhs", mean);
    Ok(asm.finish(Some(&[("lhs<=min(E1,E2)", mean, rhs)])))
}

/// `c d <= (c^2 + d^2) / 2` for `c, d >= 0`.
pub fn verify_elementary(c: f64, d: f64) -> Result<bool, BoundError> {
    if !(c >= 0.0 && d >= 0.0) {
        return Err(BoundError::NegativeInput(c, d));
    }
    Ok(c * d <= (c * c + d * d) / 2.0)
}
