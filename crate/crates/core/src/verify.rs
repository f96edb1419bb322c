//! Random generation of certified class members and batch verification of
//! every bound.
//!
//! Trial `i` draws from its own ChaCha8 stream (`seed`, stream `i`), so a
//! summary does not depend on how trials are scheduled across threads.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{self, BoundInputs, BoundReport, BoundVerdict, SplitDirection, TheoremId};
use crate::convexity::{self, ClassError, ClassSpec, Verdict};
use crate::expr::{Expr, Function};
use crate::quad::Interval;
use crate::settings::Settings;

pub const RNG_ALGORITHM: &str = "chacha8-seed_from_u64-stream-per-trial-v1";
pub const MAX_CONSECUTIVE_DISCARDS: usize = 1000;

/// Interval draws: `a ~ U[lo, hi - min_width]`, then `b ~ U[a + min_width, hi]`.
pub const INTERVAL_LO: f64 = 0.1;
pub const INTERVAL_HI: f64 = 3.0;
pub const INTERVAL_MIN_WIDTH: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `exp(p x^2 + q x + r)`.
    ExpQuadratic,
    /// `p x^2 + q x + r`, `p >= 0`, `r > 0`.
    PositiveQuadratic,
    /// `(c - x)^k`, `k` even, `c >= b`.
    ShiftedPower,
    Constant,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::ExpQuadratic,
        Family::PositiveQuadratic,
        Family::ShiftedPower,
        Family::Constant,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientRanges {
    pub p: (f64, f64),
    pub q: (f64, f64),
    pub r: (f64, f64),
    /// Offset of `c` above `b` for the shifted power.
    pub c_offset: (f64, f64),
    pub even_powers: [u32; 2],
}

impl Default for CoefficientRanges {
    fn default() -> Self {
        CoefficientRanges {
            p: (-2.0, 2.0),
            q: (-2.0, 2.0),
            r: (-2.0, 2.0),
            c_offset: (0.0, 2.0),
            even_powers: [2, 4],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub class: ClassSpec,
    pub families: Vec<Family>,
    pub ranges: CoefficientRanges,
    pub require_non_increasing: bool,
    pub require_non_negative: bool,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(class: ClassSpec, families: Vec<Family>, seed: u64) -> Self {
        GeneratorSpec {
            class,
            families,
            ranges: CoefficientRanges::default(),
            require_non_increasing: false,
            require_non_negative: false,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenerationError {
    #[error("generator spec has no families")]
    NoFamilies,
    #[error("empty coefficient range for {0}")]
    EmptyRange(&'static str),
    #[error("{discarded} consecutive draws failed certification")]
    Unreachable { discarded: usize, last: Box<Expr> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generated {
    pub expr: Expr,
    pub family: Family,
    /// Draws rejected before this one.
    pub discarded: usize,
}

fn check_range(name: &'static str, (lo, hi): (f64, f64)) -> Result<(), GenerationError> {
    if lo <= hi && lo.is_finite() && hi.is_finite() {
        Ok(())
    } else {
        Err(GenerationError::EmptyRange(name))
    }
}

fn uniform<R: Rng>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..=hi)
    }
}

fn sign_restricted(range: (f64, f64), non_negative: bool) -> (f64, f64) {
    if non_negative {
        (range.0.max(0.0), range.1.max(0.0))
    } else {
        (range.0.min(0.0), range.1.min(0.0))
    }
}

fn positive_part(range: (f64, f64)) -> (f64, f64) {
    // r > 0 strictly
    let floor = 1e-3;
    (range.0.max(floor), range.1.max(floor))
}

fn quadratic(p: f64, q: f64, r: f64) -> Expr {
    let x = Expr::var;
    let square = Expr::pow(x(), Expr::number(2.0));
    Expr::add(
        Expr::add(Expr::mul(Expr::number(p), square), Expr::mul(Expr::number(q), x())),
        Expr::number(r),
    )
}

fn draw<R: Rng>(spec: &GeneratorSpec, family: Family, iv: Interval, rng: &mut R) -> Expr {
    let ranges = &spec.ranges;
    match family {
        Family::ExpQuadratic => {
            let concave = spec.class == ClassSpec::LogConcave;
            let p = uniform(rng, sign_restricted(ranges.p, !concave));
            let q = uniform(rng, ranges.q);
            let r = uniform(rng, ranges.r);
            Expr::call(Function::Exp, quadratic(p, q, r))
        }
        Family::PositiveQuadratic => {
            let p = uniform(rng, sign_restricted(ranges.p, true));
            let q = uniform(rng, ranges.q);
            let r = uniform(rng, positive_part(ranges.r));
            quadratic(p, q, r)
        }
        Family::ShiftedPower => {
            let c = iv.b() + uniform(rng, ranges.c_offset);
            let k = ranges.even_powers[rng.gen_range(0..ranges.even_powers.len())];
            Expr::pow(
                Expr::sub(Expr::number(c), Expr::var()),
                Expr::number(k as f64),
            )
        }
        Family::Constant => Expr::number(uniform(rng, positive_part(ranges.r))),
    }
}

fn non_negative_on(f: &Expr, iv: Interval, samples: usize) -> bool {
    iv.grid(samples)
        .into_iter()
        .all(|x| f.eval(x).map_or(false, |v| v >= 0.0))
}

/// Whether `f` passes every check `spec` demands on `iv`. The cheap
/// sample checks run before the class grid.
pub fn passes(f: &Expr, spec: &GeneratorSpec, iv: Interval, settings: &Settings) -> bool {
    if spec.require_non_negative && !non_negative_on(f, iv, settings.monotone_samples) {
        return false;
    }
    if spec.require_non_increasing {
        let mono =
            convexity::certify_monotone(f, iv, settings.monotone_samples, settings.certify_tol);
        if mono.verdict != Verdict::Certified {
            return false;
        }
    }
    let cert =
        convexity::certify_expr(f, spec.class, iv, settings.grid, settings.certify_tol, true);
    cert.verdict == Verdict::Certified
}

/// Draws until a candidate passes certification, using `rng`.
pub fn generate_with<R: Rng>(
    spec: &GeneratorSpec,
    iv: Interval,
    settings: &Settings,
    rng: &mut R,
) -> Result<Generated, GenerationError> {
    if spec.families.is_empty() {
        return Err(GenerationError::NoFamilies);
    }
    check_range("p", spec.ranges.p)?;
    check_range("q", spec.ranges.q)?;
    check_range("r", spec.ranges.r)?;
    check_range("c", spec.ranges.c_offset)?;
    let mut discarded = 0;
    loop {
        let family = spec.families[rng.gen_range(0..spec.families.len())];
        let candidate = draw(spec, family, iv, rng);
        if passes(&candidate, spec, iv, settings) {
            return Ok(Generated {
                expr: candidate,
                family,
                discarded,
            });
        }
        discarded += 1;
        if discarded >= MAX_CONSECUTIVE_DISCARDS {
            return Err(GenerationError::Unreachable {
                discarded,
                last: Box::new(candidate),
            });
        }
    }
}

/// Draws a certified member of `spec.class` on `iv`, seeded by `spec.seed`.
pub fn generate(
    spec: &GeneratorSpec,
    iv: Interval,
    settings: &Settings,
) -> Result<Generated, GenerationError> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    generate_with(spec, iv, settings, &mut rng)
}

/// Draws `a ~ U[0.1, 2.8]`, `b ~ U[a + 0.2, 3]`.
pub fn random_interval<R: Rng>(rng: &mut R) -> Interval {
    let a = rng.gen_range(INTERVAL_LO..=INTERVAL_HI - INTERVAL_MIN_WIDTH);
    let b = rng.gen_range(a + INTERVAL_MIN_WIDTH..=INTERVAL_HI);
    Interval::new(a, b).expect("ordered draw")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzConfig {
    pub theorem: TheoremId,
    pub trials: usize,
    pub seed: u64,
    /// Generator families; `None` selects the per-theorem defaults.
    pub families: Option<Vec<Family>>,
    /// Number of factors for the product theorems; `None` draws from {1, 2, 3}.
    pub n: Option<usize>,
    pub m1: f64,
    pub m2: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    /// Log-concave variants of the product and split-point bounds.
    pub concave_variant: bool,
    pub settings: Settings,
}

impl FuzzConfig {
    pub fn new(theorem: TheoremId, trials: usize, seed: u64) -> Self {
        FuzzConfig {
            theorem,
            trials,
            seed,
            families: None,
            n: None,
            m1: 1.0,
            m2: 1.0,
            alpha1: 1.0,
            alpha2: 1.0,
            concave_variant: false,
            settings: Settings::default(),
        }
    }

    pub fn default_families(theorem: TheoremId) -> Vec<Family> {
        match theorem {
            TheoremId::Classic => Family::ALL.to_vec(),
            TheoremId::Thm24Mconvex | TheoremId::Thm25Alpham => {
                vec![Family::ShiftedPower, Family::Constant]
            }
            _ => vec![Family::ExpQuadratic, Family::Constant],
        }
    }

    fn families(&self) -> Vec<Family> {
        self.families
            .clone()
            .unwrap_or_else(|| Self::default_families(self.theorem))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FuzzError {
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("factor count must be at least 1")]
    NoFactors,
    #[error(transparent)]
    Parameter(#[from] ClassError),
    #[error(transparent)]
    Generation(#[from] GenerationError),
}

/// One histogram bin; `None` bounds are unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub count: usize,
}

/// Bin edges for margins: negatives, then decades from 1e-12 to 1e3.
pub const MARGIN_EDGES: [f64; 7] = [0.0, 1e-12, 1e-9, 1e-6, 1e-3, 1.0, 1e3];

fn empty_histogram() -> Vec<HistogramBin> {
    let mut bins = Vec::with_capacity(MARGIN_EDGES.len() + 1);
    let mut lower = None;
    for &edge in &MARGIN_EDGES {
        bins.push(HistogramBin {
            lower,
            upper: Some(edge),
            count: 0,
        });
        lower = Some(edge);
    }
    bins.push(HistogramBin {
        lower,
        upper: None,
        count: 0,
    });
    bins
}

fn bin_index(margin: f64) -> usize {
    MARGIN_EDGES
        .iter()
        .position(|&edge| margin < edge)
        .unwrap_or(MARGIN_EDGES.len())
}

/// Per-trial outcome; violation entries double as replay records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub verdict: BoundVerdict,
    pub margin: Option<f64>,
    pub verify_tol: f64,
    pub inputs: BoundInputs,
    pub discarded_draws: usize,
    pub generation_failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzSummary {
    pub theorem_id: TheoremId,
    pub trials: usize,
    pub holds: usize,
    pub hypotheses_unmet: usize,
    pub violations: usize,
    /// Smallest margin over trials whose hypotheses certified.
    pub min_margin: Option<f64>,
    pub max_margin: Option<f64>,
    pub margin_histogram: Vec<HistogramBin>,
    pub discarded_draws: usize,
    /// Functions for which no certified draw was found within the discard limit.
    pub generation_failures: usize,
    pub seed: u64,
    pub rng_algorithm: String,
    pub families: Vec<Family>,
    pub parameters: FuzzParameters,
    pub settings: Settings,
    pub violation_records: Vec<TrialRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FuzzParameters {
    pub n: Option<usize>,
    pub m1: f64,
    pub m2: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub concave_variant: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FuzzRun {
    pub summary: FuzzSummary,
    pub records: Vec<TrialRecord>,
}

fn class_for(config: &FuzzConfig, which: usize) -> Result<ClassSpec, ClassError> {
    let (m, alpha) = if which == 0 {
        (config.m1, config.alpha1)
    } else {
        (config.m2, config.alpha2)
    };
    Ok(match config.theorem {
        TheoremId::Classic => ClassSpec::Convex,
        TheoremId::Thm24Mconvex => ClassSpec::m_convex(m)?,
        TheoremId::Thm25Alpham => ClassSpec::alpha_m_convex(alpha, m)?,
        TheoremId::Thm22Sandwich | TheoremId::Thm23Sandwich => ClassSpec::LogConvex,
        _ if config.concave_variant => ClassSpec::LogConcave,
        _ => ClassSpec::LogConvex,
    })
}

struct TrialInputs {
    functions: Vec<Expr>,
    discarded: usize,
    failures: usize,
}

fn draw_functions(
    config: &FuzzConfig,
    count: usize,
    iv: Interval,
    rng: &mut ChaCha8Rng,
) -> Result<TrialInputs, FuzzError> {
    let families = config.families();
    let scaled = matches!(config.theorem, TheoremId::Thm24Mconvex | TheoremId::Thm25Alpham);
    let mut out = TrialInputs {
        functions: Vec::with_capacity(count),
        discarded: 0,
        failures: 0,
    };
    for i in 0..count {
        let mut spec = GeneratorSpec::new(class_for(config, i.min(1))?, families.clone(), 0);
        spec.require_non_increasing = scaled;
        spec.require_non_negative = scaled;
        match generate_with(&spec, iv, &config.settings, rng) {
            Ok(g) => {
                out.discarded += g.discarded;
                out.functions.push(g.expr);
            }
            Err(GenerationError::Unreachable { discarded, last }) => {
                // the uncertified candidate still runs; the bound reports it as unmet
                out.discarded += discarded;
                out.failures += 1;
                out.functions.push(*last);
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(out)
}

fn run_bound(config: &FuzzConfig, fs: &[Expr], iv: Interval) -> Result<BoundReport, FuzzError> {
    let s = &config.settings;
    let split = if config.concave_variant {
        SplitDirection::MaxLogconcave
    } else {
        SplitDirection::MinLogconvex
    };
    let report = match config.theorem {
        TheoremId::Classic => bounds::classic_hadamard(&fs[0], iv, s),
        TheoremId::Gill => bounds::gill_bound(&fs[0], iv, config.concave_variant, s),
        TheoremId::Cor1 => bounds::single_split_point_bound(&fs[0], iv, split, s),
        TheoremId::Thm21Product => bounds::product_bound(fs, iv, config.concave_variant, s)
            .map_err(|_| FuzzError::NoFactors)?,
        TheoremId::Cor22 => {
            bounds::split_point_bound(fs, iv, split, s).map_err(|_| FuzzError::NoFactors)?
        }
        TheoremId::Thm22Sandwich => bounds::sandwich_e9(&fs[0], &fs[1], iv, s),
        TheoremId::Thm23Sandwich => bounds::sandwich_e17(&fs[0], &fs[1], iv, s),
        TheoremId::Thm24Mconvex => {
            bounds::mconvex_bound(&fs[0], &fs[1], iv, config.m1, config.m2, s)
                .map_err(|e| match e {
                    bounds::BoundError::Parameter(p) => FuzzError::Parameter(p),
                    _ => FuzzError::NoFactors,
                })?
        }
        TheoremId::Thm25Alpham => bounds::alpham_bound(
            &fs[0],
            &fs[1],
            iv,
            config.alpha1,
            config.m1,
            config.alpha2,
            config.m2,
            s,
        )
        .map_err(|e| match e {
            bounds::BoundError::Parameter(p) => FuzzError::Parameter(p),
            _ => FuzzError::NoFactors,
        })?,
    };
    Ok(report)
}

fn factor_count(config: &FuzzConfig, rng: &mut ChaCha8Rng) -> usize {
    match config.theorem {
        TheoremId::Thm21Product | TheoremId::Cor22 => {
            config.n.unwrap_or_else(|| rng.gen_range(1..=3))
        }
        TheoremId::Thm22Sandwich
        | TheoremId::Thm23Sandwich
        | TheoremId::Thm24Mconvex
        | TheoremId::Thm25Alpham => 2,
        _ => 1,
    }
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Runs one trial; also the replay entry point for a stored record.
pub fn run_trial(config: &FuzzConfig, trial: usize) -> Result<(TrialRecord, BoundReport), FuzzError> {
    convexity::with_memo(|| run_trial_inner(config, trial))
}

fn run_trial_inner(config: &FuzzConfig, trial: usize) -> Result<(TrialRecord, BoundReport), FuzzError> {
    let mut rng = trial_rng(config.seed, trial);
    let iv = random_interval(&mut rng);
    let count = factor_count(config, &mut rng);
    if count == 0 {
        return Err(FuzzError::NoFactors);
    }
    let drawn = draw_functions(config, count, iv, &mut rng)?;
    let report = run_bound(config, &drawn.functions, iv)?;
    let record = TrialRecord {
        trial,
        verdict: report.verdict,
        margin: report.margin,
        verify_tol: report.verify_tol,
        inputs: report.inputs.clone(),
        discarded_draws: drawn.discarded,
        generation_failures: drawn.failures,
    };
    Ok((record, report))
}

/// Runs `config.trials` independent trials and aggregates them.
pub fn fuzz(config: &FuzzConfig) -> Result<FuzzRun, FuzzError> {
    if config.trials == 0 {
        return Err(FuzzError::NoTrials);
    }
    if config.n == Some(0) {
        return Err(FuzzError::NoFactors);
    }
    class_for(config, 0)?;
    class_for(config, 1)?;
    let records: Vec<TrialRecord> = (0..config.trials)
        .into_par_iter()
        .map(|i| run_trial(config, i).map(|(r, _)| r))
        .collect::<Result<_, _>>()?;
    Ok(FuzzRun {
        summary: summarize(config, &records),
        records,
    })
}

/// Aggregates trial records; the result does not depend on record order.
pub fn summarize(config: &FuzzConfig, records: &[TrialRecord]) -> FuzzSummary {
    let mut summary = FuzzSummary {
        theorem_id: config.theorem,
        trials: records.len(),
        holds: 0,
        hypotheses_unmet: 0,
        violations: 0,
        min_margin: None,
        max_margin: None,
        margin_histogram: empty_histogram(),
        discarded_draws: 0,
        generation_failures: 0,
        seed: config.seed,
        rng_algorithm: RNG_ALGORITHM.to_string(),
        families: config.families(),
        parameters: FuzzParameters {
            n: config.n,
            m1: config.m1,
            m2: config.m2,
            alpha1: config.alpha1,
            alpha2: config.alpha2,
            concave_variant: config.concave_variant,
        },
        settings: config.settings,
        violation_records: Vec::new(),
    };
    for r in records {
        summary.discarded_draws += r.discarded_draws;
        summary.generation_failures += r.generation_failures;
        match r.verdict {
            BoundVerdict::Holds => summary.holds += 1,
            BoundVerdict::HypothesesUnmet => summary.hypotheses_unmet += 1,
            BoundVerdict::Violated => {
                summary.violations += 1;
                summary.violation_records.push(r.clone());
            }
        }
        if r.verdict == BoundVerdict::HypothesesUnmet {
            continue;
        }
        if let Some(m) = r.margin {
            summary.min_margin = Some(summary.min_margin.map_or(m, |x| x.min(m)));
            summary.max_margin = Some(summary.max_margin.map_or(m, |x| x.max(m)));
            summary.margin_histogram[bin_index(m)].count += 1;
        }
    }
    summary.violation_records.sort_by_key(|r| r.trial);
    summary
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(a: f64, b: f64) -> Interval {
        Interval::new(a, b).unwrap()
    }

    #[test]
    fn log_convex_exp_quadratic_certifies() {
        let spec = GeneratorSpec::new(ClassSpec::LogConvex, vec![Family::ExpQuadratic], 7);
        let s = Settings::default();
        let g = generate(&spec, iv(0.5, 2.0), &s).unwrap();
        let cert = convexity::certify(&g.expr, ClassSpec::LogConvex, iv(0.5, 2.0), s.grid, s.certify_tol);
        assert_eq!(cert.verdict, Verdict::Certified);
        assert_eq!(g.discarded, 0);
        assert!(g.expr.pretty().starts_with("exp("));
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = GeneratorSpec::new(ClassSpec::Convex, Family::ALL.to_vec(), 99);
        let s = Settings::default();
        let a = generate(&spec, iv(0.1, 1.0), &s).unwrap();
        let b = generate(&spec, iv(0.1, 1.0), &s).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn constants_certify_with_m_one() {
        let s = Settings::default();
        for class in [
            ClassSpec::Convex,
            ClassSpec::LogConvex,
            ClassSpec::LogConcave,
            ClassSpec::m_convex(1.0).unwrap(),
            ClassSpec::alpha_m_convex(0.5, 1.0).unwrap(),
        ] {
            let spec = GeneratorSpec::new(class, vec![Family::Constant], 3);
            let g = generate(&spec, iv(0.2, 2.2), &s).unwrap();
            assert!(matches!(g.expr, Expr::Number { .. }), "{class:?}");
        }
    }

    #[test]
    fn m_half_shifted_power_is_unreachable() {
        let mut spec = GeneratorSpec::new(
            ClassSpec::m_convex(0.5).unwrap(),
            vec![Family::ShiftedPower],
            11,
        );
        spec.require_non_increasing = true;
        spec.require_non_negative = true;
        match generate(&spec, iv(0.3, 1.8), &Settings::default()) {
            Err(GenerationError::Unreachable { discarded, .. }) => {
                assert_eq!(discarded, MAX_CONSECUTIVE_DISCARDS)
            }
            other => panic!("expected generation error, got {other:?}"),
        }
    }

    #[test]
    fn spec_validation() {
        let s = Settings::default();
        let spec = GeneratorSpec::new(ClassSpec::Convex, vec![], 1);
        assert_eq!(generate(&spec, iv(0.0, 1.0), &s), Err(GenerationError::NoFamilies));
        let mut spec = GeneratorSpec::new(ClassSpec::Convex, vec![Family::Constant], 1);
        spec.ranges.q = (1.0, -1.0);
        assert_eq!(generate(&spec, iv(0.0, 1.0), &s), Err(GenerationError::EmptyRange("q")));
    }

    #[test]
    fn intervals_stay_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10_000 {
            let i = random_interval(&mut rng);
            assert!(i.a() >= INTERVAL_LO && i.b() <= INTERVAL_HI);
            assert!(i.width() >= INTERVAL_MIN_WIDTH - 1e-15);
        }
    }

    #[test]
    fn classic_constants_hold_with_zero_margin() {
        let mut config = FuzzConfig::new(TheoremId::Classic, 10, 1);
        config.families = Some(vec![Family::Constant]);
        let run = fuzz(&config).unwrap();
        assert_eq!(run.summary.holds, 10);
        for r in &run.records {
            assert!(r.margin.unwrap().abs() <= 1e-14, "{r:?}");
        }
    }

    #[test]
    fn counts_add_up_and_replay() {
        let config = FuzzConfig::new(TheoremId::Gill, 40, 42);
        let a = fuzz(&config).unwrap();
        let s = &a.summary;
        assert_eq!(s.holds + s.hypotheses_unmet + s.violations, s.trials);
        assert_eq!(s.violations, 0);
        let hist: usize = s.margin_histogram.iter().map(|b| b.count).sum();
        assert_eq!(hist, s.holds + s.violations);
        let b = fuzz(&config).unwrap();
        assert_eq!(serde_json::to_string(&a.summary).unwrap(), serde_json::to_string(&b.summary).unwrap());
    }

    #[test]
    fn summary_is_order_independent() {
        let config = FuzzConfig::new(TheoremId::Thm22Sandwich, 12, 3);
        let run = fuzz(&config).unwrap();
        let mut reversed = run.records.clone();
        reversed.reverse();
        assert_eq!(summarize(&config, &reversed), run.summary);
    }

    #[test]
    fn histogram_bins() {
        assert_eq!(bin_index(-1.0), 0);
        assert_eq!(bin_index(0.0), 1);
        assert_eq!(bin_index(5e-10), 2);
        assert_eq!(bin_index(2e3), 7);
        assert_eq!(empty_histogram().len(), 8);
    }

    #[test]
    fn rejects_bad_config() {
        assert_eq!(fuzz(&FuzzConfig::new(TheoremId::Gill, 0, 1)), Err(FuzzError::NoTrials));
        let mut c = FuzzConfig::new(TheoremId::Thm24Mconvex, 1, 1);
        c.m1 = 1.5;
        assert!(matches!(fuzz(&c), Err(FuzzError::Parameter(_))));
    }
}
