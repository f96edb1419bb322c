//! Command-line grammar and the validated run configuration.

use clap::{Args, Parser, Subcommand, ValueEnum};
use hadamard_core::convexity::{ClassSpec, Grid};
use hadamard_core::expr::{parse, Expr, ParseError};
use hadamard_core::quad::Interval;
use hadamard_core::settings::Settings;
use hadamard_core::verify::Family;
use hadamard_core::TheoremId;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "hadamard",
    version,
    about = "Check Hadamard-type integral bounds for convex-type functions",
    after_help = "Exit status: 0 holds/certified, 1 violated/refuted, 2 hypotheses unmet/inconclusive, 64 usage error."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse an expression and print its canonical form and tree.
    Parse {
        #[arg(long = "f", value_name = "EXPR", allow_hyphen_values = true)]
        f: String,
    },
    /// Certify membership of a function in a convexity class on [a, b].
    Certify(CertifyArgs),
    /// Evaluate one bound and check it against quadrature.
    Bound(BoundArgs),
    /// Run randomized trials of one bound.
    Fuzz(FuzzArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum ClassArg {
    Convex,
    LogConvex,
    LogConcave,
    MConvex,
    AlphaMConvex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum TheoremArg {
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

impl From<TheoremArg> for TheoremId {
    fn from(t: TheoremArg) -> Self {
        match t {
            TheoremArg::Classic => TheoremId::Classic,
            TheoremArg::Gill => TheoremId::Gill,
            TheoremArg::Cor1 => TheoremId::Cor1,
            TheoremArg::Thm21Product => TheoremId::Thm21Product,
            TheoremArg::Cor22 => TheoremId::Cor22,
            TheoremArg::Thm22Sandwich => TheoremId::Thm22Sandwich,
            TheoremArg::Thm23Sandwich => TheoremId::Thm23Sandwich,
            TheoremArg::Thm24Mconvex => TheoremId::Thm24Mconvex,
            TheoremArg::Thm25Alpham => TheoremId::Thm25Alpham,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum FamilyArg {
    ExpQuadratic,
    PositiveQuadratic,
    ShiftedPower,
    Constant,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::ExpQuadratic => Family::ExpQuadratic,
            FamilyArg::PositiveQuadratic => Family::PositiveQuadratic,
            FamilyArg::ShiftedPower => Family::ShiftedPower,
            FamilyArg::Constant => Family::Constant,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct Tolerances {
    /// Relative tolerance of the adaptive quadrature.
    #[arg(long, default_value_t = 1e-10)]
    pub quad_tol: f64,
    /// Largest slack accepted by the class certifier.
    #[arg(long, default_value_t = 1e-9)]
    pub certify_tol: f64,
    /// Floor of the verification tolerance; the effective value is max(this, 10 * quad error).
    #[arg(long, default_value_t = 1e-9)]
    pub verify_tol: f64,
    /// Grid size of the split-point optimizer.
    #[arg(long, default_value_t = 257)]
    pub opt_grid: usize,
    /// Relative bracket width at which golden-section refinement stops.
    #[arg(long, default_value_t = 1e-10)]
    pub opt_tol: f64,
    /// Certifier grid as N_XY,N_T.
    #[arg(long, default_value = "41,21", value_name = "NXY,NT")]
    pub grid: String,
}

#[derive(Debug, Clone, Args)]
pub struct CertifyArgs {
    #[arg(long, value_enum)]
    pub class: ClassArg,
    #[arg(long = "f", value_name = "EXPR", allow_hyphen_values = true)]
    pub f: String,
    #[arg(long, allow_negative_numbers = true)]
    pub a: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub b: f64,
    #[arg(long)]
    pub m: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[command(flatten)]
    pub tol: Tolerances,
}

#[derive(Debug, Clone, Args)]
pub struct BoundArgs {
    #[arg(long, value_enum)]
    pub theorem: TheoremArg,
    #[arg(long = "f", value_name = "EXPR", allow_hyphen_values = true)]
    pub f: Option<String>,
    #[arg(long = "g", value_name = "EXPR", allow_hyphen_values = true)]
    pub g: Option<String>,
    /// Factor of a product; repeat for each factor.
    #[arg(long = "fi", value_name = "EXPR", allow_hyphen_values = true)]
    pub fi: Vec<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub a: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub b: f64,
    #[arg(long)]
    pub m1: Option<f64>,
    #[arg(long)]
    pub m2: Option<f64>,
    #[arg(long)]
    pub alpha1: Option<f64>,
    #[arg(long)]
    pub alpha2: Option<f64>,
    /// Log-concave variant (reversed bound, maximizing split point).
    #[arg(long)]
    pub log_concave: bool,
    #[command(flatten)]
    pub tol: Tolerances,
}

#[derive(Debug, Clone, Args)]
pub struct FuzzArgs {
    #[arg(long, value_enum)]
    pub theorem: TheoremArg,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Generator families, comma separated; defaults depend on the theorem.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub families: Vec<FamilyArg>,
    /// Fixed factor count for the product bounds; drawn from {1,2,3} otherwise.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub m1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub m2: f64,
    #[arg(long, default_value_t = 1.0)]
    pub alpha1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub alpha2: f64,
    #[arg(long)]
    pub log_concave: bool,
    /// Also write the summary JSON to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write per-trial margins as CSV to this file.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[command(flatten)]
    pub tol: Tolerances,
}

/// A problem with the invocation, reported with exit status 64.
#[derive(Debug, Clone, PartialEq)]
pub struct UsageError {
    pub message: String,
    pub parse_error: Option<ParseError>,
}

impl UsageError {
    pub fn new(message: impl Into<String>) -> Self {
        UsageError {
            message: message.into(),
            parse_error: None,
        }
    }
}

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

pub fn expression(flag: &str, src: &str) -> Result<Expr, UsageError> {
    parse(src).map_err(|e| UsageError {
        message: format!("--{flag}: {e}"),
        parse_error: Some(e),
    })
}

pub fn interval(a: f64, b: f64) -> Result<Interval, UsageError> {
    Interval::new(a, b).map_err(|e| UsageError::new(format!("interval [{a}, {b}]: {e}")))
}

fn parse_grid(text: &str) -> Result<Grid, UsageError> {
    let bad = || UsageError::new(format!("--grid expects N_XY,N_T, got `{text}`"));
    let (xy, t) = text.split_once(',').ok_or_else(bad)?;
    let n_xy = xy.trim().parse().map_err(|_| bad())?;
    let n_t = t.trim().parse().map_err(|_| bad())?;
    Grid::new(n_xy, n_t).map_err(|e| UsageError::new(format!("--grid: {e}")))
}

impl Tolerances {
    pub fn settings(&self) -> Result<Settings, UsageError> {
        if !(1e-14..=1e-2).contains(&self.quad_tol) {
            return Err(UsageError::new(format!(
                "--quad-tol must lie in [1e-14, 1e-2], got {}",
                self.quad_tol
            )));
        }
        for (flag, v) in [("certify-tol", self.certify_tol), ("verify-tol", self.verify_tol)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(UsageError::new(format!("--{flag} must be finite and >= 0, got {v}")));
            }
        }
        if self.opt_grid < 3 {
            return Err(UsageError::new(format!("--opt-grid must be at least 3, got {}", self.opt_grid)));
        }
        if !(self.opt_tol > 0.0 && self.opt_tol < 1.0) {
            return Err(UsageError::new(format!("--opt-tol must lie in (0, 1), got {}", self.opt_tol)));
        }
        Ok(Settings {
            quad_tol: self.quad_tol,
            certify_tol: self.certify_tol,
            verify_tol: self.verify_tol,
            opt_grid: self.opt_grid,
            opt_tol: self.opt_tol,
            grid: parse_grid(&self.grid)?,
            ..Settings::default()
        })
    }
}

/// Functions and parameters a bound needs, checked before any computation.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundPlan {
    Single { f: Expr },
    Product { fs: Vec<Expr> },
    Pair { f: Expr, g: Expr },
    MConvex { f: Expr, g: Expr, m1: f64, m2: f64 },
    AlphaM { f: Expr, g: Expr, alpha1: f64, m1: f64, alpha2: f64, m2: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundRun {
    pub theorem: TheoremId,
    pub plan: BoundPlan,
    pub interval: Interval,
    pub log_concave: bool,
    pub settings: Settings,
}

fn required<'a>(theorem: TheoremId, flag: &str, v: &'a Option<String>) -> Result<&'a str, UsageError> {
    v.as_deref()
        .ok_or_else(|| UsageError::new(format!("bound --theorem {theorem} requires --{flag}")))
}

fn required_unit(theorem: TheoremId, flag: &str, v: Option<f64>) -> Result<f64, UsageError> {
    let v = v.ok_or_else(|| UsageError::new(format!("bound --theorem {theorem} requires --{flag}")))?;
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err(UsageError::new(format!("--{flag} must lie in (0, 1], got {v}")))
    }
}

fn reject_unused(theorem: TheoremId, present: &[(&str, bool)]) -> Result<(), UsageError> {
    match present.iter().find(|(_, p)| *p) {
        Some((flag, _)) => Err(UsageError::new(format!(
            "bound --theorem {theorem} does not take --{flag}"
        ))),
        None => Ok(()),
    }
}

impl BoundArgs {
    pub fn validate(&self) -> Result<BoundRun, UsageError> {
        let theorem = TheoremId::from(self.theorem);
        let settings = self.tol.settings()?;
        let interval = interval(self.a, self.b)?;
        let has_g = self.g.is_some();
        let has_fi = !self.fi.is_empty();
        let has_m = self.m1.is_some() || self.m2.is_some();
        let has_alpha = self.alpha1.is_some() || self.alpha2.is_some();
        let plan = match theorem {
            TheoremId::Classic | TheoremId::Gill | TheoremId::Cor1 => {
                reject_unused(theorem, &[("g", has_g), ("fi", has_fi), ("m1/--m2", has_m), ("alpha1/--alpha2", has_alpha)])?;
                BoundPlan::Single {
                    f: expression("f", required(theorem, "f", &self.f)?)?,
                }
            }
            TheoremId::Thm21Product | TheoremId::Cor22 => {
                reject_unused(theorem, &[("g", has_g), ("m1/--m2", has_m), ("alpha1/--alpha2", has_alpha)])?;
                let mut sources: Vec<&str> = self.f.iter().map(String::as_str).collect();
                sources.extend(self.fi.iter().map(String::as_str));
                if sources.is_empty() {
                    return Err(UsageError::new(format!(
                        "bound --theorem {theorem} requires at least one --fi"
                    )));
                }
                let fs = sources
                    .into_iter()
                    .map(|s| expression("fi", s))
                    .collect::<Result<_, _>>()?;
                BoundPlan::Product { fs }
            }
            TheoremId::Thm22Sandwich | TheoremId::Thm23Sandwich => {
                reject_unused(theorem, &[("fi", has_fi), ("m1/--m2", has_m), ("alpha1/--alpha2", has_alpha)])?;
                BoundPlan::Pair {
                    f: expression("f", required(theorem, "f", &self.f)?)?,
                    g: expression("g", required(theorem, "g", &self.g)?)?,
                }
            }
            TheoremId::Thm24Mconvex => {
                reject_unused(theorem, &[("fi", has_fi), ("alpha1/--alpha2", has_alpha)])?;
                let f = required(theorem, "f", &self.f)?;
                let g = required(theorem, "g", &self.g)?;
                let m1 = required_unit(theorem, "m1", self.m1)?;
                let m2 = required_unit(theorem, "m2", self.m2)?;
                BoundPlan::MConvex {
                    f: expression("f", f)?,
                    g: expression("g", g)?,
                    m1,
                    m2,
                }
            }
            TheoremId::Thm25Alpham => {
                reject_unused(theorem, &[("fi", has_fi)])?;
                let f = required(theorem, "f", &self.f)?;
                let g = required(theorem, "g", &self.g)?;
                let m1 = required_unit(theorem, "m1", self.m1)?;
                let m2 = required_unit(theorem, "m2", self.m2)?;
                let alpha1 = required_unit(theorem, "alpha1", self.alpha1)?;
                let alpha2 = required_unit(theorem, "alpha2", self.alpha2)?;
                BoundPlan::AlphaM {
                    f: expression("f", f)?,
                    g: expression("g", g)?,
                    alpha1,
                    m1,
                    alpha2,
                    m2,
                }
            }
        };
        if self.log_concave
            && !matches!(
                theorem,
                TheoremId::Gill | TheoremId::Cor1 | TheoremId::Thm21Product | TheoremId::Cor22
            )
        {
            return Err(UsageError::new(format!(
                "bound --theorem {theorem} has no log-concave variant"
            )));
        }
        Ok(BoundRun {
            theorem,
            plan,
            interval,
            log_concave: self.log_concave,
            settings,
        })
    }
}

impl CertifyArgs {
    pub fn validate(&self) -> Result<(Expr, ClassSpec, Interval, Settings), UsageError> {
        let settings = self.tol.settings()?;
        let iv = interval(self.a, self.b)?;
        let class_err = |e| UsageError::new(format!("--class: {e}"));
        let spec = match self.class {
            ClassArg::Convex => ClassSpec::Convex,
            ClassArg::LogConvex => ClassSpec::LogConvex,
            ClassArg::LogConcave => ClassSpec::LogConcave,
            ClassArg::MConvex => {
                let m = self.m.ok_or_else(|| UsageError::new("--class m_convex requires --m"))?;
                ClassSpec::m_convex(m).map_err(class_err)?
            }
            ClassArg::AlphaMConvex => {
                let m = self.m.ok_or_else(|| UsageError::new("--class alpha_m_convex requires --m"))?;
                let alpha = self
                    .alpha
                    .ok_or_else(|| UsageError::new("--class alpha_m_convex requires --alpha"))?;
                ClassSpec::alpha_m_convex(alpha, m).map_err(class_err)?
            }
        };
        Ok((expression("f", &self.f)?, spec, iv, settings))
    }
}
