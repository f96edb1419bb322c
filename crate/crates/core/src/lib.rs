//! Numerical verification of Hadamard-type integral inequalities for
//! log-convex, m-convex and (alpha, m)-convex functions.
//!
//! Functions are given as expressions in one variable `x` (see [`expr`]).
//! Each bound operation certifies its hypotheses on a grid, evaluates the
//! closed-form side, integrates the integral side, and returns a
//! [`BoundReport`] with a three-way verdict.
//!
//! ```
//! use hadamard_core::{gill_bound, parse, BoundVerdict, Interval, Settings};
//!
//! let f = parse("exp(x^2)").unwrap();
//! let iv = Interval::new(0.0, 1.0).unwrap();
//! let report = gill_bound(&f, iv, false, &Settings::default());
//! assert_eq!(report.verdict, BoundVerdict::Holds);
//! ```

pub mod bounds;
pub mod convexity;
pub mod expr;
pub mod means;
pub mod optimize;
pub mod quad;
pub mod settings;
pub mod verify;

pub use bounds::{
    alpham_bound, classic_hadamard, gill_bound, mconvex_bound, product_bound, sandwich_e17,
    sandwich_e9, single_split_point_bound, split_point_bound, verify_elementary, BoundError,
    BoundReport, BoundVerdict, CertificateSummary, SplitDirection, TheoremId,
};
pub use convexity::{
    certify, certify_monotone, ClassSpec, ConvexityCertificate, Grid, MonotonicityCertificate,
    Verdict,
};
pub use expr::{evaluate, parse, pretty, DomainFault, EvalOutcome, Evaluable, Expr, ParseError};
pub use means::{log_mean, MeanValue};
pub use optimize::{maximize_scalar, minimize_scalar, OptimumResult};
pub use quad::{integrate, Interval, QuadError, QuadResult};
pub use settings::Settings;
pub use verify::{fuzz, generate, FuzzConfig, FuzzRun, FuzzSummary, GeneratorSpec, TrialRecord};
