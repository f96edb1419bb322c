use std::fs;
use std::path::Path;

use hadamard_core::bounds::{self, BoundReport, BoundVerdict, SplitDirection, TheoremId};
use hadamard_core::convexity::{self, Verdict};
use hadamard_core::expr::{parse, Expr, ParseError};
use hadamard_core::verify::{self, FuzzConfig, FuzzError, FuzzRun};
use serde::Serialize;

use crate::config::{BoundPlan, BoundRun, Command, FuzzArgs, UsageError};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_UNDECIDED: u8 = 2;

/// What a successful (non-usage-error) run prints and returns.
pub struct Output {
    pub json: String,
    pub summary: String,
    pub exit: u8,
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}

#[derive(Serialize)]
struct UsageDoc<'a> {
    usage_error: UsageBody<'a>,
}

#[derive(Serialize)]
struct UsageBody<'a> {
    message: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    parse_error: Option<&'a ParseError>,
}

pub fn usage_json(e: &UsageError) -> String {
    to_json(&UsageDoc {
        usage_error: UsageBody {
            message: &e.message,
            parse_error: e.parse_error.as_ref(),
        },
    })
}

#[derive(Serialize)]
struct ParseDoc<'a> {
    source: &'a str,
    pretty: String,
    tree: &'a Expr,
}

pub fn run(command: Command) -> Result<Output, UsageError> {
    match command {
        Command::Parse { f } => {
            let tree = parse(&f).map_err(|e| UsageError {
                message: format!("--f: {e}"),
                parse_error: Some(e),
            })?;
            let pretty = tree.pretty();
            Ok(Output {
                summary: format!("parsed: {pretty}"),
                json: to_json(&ParseDoc {
                    source: &f,
                    pretty,
                    tree: &tree,
                }),
                exit: EXIT_OK,
            })
        }
        Command::Certify(args) => {
            let (f, spec, iv, settings) = args.validate()?;
            let cert = convexity::certify(&f.compile(), spec, iv, settings.grid, settings.certify_tol);
            let worst = cert
                .worst_violation
                .map_or("n/a".to_string(), |w| format!("{w:e}"));
            let mut summary = format!(
                "{} on [{}, {}]: {:?} (worst slack {worst})",
                spec.name(),
                iv.a(),
                iv.b(),
                cert.verdict
            );
            if let Some(cx) = cert.counterexample {
                summary.push_str(&format!("; counterexample x={} y={} t={}", cx.x, cx.y, cx.t));
            }
            let exit = match cert.verdict {
                Verdict::Certified => EXIT_OK,
                Verdict::Refuted => EXIT_FAILED,
                Verdict::Inconclusive => EXIT_UNDECIDED,
            };
            Ok(Output {
                json: to_json(&cert),
                summary,
                exit,
            })
        }
        Command::Bound(args) => {
            let run = args.validate()?;
            let report = evaluate_bound(&run);
            Ok(Output {
                summary: bound_summary(&report),
                exit: match report.verdict {
                    BoundVerdict::Holds => EXIT_OK,
                    BoundVerdict::Violated => EXIT_FAILED,
                    BoundVerdict::HypothesesUnmet => EXIT_UNDECIDED,
                },
                json: to_json(&report),
            })
        }
        Command::Fuzz(args) => run_fuzz(&args),
    }
}

fn evaluate_bound(run: &BoundRun) -> BoundReport {
    let (iv, s) = (run.interval, &run.settings);
    let split = if run.log_concave {
        SplitDirection::MaxLogconcave
    } else {
        SplitDirection::MinLogconvex
    };
    match (&run.plan, run.theorem) {
        (BoundPlan::Single { f }, TheoremId::Classic) => bounds::classic_hadamard(f, iv, s),
        (BoundPlan::Single { f }, TheoremId::Gill) => bounds::gill_bound(f, iv, run.log_concave, s),
        (BoundPlan::Single { f }, _) => bounds::single_split_point_bound(f, iv, split, s),
        (BoundPlan::Product { fs }, TheoremId::Thm21Product) => {
            bounds::product_bound(fs, iv, run.log_concave, s).expect("validated non-empty")
        }
        (BoundPlan::Product { fs }, _) => {
            bounds::split_point_bound(fs, iv, split, s).expect("validated non-empty")
        }
        (BoundPlan::Pair { f, g }, TheoremId::Thm22Sandwich) => bounds::sandwich_e9(f, g, iv, s),
        (BoundPlan::Pair { f, g }, _) => bounds::sandwich_e17(f, g, iv, s),
        (BoundPlan::MConvex { f, g, m1, m2 }, _) => {
            bounds::mconvex_bound(f, g, iv, *m1, *m2, s).expect("validated parameters")
        }
        (BoundPlan::AlphaM { f, g, alpha1, m1, alpha2, m2 }, _) => {
            bounds::alpham_bound(f, g, iv, *alpha1, *m1, *alpha2, *m2, s)
                .expect("validated parameters")
        }
    }
}

fn bound_summary(r: &BoundReport) -> String {
    let mut lines = vec![format!(
        "{}: {:?}, margin {}, verify_tol {:e}",
        r.theorem_id,
        r.verdict,
        r.margin.map_or("n/a".to_string(), |m| format!("{m:e}")),
        r.verify_tol
    )];
    for (k, v) in &r.quantities {
        lines.push(format!("  {k} = {v}"));
    }
    for c in r.unmet() {
        lines.push(format!(
            "  unmet: {} {} ({:?}){}",
            c.subject,
            c.check,
            c.verdict,
            c.detail.as_deref().map_or(String::new(), |d| format!(": {d}"))
        ));
    }
    for n in &r.notes {
        lines.push(format!("  note: {n}"));
    }
    lines.join("\n")
}

fn fuzz_config(args: &FuzzArgs) -> Result<FuzzConfig, UsageError> {
    let mut config = FuzzConfig::new(args.theorem.into(), args.trials, args.seed);
    config.settings = args.tol.settings()?;
    if !args.families.is_empty() {
        config.families = Some(args.families.iter().map(|&f| f.into()).collect());
    }
    config.n = args.n;
    config.m1 = args.m1;
    config.m2 = args.m2;
    config.alpha1 = args.alpha1;
    config.alpha2 = args.alpha2;
    config.concave_variant = args.log_concave;
    Ok(config)
}

fn write_file(path: &Path, contents: &str) -> Result<(), UsageError> {
    fs::write(path, contents)
        .map_err(|e| UsageError::new(format!("cannot write {}: {e}", path.display())))
}

fn margins_csv(run: &FuzzRun) -> Result<String, UsageError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| UsageError::new(format!("csv: {e}"));
    w.write_record(["trial", "verdict", "margin", "verify_tol", "a", "b"]).map_err(io)?;
    for r in &run.records {
        let verdict = serde_json::to_value(r.verdict).expect("verdict serializes");
        w.write_record([
            r.trial.to_string(),
            verdict.as_str().unwrap_or_default().to_string(),
            r.margin.map_or(String::new(), |m| m.to_string()),
            r.verify_tol.to_string(),
            r.inputs.a.to_string(),
            r.inputs.b.to_string(),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| UsageError::new(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

fn run_fuzz(args: &FuzzArgs) -> Result<Output, UsageError> {
    let config = fuzz_config(args)?;
    let run = verify::fuzz(&config).map_err(|e| match e {
        FuzzError::NoTrials => UsageError::new("--trials must be at least 1"),
        FuzzError::NoFactors => UsageError::new("--n must be at least 1"),
        other => UsageError::new(other.to_string()),
    })?;
    let json = to_json(&run.summary);
    if let Some(path) = &args.out {
        write_file(path, &format!("{json}\n"))?;
    }
    if let Some(path) = &args.csv {
        write_file(path, &margins_csv(&run)?)?;
    }
    let s = &run.summary;
    let summary = format!(
        "{}: {} trials, {} holds, {} unmet, {} violations, min margin {}, {} discarded draws, {} generation failures",
        s.theorem_id,
        s.trials,
        s.holds,
        s.hypotheses_unmet,
        s.violations,
        s.min_margin.map_or("n/a".to_string(), |m| format!("{m:e}")),
        s.discarded_draws,
        s.generation_failures
    );
    Ok(Output {
        json,
        summary,
        exit: if s.violations == 0 { EXIT_OK } else { EXIT_FAILED },
    })
}
