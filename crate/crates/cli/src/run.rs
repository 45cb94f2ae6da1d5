//! Scenario execution.

use std::collections::BTreeMap;

use kahlerlab_core::Point64;
use rayon::prelude::*;

use crate::checks::{Check, RunContext};
use crate::config::ScenarioConfig;
use crate::error::{CliError, Result};
use crate::report::{CheckSummary, Header, Mode, Record, Summary, VerificationReport, ARTIFACT_VERSION};
use crate::scan::{soliton_scan, ScanOutcome};

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Worker threads; 0 means rayon's default.
    pub jobs: usize,
    pub timestamp: Option<String>,
}

struct Outcome {
    residual: Option<f64>,
    error: Option<&'static str>,
}

type PointEval = (Outcome, Vec<(String, f64)>);

fn mode_and_threshold(cfg: &ScenarioConfig, check: Check) -> (Mode, f64) {
    match cfg.floor(check) {
        Some(f) => (Mode::Floor, f),
        None => (Mode::Tolerance, cfg.tolerance(check)),
    }
}

/// Runs every check at every point. Module errors are recorded against the
/// point and check that raised them; only configuration problems abort.
pub fn run_scenario(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<VerificationReport> {
    cfg.validate()?;
    let checks = cfg.parsed_checks()?;
    let ctx = RunContext::new(cfg)?;
    let points = cfg.points.resolve(&cfg.domain)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| CliError::config(format!("thread pool: {e}")))?;

    let local: Vec<Check> = checks.iter().copied().filter(|c| !c.is_global()).collect();
    let per_point: Vec<Vec<PointEval>> = pool.install(|| {
        points
            .par_iter()
            .map(|p| local.iter().map(|&c| evaluate(&ctx, c, p)).collect())
            .collect()
    });

    let scan = if checks.contains(&Check::SolitonScan) {
        let s = cfg.scan.as_ref().expect("validated");
        let lambda = ctx.lambda.expect("validated");
        Some(pool.install(|| soliton_scan(&ctx.engine, &ctx.phi, lambda, s.degree, &s.grid, &points)))
    } else {
        None
    };

    let mut records = Vec::with_capacity(points.len());
    for (index, (p, evals)) in points.iter().zip(per_point).enumerate() {
        let mut rec = Record {
            index,
            point: p.to_f64_pairs().into_iter().map(|(a, b)| [a, b]).collect(),
            quantities: BTreeMap::new(),
            residuals: BTreeMap::new(),
            errors: BTreeMap::new(),
            pass: true,
        };
        for (&c, (out, qs)) in local.iter().zip(evals) {
            for (k, v) in qs {
                rec.quantities.insert(format!("{}.{k}", c.name()), v);
            }
            store(cfg, &mut rec, c, out);
        }
        if let Some(scan) = &scan {
            let out = match scan {
                Ok(s) => {
                    rec.quantities
                        .insert("soliton_scan.argmin_residual".into(), s.argmin_residuals[index]);
                    Outcome {
                        residual: Some(s.min_sup_residual),
                        error: None,
                    }
                }
                Err(e) => Outcome {
                    residual: None,
                    error: Some(e.name()),
                },
            };
            store(cfg, &mut rec, Check::SolitonScan, out);
        }
        records.push(rec);
    }

    let summary = summarize(cfg, &checks, &records, scan.and_then(|s| s.ok()));
    Ok(VerificationReport {
        header: Header {
            artifact_version: ARTIFACT_VERSION.into(),
            config: cfg.to_value(),
            seed: cfg.points.seed(),
            timestamp: opts.timestamp.clone(),
        },
        records,
        summary,
    })
}

fn evaluate(ctx: &RunContext, check: Check, p: &Point64) -> PointEval {
    match ctx.evaluate(check, p) {
        Ok(e) => (
            Outcome {
                residual: Some(e.residual),
                error: None,
            },
            e.quantities,
        ),
        Err(err) => (
            Outcome {
                residual: None,
                error: Some(err.name()),
            },
            Vec::new(),
        ),
    }
}

fn store(cfg: &ScenarioConfig, rec: &mut Record, check: Check, out: Outcome) {
    let (mode, threshold) = mode_and_threshold(cfg, check);
    match (out.residual, out.error) {
        (Some(r), _) => {
            rec.pass &= mode.passes(r, threshold);
            rec.residuals.insert(check.name().into(), r);
        }
        (None, err) => {
            rec.pass = false;
            rec.errors.insert(check.name().into(), err.unwrap_or("Unknown").into());
        }
    }
}

fn summarize(cfg: &ScenarioConfig, checks: &[Check], records: &[Record], scan: Option<ScanOutcome>) -> Summary {
    let mut out = BTreeMap::new();
    let mut regression_constants = BTreeMap::new();
    for &c in checks {
        let (mode, threshold) = mode_and_threshold(cfg, c);
        let mut s = CheckSummary {
            mode,
            threshold,
            worst: None,
            passed: 0,
            failed: 0,
            errors: 0,
        };
        for r in records {
            match r.residuals.get(c.name()) {
                Some(&v) => {
                    if mode.passes(v, threshold) {
                        s.passed += 1;
                    } else {
                        s.failed += 1;
                    }
                    s.worst = Some(match (s.worst, mode) {
                        (None, _) => v,
                        (Some(w), Mode::Tolerance) => w.max(v),
                        (Some(w), Mode::Floor) => w.min(v),
                    });
                }
                None => {
                    s.failed += 1;
                    s.errors += 1;
                }
            }
        }
        if let (Mode::Floor, Some(w)) = (mode, s.worst) {
            regression_constants.insert(c.name().to_string(), w);
        }
        out.insert(c.name().to_string(), s);
    }
    Summary {
        all_pass: records.iter().all(|r| r.pass),
        points: records.len(),
        checks: out,
        regression_constants,
        scan,
    }
}
