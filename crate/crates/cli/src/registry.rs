//! Built-in scenarios. Configs select and tune; the checks themselves live in
//! [`crate::checks`].

use std::collections::BTreeMap;

use kahlerlab_core::catalog::{DefiningFn, DomainSpec, HartogsF};

use crate::config::{FieldSpec, PointSet, ScanSpec, ScenarioConfig};
use crate::error::{CliError, Result};

/// Best sup residual over the degree-2 grid fields for Thullen `g_2` (λ = −3,
/// grid {−1, −½, 0, ½, 1}, 10 sample points, seed 14). Observed 1.8613, attained
/// by X = 0.
pub const SCAN_FLOOR_G2: f64 = 1.8;
/// S-identity residual for `3·g_2` at (0.2, 0.2) with X = 0. Observed 1.2615.
pub const S_IDENTITY_FLOOR_G2: f64 = 1.2;
/// grad-identity residual for `g_2` at (0.3, 0.3) with X = 0. Observed 0.5564.
pub const GRAD_FLOOR_G2: f64 = 0.5;
/// Einstein residual for Hartogs F = e^{−x}, n = 2, at (0.5, 0.3), λ = −3. Observed 1.7689.
pub const HARTOGS_EXP_FLOOR: f64 = 1.7;

fn sample(count: usize, seed: u64) -> PointSet {
    PointSet::Sample {
        count,
        seed,
        margin: 1e-3,
    }
}

fn explicit(points: &[&[(f64, f64)]]) -> PointSet {
    PointSet::Explicit {
        points: points
            .iter()
            .map(|p| p.iter().map(|&(a, b)| [a, b]).collect())
            .collect(),
    }
}

fn base(name: &str, domain: DomainSpec, points: PointSet, checks: &[&str], jet_order: usize) -> ScenarioConfig {
    ScenarioConfig {
        scenario: name.into(),
        domain,
        points,
        checks: checks.iter().map(|c| c.to_string()).collect(),
        tolerances: BTreeMap::new(),
        jet_order,
        lambda: None,
        field: None,
        scan: None,
        output: None,
        potential_scale: None,
        floors: BTreeMap::new(),
    }
}

fn floor(mut cfg: ScenarioConfig, check: &str, value: f64) -> ScenarioConfig {
    cfg.floors.insert(check.into(), value);
    cfg
}

/// Every built-in scenario, in listing order.
pub fn scenarios() -> Vec<ScenarioConfig> {
    let g2 = DomainSpec::thullen_gm(2);
    let axis: Vec<Vec<(f64, f64)>> = [0.0, 0.3, 0.6, 0.8, 0.95]
        .iter()
        .map(|&w| vec![(0.0, 0.0), (w, 0.0)])
        .collect();
    let axis_refs: Vec<&[(f64, f64)]> = axis.iter().map(|p| p.as_slice()).collect();

    let mut out = vec![
        base(
            "thullen-closed-forms",
            g2.clone(),
            sample(100, 1),
            &["metric", "closed_form"],
            4,
        ),
        base(
            "ball-einstein",
            DomainSpec::BallBergman { n: 2 },
            sample(100, 2),
            &["metric", "einstein"],
            4,
        ),
        base(
            "thullen-g1-einstein",
            DomainSpec::thullen_gm(1),
            sample(100, 3),
            &["einstein"],
            4,
        ),
        base(
            "cheng-yau-ball",
            DomainSpec::ChengYau {
                rho: DefiningFn::Ball,
                n: 2,
            },
            sample(100, 4),
            &["einstein", "closed_form", "completeness"],
            4,
        ),
        base(
            "cheng-yau-ellipsoid",
            DomainSpec::ChengYau {
                rho: DefiningFn::Ellipsoid {
                    weights: vec![1.0, 2.0],
                },
                n: 2,
            },
            sample(100, 5),
            &["closed_form", "completeness"],
            4,
        ),
        base(
            "hartogs-linear",
            DomainSpec::Hartogs {
                f: HartogsF::Linear { c1: 1.0, c2: 1.0 },
                n: 2,
            },
            sample(100, 6),
            &["einstein"],
            4,
        ),
        base(
            "thullen-axis",
            DomainSpec::thullen_bergman(2),
            explicit(&axis_refs),
            &["axis_table"],
            4,
        ),
        base(
            "ball-squeezing",
            DomainSpec::BallBergman { n: 2 },
            sample(20, 7),
            &["squeezing"],
            4,
        ),
        base(
            "ball-bergman-invariant",
            DomainSpec::BallBergman { n: 2 },
            sample(20, 8),
            &["bergman_invariant"],
            2,
        ),
    ];

    let mut ray = base(
        "thullen-bergman-ray",
        DomainSpec::thullen_bergman(2),
        explicit(&[&[(0.0, 0.0), (0.99, 0.0)]]),
        &["bergman_invariant"],
        2,
    );
    ray.tolerances.insert("bergman_invariant".into(), 0.02);
    out.push(ray);

    let mut einstein_ids = base(
        "einstein-identities",
        DomainSpec::BallBergman { n: 2 },
        sample(20, 9),
        &["grad_identity", "s_identity", "bochner"],
        5,
    );
    einstein_ids.field = Some(FieldSpec::Zero);
    out.push(einstein_ids);

    let mut killing = base(
        "ball-rotation-soliton",
        DomainSpec::BallBergman { n: 2 },
        sample(20, 10),
        &["soliton", "s_identity", "bochner"],
        4,
    );
    killing.field = Some(FieldSpec::Rotation);
    out.push(killing);

    let mut bochner = base(
        "disk-bochner",
        DomainSpec::BallHyperbolic { n: 1 },
        sample(20, 11),
        &["bochner"],
        4,
    );
    bochner.field = Some(FieldSpec::Random { degree: 2, seed: 12 });
    out.push(bochner);

    out.push(base(
        "fd-oracle",
        DomainSpec::BallHyperbolic { n: 2 },
        PointSet::Sample {
            count: 20,
            seed: 13,
            margin: 0.05,
        },
        &["fd_oracle"],
        4,
    ));

    let mut g1_scan = base(
        "thullen-g1-soliton-scan",
        DomainSpec::thullen_gm(1),
        sample(10, 14),
        &["soliton_scan"],
        4,
    );
    g1_scan.lambda = Some(-3.0);
    g1_scan.scan = Some(ScanSpec {
        degree: 2,
        grid: vec![-1.0, -0.5, 0.0, 0.5, 1.0],
    });
    out.push(g1_scan);

    // Negative scenarios: pass means the residual stays above a frozen floor.
    let mut scan = base("thullen-soliton-scan", g2.clone(), sample(10, 14), &["soliton_scan"], 4);
    scan.lambda = Some(-3.0);
    scan.scan = Some(ScanSpec {
        degree: 2,
        grid: vec![-1.0, -0.5, 0.0, 0.5, 1.0],
    });
    out.push(floor(scan, "soliton_scan", SCAN_FLOOR_G2));

    let mut s_floor = base(
        "thullen-s-identity-floor",
        g2.clone(),
        explicit(&[&[(0.2, 0.0), (0.2, 0.0)]]),
        &["s_identity"],
        4,
    );
    // Ricci is scale-invariant, so 3·g_2 has Ric = −g in the w direction at the origin
    s_floor.potential_scale = Some(3.0);
    s_floor.lambda = Some(-1.0);
    s_floor.field = Some(FieldSpec::Zero);
    out.push(floor(s_floor, "s_identity", S_IDENTITY_FLOOR_G2));

    let mut grad_floor = base(
        "thullen-grad-floor",
        g2,
        explicit(&[&[(0.3, 0.0), (0.3, 0.0)]]),
        &["grad_identity"],
        5,
    );
    grad_floor.field = Some(FieldSpec::Zero);
    out.push(floor(grad_floor, "grad_identity", GRAD_FLOOR_G2));

    let mut hartogs = base(
        "hartogs-exp-floor",
        DomainSpec::Hartogs {
            f: HartogsF::Exponential,
            n: 2,
        },
        explicit(&[&[(0.5, 0.0), (0.3, 0.0)]]),
        &["einstein"],
        4,
    );
    hartogs.lambda = Some(-3.0);
    out.push(floor(hartogs, "einstein", HARTOGS_EXP_FLOOR));

    out
}

pub fn scenario(name: &str) -> Result<ScenarioConfig> {
    scenarios()
        .into_iter()
        .find(|s| s.scenario == name)
        .ok_or_else(|| CliError::config(format!("unknown scenario {name:?}; see `kahlerlab list`")))
}
