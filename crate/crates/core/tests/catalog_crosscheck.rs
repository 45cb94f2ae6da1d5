mod common;

use std::f64::consts::PI;

use common::{cat, close};
use kahlerlab_core::catalog::*;
use kahlerlab_core::kahler::{holomorphic_sectional_at, ricci_in_direction, KahlerEngine};
use kahlerlab_core::linalg::CMatrix;
use kahlerlab_core::point::Point;
use kahlerlab_core::potential::Potential;
use kahlerlab_core::sampling::{sample_interior, DEFAULT_MARGIN};
use kahlerlab_core::{Point64, C64};

fn rel(a: &CMatrix<f64>, b: &CMatrix<f64>) -> f64 {
    a.sub(b).max_abs() / b.max_abs().max(1.0)
}

#[test]
fn thullen_closed_forms_match_jets() {
    let e = KahlerEngine::default();
    for m in [1u32, 2, 3, 5] {
        let spec = DomainSpec::thullen_gm(m);
        let phi = cat(spec.clone());
        for p in sample_interior(&spec, 100, 11, DEFAULT_MARGIN).unwrap() {
            let cf = thullen_closed_forms_at(m, &p).unwrap();
            let g = match e.metric_at(&phi, &p) {
                Ok(g) => g,
                Err(err) if err.name() == "IllConditioned" => continue,
                Err(err) => panic!("{err}"),
            };
            assert!(rel(g.matrix(), &cf.g) < 1e-9, "m={m} g at {:?}", p.to_f64_pairs());
            assert!(((g.det() - cf.det) / cf.det).abs() < 1e-9, "m={m} det");
            let r = e.ricci_at(&phi, &p).unwrap();
            assert!(rel(&r.ricci, &cf.ricci) < 1e-9, "m={m} ricci at {:?}", p.to_f64_pairs());
        }
    }
}

#[test]
fn cheng_yau_closed_forms_match_jets() {
    let e = KahlerEngine::default();
    for rho in [
        DefiningFn::Ball,
        DefiningFn::Ellipsoid {
            weights: vec![1.0, 2.0],
        },
        DefiningFn::QuarticBall { a: 1.0 },
    ] {
        let spec = DomainSpec::ChengYau { rho: rho.clone(), n: 2 };
        let phi = cat(spec.clone());
        for p in sample_interior(&spec, 100, 5, DEFAULT_MARGIN).unwrap() {
            let cf = cheng_yau_closed_forms_at(&rho, 2, &p).unwrap();
            let g = e.metric_at(&phi, &p).unwrap();
            assert!(rel(g.matrix(), &cf.g) < 1e-9);
            let h = cf.g_inv.transpose();
            assert!(h.matmul(&cf.g).sub(&CMatrix::identity(2)).max_abs() < 1e-10);
            assert!(((g.det() - cf.det) / cf.det).abs() < 1e-9);
            assert!(cf.completeness_bound > 0.0 || cf.drho_sqr == 0.0);
            assert!(cf.completeness_bound <= 1.0);
        }
    }
    let p = Point::<f64>::real(&[0.5, 0.0]).unwrap();
    let ell = DefiningFn::Ellipsoid {
        weights: vec![1.0, 2.0],
    };
    let cf = cheng_yau_closed_forms_at(&ell, 2, &p).unwrap();
    let g = e.metric_at(&cat(DomainSpec::ChengYau { rho: ell, n: 2 }), &p).unwrap();
    assert!(rel(g.matrix(), &cf.g) < 1e-9);
}

#[test]
fn axis_table_matches_jets() {
    let e = KahlerEngine::default();
    for m in [1u32, 2, 4] {
        let phi = cat(DomainSpec::thullen_bergman(m));
        for k in 0..=19 {
            let w = 0.95 * k as f64 / 19.0;
            let wc = C64::from_polar(w, 0.3 * k as f64);
            let p = Point::new(vec![C64::new(0.0, 0.0), wc]).unwrap();
            let ax = thullen_bergman_axis_at(m, wc).unwrap();
            let g = e.metric_at(&phi, &p).unwrap();
            let r = e.ricci_at(&phi, &p).unwrap();
            let gd = CMatrix::diag(&ax.g_diag);
            let rd = CMatrix::diag(&ax.ricci_diag);
            assert!(
                g.matrix().sub(&gd).max_abs() < 1e-8 * gd.max_abs().max(1.0),
                "m={m} |w|={w}"
            );
            assert!(
                r.ricci.sub(&rd).max_abs() < 1e-8 * rd.max_abs().max(1.0),
                "m={m} |w|={w}"
            );
        }
    }
}

#[test]
fn bergman_metric_at_origin() {
    let g = KahlerEngine::default()
        .metric_at(&cat(DomainSpec::thullen_bergman(1)), &Point::origin(2).unwrap())
        .unwrap();
    assert!(g.matrix().sub(&CMatrix::diag(&[3.0, 3.0])).max_abs() < 1e-12);
}

#[test]
fn m1_thullen_is_the_ball() {
    let e = KahlerEngine::default();
    let spec = DomainSpec::thullen_gm(1);
    for p in sample_interior(&spec, 30, 2, DEFAULT_MARGIN).unwrap() {
        let pairs = [
            (cat(spec.clone()), cat(DomainSpec::BallHyperbolic { n: 2 })),
            (
                cat(DomainSpec::thullen_bergman(1)),
                cat(DomainSpec::BallBergman { n: 2 }),
            ),
        ];
        for (a, b) in &pairs {
            let ga = e.metric_at(a, &p).unwrap();
            let gb = e.metric_at(b, &p).unwrap();
            assert!(rel(ga.matrix(), gb.matrix()) < 1e-9);
            let ra = e.ricci_at(a, &p).unwrap();
            let rb = e.ricci_at(b, &p).unwrap();
            assert!(rel(&ra.ricci, &rb.ricci) < 1e-9);
        }
        // the m = 1 kernel is the ball kernel up to the constant factor
        let ratio = thullen_bergman_kernel_at(1.0, &p).unwrap() / ball_bergman_kernel(&p).unwrap();
        assert!(close(ratio, PI.powi(4) / 4.0, 1e-9 * ratio));
    }
}

#[test]
fn squeezing_brackets_ball_curvature() {
    let e = KahlerEngine::default();
    let b = squeezing_bounds(2, 1.0).unwrap();
    let spec = DomainSpec::BallBergman { n: 2 };
    let phi = cat(spec.clone());
    let dirs = [
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        [C64::new(0.0, 0.0), C64::new(0.0, 1.0)],
        [C64::new(1.0, 1.0), C64::new(-0.5, 0.2)],
        [C64::new(0.3, -0.7), C64::new(2.0, 0.1)],
        [C64::new(-1.0, 0.4), C64::new(0.6, -0.6)],
    ];
    for p in sample_interior(&spec, 20, 3, DEFAULT_MARGIN).unwrap() {
        let g = e.metric_at(&phi, &p).unwrap();
        let bundle = e.curvature_tensor_at(&phi, &p).unwrap();
        assert!(b.brackets_scalar(bundle.scalar, 1e-9) && close(bundle.scalar, b.r_lo, 1e-9));
        for w in &dirs {
            let h = holomorphic_sectional_at(&bundle, &g, w).unwrap();
            let ric = ricci_in_direction(&bundle, &g, w).unwrap();
            assert!(close(h, b.h_lo, 1e-9) && b.brackets_h(h, 1e-9), "H = {h}");
            assert!(close(ric, b.ric_lo, 1e-9) && b.brackets_ric(ric, 1e-9), "Ric = {ric}");
        }
    }
}

#[test]
fn ball_bergman_invariant_is_constant() {
    let e = KahlerEngine::default();
    for n in [1usize, 2] {
        let spec = DomainSpec::BallBergman { n };
        let phi = cat(spec.clone());
        let kernel = |p: &Point64| ball_bergman_kernel(p);
        for p in sample_interior(&spec, 10, 4, DEFAULT_MARGIN).unwrap() {
            let b = bergman_invariant_at(&e, &kernel, &phi, &p).unwrap();
            assert!(close(b, bergman_invariant_limit(n), 1e-9 * b), "n={n} B={b}");
        }
    }
    let bad = |_: &Point64| Ok(0.0);
    let phi = cat(DomainSpec::BallBergman { n: 1 });
    let err = bergman_invariant_at(&e, &bad, &phi, &Point::origin(1).unwrap()).unwrap_err();
    assert_eq!(err.name(), "DegenerateValue");
}

#[test]
fn cheng_yau_sweeps() {
    let e = KahlerEngine::default();
    let sched = RaySchedule {
        count: 8,
        delta_min: 1e-3,
    };
    let ball_ray = boundary_ray(
        &DomainSpec::ChengYau {
            rho: DefiningFn::Ball,
            n: 2,
        },
        &[C64::new(1.0, 0.0), C64::new(0.5, 0.5)],
        sched,
    )
    .unwrap();
    let ball = cheng_yau_boundary_sweep(&e, &DefiningFn::Ball, 2, &ball_ray).unwrap();
    assert!(ball.residuals.iter().all(|r| *r < 1e-9));

    // the quadratic ellipsoid is an affine image of the ball, hence Einstein as well
    let ell = DefiningFn::Ellipsoid {
        weights: vec![1.0, 2.0],
    };
    let ray = boundary_ray(
        &DomainSpec::ChengYau { rho: ell.clone(), n: 2 },
        &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        sched,
    )
    .unwrap();
    let sw = cheng_yau_boundary_sweep(&e, &ell, 2, &ray).unwrap();
    assert!(sw.residuals.iter().all(|r| *r < 1e-9));

    let quartic = DefiningFn::QuarticBall { a: 1.0 };
    let spec = DomainSpec::ChengYau {
        rho: quartic.clone(),
        n: 2,
    };
    let ray = boundary_ray(&spec, &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)], sched).unwrap();
    let sw = cheng_yau_boundary_sweep(&e, &quartic, 2, &ray).unwrap();
    let r = &sw.residuals;
    assert!(r[0] > 1e-2, "interior residual {}", r[0]);
    assert!(r.windows(2).all(|w| w[1] <= w[0] + 1e-9), "{r:?}");
    assert!(*r.last().unwrap() < 0.01, "{r:?}");
}

#[test]
fn hartogs_checks() {
    let e = KahlerEngine::default();
    let pts: Vec<Point64> = vec![
        Point::real(&[0.5, 0.3]).unwrap(),
        Point::from_pairs(&[(0.1, 0.2), (-0.3, 0.4)]).unwrap(),
        Point::from_pairs(&[(0.6, -0.2), (0.1, 0.1)]).unwrap(),
    ];
    let lin = HartogsF::Linear { c1: 1.0, c2: 1.0 };
    assert!(hartogs_einstein_check(&e, &lin, 2, &pts).unwrap() < 1e-9);
    let lin2 = HartogsF::Linear { c1: 2.0, c2: 1.0 };
    assert!(hartogs_einstein_check(&e, &lin2, 2, &pts).unwrap() < 1e-9);
    let ex = hartogs_einstein_check(&e, &HartogsF::Exponential, 2, &pts[..1]).unwrap();
    assert!(ex > 1e-2, "{ex}");
}

#[test]
fn kernel_examples() {
    let o = Point::<f64>::origin(2).unwrap();
    assert!(close(thullen_bergman_kernel_at(1.0, &o).unwrap(), PI * PI / 2.0, 1e-14));
    assert!(close(ball_bergman_kernel(&o).unwrap(), 2.0 / (PI * PI), 1e-15));
    let outside = Point::<f64>::real(&[0.9, 0.9]).unwrap();
    assert_eq!(
        thullen_bergman_kernel_at(2.0, &outside).unwrap_err().name(),
        "DomainViolation"
    );
    let phi = cat(DomainSpec::thullen_bergman(3));
    let p = Point::<f64>::from_pairs(&[(0.2, 0.1), (0.3, -0.2)]).unwrap();
    assert!(close(
        phi.value_at(&p).unwrap(),
        thullen_bergman_kernel_at(3.0, &p).unwrap().ln(),
        1e-12
    ));
}

#[test]
fn real_m_flag() {
    let spec = DomainSpec::ThullenGm { m: 1.5, real_m: true };
    let phi = cat(spec.clone());
    let p = Point::<f64>::from_pairs(&[(0.3, 0.0), (0.2, 0.1)]).unwrap();
    assert!(KahlerEngine::default().metric_at(&phi, &p).is_ok());
    assert_eq!(
        catalog_potential(&DomainSpec::ThullenGm { m: 1.5, real_m: false })
            .unwrap_err()
            .name(),
        "InvalidParams"
    );
}
