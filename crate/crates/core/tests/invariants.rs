mod common;

use std::sync::Arc;

use common::cat;
use kahlerlab_core::catalog::{cheng_yau_closed_forms_at, DefiningFn, DomainSpec, HartogsF};
use kahlerlab_core::field::PolyField;
use kahlerlab_core::jet::{Jet, MultiIndexPair};
use kahlerlab_core::kahler::KahlerEngine;
use kahlerlab_core::point::Point;
use kahlerlab_core::potential::{Potential, Scaled};
use kahlerlab_core::sampling::sample_interior;
use kahlerlab_core::{Point64, C64};
use proptest::prelude::*;

fn catalog() -> Vec<DomainSpec> {
    vec![
        DomainSpec::BallHyperbolic { n: 1 },
        DomainSpec::BallHyperbolic { n: 2 },
        DomainSpec::BallHyperbolic { n: 3 },
        DomainSpec::BallBergman { n: 1 },
        DomainSpec::BallBergman { n: 2 },
        DomainSpec::thullen_gm(1),
        DomainSpec::thullen_gm(2),
        DomainSpec::thullen_gm(3),
        DomainSpec::thullen_gm(5),
        DomainSpec::thullen_bergman(2),
        DomainSpec::thullen_bergman(3),
        DomainSpec::ChengYau {
            rho: DefiningFn::Ball,
            n: 2,
        },
        DomainSpec::ChengYau {
            rho: DefiningFn::Ellipsoid {
                weights: vec![1.0, 2.0],
            },
            n: 2,
        },
        DomainSpec::ChengYau {
            rho: DefiningFn::QuarticBall { a: 1.0 },
            n: 2,
        },
        DomainSpec::Hartogs {
            f: HartogsF::Linear { c1: 1.0, c2: 1.0 },
            n: 2,
        },
        DomainSpec::Hartogs {
            f: HartogsF::Exponential,
            n: 2,
        },
        DomainSpec::Hartogs {
            f: HartogsF::Rational,
            n: 2,
        },
    ]
}

/// A catalog domain and a point with slack above `margin`, drawn from the
/// unit box scaled by the domain's radii.
fn spec_and_point(margin: f64) -> impl Strategy<Value = (DomainSpec, Point64)> {
    (0..catalog().len(), prop::collection::vec(-1.0f64..1.0, 6)).prop_filter_map("outside", move |(k, u)| {
        let spec = catalog()[k].clone();
        let r = spec.radii();
        let pairs: Vec<(f64, f64)> = (0..spec.dim())
            .map(|j| (r[j] * u[2 * j], r[j] * u[2 * j + 1]))
            .collect();
        let p = Point::from_pairs(&pairs).ok()?;
        (spec.slack(&p) > margin).then_some((spec, p))
    })
}

fn complex_in_square() -> impl Strategy<Value = C64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| C64::new(a, b))
}

/// Polynomial jet `Σ c_α (v − base)^α` in `nvars` formal variables.
fn poly_jet(base: &[C64], order: usize, coeffs: &[C64]) -> Jet<f64> {
    let base: Arc<[C64]> = base.into();
    let nvars = base.len();
    let shifted: Vec<Jet<f64>> = (0..nvars)
        .map(|v| Jet::variable(base.clone(), order, v).add_scalar(-base[v]))
        .collect();
    let mut out = Jet::constant(base.clone(), order, C64::new(0.0, 0.0));
    let mut c = coeffs.iter().cycle();
    for exps in exponents(nvars, order) {
        let mut term = Jet::constant(base.clone(), order, *c.next().unwrap());
        for (v, &e) in exps.iter().enumerate() {
            for _ in 0..e {
                term = term.try_mul(&shifted[v]).unwrap();
            }
        }
        out = out.try_add(&term).unwrap();
    }
    out
}

fn exponents(nvars: usize, order: usize) -> Vec<Vec<u8>> {
    let mut out = vec![vec![]];
    for _ in 0..nvars {
        out = out
            .into_iter()
            .flat_map(|e: Vec<u8>| {
                let used: usize = e.iter().map(|&x| x as usize).sum();
                (0..=(order - used) as u8).map(move |k| {
                    let mut f = e.clone();
                    f.push(k);
                    f
                })
            })
            .collect();
    }
    out
}

fn binomial(n: u8, k: u8) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn leibniz_rule(
        base in prop::collection::vec(complex_in_square(), 4),
        ca in prop::collection::vec(complex_in_square(), 1..12),
        cb in prop::collection::vec(complex_in_square(), 1..12),
    ) {
        let order = 4;
        let a = poly_jet(&base, order, &ca).exp().unwrap();
        let b = poly_jet(&base, order, &cb);
        let ab = a.try_mul(&b).unwrap();
        for g in exponents(4, order) {
            let mut expected = C64::new(0.0, 0.0);
            for beta in exponents(4, order) {
                if beta.iter().zip(&g).any(|(x, y)| x > y) {
                    continue;
                }
                let rest: Vec<u8> = g.iter().zip(&beta).map(|(x, y)| x - y).collect();
                let w: f64 = g.iter().zip(&beta).map(|(&x, &y)| binomial(x, y)).product();
                expected += a.partial(&beta).unwrap() * b.partial(&rest).unwrap() * w;
            }
            let got = ab.partial(&g).unwrap();
            prop_assert!((got - expected).norm() <= 1e-10 * expected.norm().max(1.0), "{g:?}: {got} vs {expected}");
        }
    }

    #[test]
    fn hermitian_coefficient_symmetry((spec, p) in spec_and_point(0.02)) {
        let jet = cat(spec.clone()).jet_at(&p, 4).unwrap();
        prop_assert!(jet.hermitian_defect() <= 1e-12 * jet.coeffs().iter().map(|c| c.norm()).fold(1.0, f64::max));
    }

    #[test]
    fn truncation_is_consistent((spec, p) in spec_and_point(0.02)) {
        let phi = cat(spec);
        let high = phi.jet_at(&p, 5).unwrap();
        for d in 0..5 {
            prop_assert_eq!(high.truncate(d), phi.jet_at(&p, d).unwrap());
        }
    }

    #[test]
    fn metric_hermitian_positive((spec, p) in spec_and_point(1e-3)) {
        let g = KahlerEngine::default().metric_at(&cat(spec), &p).unwrap();
        prop_assert!(g.matrix().hermitian_defect() <= 1e-12 * g.matrix().max_abs());
        prop_assert!(g.matrix().is_positive_definite());
    }

    #[test]
    fn ricci_is_scale_invariant((spec, p) in spec_and_point(0.02), c in 0.1f64..10.0) {
        let e = KahlerEngine::default();
        let r1 = e.ricci_at(&cat(spec.clone()), &p).unwrap().ricci;
        let r2 = e.ricci_at(&Scaled::new(cat(spec), c), &p).unwrap().ricci;
        prop_assert!(r1.sub(&r2).max_abs() <= 1e-10 * r1.max_abs().max(1.0));
    }

    #[test]
    fn curvature_contracts_to_ricci((spec, p) in spec_and_point(0.02)) {
        let e = KahlerEngine::default();
        let phi = cat(spec);
        let bundle = e.curvature_tensor_at(&phi, &p).unwrap();
        let h = e.metric_at(&phi, &p).unwrap().matrix().inverse().unwrap();
        let n = p.dim();
        let riem = bundle.riem.as_ref().unwrap();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let mut s = C64::new(0.0, 0.0);
                for k in 0..n {
                    for l in 0..n {
                        s += h[(l, k)] * riem[((i * n + j) * n + k) * n + l];
                    }
                }
                worst = worst.max((s - bundle.ricci[(i, j)]).norm());
            }
        }
        prop_assert!(worst <= 1e-9 * bundle.ricci.max_abs().max(1.0), "{worst:e}");
    }

    #[test]
    fn lie_derivative_two_routes(
        (spec, p) in spec_and_point(0.02),
        coeffs in prop::collection::vec(complex_in_square(), 30),
    ) {
        let n = p.dim();
        let len = n * PolyField::<f64>::monomial_basis(n, 2).len();
        let x = PolyField::from_basis_coeffs(n, 2, &coeffs[..len]).unwrap();
        let e = KahlerEngine::default();
        let phi = cat(spec);
        let a = e.lie_derivative_metric_at(&phi, &x, &p).unwrap();
        let b = e.lie_derivative_covariant_at(&phi, &x, &p).unwrap();
        prop_assert!(a.sub(&b).max_abs() <= 1e-10 * a.max_abs().max(1.0));
    }

    #[test]
    fn completeness_bound_at_most_one(
        k in 0usize..3,
        u in prop::collection::vec(-1.0f64..1.0, 4),
    ) {
        let rho = [
            DefiningFn::Ball,
            DefiningFn::Ellipsoid { weights: vec![1.0, 2.0] },
            DefiningFn::QuarticBall { a: 1.0 },
        ][k].clone();
        let r = rho.radii(2);
        let p: Point64 = Point::from_pairs(&[(r[0] * u[0], r[0] * u[1]), (r[1] * u[2], r[1] * u[3])]).unwrap();
        prop_assume!(rho.value(&p) < -1e-6);
        let forms = cheng_yau_closed_forms_at(&rho, 2, &p).unwrap();
        prop_assert!(forms.completeness_bound <= 1.0);
    }
}

#[test]
fn bochner_vanishes_for_random_quadratic_fields() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let e = KahlerEngine::default();
    for spec in [
        DomainSpec::BallHyperbolic { n: 1 },
        DomainSpec::BallHyperbolic { n: 2 },
        DomainSpec::BallBergman { n: 2 },
    ] {
        let n = spec.dim();
        let phi = cat(spec.clone());
        let points = sample_interior(&spec, 20, 3, 0.05).unwrap();
        for _ in 0..5 {
            let len = n * PolyField::<f64>::monomial_basis(n, 2).len();
            let coeffs: Vec<C64> = (0..len)
                .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let x = PolyField::from_basis_coeffs(n, 2, &coeffs).unwrap();
            for p in &points {
                let r = e.bochner_residual_at(&phi, &x, p).unwrap();
                assert!(r <= 1e-7, "{} at {:?}: {r:e}", spec.label(), p.to_f64_pairs());
            }
        }
    }
}

#[test]
fn f32_pipeline_tracks_f64() {
    let e = KahlerEngine::default();
    let spec = DomainSpec::thullen_gm(2);
    let phi = cat(spec.clone());
    for p in sample_interior(&spec, 10, 4, 0.1).unwrap() {
        let p32: Point<f32> = p.cast();
        let r64 = e.ricci_at(&phi, &p).unwrap().scalar;
        let r32 = e.ricci_at(&phi, &p32).unwrap().scalar;
        assert!(((r32 as f64 - r64) / r64).abs() < 1e-3, "{r32} vs {r64}");
    }
    let zz = MultiIndexPair::mixed(2, 0, 0);
    let j32 = phi.jet_at(&Point::<f32>::origin(2).unwrap(), 2).unwrap();
    let j64 = phi.jet_at(&Point::<f64>::origin(2).unwrap(), 2).unwrap();
    assert!((j32.derivative(&zz).unwrap().re as f64 - j64.derivative(&zz).unwrap().re).abs() < 1e-6);
}
