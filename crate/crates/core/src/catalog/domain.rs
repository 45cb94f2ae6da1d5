use std::f64::consts::PI;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::{norm_sqr_of, Jet};
use crate::point::Point;
use crate::potential::Potential;
use crate::scalar::Real;

fn sum<T: Real>(xs: &[T]) -> T {
    xs.iter().fold(T::zero(), |acc, &x| acc + x)
}

fn c<T: Real>(x: f64) -> Complex<T> {
    Complex::new(T::lit(x), T::zero())
}

/// Defining functions `ρ` of strictly pseudoconvex domains `{ρ < 0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DefiningFn {
    /// `|z|² − 1`.
    Ball,
    /// `Σ wᵢ|zᵢ|² − 1`.
    Ellipsoid { weights: Vec<f64> },
    /// `|z|² + a|z₁|⁴ − 1`, `a > 0`. Not an affine image of the ball, so its
    /// Cheng–Yau metric is not Einstein.
    QuarticBall { a: f64 },
}

impl DefiningFn {
    pub fn id(&self) -> String {
        match self {
            DefiningFn::Ball => "ball".into(),
            DefiningFn::Ellipsoid { weights } => format!("ellipsoid{weights:?}"),
            DefiningFn::QuarticBall { a } => format!("quartic_ball(a={a})"),
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            DefiningFn::Ball => Ok(()),
            DefiningFn::Ellipsoid { weights } => {
                if weights.len() != n || weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
                    Err(Error::InvalidParams(format!("ellipsoid needs {n} positive weights")))
                } else {
                    Ok(())
                }
            }
            DefiningFn::QuarticBall { a } => {
                if *a > 0.0 && a.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidParams("quartic_ball needs a > 0".into()))
                }
            }
        }
    }

    pub fn eval_vars<T: Real>(&self, vars: &[Jet<T>]) -> Jet<T> {
        let n = vars.len() / 2;
        let one = c::<T>(1.0);
        match self {
            DefiningFn::Ball => norm_sqr_of(vars, 0..n).add_scalar(-one),
            DefiningFn::Ellipsoid { weights } => {
                let mut acc = vars[0].constant_like(-one);
                for (i, &w) in weights.iter().enumerate() {
                    acc = &acc + &(&vars[i] * &vars[n + i]).scale_real(T::lit(w));
                }
                acc
            }
            DefiningFn::QuarticBall { a } => {
                let x1 = &vars[0] * &vars[n];
                let quartic = (&x1 * &x1).scale_real(T::lit(*a));
                &norm_sqr_of(vars, 0..n).add_scalar(-one) + &quartic
            }
        }
    }

    pub fn value<T: Real>(&self, p: &Point<T>) -> T {
        let x: Vec<T> = p.coords().iter().map(|z| z.norm_sqr()).collect();
        match self {
            DefiningFn::Ball => sum(&x) - T::one(),
            DefiningFn::Ellipsoid { weights } => {
                x.iter()
                    .zip(weights)
                    .fold(T::zero(), |acc, (&xi, &w)| acc + xi * T::lit(w))
                    - T::one()
            }
            DefiningFn::QuarticBall { a } => sum(&x) + T::lit(*a) * x[0] * x[0] - T::one(),
        }
    }

    /// Per-coordinate bound on `|zᵢ|` inside the domain.
    pub fn radii(&self, n: usize) -> Vec<f64> {
        match self {
            DefiningFn::Ellipsoid { weights } => weights.iter().map(|w| 1.0 / w.sqrt()).collect(),
            _ => vec![1.0; n],
        }
    }
}

/// Profiles `F` of Hartogs domains `{Σ_{i≥1}|zᵢ|² < F(|z₀|²)}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HartogsF {
    /// `c1 − c2·x` on `(0, c1/c2)`.
    Linear { c1: f64, c2: f64 },
    /// `e^{−x}`.
    Exponential,
    /// `1/(1 + x)`.
    Rational,
    /// `c` (not admissible: `xF′/F` is constant).
    Constant { c: f64 },
}

impl HartogsF {
    pub fn id(&self) -> String {
        match self {
            HartogsF::Linear { c1, c2 } => format!("linear({c1},{c2})"),
            HartogsF::Exponential => "exp(-x)".into(),
            HartogsF::Rational => "1/(1+x)".into(),
            HartogsF::Constant { c } => format!("constant({c})"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            HartogsF::Linear { c1, c2 } if !(*c1 > 0.0 && *c2 > 0.0) => {
                Err(Error::InvalidParams("linear F needs c1, c2 > 0".into()))
            }
            HartogsF::Constant { c } if !(*c > 0.0) => Err(Error::InvalidParams("constant F needs c > 0".into())),
            _ => Ok(()),
        }
    }

    /// Supremum `B` of the interval `(0, B)` on which `F > 0`.
    pub fn bound(&self) -> f64 {
        match self {
            HartogsF::Linear { c1, c2 } => c1 / c2,
            _ => f64::INFINITY,
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            HartogsF::Linear { c1, c2 } => c1 - c2 * x,
            HartogsF::Exponential => (-x).exp(),
            HartogsF::Rational => 1.0 / (1.0 + x),
            HartogsF::Constant { c } => *c,
        }
    }

    /// `F ∘ x` for a jet `x`.
    pub fn compose<T: Real>(&self, x: &Jet<T>) -> Result<Jet<T>> {
        match self {
            HartogsF::Linear { c1, c2 } => Ok(x.scale_real(T::lit(-c2)).add_scalar(c(*c1))),
            HartogsF::Exponential => (-x).exp(),
            HartogsF::Rational => x.add_scalar(c(1.0)).recip(),
            HartogsF::Constant { c: k } => Ok(x.constant_like(c(*k))),
        }
    }
}

/// Catalogued domains together with their canonical potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case")]
pub enum DomainSpec {
    /// Unit ball with `log` of its Bergman kernel.
    BallBergman { n: usize },
    /// Unit ball with `−log(1 − |z|²)`.
    BallHyperbolic { n: usize },
    /// `Ω_m` with `−log((1 − |z|²)^{1/m} − |w|²)`.
    ThullenGm {
        m: f64,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        real_m: bool,
    },
    /// `Ω_m` with `log K`, `K` the closed-form kernel.
    ThullenBergman {
        m: f64,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        real_m: bool,
    },
    /// `{ρ < 0}` with `−log(−ρ)`.
    ChengYau { rho: DefiningFn, n: usize },
    /// Hartogs domain with `−log(F(|z₀|²) − Σ_{i≥1}|zᵢ|²)`.
    Hartogs { f: HartogsF, n: usize },
}

impl DomainSpec {
    pub fn thullen_gm(m: u32) -> Self {
        DomainSpec::ThullenGm {
            m: m as f64,
            real_m: false,
        }
    }

    pub fn thullen_bergman(m: u32) -> Self {
        DomainSpec::ThullenBergman {
            m: m as f64,
            real_m: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let check_m = |m: f64, real_m: bool| {
            if !(m >= 1.0 && m.is_finite()) {
                return Err(Error::InvalidParams(format!("thullen needs m >= 1, got {m}")));
            }
            if !real_m && m.fract() != 0.0 {
                return Err(Error::InvalidParams(format!("non-integer m = {m} needs real_m")));
            }
            Ok(())
        };
        match self {
            DomainSpec::BallBergman { n } | DomainSpec::BallHyperbolic { n } => {
                if *n == 0 {
                    return Err(Error::InvalidParams("ball needs n >= 1".into()));
                }
                Ok(())
            }
            DomainSpec::ThullenGm { m, real_m } | DomainSpec::ThullenBergman { m, real_m } => check_m(*m, *real_m),
            DomainSpec::ChengYau { rho, n } => {
                if *n == 0 {
                    return Err(Error::InvalidParams("cheng_yau needs n >= 1".into()));
                }
                rho.validate(*n)
            }
            DomainSpec::Hartogs { f, n } => {
                if *n < 2 {
                    return Err(Error::InvalidParams("hartogs needs n >= 2".into()));
                }
                f.validate()
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            DomainSpec::BallBergman { n }
            | DomainSpec::BallHyperbolic { n }
            | DomainSpec::ChengYau { n, .. }
            | DomainSpec::Hartogs { n, .. } => *n,
            DomainSpec::ThullenGm { .. } | DomainSpec::ThullenBergman { .. } => 2,
        }
    }

    pub fn label(&self) -> String {
        match self {
            DomainSpec::BallBergman { n } => format!("ball_bergman(n={n})"),
            DomainSpec::BallHyperbolic { n } => format!("ball_hyperbolic(n={n})"),
            DomainSpec::ThullenGm { m, .. } => format!("thullen_gm(m={m})"),
            DomainSpec::ThullenBergman { m, .. } => format!("thullen_bergman(m={m})"),
            DomainSpec::ChengYau { rho, n } => format!("cheng_yau({},n={n})", rho.id()),
            DomainSpec::Hartogs { f, n } => format!("hartogs({},n={n})", f.id()),
        }
    }

    /// Positive inside the domain; the sampling margin applies to it.
    pub fn slack<T: Real>(&self, p: &Point<T>) -> T {
        let x: Vec<T> = p.coords().iter().map(|z| z.norm_sqr()).collect();
        let total = sum(&x);
        match self {
            DomainSpec::BallBergman { .. } | DomainSpec::BallHyperbolic { .. } => T::one() - total,
            DomainSpec::ThullenGm { m, .. } | DomainSpec::ThullenBergman { m, .. } => {
                let s = T::one() - x[0];
                if s <= T::zero() {
                    return s;
                }
                s.powf(T::lit(1.0 / m)) - x[1]
            }
            DomainSpec::ChengYau { rho, .. } => -rho.value(p),
            DomainSpec::Hartogs { f, .. } => {
                let x0 = x[0].to_f64_lossy();
                if x0 >= f.bound() {
                    return T::lit(f.bound() - x0).min(-T::epsilon());
                }
                T::lit(f.value(x0)) - (total - x[0])
            }
        }
    }

    pub fn contains<T: Real>(&self, p: &Point<T>) -> bool {
        p.dim() == self.dim() && self.slack(p) > T::zero()
    }

    /// Per-coordinate bound on `|zᵢ|` used by the samplers. Unbounded Hartogs
    /// profiles are cut at `|z₀|² < 4`.
    pub fn radii(&self) -> Vec<f64> {
        match self {
            DomainSpec::BallBergman { n } | DomainSpec::BallHyperbolic { n } => vec![1.0; *n],
            DomainSpec::ThullenGm { .. } | DomainSpec::ThullenBergman { .. } => vec![1.0, 1.0],
            DomainSpec::ChengYau { rho, n } => rho.radii(*n),
            DomainSpec::Hartogs { f, n } => {
                let x0 = f.bound().min(4.0);
                let fmax = f.value(0.0).max(f.value(x0));
                let mut r = vec![fmax.sqrt(); *n];
                r[0] = x0.sqrt();
                r
            }
        }
    }

    /// Einstein constant of the canonical metric, when it is Einstein.
    pub fn einstein_lambda(&self) -> Option<f64> {
        match self {
            DomainSpec::BallBergman { .. } => Some(-1.0),
            DomainSpec::BallHyperbolic { n } => Some(-(*n as f64 + 1.0)),
            DomainSpec::ThullenGm { m, .. } if *m == 1.0 => Some(-3.0),
            DomainSpec::ThullenBergman { m, .. } if *m == 1.0 => Some(-1.0),
            DomainSpec::ChengYau {
                rho: DefiningFn::Ball | DefiningFn::Ellipsoid { .. },
                n,
            } => Some(-(*n as f64 + 1.0)),
            DomainSpec::Hartogs {
                f: HartogsF::Linear { .. },
                n,
            } => Some(-(*n as f64 + 1.0)),
            _ => None,
        }
    }
}

/// The potential attached to a [`DomainSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct CatalogPotential {
    spec: DomainSpec,
}

/// Validates `spec` and returns its potential.
pub fn catalog_potential(spec: &DomainSpec) -> Result<CatalogPotential> {
    spec.validate()?;
    Ok(CatalogPotential { spec: spec.clone() })
}

impl CatalogPotential {
    pub fn spec(&self) -> &DomainSpec {
        &self.spec
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `log` of a jet whose value must be positive; other failures surface as
/// `DomainViolation` because they only happen outside the domain.
fn log_positive<T: Real>(x: &Jet<T>, what: &str) -> Result<Jet<T>> {
    x.ln().map_err(|e| match e {
        Error::BranchViolation(_) | Error::DegenerateValue(_) => Error::DomainViolation(format!("{what} not positive")),
        e => e,
    })
}

impl<T: Real> Potential<T> for CatalogPotential {
    fn dim(&self) -> usize {
        self.spec.dim()
    }

    fn id(&self) -> String {
        self.spec.label()
    }

    fn contains(&self, p: &Point<T>) -> bool {
        self.spec.contains(p)
    }

    fn eval_vars(&self, vars: &[Jet<T>]) -> Result<Jet<T>> {
        let n = self.spec.dim();
        let one = c::<T>(1.0);
        match &self.spec {
            DomainSpec::BallBergman { n } => {
                let s = norm_sqr_of(vars, 0..*n).scale_real(-T::one()).add_scalar(one);
                let l = log_positive(&s, "1 - |z|^2")?;
                let k = factorial(*n) / PI.powi(*n as i32);
                Ok(l.scale_real(-T::lit(*n as f64 + 1.0)).add_scalar(c(k.ln())))
            }
            DomainSpec::BallHyperbolic { n } => {
                let s = norm_sqr_of(vars, 0..*n).scale_real(-T::one()).add_scalar(one);
                Ok(-log_positive(&s, "1 - |z|^2")?)
            }
            DomainSpec::ThullenGm { m, .. } => {
                let (_, rho) = thullen_parts(vars, *m)?;
                Ok(-log_positive(&rho, "thullen rho")?)
            }
            DomainSpec::ThullenBergman { m, .. } => {
                let (s, rho) = thullen_parts(vars, *m)?;
                let mf = T::lit(*m);
                let y = &vars[1] * &vars[3];
                let s1m = &rho + &y;
                let numer = &s1m.scale_real(mf + T::one()) - &y.scale_real(mf - T::one());
                let constant = (m * PI * PI / (m + 1.0)).ln() - (m + 1.0).ln();
                let log_s = log_positive(&s, "1 - |z|^2")?;
                let total = &(&log_positive(&numer, "kernel numerator")?
                    - &log_positive(&rho, "thullen rho")?.scale_real(T::lit(3.0)))
                    - &log_s.scale_real(T::lit(2.0 - 1.0 / m));
                Ok(total.add_scalar(c(constant)))
            }
            DomainSpec::ChengYau { rho, .. } => {
                let r = rho.eval_vars(vars);
                Ok(-log_positive(&-r, "-rho")?)
            }
            DomainSpec::Hartogs { f, .. } => {
                let x0 = &vars[0] * &vars[n];
                let fx = f.compose(&x0)?;
                let rest = norm_sqr_of(vars, 1..n);
                Ok(-log_positive(&(&fx - &rest), "F - |z'|^2")?)
            }
        }
    }
}

/// `(1 − |z|², (1 − |z|²)^{1/m} − |w|²)` as jets.
fn thullen_parts<T: Real>(vars: &[Jet<T>], m: f64) -> Result<(Jet<T>, Jet<T>)> {
    let s = (&vars[0] * &vars[2]).scale_real(-T::one()).add_scalar(c(1.0));
    let s1m = s.powf(T::lit(1.0 / m)).map_err(|e| match e {
        Error::BranchViolation(_) | Error::DegenerateValue(_) => Error::DomainViolation("|z| >= 1".into()),
        e => e,
    })?;
    let rho = &s1m - &(&vars[1] * &vars[3]);
    Ok((s, rho))
}

/// Standard Bergman kernel of the unit ball, `n!/πⁿ · (1 − |z|²)^{−(n+1)}`.
pub fn ball_bergman_kernel<T: Real>(p: &Point<T>) -> Result<T> {
    let n = p.dim();
    let s = T::one() - p.norm_sqr();
    if !(s > T::zero()) {
        return Err(Error::DomainViolation("outside the unit ball".into()));
    }
    Ok(T::lit(factorial(n) / PI.powi(n as i32)) * s.powi(-(n as i32 + 1)))
}

/// Closed-form Thullen kernel
/// `K = mπ²/(m+1) · ((m+1)s^{1/m} − (m−1)|w|²) / ((m+1)ρ³ s^{2−1/m})`,
/// `s = 1 − |z|²`, `ρ = s^{1/m} − |w|²`.
pub fn thullen_bergman_kernel_at<T: Real>(m: f64, p: &Point<T>) -> Result<T> {
    if p.dim() != 2 {
        return Err(Error::InvalidParams("thullen kernel lives on C^2".into()));
    }
    let spec = DomainSpec::ThullenBergman { m, real_m: true };
    spec.validate()?;
    if !spec.contains(p) {
        return Err(Error::DomainViolation(format!(
            "{:?} outside thullen m={m}",
            p.to_f64_pairs()
        )));
    }
    let s = T::one() - p.coord(0).norm_sqr();
    let y = p.coord(1).norm_sqr();
    let mf = T::lit(m);
    let s1m = s.powf(T::one() / mf);
    let rho = s1m - y;
    let pre = T::lit(m * PI * PI / (m + 1.0));
    let numer = (mf + T::one()) * s1m - (mf - T::one()) * y;
    let denom = (mf + T::one()) * rho.powi(3) * s.powf(T::lit(2.0) - T::one() / mf);
    Ok(pre * numer / denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thullen_gm_one_at_origin_is_zero() {
        let phi = catalog_potential(&DomainSpec::thullen_gm(1)).unwrap();
        let v = Potential::<f64>::value_at(&phi, &Point::origin(2).unwrap()).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn hartogs_linear_equals_ball() {
        let h = catalog_potential(&DomainSpec::Hartogs {
            f: HartogsF::Linear { c1: 1.0, c2: 1.0 },
            n: 2,
        })
        .unwrap();
        let b = catalog_potential(&DomainSpec::BallHyperbolic { n: 2 }).unwrap();
        for pairs in [[(0.1, 0.2), (0.3, -0.1)], [(-0.5, 0.1), (0.0, 0.6)]] {
            let p = Point::<f64>::from_pairs(&pairs).unwrap();
            let a = Potential::<f64>::value_at(&h, &p).unwrap();
            let e = Potential::<f64>::value_at(&b, &p).unwrap();
            assert!((a - e).abs() < 1e-15);
        }
    }

    #[test]
    fn thullen_kernel_origin_and_log() {
        let k = thullen_bergman_kernel_at(1.0, &Point::<f64>::origin(2).unwrap()).unwrap();
        assert!((k - PI * PI / 2.0).abs() < 1e-14);
        let phi = catalog_potential(&DomainSpec::thullen_bergman(2)).unwrap();
        let p = Point::<f64>::from_pairs(&[(0.3, 0.1), (0.2, 0.4)]).unwrap();
        let direct = thullen_bergman_kernel_at(2.0, &p).unwrap().ln();
        assert!((Potential::<f64>::value_at(&phi, &p).unwrap() - direct).abs() < 1e-13);
    }

    #[test]
    fn validation() {
        assert!(DomainSpec::ThullenGm { m: 0.5, real_m: true }.validate().is_err());
        assert!(DomainSpec::ThullenGm { m: 1.5, real_m: false }.validate().is_err());
        assert!(DomainSpec::ThullenGm { m: 1.5, real_m: true }.validate().is_ok());
        assert!(DomainSpec::BallHyperbolic { n: 0 }.validate().is_err());
        let bad = DomainSpec::ChengYau {
            rho: DefiningFn::Ellipsoid { weights: vec![1.0] },
            n: 2,
        };
        assert_eq!(catalog_potential(&bad).unwrap_err().name(), "InvalidParams");
    }

    #[test]
    fn outside_point_is_domain_violation() {
        let phi = catalog_potential(&DomainSpec::thullen_gm(2)).unwrap();
        let p = Point::<f64>::real(&[0.5, 0.95]).unwrap();
        assert_eq!(
            Potential::<f64>::jet_at(&phi, &p, 2).unwrap_err().name(),
            "DomainViolation"
        );
    }

    #[test]
    fn serde_shape() {
        let spec = DomainSpec::ChengYau {
            rho: DefiningFn::Ellipsoid {
                weights: vec![1.0, 2.0],
            },
            n: 2,
        };
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(
            text,
            r#"{"id":"cheng_yau","rho":{"kind":"ellipsoid","weights":[1.0,2.0]},"n":2}"#
        );
        assert_eq!(serde_json::from_str::<DomainSpec>(&text).unwrap(), spec);
        let t: DomainSpec = serde_json::from_str(r#"{"id":"thullen_gm","m":2}"#).unwrap();
        assert_eq!(t, DomainSpec::thullen_gm(2));
    }
}
