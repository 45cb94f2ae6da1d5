//! The check registry: what each named check computes at a point.

use std::fmt;
use std::str::FromStr;

use kahlerlab_core::catalog::CatalogPotential;
use kahlerlab_core::catalog::{
    ball_bergman_kernel, bergman_invariant_at, bergman_invariant_limit, cheng_yau_closed_forms_at, squeezing_bounds,
    thullen_bergman_axis_at, thullen_bergman_kernel_at, thullen_closed_forms_at, DomainSpec,
};
use kahlerlab_core::field::PolyField;
use kahlerlab_core::jet::MultiIndexPair;
use kahlerlab_core::kahler::{holomorphic_sectional_at, ricci_in_direction, KahlerEngine, SolitonSpec};
use kahlerlab_core::linalg::CMatrix;
use kahlerlab_core::oracle::{fd_partial, reinhardt_kernel_at, reinhardt_norms, FdConfig};
use kahlerlab_core::potential::{Potential, Scaled};
use kahlerlab_core::{Error, Point64, C64};

use crate::config::ScenarioConfig;
use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Check {
    Metric,
    ClosedForm,
    Einstein,
    Soliton,
    GradIdentity,
    SIdentity,
    Bochner,
    Completeness,
    Squeezing,
    AxisTable,
    BergmanInvariant,
    FdOracle,
    SolitonScan,
}

impl Check {
    pub const ALL: [Check; 13] = [
        Check::Metric,
        Check::ClosedForm,
        Check::Einstein,
        Check::Soliton,
        Check::GradIdentity,
        Check::SIdentity,
        Check::Bochner,
        Check::Completeness,
        Check::Squeezing,
        Check::AxisTable,
        Check::BergmanInvariant,
        Check::FdOracle,
        Check::SolitonScan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Metric => "metric",
            Check::ClosedForm => "closed_form",
            Check::Einstein => "einstein",
            Check::Soliton => "soliton",
            Check::GradIdentity => "grad_identity",
            Check::SIdentity => "s_identity",
            Check::Bochner => "bochner",
            Check::Completeness => "completeness",
            Check::Squeezing => "squeezing",
            Check::AxisTable => "axis_table",
            Check::BergmanInvariant => "bergman_invariant",
            Check::FdOracle => "fd_oracle",
            Check::SolitonScan => "soliton_scan",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Check::Metric => "Hermitian defect of g (relative); fails if g is not positive definite",
            Check::ClosedForm => "jets vs closed-form metric, determinant and Ricci/inverse (relative)",
            Check::Einstein => "‖Ric − λg‖_g",
            Check::Soliton => "‖Ric + L_X g − λg‖_g",
            Check::GradIdentity => "g-norm of ∂R − 2 Ric(·, X̄)",
            Check::SIdentity => "|ΔS − ⟨X,∇S⟩ − S + |Ric+g|²| with S = R + n (λ = −1)",
            Check::Bochner => "|Δ|X|² − |∇X|² + Ric(X,X)|",
            Check::Completeness => "excess of |dρ|²/(|dρ|² − ρ) over 1",
            Check::Squeezing => "distance of H, Ric(W), R from the s = 1 bound values",
            Check::AxisTable => "jets vs the axis table at (0, w) (relative)",
            Check::BergmanInvariant => "|B − (n+1)ⁿπⁿ/n!| / (n+1)ⁿπⁿ/n!",
            Check::FdOracle => {
                "finite differences vs jets, orders 1–3, relative to the largest derivative of each order"
            }
            Check::SolitonScan => "min over grid fields of the sup over points of the soliton residual",
        }
    }

    /// Smallest jet order the check can run at.
    pub fn min_order(self) -> usize {
        match self {
            Check::Metric | Check::Completeness | Check::BergmanInvariant => 2,
            Check::GradIdentity => 5,
            _ => 4,
        }
    }

    pub fn default_tolerance(self) -> f64 {
        match self {
            Check::Metric | Check::Completeness => 1e-12,
            Check::GradIdentity | Check::SIdentity | Check::Bochner => 1e-7,
            Check::AxisTable => 1e-8,
            Check::BergmanInvariant | Check::FdOracle => 1e-6,
            _ => 1e-9,
        }
    }

    /// Checks evaluated once per run rather than per point.
    pub fn is_global(self) -> bool {
        self == Check::SolitonScan
    }

    pub(crate) fn validate_for(self, cfg: &ScenarioConfig) -> Result<()> {
        let bad = |msg: &str| Err(CliError::config(format!("check {}: {msg}", self.name())));
        let d = &cfg.domain;
        match self {
            Check::Einstein | Check::Soliton | Check::SolitonScan if cfg.lambda().is_none() => {
                bad("no λ given and the domain has no Einstein constant")
            }
            Check::SIdentity if cfg.lambda() != Some(-1.0) => bad("only stated for λ = −1"),
            Check::SolitonScan if cfg.scan.is_none() => bad("needs a scan section"),
            Check::SolitonScan => {
                let s = cfg.scan.as_ref().expect("checked above");
                if s.degree > 2 || s.grid.is_empty() {
                    return bad("scan needs degree <= 2 and a non-empty grid");
                }
                Ok(())
            }
            Check::ClosedForm => match d {
                DomainSpec::ThullenGm { m, real_m: false } if m.fract() == 0.0 => Ok(()),
                DomainSpec::ChengYau { .. } => Ok(()),
                _ => bad("closed forms exist for integer-m thullen_gm and cheng_yau"),
            },
            Check::Completeness if !matches!(d, DomainSpec::ChengYau { .. }) => bad("needs a cheng_yau domain"),
            Check::Squeezing if !matches!(d, DomainSpec::BallBergman { .. }) => bad("needs ball_bergman"),
            Check::AxisTable => match d {
                DomainSpec::ThullenBergman { m, real_m: false } if m.fract() == 0.0 => Ok(()),
                _ => bad("needs an integer-m thullen_bergman domain"),
            },
            Check::BergmanInvariant => match d {
                DomainSpec::BallBergman { .. } => Ok(()),
                DomainSpec::ThullenBergman { m, real_m: false } if m.fract() == 0.0 => Ok(()),
                _ => bad("needs ball_bergman or integer-m thullen_bergman"),
            },
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| CliError::config(format!("unknown check {s:?}")))
    }
}

/// Value of a check at one point plus auxiliary quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub residual: f64,
    pub quantities: Vec<(String, f64)>,
}

impl Evaluation {
    fn bare(residual: f64) -> Self {
        Self {
            residual,
            quantities: Vec::new(),
        }
    }

    fn with(residual: f64, quantities: &[(&str, f64)]) -> Self {
        Self {
            residual,
            quantities: quantities.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }
}

/// Immutable state shared by all points of a run.
pub struct RunContext {
    pub domain: DomainSpec,
    pub engine: KahlerEngine,
    pub phi: Scaled<CatalogPotential>,
    pub lambda: Option<f64>,
    pub field: PolyField<f64>,
    /// Oracle-normalized kernel factor for thullen_bergman.
    kernel_ratio: Option<f64>,
}

impl RunContext {
    pub fn new(cfg: &ScenarioConfig) -> Result<Self> {
        let n = cfg.domain.dim();
        let phi = Scaled::new(
            kahlerlab_core::catalog::catalog_potential(&cfg.domain)?,
            cfg.potential_scale.unwrap_or(1.0),
        );
        let field = match &cfg.field {
            Some(f) => f.build(n)?,
            None => PolyField::zero(n),
        };
        let kernel_ratio = match (
            &cfg.domain,
            cfg.checks.iter().any(|c| c == Check::BergmanInvariant.name()),
        ) {
            (DomainSpec::ThullenBergman { m, .. }, true) => {
                // only the constant monomial contributes at the origin
                let table = reinhardt_norms(*m as u32, 0, 64)?;
                let o = Point64::origin(2)?;
                Some(reinhardt_kernel_at(&table, &o)? / thullen_bergman_kernel_at(*m, &o)?)
            }
            _ => None,
        };
        Ok(Self {
            domain: cfg.domain.clone(),
            engine: KahlerEngine::new(cfg.jet_order)?,
            phi,
            lambda: cfg.lambda(),
            field,
            kernel_ratio,
        })
    }

    fn soliton_spec(&self) -> SolitonSpec<'_, f64> {
        SolitonSpec {
            lambda: self.lambda.unwrap_or(0.0),
            field: &self.field,
        }
    }

    /// Evaluates a per-point check.
    pub fn evaluate(&self, check: Check, p: &Point64) -> kahlerlab_core::Result<Evaluation> {
        let e = &self.engine;
        let phi = &self.phi;
        match check {
            Check::Metric => {
                let g = e.metric_at(phi, p)?;
                if !g.matrix().is_positive_definite() {
                    return Err(Error::NotPositiveDefinite);
                }
                Ok(Evaluation::with(
                    g.matrix().hermitian_defect() / g.matrix().max_abs(),
                    &[("det", g.det())],
                ))
            }
            Check::ClosedForm => self.closed_form(p),
            Check::Einstein => Ok(Evaluation::bare(e.einstein_residual_at(
                phi,
                self.lambda.unwrap_or(0.0),
                p,
            )?)),
            Check::Soliton => Ok(Evaluation::bare(e.soliton_residual_at(phi, &self.soliton_spec(), p)?)),
            Check::GradIdentity => Ok(Evaluation::bare(e.grad_scalar_identity_residual_at(
                phi,
                &self.soliton_spec(),
                p,
            )?)),
            Check::SIdentity => {
                let s = e.scalar_s_residual_at(phi, &self.soliton_spec(), p)?;
                Ok(Evaluation::with(
                    s.value,
                    &[("s_fd_fallback", if s.fd_fallback { 1.0 } else { 0.0 })],
                ))
            }
            Check::Bochner => Ok(Evaluation::bare(e.bochner_residual_at(phi, &self.field, p)?)),
            Check::Completeness => {
                let DomainSpec::ChengYau { rho, n } = &self.domain else {
                    unreachable!("validated")
                };
                let f = cheng_yau_closed_forms_at(rho, *n, p)?;
                if !(f.completeness_bound > 0.0) {
                    return Err(Error::DegenerateValue(f.completeness_bound));
                }
                Ok(Evaluation::with(
                    (f.completeness_bound - 1.0).max(0.0),
                    &[("completeness_bound", f.completeness_bound)],
                ))
            }
            Check::Squeezing => self.squeezing(p),
            Check::AxisTable => self.axis_table(p),
            Check::BergmanInvariant => {
                let n = self.domain.dim();
                let ratio = self.kernel_ratio;
                let m = match &self.domain {
                    DomainSpec::ThullenBergman { m, .. } => *m,
                    _ => 1.0,
                };
                let kernel = |q: &Point64| match ratio {
                    Some(r) => thullen_bergman_kernel_at(m, q).map(|k| k * r),
                    None => ball_bergman_kernel(q),
                };
                let b = bergman_invariant_at(e, &kernel, phi, p)?;
                let limit = bergman_invariant_limit(n);
                Ok(Evaluation::with((b - limit).abs() / limit, &[("bergman_invariant", b)]))
            }
            Check::FdOracle => self.fd_oracle(p),
            Check::SolitonScan => Err(Error::InvalidParams("soliton_scan is evaluated per run".into())),
        }
    }

    fn closed_form(&self, p: &Point64) -> kahlerlab_core::Result<Evaluation> {
        let e = &self.engine;
        let g = e.metric_at(&self.phi, p)?;
        let rel = |a: &CMatrix<f64>, b: &CMatrix<f64>| a.sub(b).max_abs() / b.max_abs();
        match &self.domain {
            DomainSpec::ThullenGm { m, .. } => {
                let cf = thullen_closed_forms_at(*m as u32, p)?;
                let ric = e.ricci_at(&self.phi, p)?.ricci;
                let errs = [
                    rel(g.matrix(), &cf.g),
                    (g.det() - cf.det).abs() / cf.det.abs(),
                    rel(&ric, &cf.ricci),
                ];
                Ok(Evaluation::with(
                    errs.into_iter().fold(0.0, f64::max),
                    &[("det", cf.det)],
                ))
            }
            DomainSpec::ChengYau { rho, n } => {
                let cf = cheng_yau_closed_forms_at(rho, *n, p)?;
                // g_inv[(i, j)] = g^{ij̄} = (G⁻¹)[(j, i)]
                let h = g.matrix().inverse()?.transpose();
                let errs = [
                    rel(g.matrix(), &cf.g),
                    rel(&h, &cf.g_inv),
                    (g.det() - cf.det).abs() / cf.det.abs(),
                ];
                Ok(Evaluation::with(
                    errs.into_iter().fold(0.0, f64::max),
                    &[("det", cf.det), ("completeness_bound", cf.completeness_bound)],
                ))
            }
            _ => unreachable!("validated"),
        }
    }

    fn squeezing(&self, p: &Point64) -> kahlerlab_core::Result<Evaluation> {
        let n = self.domain.dim();
        let e = &self.engine;
        let g = e.metric_at(&self.phi, p)?;
        let bundle = e.curvature_tensor_at(&self.phi, p)?;
        let b = squeezing_bounds(n, 1.0)?;
        let gap = |x: f64, lo: f64, hi: f64| (x - lo).abs().max((x - hi).abs());
        let mut worst = gap(bundle.scalar, b.r_lo, b.r_hi);
        let mut h_min = f64::INFINITY;
        for w in directions(n) {
            let h = holomorphic_sectional_at(&bundle, &g, &w)?;
            let r = ricci_in_direction(&bundle, &g, &w)?;
            h_min = h_min.min(h);
            worst = worst.max(gap(h, b.h_lo, b.h_hi)).max(gap(r, b.ric_lo, b.ric_hi));
        }
        Ok(Evaluation::with(
            worst,
            &[("scalar", bundle.scalar), ("holomorphic_sectional", h_min)],
        ))
    }

    fn axis_table(&self, p: &Point64) -> kahlerlab_core::Result<Evaluation> {
        let DomainSpec::ThullenBergman { m, .. } = &self.domain else {
            unreachable!("validated")
        };
        if p.coord(0).norm() != 0.0 {
            return Err(Error::InvalidParams("axis table needs z = 0".into()));
        }
        let ax = thullen_bergman_axis_at(*m as u32, p.coord(1))?;
        let g = self.engine.metric_at(&self.phi, p)?;
        let ric = self.engine.ricci_at(&self.phi, p)?.ricci;
        let mut worst = 0.0f64;
        for i in 0..2 {
            worst = worst
                .max((g.matrix()[(i, i)] - ax.g_diag[i]).norm() / ax.g_diag[i].abs())
                .max((ric[(i, i)] - ax.ricci_diag[i]).norm() / ax.ricci_diag[i].abs());
        }
        worst = worst.max(g.matrix()[(0, 1)].norm()).max(ric[(0, 1)].norm());
        Ok(Evaluation::with(
            worst,
            &[("einstein_defect", ax.einstein_defect), ("t", ax.t)],
        ))
    }

    fn fd_oracle(&self, p: &Point64) -> kahlerlab_core::Result<Evaluation> {
        let n = p.dim();
        let jet = self.phi.jet_at(p, 4)?;
        let f = |q: &Point64| self.phi.value_at(q).map(|v| C64::new(v, 0.0));
        let slack = self.domain.slack(p);
        let mut errs = [0.0f64; 4];
        for (k, err) in errs.iter_mut().enumerate() {
            let order = k + 1;
            let idx: Vec<MultiIndexPair> = MultiIndexPair::all(n, order)
                .into_iter()
                .filter(|i| i.total_degree() == order)
                .collect();
            let exact: Vec<C64> = idx
                .iter()
                .map(|i| jet.derivative(i))
                .collect::<kahlerlab_core::Result<_>>()?;
            let scale = exact.iter().map(|e| e.norm()).fold(0.0, f64::max);
            if scale == 0.0 {
                continue;
            }
            let cfg = FdConfig::for_order_scaled(order, slack);
            for (i, e) in idx.iter().zip(&exact) {
                *err = err.max((fd_partial(&f, p, i, &cfg)? - e).norm() / scale);
            }
        }
        Ok(Evaluation::with(
            errs[..3].iter().copied().fold(0.0, f64::max),
            &[
                ("fd_order1", errs[0]),
                ("fd_order2", errs[1]),
                ("fd_order3", errs[2]),
                ("fd_order4", errs[3]),
            ],
        ))
    }
}

/// Five fixed unit-free test directions in ℂⁿ (fewer distinct ones for n = 1).
fn directions(n: usize) -> Vec<Vec<C64>> {
    let seeds = [(1.0, 0.0), (0.0, 1.0), (0.6, -0.8), (-0.3, 0.5), (0.9, 0.2)];
    (0..5)
        .map(|k| {
            (0..n)
                .map(|i| {
                    let (a, b) = seeds[(k + 2 * i) % seeds.len()];
                    C64::new(a + 0.1 * i as f64, b)
                })
                .collect()
        })
        .collect()
}
