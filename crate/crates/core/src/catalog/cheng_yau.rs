use num_complex::Complex;
use num_traits::Zero;

use crate::catalog::domain::{catalog_potential, DefiningFn, DomainSpec};
use crate::error::{Error, Result};
use crate::jet::{Jet, MultiIndexPair};
use crate::kahler::KahlerEngine;
use crate::linalg::CMatrix;
use crate::point::Point;
use crate::scalar::Real;

/// Closed-form Cheng–Yau quantities of `−log(−ρ)`.
#[derive(Debug, Clone)]
pub struct ChengYauForms<T> {
    pub g: CMatrix<T>,
    /// `g_inv[(i, j)] = g^{ij̄}`.
    pub g_inv: CMatrix<T>,
    pub det: T,
    /// `|dρ|²/(|dρ|² − ρ)`.
    pub completeness_bound: T,
    pub rho: T,
    pub drho_sqr: T,
}

/// `g = ρ_{ij̄}/(−ρ) + ρ_iρ_j̄/ρ²`, its inverse
/// `g^{ij̄} = (−ρ)(ρ^{ij̄} + ρ^iρ^j̄/(ρ − |dρ|²))` and
/// `det g = (−1/ρ)^{n+1} det(ρ_{ij̄}) (|dρ|² − ρ)`.
pub fn cheng_yau_closed_forms_at<T: Real>(rho_fn: &DefiningFn, n: usize, p: &Point<T>) -> Result<ChengYauForms<T>> {
    rho_fn.validate(n)?;
    if p.dim() != n {
        return Err(Error::InvalidParams(format!(
            "point dimension {} differs from n = {n}",
            p.dim()
        )));
    }
    let jet: Jet<T> = rho_fn.eval_vars(&Jet::seed(p, 2));
    let rho = jet.value().re;
    if !(rho < T::zero()) {
        return Err(Error::DomainViolation(format!(
            "rho = {} at {:?}",
            rho.to_f64_lossy(),
            p.to_f64_pairs()
        )));
    }
    let a: Vec<Complex<T>> = (0..n)
        .map(|i| jet.derivative(&MultiIndexPair::hol(n, i)))
        .collect::<Result<_>>()?;
    let hess = CMatrix::from_fn(n, |i, j| {
        jet.derivative(&MultiIndexPair::mixed(n, i, j)).expect("order-2 jet")
    })
    .hermitian_part();
    hess.cholesky()?;
    let pinv = hess.inverse()?;

    // ρ^{ij̄} = pinv[(j, i)], ρ^i = Σ_j ρ^{ij̄} ρ_j̄
    let up: Vec<Complex<T>> = (0..n)
        .map(|i| (0..n).fold(Complex::zero(), |acc, j| acc + pinv[(j, i)] * a[j].conj()))
        .collect();
    let drho_sqr = (0..n).fold(T::zero(), |acc, i| acc + (up[i] * a[i]).re);

    let neg = -rho;
    let g = CMatrix::from_fn(n, |i, j| hess[(i, j)] / neg + a[i] * a[j].conj() / (rho * rho));
    let g_inv = CMatrix::from_fn(n, |i, j| (pinv[(j, i)] + up[i] * up[j].conj() / (rho - drho_sqr)) * neg);
    let det = (T::one() / neg).powi(n as i32 + 1) * hess.det().re * (drho_sqr - rho);
    Ok(ChengYauForms {
        g,
        g_inv,
        det,
        completeness_bound: drho_sqr / (drho_sqr - rho),
        rho,
        drho_sqr,
    })
}

/// Einstein residuals along a ray.
#[derive(Debug, Clone)]
pub struct BoundarySweep<T> {
    /// `‖Ric + (n+1)g‖_g` for the leading ray points that could be evaluated.
    pub residuals: Vec<T>,
    /// The failure that ended the sweep early, if any.
    pub truncated: Option<Error>,
}

/// `‖Ric(g_ρ) + (n+1)g_ρ‖_g` at each point of `ray`. An ill-conditioned
/// metric ends the sweep instead of failing it.
pub fn cheng_yau_boundary_sweep<T: Real>(
    engine: &KahlerEngine,
    rho: &DefiningFn,
    n: usize,
    ray: &[Point<T>],
) -> Result<BoundarySweep<T>> {
    let phi = catalog_potential(&DomainSpec::ChengYau { rho: rho.clone(), n })?;
    let lambda = -(n as f64 + 1.0);
    let mut residuals = Vec::with_capacity(ray.len());
    for p in ray {
        match engine.einstein_residual_at(&phi, lambda, p) {
            Ok(r) => residuals.push(r),
            Err(e @ (Error::IllConditioned(_) | Error::NotPositiveDefinite)) => {
                return Ok(BoundarySweep {
                    residuals,
                    truncated: Some(e),
                })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(BoundarySweep {
        residuals,
        truncated: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_worked_point() {
        let p = Point::<f64>::real(&[0.5, 0.0]).unwrap();
        let f = cheng_yau_closed_forms_at(&DefiningFn::Ball, 2, &p).unwrap();
        assert!((f.g[(0, 0)].re - 16.0 / 9.0).abs() < 1e-14);
        assert!((f.g_inv[(0, 0)].re - 9.0 / 16.0).abs() < 1e-14);
        assert!((f.det - 64.0 / 27.0).abs() < 1e-13);
        assert!((f.completeness_bound - 0.25).abs() < 1e-15);
    }

    #[test]
    fn critical_point_has_zero_bound() {
        let f = cheng_yau_closed_forms_at(&DefiningFn::Ball, 2, &Point::<f64>::origin(2).unwrap()).unwrap();
        assert_eq!(f.completeness_bound, 0.0);
    }

    #[test]
    fn inverse_and_det_consistent() {
        let rho = DefiningFn::QuarticBall { a: 0.7 };
        let p = Point::<f64>::from_pairs(&[(0.3, -0.2), (0.1, 0.4)]).unwrap();
        let f = cheng_yau_closed_forms_at(&rho, 2, &p).unwrap();
        // the matrix inverse of g is the transpose of g^{ij̄}
        let h = f.g_inv.transpose();
        assert!(h.matmul(&f.g).sub(&CMatrix::identity(2)).max_abs() < 1e-12);
        assert!((f.g.det().re - f.det).abs() < 1e-12 * f.det);
    }

    #[test]
    fn outside_is_domain_violation() {
        let p = Point::<f64>::real(&[1.1, 0.0]).unwrap();
        let e = cheng_yau_closed_forms_at(&DefiningFn::Ball, 2, &p).unwrap_err();
        assert_eq!(e.name(), "DomainViolation");
    }
}
