use num_complex::Complex;
use serde::Serialize;

use crate::catalog::domain::DomainSpec;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::point::Point;
use crate::scalar::Real;

/// Closed-form metric, determinant and Ricci form of `−log ρ` on `Ω_m`.
#[derive(Debug, Clone)]
pub struct ThullenClosedForms<T> {
    pub g: CMatrix<T>,
    pub det: T,
    pub ricci: CMatrix<T>,
}

/// With `s = 1 − |z|²`, `ρ = s^{1/m} − |w|²` and `c = s^{1/m−2}/(mρ²)`:
/// `g = c·M`, `M = [[ρ + |z|²|w|²/m, w z̄ s], [w̄ z s, m s²]]`,
/// `det g = s^{2/m−2}/(mρ³)` and `Ric = −3c·(M + (2/3)(m−1)ρ² s^{−1/m} e₁e₁*)`.
pub fn thullen_closed_forms_at<T: Real>(m: u32, p: &Point<T>) -> Result<ThullenClosedForms<T>> {
    let spec = DomainSpec::thullen_gm(m);
    spec.validate()?;
    if !spec.contains(p) {
        return Err(Error::DomainViolation(format!(
            "{:?} outside thullen m={m}",
            p.to_f64_pairs()
        )));
    }
    let (z, w) = (p.coord(0), p.coord(1));
    let mf = T::lit(m as f64);
    let x = z.norm_sqr();
    let y = w.norm_sqr();
    let s = T::one() - x;
    let s1m = s.powf(T::one() / mf);
    let rho = s1m - y;
    let pref = s1m / (s * s) / (mf * rho * rho);
    let off = w * z.conj() * s;
    let entries = |extra: T| {
        CMatrix::from_rows(&[
            vec![Complex::new(rho + x * y / mf + extra, T::zero()), off],
            vec![off.conj(), Complex::new(mf * s * s, T::zero())],
        ])
    };
    let g = entries(T::zero()).scale(pref);
    let det = s1m * s1m / (s * s) / (mf * rho.powi(3));
    let bump = T::lit(2.0 / 3.0) * (mf - T::one()) * rho * rho / s1m;
    let ricci = entries(bump).scale(-T::lit(3.0) * pref);
    Ok(ThullenClosedForms { g, det, ricci })
}

/// Quantities of the axis table at `(0, w)` for the Thullen Bergman metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThullenAxis<T> {
    pub r: T,
    pub t: T,
    pub alpha: T,
    pub beta: T,
    pub a: T,
    pub b: T,
    pub c: T,
    pub g_diag: [T; 2],
    pub ricci_diag: [T; 2],
    /// `r²(rt² − (1+r)t + 1)`; zero exactly when the axis metric is Einstein.
    pub einstein_factor: T,
    /// `4α²β − 4Aβ − 2Bα`, equal to `−4t⁴·einstein_factor`.
    pub einstein_defect: T,
}

pub fn thullen_bergman_axis_at<T: Real>(m: u32, w: Complex<T>) -> Result<ThullenAxis<T>> {
    if m == 0 {
        return Err(Error::InvalidParams("thullen needs m >= 1".into()));
    }
    let y = w.norm_sqr();
    if !(y < T::one()) {
        return Err(Error::DomainViolation("|w| >= 1 on the axis".into()));
    }
    let mf = T::lit(m as f64);
    let one = T::one();
    let (two, three, four, six) = (T::lit(2.0), T::lit(3.0), T::lit(4.0), T::lit(6.0));
    let r = (mf - one) / (mf + one);
    let t = (one - y) / (one - r * y);
    let rt2 = r * t * t;
    let rt3 = rt2 * t;
    let alpha = three + rt2;
    let beta = three - rt2;
    let a = six + four * rt2 + (one + r) * rt3;
    let b = two * (T::lit(9.0) + three * rt2 - three * (one + r) * rt3 + two * rt2 * rt2) / alpha;
    let c = three * (six - six * rt2 + (one + r) * rt3) / beta;
    let q = (one - r * t) * (one - r * t) / ((one - r) * (one - r) * t * t);
    let g_diag = [alpha / ((one + r) * t), beta * q];
    let ricci_diag = [
        (three * alpha * alpha * beta - four * a * beta - two * b * alpha) / (alpha * beta * (one + r) * t),
        q * (three * alpha * beta * beta - four * c * alpha - two * b * beta) / (alpha * beta),
    ];
    Ok(ThullenAxis {
        r,
        t,
        alpha,
        beta,
        a,
        b,
        c,
        g_diag,
        ricci_diag,
        einstein_factor: r * r * (rt2 - (one + r) * t + one),
        einstein_defect: four * alpha * alpha * beta - four * a * beta - two * b * alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_m2() {
        let f = thullen_closed_forms_at(2, &Point::<f64>::origin(2).unwrap()).unwrap();
        assert!((f.g[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!((f.g[(1, 1)].re - 1.0).abs() < 1e-15);
        assert!((f.det - 0.5).abs() < 1e-15);
        assert!((f.ricci[(0, 0)].re + 2.5).abs() < 1e-14);
        assert!((f.ricci[(1, 1)].re + 3.0).abs() < 1e-14);
    }

    #[test]
    fn m1_is_einstein() {
        let p = Point::<f64>::from_pairs(&[(0.2, 0.1), (-0.3, 0.4)]).unwrap();
        let f = thullen_closed_forms_at(1, &p).unwrap();
        assert!(f.ricci.add(&f.g.scale(3.0)).max_abs() < 1e-13);
        assert!((f.g.det().re - f.det).abs() < 1e-12 * f.det);
    }

    #[test]
    fn axis_values() {
        let a = thullen_bergman_axis_at(2, Complex::new(0.0f64, 0.0)).unwrap();
        assert!((a.g_diag[0] - 2.5).abs() < 1e-14);
        assert!((a.g_diag[1] - 8.0 / 3.0).abs() < 1e-14);
        let b = thullen_bergman_axis_at(1, Complex::new(0.3f64, 0.4)).unwrap();
        assert!((b.g_diag[0] - 3.0 / b.t).abs() < 1e-14);
        assert!((b.ricci_diag[1] + b.g_diag[1]).abs() < 1e-13);
        assert_eq!(b.einstein_factor, 0.0);
    }

    #[test]
    fn defect_matches_factor() {
        for m in [2u32, 3, 4] {
            for w in [0.0f64, 0.3, 0.7, 0.95] {
                let a = thullen_bergman_axis_at(m, Complex::new(w, 0.0)).unwrap();
                let expect = -4.0 * a.t.powi(4) * a.einstein_factor;
                assert!((a.einstein_defect - expect).abs() < 1e-12, "m={m} w={w}");
            }
        }
    }
}
