use serde::Serialize;

use crate::error::{Error, Result};
use crate::kahler::KahlerEngine;
use crate::point::Point;
use crate::potential::Potential;
use crate::scalar::Real;

/// `B(p) = det g(p) / K(p)` for the metric of `phi` and the kernel `kernel`.
pub fn bergman_invariant_at<T: Real, P: Potential<T> + ?Sized>(
    engine: &KahlerEngine,
    kernel: &dyn Fn(&Point<T>) -> Result<T>,
    phi: &P,
    p: &Point<T>,
) -> Result<T> {
    let k = kernel(p)?;
    if !(k > T::zero()) || !k.is_finite() {
        return Err(Error::DegenerateValue(k.to_f64_lossy()));
    }
    Ok(engine.metric_at(phi, p)?.det() / k)
}

/// `(n+1)ⁿ πⁿ / n!`, the boundary value of `B` at strictly pseudoconvex points.
pub fn bergman_invariant_limit(n: usize) -> f64 {
    let nf = n as f64;
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    (nf + 1.0).powi(n as i32) * std::f64::consts::PI.powi(n as i32) / fact
}

/// Two-sided bounds on curvature in terms of the squeezing function `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SqueezingBounds {
    pub n: usize,
    pub s: f64,
    pub h_lo: f64,
    pub h_hi: f64,
    pub ric_lo: f64,
    pub ric_hi: f64,
    pub r_lo: f64,
    pub r_hi: f64,
}

impl SqueezingBounds {
    pub fn brackets_h(&self, v: f64, tol: f64) -> bool {
        self.h_lo - tol <= v && v <= self.h_hi + tol
    }

    pub fn brackets_ric(&self, v: f64, tol: f64) -> bool {
        self.ric_lo - tol <= v && v <= self.ric_hi + tol
    }

    pub fn brackets_scalar(&self, v: f64, tol: f64) -> bool {
        self.r_lo - tol <= v && v <= self.r_hi + tol
    }
}

pub fn squeezing_bounds(n: usize, s: f64) -> Result<SqueezingBounds> {
    if n == 0 || !(s > 0.0 && s <= 1.0) {
        return Err(Error::InvalidParams(format!(
            "squeezing bounds need n >= 1 and s in (0, 1], got n={n}, s={s}"
        )));
    }
    let nf = n as f64;
    let k = 2.0 * (nf + 2.0) / (nf + 1.0);
    let (s2, s4) = (s.powi(2 * n as i32), s.powi(4 * n as i32));
    Ok(SqueezingBounds {
        n,
        s,
        h_lo: 2.0 - k / s4,
        h_hi: 2.0 - k * s4,
        ric_lo: (nf + 1.0) - (nf + 2.0) / s2,
        ric_hi: (nf + 1.0) - (nf + 2.0) * s2,
        r_lo: nf * (nf + 1.0) - nf * (nf + 2.0) / s2,
        r_hi: nf * (nf + 1.0) - nf * (nf + 2.0) * s2,
    })
}

/// `((n+1+ε)/(n+2))^{1/(2n)}`: above it the Ricci upper bound is at most `−ε`.
pub fn squeezing_threshold(n: usize, eps: f64) -> Result<f64> {
    if n == 0 || !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParams(format!(
            "threshold needs n >= 1 and eps in (0, 1), got {eps}"
        )));
    }
    let nf = n as f64;
    Ok(((nf + 1.0 + eps) / (nf + 2.0)).powf(1.0 / (2.0 * nf)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn bounds_at_one() {
        let b = squeezing_bounds(2, 1.0).unwrap();
        assert!((b.h_lo + 2.0 / 3.0).abs() < 1e-15 && (b.h_hi + 2.0 / 3.0).abs() < 1e-15);
        assert_eq!((b.ric_lo, b.ric_hi), (-1.0, -1.0));
        assert_eq!((b.r_lo, b.r_hi), (-2.0, -2.0));
        let b1 = squeezing_bounds(1, 1.0).unwrap();
        assert!((b1.h_lo + 1.0).abs() < 1e-15);
    }

    #[test]
    fn bounds_at_point_nine() {
        let b = squeezing_bounds(2, 0.9).unwrap();
        assert!((b.ric_lo - (3.0 - 4.0 * 0.9f64.powi(-4))).abs() < 1e-14);
        assert!((b.ric_hi - (3.0 - 4.0 * 0.9f64.powi(4))).abs() < 1e-14);
        assert!(b.h_lo <= b.h_hi && b.ric_lo <= b.ric_hi && b.r_lo <= b.r_hi);
    }

    #[test]
    fn threshold_identity() {
        let t = squeezing_threshold(2, 0.5).unwrap();
        assert!((t - 0.875f64.powf(0.25)).abs() < 1e-15);
        assert!((t - 0.96717).abs() < 1e-5);
        assert!((squeezing_bounds(2, t).unwrap().ric_hi + 0.5).abs() < 1e-12);
        assert!(squeezing_bounds(2, 0.0).is_err());
    }

    #[test]
    fn limits() {
        assert!((bergman_invariant_limit(1) - 2.0 * PI).abs() < 1e-14);
        assert!((bergman_invariant_limit(2) - 4.5 * PI * PI).abs() < 1e-13);
    }
}
