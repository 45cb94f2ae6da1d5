use serde::Serialize;

use crate::catalog::domain::{catalog_potential, DomainSpec, HartogsF};
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::kahler::KahlerEngine;
use crate::point::Point;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Admissibility {
    pub admissible: bool,
    /// Largest value of `d/dx(xF′/F)` over the grid.
    pub worst_value: f64,
}

/// `d/dx (xF′(x)/F(x))` and `F′(x)` at `x`, both from one order-2 jet.
fn log_derivative_slope(f: &HartogsF, x: f64) -> Result<(f64, f64)> {
    let xj = Jet::<f64>::univariate(x, 2);
    let fj = f.compose(&xj)?;
    let fx = fj.value().re;
    if !(fx > 0.0) {
        return Err(Error::NonPositiveF(fx));
    }
    let dfj = fj.differentiate(0)?;
    let q = (&xj.truncate(1) * &dfj).try_div(&fj.truncate(1))?;
    Ok((q.differentiate(0)?.value().re, dfj.value().re))
}

/// `F` is admissible on the grid when `F′ < 0` and `d/dx(xF′/F) < 0` at every sample.
pub fn hartogs_admissibility(f: &HartogsF, samples: &[f64]) -> Result<Admissibility> {
    if samples.is_empty() {
        return Err(Error::InvalidParams("admissibility needs at least one sample".into()));
    }
    let bound = f.bound();
    let mut worst = f64::NEG_INFINITY;
    let mut decreasing = true;
    for &x in samples {
        if !(x > 0.0 && x < bound) {
            return Err(Error::InvalidParams(format!("sample {x} outside (0, {bound})")));
        }
        let (slope, df) = log_derivative_slope(f, x)?;
        worst = worst.max(slope);
        decreasing &= df < 0.0;
    }
    Ok(Admissibility {
        admissible: decreasing && worst < 0.0,
        worst_value: worst,
    })
}

/// `count` evenly spaced interior points of `(0, min(B, cap))`.
pub fn hartogs_grid(f: &HartogsF, count: usize, cap: f64) -> Vec<f64> {
    let top = f.bound().min(cap);
    (1..=count).map(|k| top * k as f64 / (count + 1) as f64).collect()
}

/// Largest Einstein residual with `λ = −(n+1)` over `points`.
pub fn hartogs_einstein_check<T: Real>(
    engine: &KahlerEngine,
    f: &HartogsF,
    n: usize,
    points: &[Point<T>],
) -> Result<T> {
    let phi = catalog_potential(&DomainSpec::Hartogs { f: f.clone(), n })?;
    let lambda = -(n as f64 + 1.0);
    let mut worst = T::zero();
    for p in points {
        worst = worst.max(engine.einstein_residual_at(&phi, lambda, p)?);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_is_admissible() {
        let f = HartogsF::Linear { c1: 1.0, c2: 1.0 };
        let grid = hartogs_grid(&f, 9, 10.0);
        let a = hartogs_admissibility(&f, &grid).unwrap();
        assert!(a.admissible);
        // worst at the smallest x: −1/(1 − 0.1)²
        assert!((a.worst_value + 1.0 / 0.81).abs() < 1e-13);
    }

    #[test]
    fn exponential_slope_is_minus_one() {
        let a = hartogs_admissibility(&HartogsF::Exponential, &[0.1, 1.0, 3.0]).unwrap();
        assert!(a.admissible);
        assert!((a.worst_value + 1.0).abs() < 1e-14);
    }

    #[test]
    fn constant_is_not() {
        let a = hartogs_admissibility(&HartogsF::Constant { c: 1.0 }, &[0.5, 1.0]).unwrap();
        assert!(!a.admissible);
        assert_eq!(a.worst_value, 0.0);
    }

    #[test]
    fn rational_is_admissible() {
        // xF′/F = −x/(1+x), slope −1/(1+x)²
        let a = hartogs_admissibility(&HartogsF::Rational, &[1.0]).unwrap();
        assert!(a.admissible && (a.worst_value + 0.25).abs() < 1e-14);
    }
}
