#![allow(dead_code)]

use kahlerlab_core::catalog::{catalog_potential, CatalogPotential, DomainSpec};
use kahlerlab_core::potential::RadialPoly;

pub fn cat(spec: DomainSpec) -> CatalogPotential {
    catalog_potential(&spec).unwrap()
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

/// Radial soliton `φ = P(|z|²)` in dimension `n` with field `X = a·z` and
/// `λ = −1`, as a truncated power series.
///
/// With `u = xP′(x)` one has `det g = (u/x)^{n−1} u′`, and the soliton
/// equation integrates to `log det g − 2a·u − P = 0`. Differentiating gives
/// `u″ = u′(u/x + 2a·u′ − (n−1)(u′/u − 1/x))`, `u(0) = 0`, `u′(0) = 1`,
/// solved here by matching powers of `x`.
pub fn radial_soliton(n: usize, a: f64, terms: usize) -> RadialPoly {
    let len = terms + 3;
    let mut c = vec![0.0; len];
    c[1] = 1.0;
    let nm1 = (n - 1) as f64;
    for k in 2..=terms {
        let p = k - 2;
        // everything at x^p with c_k provisionally zero
        let up: Vec<f64> = (0..=p).map(|j| (j + 1) as f64 * c[j + 1]).collect();
        let v: Vec<f64> = (0..=p).map(|j| c[j + 1]).collect();
        let q: Vec<f64> = (0..=p).map(|j| (j + 1) as f64 * c[j + 2]).collect();
        // w = q / v as a power series
        let mut w = vec![0.0; p + 1];
        for j in 0..=p {
            let acc: f64 = (1..=j).map(|i| v[i] * w[j - i]).sum();
            w[j] = (q[j] - acc) / v[0];
        }
        let s: Vec<f64> = (0..=p).map(|j| v[j] + 2.0 * a * up[j] - nm1 * w[j]).collect();
        let rhs: f64 = (0..=p).map(|i| up[i] * s[p - i]).sum();
        // c_k enters the left side as k(k−1)c_k and the right side as −(n−1)(k−1)c_k
        c[k] = rhs / ((k * (k - 1)) as f64 + nm1 * (k - 1) as f64);
    }
    let mut coeffs = vec![0.0];
    coeffs.extend((1..=terms).map(|k| c[k] / k as f64));
    RadialPoly {
        n,
        coeffs,
        radius_sqr: 0.5,
    }
}
