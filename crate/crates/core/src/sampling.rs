//! Deterministic interior samples.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::catalog::DomainSpec;
use crate::error::{Error, Result};
use crate::point::Point;

pub const DEFAULT_MARGIN: f64 = 1e-3;

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as u64;
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while i > 0 {
        out += (i % b) as f64 * inv;
        i /= b;
        inv /= base as f64;
    }
    out
}

/// `count` interior points with slack above `margin`: a Halton sequence in the
/// bounding box, shifted modulo 1 by a ChaCha8 draw from `seed`, filtered by
/// the domain inequality.
pub fn sample_interior(spec: &DomainSpec, count: usize, seed: u64, margin: f64) -> Result<Vec<Point<f64>>> {
    spec.validate()?;
    let n = spec.dim();
    if 2 * n > PRIMES.len() {
        return Err(Error::InvalidParams(format!(
            "sampling supports n <= {}",
            PRIMES.len() / 2
        )));
    }
    let radii = spec.radii();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..2 * n).map(|_| rng.gen::<f64>()).collect();
    let mut out = Vec::with_capacity(count);
    let limit = 1000 * count as u64 + 10_000;
    let mut i = 1u64;
    while out.len() < count {
        if i > limit {
            return Err(Error::InvalidParams(format!(
                "only {} of {count} samples fit with margin {margin}",
                out.len()
            )));
        }
        let coords: Vec<Complex<f64>> = (0..n)
            .map(|k| {
                let u = (radical_inverse(i, PRIMES[2 * k]) + shift[2 * k]).fract();
                let v = (radical_inverse(i, PRIMES[2 * k + 1]) + shift[2 * k + 1]).fract();
                Complex::new(radii[k] * (2.0 * u - 1.0), radii[k] * (2.0 * v - 1.0))
            })
            .collect();
        let p = Point::new(coords)?;
        if spec.slack(&p) > margin {
            out.push(p);
        }
        i += 1;
    }
    Ok(out)
}
