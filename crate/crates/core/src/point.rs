use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A point of ℂⁿ in the standard coordinates `(z¹, …, zⁿ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Point<T> {
    coords: Vec<Complex<T>>,
}

impl<T: Real> Point<T> {
    pub fn new(coords: Vec<Complex<T>>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidParams("point needs at least one coordinate".into()));
        }
        if coords.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidParams("point coordinates must be finite".into()));
        }
        Ok(Self { coords })
    }

    /// Builds a point from `(re, im)` pairs given as `f64`.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            pairs
                .iter()
                .map(|&(re, im)| Complex::new(T::lit(re), T::lit(im)))
                .collect(),
        )
    }

    /// Builds a point with real coordinates.
    pub fn real(xs: &[f64]) -> Result<Self> {
        Self::new(xs.iter().map(|&x| Complex::new(T::lit(x), T::zero())).collect())
    }

    pub fn origin(n: usize) -> Result<Self> {
        Self::new(vec![Complex::new(T::zero(), T::zero()); n])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    #[inline]
    pub fn coords(&self) -> &[Complex<T>] {
        &self.coords
    }

    #[inline]
    pub fn coord(&self, i: usize) -> Complex<T> {
        self.coords[i]
    }

    /// Squared Euclidean norm `Σ |zᵢ|²`.
    pub fn norm_sqr(&self) -> T {
        self.coords.iter().fold(T::zero(), |acc, c| acc + c.norm_sqr())
    }

    /// Values of the 2n formal variables `(z, z̄)` on the real slice.
    pub fn slice_values(&self) -> Vec<Complex<T>> {
        self.coords
            .iter()
            .copied()
            .chain(self.coords.iter().map(|c| c.conj()))
            .collect()
    }

    /// The same point in another scalar type.
    pub fn cast<U: Real>(&self) -> Point<U> {
        Point {
            coords: self
                .coords
                .iter()
                .map(|c| Complex::new(U::lit(c.re.to_f64_lossy()), U::lit(c.im.to_f64_lossy())))
                .collect(),
        }
    }

    pub fn to_f64_pairs(&self) -> Vec<(f64, f64)> {
        self.coords
            .iter()
            .map(|c| (c.re.to_f64_lossy(), c.im.to_f64_lossy()))
            .collect()
    }
}
