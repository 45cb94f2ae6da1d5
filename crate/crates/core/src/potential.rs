//! Kähler potentials as jet evaluators.

use std::sync::Arc;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::jet::{norm_sqr_of, Jet};
use crate::point::Point;
use crate::scalar::Real;

/// A real function on a domain in ℂⁿ that can be expanded into a jet.
pub trait Potential<T: Real>: Send + Sync {
    fn dim(&self) -> usize;

    /// Identifier used in reports.
    fn id(&self) -> String;

    /// Strict interior test.
    fn contains(&self, p: &Point<T>) -> bool;

    /// Evaluates the potential on seeded coordinate jets `(z, z̄)`.
    fn eval_vars(&self, vars: &[Jet<T>]) -> Result<Jet<T>>;

    fn jet_at(&self, p: &Point<T>, order: usize) -> Result<Jet<T>> {
        if p.dim() != self.dim() {
            return Err(Error::InvalidParams(format!(
                "point has dimension {}, potential {} expects {}",
                p.dim(),
                self.id(),
                self.dim()
            )));
        }
        if !self.contains(p) {
            return Err(Error::DomainViolation(format!(
                "{:?} outside {}",
                p.to_f64_pairs(),
                self.id()
            )));
        }
        self.eval_vars(&Jet::seed(p, order))
    }

    /// Plain value at `p`.
    fn value_at(&self, p: &Point<T>) -> Result<T> {
        Ok(self.jet_at(p, 0)?.value().re)
    }
}

impl<T: Real, P: Potential<T> + ?Sized> Potential<T> for Arc<P> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn id(&self) -> String {
        (**self).id()
    }
    fn contains(&self, p: &Point<T>) -> bool {
        (**self).contains(p)
    }
    fn eval_vars(&self, vars: &[Jet<T>]) -> Result<Jet<T>> {
        (**self).eval_vars(vars)
    }
}

impl<T: Real, P: Potential<T> + ?Sized> Potential<T> for Box<P> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn id(&self) -> String {
        (**self).id()
    }
    fn contains(&self, p: &Point<T>) -> bool {
        (**self).contains(p)
    }
    fn eval_vars(&self, vars: &[Jet<T>]) -> Result<Jet<T>> {
        (**self).eval_vars(vars)
    }
}

/// `c · φ`.
pub struct Scaled<P> {
    pub inner: P,
    pub factor: f64,
}

impl<P> Scaled<P> {
    pub fn new(inner: P, factor: f64) -> Self {
        Self { inner, factor }
    }
}

impl<T: Real, P: Potential<T>> Potential<T> for Scaled<P> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn id(&self) -> String {
        format!("{}*{}", self.factor, self.inner.id())
    }
    fn contains(&self, p: &Point<T>) -> bool {
        self.inner.contains(p)
    }
    fn eval_vars(&self, vars: &[Jet<T>]) -> Result<Jet<T>> {
        Ok(self.inner.eval_vars(vars)?.scale_real(T::lit(self.factor)))
    }
}

/// Radial polynomial potential `Σ_k c_k |z|^{2k}` on `|z|² < radius_sqr`.
#[derive(Debug, Clone)]
pub struct RadialPoly {
    pub n: usize,
    pub coeffs: Vec<f64>,
    pub radius_sqr: f64,
}

impl<T: Real> Potential<T> for RadialPoly {
    fn dim(&self) -> usize {
        self.n
    }
    fn id(&self) -> String {
        format!("radial_poly(n={},deg={})", self.n, self.coeffs.len().saturating_sub(1))
    }
    fn contains(&self, p: &Point<T>) -> bool {
        p.norm_sqr() < T::lit(self.radius_sqr)
    }
    fn eval_vars(&self, vars: &[Jet<T>]) -> Result<Jet<T>> {
        let x = norm_sqr_of(vars, 0..self.n);
        let mut acc = x.constant_like(Complex::new(T::lit(*self.coeffs.last().unwrap_or(&0.0)), T::zero()));
        for &c in self.coeffs.iter().rev().skip(1) {
            acc = (&acc * &x).add_scalar(Complex::new(T::lit(c), T::zero()));
        }
        Ok(acc)
    }
}

type JetFn<T> = dyn Fn(&[Jet<T>]) -> Result<Jet<T>> + Send + Sync;
type DomainFn<T> = dyn Fn(&Point<T>) -> bool + Send + Sync;

/// Potential from closures, for ad-hoc metrics.
pub struct FnPotential<T> {
    n: usize,
    id: String,
    eval: Box<JetFn<T>>,
    domain: Box<DomainFn<T>>,
}

impl<T: Real> FnPotential<T> {
    pub fn new(
        n: usize,
        id: impl Into<String>,
        domain: impl Fn(&Point<T>) -> bool + Send + Sync + 'static,
        eval: impl Fn(&[Jet<T>]) -> Result<Jet<T>> + Send + Sync + 'static,
    ) -> Self {
        Self {
            n,
            id: id.into(),
            eval: Box::new(eval),
            domain: Box::new(domain),
        }
    }

    /// Euclidean potential `|z|²` on all of ℂⁿ.
    pub fn flat(n: usize) -> Self {
        Self::new(n, format!("flat(n={n})"), |_| true, move |v| Ok(norm_sqr_of(v, 0..n)))
    }
}

impl<T: Real> Potential<T> for FnPotential<T> {
    fn dim(&self) -> usize {
        self.n
    }
    fn id(&self) -> String {
        self.id.clone()
    }
    fn contains(&self, p: &Point<T>) -> bool {
        (self.domain)(p)
    }
    fn eval_vars(&self, vars: &[Jet<T>]) -> Result<Jet<T>> {
        (self.eval)(vars)
    }
}
