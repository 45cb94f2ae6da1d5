//! Vector fields `X = X^k ∂_k` given by jet-evaluable component functions.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::linalg::jet_inverse;
use crate::point::Point;
use crate::potential::Potential;
use crate::scalar::Real;

/// Components `X^1…X^n` as jets. Holomorphy is a property to be checked, not
/// assumed.
pub trait HoloField<T: Real>: Send + Sync {
    fn dim(&self) -> usize;

    fn jets_at(&self, p: &Point<T>, order: usize) -> Result<Vec<Jet<T>>>;

    fn values_at(&self, p: &Point<T>) -> Result<Vec<Complex<T>>> {
        Ok(self.jets_at(p, 0)?.iter().map(Jet::value).collect())
    }
}

/// `coeff · z^hol · z̄^antihol`.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial<T> {
    pub coeff: Complex<T>,
    pub hol: Vec<u8>,
    pub antihol: Vec<u8>,
}

impl<T: Real> Monomial<T> {
    pub fn holomorphic(coeff: Complex<T>, hol: Vec<u8>) -> Self {
        let n = hol.len();
        Self {
            coeff,
            hol,
            antihol: vec![0; n],
        }
    }

    fn eval(&self, vars: &[Jet<T>]) -> Jet<T> {
        let n = self.hol.len();
        let mut acc = vars[0].constant_like(self.coeff);
        for (slot, &e) in self.hol.iter().chain(&self.antihol).enumerate() {
            for _ in 0..e {
                acc = &acc * &vars[slot];
            }
        }
        debug_assert_eq!(vars.len(), 2 * n);
        acc
    }
}

/// Polynomial field; each component is a sum of monomials.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyField<T> {
    n: usize,
    components: Vec<Vec<Monomial<T>>>,
}

impl<T: Real> PolyField<T> {
    pub fn new(n: usize, components: Vec<Vec<Monomial<T>>>) -> Result<Self> {
        if components.len() != n {
            return Err(Error::InvalidParams(format!(
                "field needs {n} components, got {}",
                components.len()
            )));
        }
        for m in components.iter().flatten() {
            if m.hol.len() != n || m.antihol.len() != n {
                return Err(Error::InvalidParams(
                    "monomial exponent length differs from dimension".into(),
                ));
            }
        }
        Ok(Self { n, components })
    }

    pub fn zero(n: usize) -> Self {
        Self {
            n,
            components: vec![Vec::new(); n],
        }
    }

    /// `X^k = Σ_j a[k][j] z^j`.
    pub fn linear(a: &[Vec<Complex<T>>]) -> Self {
        let n = a.len();
        let components = (0..n)
            .map(|k| {
                (0..n)
                    .filter(|&j| a[k][j] != Complex::zero())
                    .map(|j| {
                        let mut e = vec![0; n];
                        e[j] = 1;
                        Monomial::holomorphic(a[k][j], e)
                    })
                    .collect()
            })
            .collect();
        Self { n, components }
    }

    /// `X = c · z` (all components scaled by the same constant).
    pub fn scaled_identity(n: usize, c: Complex<T>) -> Self {
        let a: Vec<Vec<Complex<T>>> = (0..n)
            .map(|k| (0..n).map(|j| if j == k { c } else { Complex::zero() }).collect())
            .collect();
        Self::linear(&a)
    }

    /// Rotation field `X^k = i z^k`.
    pub fn rotation(n: usize) -> Self {
        Self::scaled_identity(n, Complex::new(T::zero(), T::one()))
    }

    /// Euler field `X^k = z^k`.
    pub fn euler(n: usize) -> Self {
        Self::scaled_identity(n, Complex::one())
    }

    pub fn components(&self) -> &[Vec<Monomial<T>>] {
        &self.components
    }

    /// Holomorphic monomials of degree ≤ `degree` in `n` variables, in a fixed order.
    pub fn monomial_basis(n: usize, degree: usize) -> Vec<Vec<u8>> {
        let mut out = Vec::new();
        for d in 0..=degree {
            let mut e = vec![0u8; n];
            collect_exponents(&mut e, 0, d, &mut out);
        }
        out
    }

    /// Builds a holomorphic field from coefficients over `monomial_basis(n, degree)`,
    /// component-major: `coeffs[k * basis_len + b]`.
    pub fn from_basis_coeffs(n: usize, degree: usize, coeffs: &[Complex<T>]) -> Result<Self> {
        let basis = Self::monomial_basis(n, degree);
        if coeffs.len() != n * basis.len() {
            return Err(Error::InvalidParams(format!(
                "expected {} coefficients, got {}",
                n * basis.len(),
                coeffs.len()
            )));
        }
        let components = (0..n)
            .map(|k| {
                basis
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| coeffs[k * basis.len() + b] != Complex::zero())
                    .map(|(b, e)| Monomial::holomorphic(coeffs[k * basis.len() + b], e.clone()))
                    .collect()
            })
            .collect();
        Ok(Self { n, components })
    }

    pub fn eval_vars(&self, vars: &[Jet<T>]) -> Vec<Jet<T>> {
        self.components
            .iter()
            .map(|terms| terms.iter().fold(vars[0].zero_like(), |acc, m| &acc + &m.eval(vars)))
            .collect()
    }
}

fn collect_exponents(e: &mut [u8], pos: usize, remaining: usize, out: &mut Vec<Vec<u8>>) {
    if pos + 1 == e.len() {
        e[pos] = remaining as u8;
        out.push(e.to_vec());
        return;
    }
    for k in (0..=remaining).rev() {
        e[pos] = k as u8;
        collect_exponents(e, pos + 1, remaining - k, out);
    }
    e[pos] = 0;
}

impl<T: Real> HoloField<T> for PolyField<T> {
    fn dim(&self) -> usize {
        self.n
    }

    fn jets_at(&self, p: &Point<T>, order: usize) -> Result<Vec<Jet<T>>> {
        if p.dim() != self.n {
            return Err(Error::InvalidParams(
                "point dimension differs from field dimension".into(),
            ));
        }
        Ok(self.eval_vars(&Jet::seed(p, order)))
    }
}

/// The (1,0)-gradient `X^k = g^{kl̄} ∂_l̄ f` of a real function `f` with
/// respect to the metric of `phi`. Its dual form is exact, hence closed.
pub struct GradientField<P, F> {
    pub phi: P,
    pub f: F,
}

impl<T: Real, P: Potential<T>, F: Potential<T>> HoloField<T> for GradientField<P, F> {
    fn dim(&self) -> usize {
        self.phi.dim()
    }

    fn jets_at(&self, p: &Point<T>, order: usize) -> Result<Vec<Jet<T>>> {
        let n = self.dim();
        let phi = self.phi.jet_at(p, order + 2)?;
        let g: Vec<Vec<Jet<T>>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| phi.differentiate(i).and_then(|d| d.differentiate(n + j)))
                    .collect::<Result<_>>()
            })
            .collect::<Result<_>>()?;
        let h = jet_inverse(&g)?;
        let f = self.f.jet_at(p, order + 1)?;
        let df: Vec<Jet<T>> = (0..n).map(|l| f.differentiate(n + l)).collect::<Result<_>>()?;
        // g^{kl̄} = (G⁻¹)[l][k]
        Ok((0..n)
            .map(|k| (0..n).fold(df[0].zero_like(), |acc, l| &acc + &(&h[l][k] * &df[l])))
            .collect())
    }
}
