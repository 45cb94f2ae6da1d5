//! Pointwise Kähler tensor calculus.
//!
//! Index conventions: `G[i][j] = g_{ij̄}`, `H = G⁻¹`, so the inverse metric is
//! `g^{ij̄} = H[j][i]`. All tensors are evaluated at a single point from jets
//! of the potential; each operation expands the potential only to the order it
//! needs, which is exact by truncation consistency.

use num_complex::Complex;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::HoloField;
use crate::jet::MultiIndexPair;
use crate::jet::{Jet, MAX_ORDER};
use crate::linalg::{jet_det, jet_inverse, CMatrix};
use crate::oracle::fd::{fd_partial, FdConfig};
use crate::point::Point;
use crate::potential::Potential;
use crate::scalar::Real;

type JetPair<T> = (Vec<Jet<T>>, Vec<Jet<T>>);

/// Condition number above which the metric is rejected.
pub const CONDITION_LIMIT: f64 = 1e12;
/// Largest `|∂̄X|` accepted as holomorphic.
pub const HOLOMORPHIC_TOL: f64 = 1e-9;
/// Step for the finite-difference fallback of the S-identity.
pub const S_FALLBACK_STEP: f64 = 1e-3;

/// Hermitian positive definite metric `g_{ij̄}` at a point.
#[derive(Debug, Clone)]
pub struct MetricTensor<T> {
    pub point: Point<T>,
    pub potential_id: String,
    g: CMatrix<T>,
}

impl<T: Real> MetricTensor<T> {
    /// Validates Hermitian positive definiteness and symmetrizes.
    pub fn new(point: Point<T>, potential_id: impl Into<String>, g: CMatrix<T>) -> Result<Self> {
        let g = g.hermitian_part();
        g.cholesky()?;
        Ok(Self {
            point,
            potential_id: potential_id.into(),
            g,
        })
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    /// Components `g[i][j] = g_{ij̄}`.
    pub fn matrix(&self) -> &CMatrix<T> {
        &self.g
    }

    pub fn det(&self) -> T {
        self.g.det().re
    }

    /// `|W|²_g = g_{ij̄} Wⁱ W̄ʲ`.
    pub fn norm_sqr(&self, w: &[Complex<T>]) -> T {
        let n = self.dim();
        let mut acc = Complex::<T>::zero();
        for i in 0..n {
            for j in 0..n {
                acc += self.g[(i, j)] * w[i] * w[j].conj();
            }
        }
        acc.re
    }
}

/// `g^{ij̄}` with its quality diagnostics.
#[derive(Debug, Clone)]
pub struct InverseMetric<T> {
    /// `upper[(i, j)] = g^{ij̄}`.
    pub upper: CMatrix<T>,
    /// `G⁻¹` in matrix form (the transpose of `upper`).
    pub matrix_inverse: CMatrix<T>,
    pub condition: T,
    /// `max |G·G⁻¹ − I|`.
    pub identity_residual: T,
}

pub fn metric_inverse<T: Real>(g: &MetricTensor<T>) -> Result<InverseMetric<T>> {
    let m = g.matrix();
    let inv = m.inverse()?;
    let condition = m.condition_with(&inv);
    if !(condition <= T::lit(CONDITION_LIMIT)) {
        return Err(Error::IllConditioned(condition.to_f64_lossy()));
    }
    let identity_residual = m.matmul(&inv).sub(&CMatrix::identity(m.dim())).max_abs();
    Ok(InverseMetric {
        upper: inv.transpose(),
        matrix_inverse: inv.hermitian_part(),
        condition,
        identity_residual,
    })
}

/// Curvature quantities at a point; optional parts are filled by
/// [`KahlerEngine::curvature_tensor_at`].
#[derive(Debug, Clone)]
pub struct CurvatureBundle<T> {
    pub point: Point<T>,
    /// `ricci[(i, j)] = R_{ij̄}`.
    pub ricci: CMatrix<T>,
    pub scalar: T,
    /// Imaginary part of the trace before it was discarded.
    pub scalar_imag: T,
    /// `R_{ij̄kl̄}` at `((i·n + j)·n + k)·n + l`.
    pub riem: Option<Vec<Complex<T>>>,
    /// `Γ^k_{ij}` at `(k·n + i)·n + j`.
    pub christoffel: Option<Vec<Complex<T>>>,
}

impl<T: Real> CurvatureBundle<T> {
    pub fn dim(&self) -> usize {
        self.ricci.dim()
    }

    pub fn riem(&self, i: usize, j: usize, k: usize, l: usize) -> Option<Complex<T>> {
        let n = self.dim();
        self.riem.as_ref().map(|r| r[((i * n + j) * n + k) * n + l])
    }

    pub fn christoffel(&self, k: usize, i: usize, j: usize) -> Option<Complex<T>> {
        let n = self.dim();
        self.christoffel.as_ref().map(|c| c[(k * n + i) * n + j])
    }
}

/// `Ric(g) + L_X g = λ g`.
pub struct SolitonSpec<'a, T: Real> {
    pub lambda: f64,
    pub field: &'a dyn HoloField<T>,
}

/// `{∇_i X_j, ∇_i X_j̄}` at a point.
#[derive(Debug, Clone)]
pub struct CovariantDerivatives<T> {
    /// `hol[(i, j)] = ∇_i X_j`.
    pub hol: CMatrix<T>,
    /// `mixed[(i, j)] = ∇_i X_j̄`.
    pub mixed: CMatrix<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SResidual {
    pub value: f64,
    /// ΔS and ∇S came from finite differences because the jet order was below 6.
    pub fd_fallback: bool,
}

/// Metric-level data reused by several residuals: values of `g`, `G⁻¹`,
/// first derivatives `∂_k g_{ij̄}` and the Ricci form.
#[derive(Debug, Clone)]
pub struct PointGeometry<T> {
    pub n: usize,
    pub metric: MetricTensor<T>,
    pub h: CMatrix<T>,
    /// `dg[k][(i, j)] = ∂_k g_{ij̄}`.
    pub dg: Vec<CMatrix<T>>,
    pub ricci: CMatrix<T>,
}

impl<T: Real> PointGeometry<T> {
    /// Coordinate formula
    /// `X^k ∂_k g_{ij̄} + X̄^l ∂_l̄ g_{ij̄} + ∂_i X^k g_{kj̄} + ∂_j̄ X̄^l g_{il̄}`
    /// for a field given by its values `x[k] = X^k` and derivatives
    /// `dx[(i, k)] = ∂_i X^k`.
    pub fn lie_derivative(&self, x: &[Complex<T>], dx: &CMatrix<T>) -> CMatrix<T> {
        let n = self.n;
        let g = self.metric.matrix();
        CMatrix::from_fn(n, |i, j| {
            let mut acc = Complex::<T>::zero();
            for k in 0..n {
                // ∂_l̄ g_{ij̄} = conj(∂_l g_{ji̅})
                acc += x[k] * self.dg[k][(i, j)];
                acc += x[k].conj() * self.dg[k][(j, i)].conj();
                acc += dx[(i, k)] * g[(k, j)];
                acc += dx[(j, k)].conj() * g[(i, k)];
            }
            acc
        })
    }
}

/// `|A|² = g^{ij̄} g^{kl̄} A_{il̄} conj(A_{jk̄})`, returned as `|A|`.
///
/// In matrix form this is `tr(H A H A^H)` with `H = G⁻¹`, which gives `|g| = √n`.
pub fn tensor_norm<T: Real>(a: &CMatrix<T>, g: &MetricTensor<T>) -> Result<T> {
    let h = g.matrix().inverse()?;
    Ok(tensor_norm_with(a, &h))
}

pub(crate) fn tensor_norm_with<T: Real>(a: &CMatrix<T>, h: &CMatrix<T>) -> T {
    let m = h.matmul(a).matmul(h).matmul(&a.adjoint());
    m.trace().re.max(T::zero()).sqrt()
}

/// `H(W) = R(W, W̄, W, W̄) / |W|⁴_g`.
///
/// The normalization constant is 1: with it the ball Bergman metric has
/// `H ≡ 2 − 2(n+2)/(n+1)`, the equality case of the squeezing bounds at `s = 1`.
pub fn holomorphic_sectional_at<T: Real>(
    bundle: &CurvatureBundle<T>,
    g: &MetricTensor<T>,
    w: &[Complex<T>],
) -> Result<T> {
    let n = bundle.dim();
    let norm2 = g.norm_sqr(w);
    if w.iter().all(|c| c.norm() == T::zero()) || !(norm2 > T::zero()) {
        return Err(Error::ZeroVector);
    }
    let riem = bundle
        .riem
        .as_ref()
        .ok_or_else(|| Error::InvalidParams("curvature bundle lacks the full tensor".into()))?;
    let mut acc = Complex::<T>::zero();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    acc += riem[((i * n + j) * n + k) * n + l] * w[i] * w[j].conj() * w[k] * w[l].conj();
                }
            }
        }
    }
    Ok(acc.re / (norm2 * norm2))
}

/// `Ric(W) = R_{ij̄} Wⁱ W̄ʲ / |W|²_g`.
pub fn ricci_in_direction<T: Real>(bundle: &CurvatureBundle<T>, g: &MetricTensor<T>, w: &[Complex<T>]) -> Result<T> {
    let norm2 = g.norm_sqr(w);
    if !(norm2 > T::zero()) {
        return Err(Error::ZeroVector);
    }
    let n = bundle.dim();
    let mut acc = Complex::<T>::zero();
    for i in 0..n {
        for j in 0..n {
            acc += bundle.ricci[(i, j)] * w[i] * w[j].conj();
        }
    }
    Ok(acc.re / norm2)
}

fn values<T: Real>(m: &[Vec<Jet<T>>]) -> CMatrix<T> {
    CMatrix::from_fn(m.len(), |i, j| m[i][j].value())
}

fn d_values<T: Real>(m: &[Vec<Jet<T>>], var: usize) -> Result<CMatrix<T>> {
    let n = m.len();
    let mut out = CMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = m[i][j].differentiate(var)?.value();
        }
    }
    Ok(out)
}

fn truncate_all<T: Real>(m: &[Vec<Jet<T>>], order: usize) -> Vec<Vec<Jet<T>>> {
    m.iter()
        .map(|row| row.iter().map(|j| j.truncate(order)).collect())
        .collect()
}

/// Jets of the metric and its inverse at one point.
struct Local<T: Real> {
    n: usize,
    metric: MetricTensor<T>,
    h: CMatrix<T>,
    /// `g_{ij̄}` as jets of order `D − 2`.
    g: Vec<Vec<Jet<T>>>,
}

impl<T: Real> Local<T> {
    fn new<P: Potential<T> + ?Sized>(phi: &P, p: &Point<T>, order: usize) -> Result<Self> {
        let n = phi.dim();
        let jet = phi.jet_at(p, order)?;
        let mut g = Vec::with_capacity(n);
        for i in 0..n {
            let di = jet.differentiate(i)?;
            g.push((0..n).map(|j| di.differentiate(n + j)).collect::<Result<Vec<_>>>()?);
        }
        let metric = MetricTensor::new(p.clone(), phi.id(), values(&g))?;
        let inv = metric_inverse(&metric)?;
        Ok(Self {
            n,
            h: inv.matrix_inverse,
            metric,
            g,
        })
    }

    /// `R_{ij̄} = −∂_i∂_j̄ log det g` as jets of order `D − 4`.
    fn ricci_jets(&self) -> Result<Vec<Vec<Jet<T>>>> {
        let n = self.n;
        let det = jet_det(&self.g)?;
        let logdet = det.ln().map_err(|e| match e {
            Error::BranchViolation(_) | Error::DegenerateValue(_) => {
                Error::DegenerateValue(det.value().norm().to_f64_lossy())
            }
            e => e,
        })?;
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let di = logdet.differentiate(i)?;
            out.push(
                (0..n)
                    .map(|j| di.differentiate(n + j).map(|x| -x))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        Ok(out)
    }

    fn dg(&self) -> Result<Vec<CMatrix<T>>> {
        (0..self.n).map(|k| d_values(&self.g, k)).collect()
    }

    fn geometry(&self, ricci: CMatrix<T>) -> Result<PointGeometry<T>> {
        Ok(PointGeometry {
            n: self.n,
            metric: self.metric.clone(),
            h: self.h.clone(),
            dg: self.dg()?,
            ricci,
        })
    }

    /// `Γ^k_{ij} = Σ_l H[l][k] ∂_i g_{jl̄}` at `(k·n + i)·n + j`.
    fn christoffel(&self, dg: &[CMatrix<T>]) -> Vec<Complex<T>> {
        let n = self.n;
        let mut out = vec![Complex::zero(); n * n * n];
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    out[(k * n + i) * n + j] = (0..n).map(|l| self.h[(l, k)] * dg[i][(j, l)]).sum();
                }
            }
        }
        out
    }

    /// Scalar curvature as a jet of order `D − 4`.
    fn scalar_jet(&self, ricci: &[Vec<Jet<T>>]) -> Result<Jet<T>> {
        let order = ricci[0][0].order();
        let h = jet_inverse(&truncate_all(&self.g, order))?;
        let n = self.n;
        let mut acc = ricci[0][0].zero_like();
        for i in 0..n {
            for j in 0..n {
                acc = acc.try_add(&h[j][i].try_mul(&ricci[i][j])?)?;
            }
        }
        Ok(acc)
    }

    /// Field components truncated to `order`, checked against the local frame.
    fn field_jets(&self, field: &dyn HoloField<T>, order: usize) -> Result<Vec<Jet<T>>> {
        if field.dim() != self.n {
            return Err(Error::InvalidParams(format!(
                "field dimension {} differs from metric dimension {}",
                field.dim(),
                self.n
            )));
        }
        field.jets_at(&self.metric.point, order)
    }
}

fn trace_real<T: Real>(h: &CMatrix<T>, a: &CMatrix<T>) -> Complex<T> {
    h.matmul(a).trace()
}

/// Evaluator for every pointwise quantity, parameterized by the configured jet
/// order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KahlerEngine {
    order: usize,
}

impl Default for KahlerEngine {
    fn default() -> Self {
        Self { order: 6 }
    }
}

impl KahlerEngine {
    pub fn new(order: usize) -> Result<Self> {
        if order > MAX_ORDER {
            return Err(Error::InvalidParams(format!("jet order {order} above {MAX_ORDER}")));
        }
        Ok(Self { order })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    fn require(&self, needed: usize) -> Result<usize> {
        if self.order < needed {
            Err(Error::OrderExceeded {
                needed,
                available: self.order,
            })
        } else {
            Ok(needed)
        }
    }

    fn local<T: Real, P: Potential<T> + ?Sized>(&self, phi: &P, p: &Point<T>, needed: usize) -> Result<Local<T>> {
        Local::new(phi, p, self.require(needed)?)
    }

    pub fn metric_at<T: Real, P: Potential<T> + ?Sized>(&self, phi: &P, p: &Point<T>) -> Result<MetricTensor<T>> {
        Ok(self.local(phi, p, 2)?.metric)
    }

    /// Metric, inverse, `∂g` and Ricci values in one pass.
    pub fn geometry_at<T: Real, P: Potential<T> + ?Sized>(&self, phi: &P, p: &Point<T>) -> Result<PointGeometry<T>> {
        let local = self.local(phi, p, 4)?;
        let ricci = values(&local.ricci_jets()?).hermitian_part();
        local.geometry(ricci)
    }

    pub fn ricci_at<T: Real, P: Potential<T> + ?Sized>(&self, phi: &P, p: &Point<T>) -> Result<CurvatureBundle<T>> {
        let local = self.local(phi, p, 4)?;
        Self::ricci_bundle(&local)
    }

    fn ricci_bundle<T: Real>(local: &Local<T>) -> Result<CurvatureBundle<T>> {
        let ricci = values(&local.ricci_jets()?).hermitian_part();
        let tr = trace_real(&local.h, &ricci);
        Ok(CurvatureBundle {
            point: local.metric.point.clone(),
            ricci,
            scalar: tr.re,
            scalar_imag: tr.im,
            riem: None,
            christoffel: None,
        })
    }

    pub fn scalar_curvature_at<T: Real, P: Potential<T> + ?Sized>(&self, phi: &P, p: &Point<T>) -> Result<T> {
        Ok(self.ricci_at(phi, p)?.scalar)
    }

    pub fn curvature_tensor_at<T: Real, P: Potential<T> + ?Sized>(
        &self,
        phi: &P,
        p: &Point<T>,
    ) -> Result<CurvatureBundle<T>> {
        let local = self.local(phi, p, 4)?;
        let mut bundle = Self::ricci_bundle(&local)?;
        let n = local.n;
        let dg = local.dg()?;
        // ∂_l̄ g_{pj̄}
        let dbar: Vec<CMatrix<T>> = (0..n).map(|l| d_values(&local.g, n + l)).collect::<Result<_>>()?;
        let mut riem = vec![Complex::zero(); n * n * n * n];
        for k in 0..n {
            for l in 0..n {
                let ddg: Vec<Vec<Complex<T>>> = (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| {
                                local.g[i][j]
                                    .differentiate(k)
                                    .and_then(|d| d.differentiate(n + l))
                                    .map(|d| d.value())
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<_>>()?;
                for i in 0..n {
                    for j in 0..n {
                        let mut acc = -ddg[i][j];
                        for p in 0..n {
                            for q in 0..n {
                                acc += local.h[(q, p)] * dg[k][(i, q)] * dbar[l][(p, j)];
                            }
                        }
                        riem[((i * n + j) * n + k) * n + l] = acc;
                    }
                }
            }
        }
        bundle.riem = Some(riem);
        bundle.christoffel = Some(local.christoffel(&dg));
        Ok(bundle)
    }

    /// `max_{k,j} |∂_j̄ X^k|`.
    pub fn field_check_holomorphic<T: Real>(&self, field: &dyn HoloField<T>, p: &Point<T>) -> Result<T> {
        let n = field.dim();
        let x = field.jets_at(p, 1)?;
        let mut worst = T::zero();
        for comp in &x {
            for j in 0..n {
                worst = worst.max(comp.differentiate(n + j)?.value().norm());
            }
        }
        Ok(worst)
    }

    fn field_values_and_derivs<T: Real>(x: &[Jet<T>], n: usize) -> Result<(Vec<Complex<T>>, CMatrix<T>)> {
        let vals = x.iter().map(Jet::value).collect();
        let mut dx = CMatrix::zeros(n);
        for (k, comp) in x.iter().enumerate() {
            for i in 0..n {
                dx[(i, k)] = comp.differentiate(i)?.value();
            }
        }
        Ok((vals, dx))
    }

    /// `(L_X g)_{ij̄}` by the coordinate formula.
    pub fn lie_derivative_metric_at<T: Real, P: Potential<T> + ?Sized>(
        &self,
        phi: &P,
        field: &dyn HoloField<T>,
        p: &Point<T>,
    ) -> Result<CMatrix<T>> {
        let local = self.local(phi, p, 3)?;
        let geo = PointGeometry {
            n: local.n,
            metric: local.metric.clone(),
            h: local.h.clone(),
            dg: local.dg()?,
            ricci: CMatrix::zeros(local.n),
        };
        let x = local.field_jets(field, 1)?;
        let (vals, dx) = Self::field_values_and_derivs(&x, local.n)?;
        Ok(geo.lie_derivative(&vals, &dx))
    }

    /// Lowered components as jets: `X_j̄ = g_{kj̄} X^k` and `X_i = g_{il̄} X̄^l`.
    fn lowered<T: Real>(local: &Local<T>, x: &[Jet<T>], order: usize) -> Result<JetPair<T>> {
        let n = local.n;
        let g = truncate_all(&local.g, order);
        let xbar: Vec<Jet<T>> = x.iter().map(Jet::conjugate).collect();
        let mut anti = Vec::with_capacity(n);
        let mut hol = Vec::with_capacity(n);
        for j in 0..n {
            let mut a = x[0].zero_like();
            let mut h = x[0].zero_like();
            for k in 0..n {
                a = a.try_add(&g[k][j].try_mul(&x[k])?)?;
                h = h.try_add(&g[j][k].try_mul(&xbar[k])?)?;
            }
            anti.push(a);
            hol.push(h);
        }
        Ok((hol, anti))
    }

    pub fn covariant_derivatives_at<T: Real, P: Potential<T> + ?Sized>(
        &self,
        phi: &P,
        field: &dyn HoloField<T>,
        p: &Point<T>,
    ) -> Result<CovariantDerivatives<T>> {
        let local = self.local(phi, p, 3)?;
        let n = local.n;
        let x = local.field_jets(field, 1)?;
        let (x_hol, x_anti) = Self::lowered(&local, &x, 1)?;
        let gamma = local.christoffel(&local.dg()?);
        let mut hol = CMatrix::zeros(n);
        let mut mixed = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut v = x_hol[j].differentiate(i)?.value();
                for k in 0..n {
                    v -= gamma[(k * n + i) * n + j] * x_hol[k].value();
                }
                hol[(i, j)] = v;
                mixed[(i, j)] = x_anti[j].differentiate(i)?.value();
            }
        }
        Ok(CovariantDerivatives { hol, mixed })
    }

    /// `∇_i X_j̄ + ∇_j̄ X_i`, the covariant route to the Lie derivative.
    pub fn lie_derivative_covariant_at<T: Real, P: Potential<T> + ?Sized>(
        &self,
        phi: &P,
        field: &dyn HoloField<T>,
        p: &Point<T>,
    ) -> Result<CMatrix<T>> {
        let local = self.local(phi, p, 3)?;
        let n = local.n;
        let x = local.field_jets(field, 1)?;
        let (x_hol, x_anti) = Self::lowered(&local, &x, 1)?;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = x_anti[j].differentiate(i)?.value() + x_hol[i].differentiate(n + j)?.value();
            }
        }
        Ok(out)
    }

    pub fn einstein_residual_at<T: Real, P: Potential<T> + ?Sized>(
        &self,
        phi: &P,
        lambda: f64,
        p: &Point<T>,
    ) -> Result<T> {
        let local = self.local(phi, p, 4)?;
        let ricci = values(&local.ricci_jets()?).hermitian_part();
        let a = ricci.sub(&local.metric.matrix().scale(T::lit(lambda)));
        Ok(tensor_norm_with(&a, &local.h))
    }

    pub fn soliton_residual_at<T: Real, P: Potential<T> + ?Sized>(
        &self,
        phi: &P,
        spec: &SolitonSpec<'_, T>,
        p: &Point<T>,
    ) -> Result<T> {
        let geo = self.geometry_at(phi, p)?;
        let x = spec.field.jets_at(p, 1)?;
        if x.len() != geo.n {
            return Err(Error::InvalidParams(
                "field dimension differs from metric dimension".into(),
            ));
        }
        let (vals, dx) = Self::field_values_and_derivs(&x, geo.n)?;
        let lie = geo.lie_derivative(&vals, &dx);
        let a = geo.ricci.add(&lie).sub(&geo.metric.matrix().scale(T::lit(spec.lambda)));
        Ok(tensor_norm_with(&a, &geo.h))
    }

    /// g-norm of the 1-form `ω_i = ∂_i R − 2 R_{il̄} X̄^l`.
    pub fn grad_scalar_identity_residual_at<T: Real, P: Potential<T> + ?Sized>(
        &self,
        phi: &P,
        spec: &SolitonSpec<'_, T>,
        p: &Point<T>,
    ) -> Result<T> {
        let local = self.local(phi, p, 5)?;
        let n = local.n;
        let ricci = local.ricci_jets()?;
        let r = local.scalar_jet(&ricci)?;
        let ric = values(&ricci).hermitian_part();
        let x = local.field_jets(spec.field, 0)?;
        let omega: Vec<Complex<T>> = (0..n)
            .map(|i| {
                let dr = r.differentiate(i)?.value();
                let contraction: Complex<T> = (0..n).map(|l| ric[(i, l)] * x[l].value().conj()).sum();
                Ok(dr - contraction * T::lit(2.0))
            })
            .collect::<Result<_>>()?;
        let mut acc = Complex::<T>::zero();
        for i in 0..n {
            for j in 0..n {
                acc += local.h[(j, i)] * omega[i] * omega[j].conj();
            }
        }
        Ok(acc.re.max(T::zero()).sqrt())
    }

    /// `|ΔS − ⟨X,∇S⟩ − S + |Ric+g|²|` with `S = R + n`, `ΔS = g^{ij̄}∂_i∂_j̄ S`
    /// and `⟨X,∇S⟩ = 2 Re(Xⁱ ∂_i S)`. Only stated for `λ = −1`.
    ///
    /// At jet order 6 and above every term comes from jets; at orders 4 and 5
    /// the derivatives of `S` fall back to central differences of the scalar
    /// curvature with step `1e-3`.
    pub fn scalar_s_residual_at<T: Real, P: Potential<T> + ?Sized>(
        &self,
        phi: &P,
        spec: &SolitonSpec<'_, T>,
        p: &Point<T>,
    ) -> Result<SResidual> {
        if spec.lambda != -1.0 {
            return Err(Error::UnsupportedLambda(spec.lambda));
        }
        let n = phi.dim();
        let nf = T::lit(n as f64);
        let xv = spec.field.values_at(p)?;
        if self.order >= 6 {
            let local = self.local(phi, p, 6)?;
            let ricci = local.ricci_jets()?;
            let s = local.scalar_jet(&ricci)?.add_scalar(Complex::new(nf, T::zero()));
            let ric = values(&ricci).hermitian_part();
            let mut lap = Complex::<T>::zero();
            let mut xs = Complex::<T>::zero();
            for i in 0..n {
                let di = s.differentiate(i)?;
                xs += xv[i] * di.value();
                for j in 0..n {
                    lap += local.h[(j, i)] * di.differentiate(n + j)?.value();
                }
            }
            let rg = tensor_norm_with(&ric.add(local.metric.matrix()), &local.h);
            let value = lap.re - T::lit(2.0) * xs.re - s.value().re + rg * rg;
            return Ok(SResidual {
                value: value.abs().to_f64_lossy(),
                fd_fallback: false,
            });
        }
        let local = self.local(phi, p, 4)?;
        let bundle = Self::ricci_bundle(&local)?;
        let s0 = bundle.scalar + nf;
        let engine = *self;
        let s_at = |q: &Point<T>| -> Result<Complex<T>> {
            Ok(Complex::new(engine.scalar_curvature_at(phi, q)? + nf, T::zero()))
        };
        let cfg = FdConfig {
            step: S_FALLBACK_STEP,
            ..FdConfig::default()
        };
        let mut lap = Complex::<T>::zero();
        let mut xs = Complex::<T>::zero();
        for i in 0..n {
            xs += xv[i] * fd_partial(&s_at, p, &MultiIndexPair::hol(n, i), &cfg)?;
            for j in 0..n {
                lap += local.h[(j, i)] * fd_partial(&s_at, p, &MultiIndexPair::mixed(n, i, j), &cfg)?;
            }
        }
        let rg = tensor_norm_with(&bundle.ricci.add(local.metric.matrix()), &local.h);
        let value = lap.re - T::lit(2.0) * xs.re - s0 + rg * rg;
        Ok(SResidual {
            value: value.abs().to_f64_lossy(),
            fd_fallback: true,
        })
    }

    /// `|Δ|X|² − |∇X|² + Ric(X,X)|`.
    pub fn bochner_residual_at<T: Real, P: Potential<T> + ?Sized>(
        &self,
        phi: &P,
        field: &dyn HoloField<T>,
        p: &Point<T>,
    ) -> Result<T> {
        let local = self.local(phi, p, 4)?;
        let n = local.n;
        let x = local.field_jets(field, 2)?;
        let mut worst = T::zero();
        for comp in &x {
            for j in 0..n {
                worst = worst.max(comp.differentiate(n + j)?.value().norm());
            }
        }
        if worst > T::lit(HOLOMORPHIC_TOL) {
            return Err(Error::NotHolomorphic(worst.to_f64_lossy()));
        }
        let g2 = truncate_all(&local.g, 2);
        let xbar: Vec<Jet<T>> = x.iter().map(Jet::conjugate).collect();
        let mut norm = x[0].zero_like();
        for i in 0..n {
            for j in 0..n {
                norm = norm.try_add(&g2[i][j].try_mul(&x[i])?.try_mul(&xbar[j])?)?;
            }
        }
        let mut lap = Complex::<T>::zero();
        for i in 0..n {
            let di = norm.differentiate(i)?;
            for j in 0..n {
                lap += local.h[(j, i)] * di.differentiate(n + j)?.value();
            }
        }
        let dg = local.dg()?;
        let gamma = local.christoffel(&dg);
        let (vals, dx) = Self::field_values_and_derivs(&x, n)?;
        // D[i][k] = ∂_i X^k + Γ^k_{ip} X^p
        let d = CMatrix::from_fn(n, |i, k| {
            dx[(i, k)] + (0..n).map(|p| gamma[(k * n + i) * n + p] * vals[p]).sum::<Complex<T>>()
        });
        let g = local.metric.matrix();
        let mut grad = Complex::<T>::zero();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        grad += local.h[(j, i)] * g[(k, l)] * d[(i, k)] * d[(j, l)].conj();
                    }
                }
            }
        }
        let ricci = values(&local.ricci_jets()?).hermitian_part();
        let mut ric_xx = Complex::<T>::zero();
        for i in 0..n {
            for j in 0..n {
                ric_xx += ricci[(i, j)] * vals[i] * vals[j].conj();
            }
        }
        Ok((lap.re - grad.re + ric_xx.re).abs())
    }

    /// `max(max_{i<j} |∂_i X_j − ∂_j X_i|, max_{i,j} |∂_i X_j̄ − ∂_j̄ X_i|)`.
    pub fn dual_form_closedness_at<T: Real, P: Potential<T> + ?Sized>(
        &self,
        phi: &P,
        field: &dyn HoloField<T>,
        p: &Point<T>,
    ) -> Result<T> {
        let local = self.local(phi, p, 3)?;
        let n = local.n;
        let x = local.field_jets(field, 1)?;
        let (x_hol, x_anti) = Self::lowered(&local, &x, 1)?;
        let mut worst = T::zero();
        for i in 0..n {
            for j in 0..n {
                if i < j {
                    let a = x_hol[j].differentiate(i)?.value() - x_hol[i].differentiate(j)?.value();
                    worst = worst.max(a.norm());
                }
                let b = x_anti[j].differentiate(i)?.value() - x_hol[i].differentiate(n + j)?.value();
                worst = worst.max(b.norm());
            }
        }
        Ok(worst)
    }
}
