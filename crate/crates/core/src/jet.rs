//! Truncated multivariate Taylor series ("jets").
//!
//! A [`Jet`] stores the Taylor coefficients `∂^α f / α!` of a function of
//! `nvars` formally independent variables at a base point, densely, for every
//! multi-index of total degree `≤ order`. For geometry on ℂⁿ the variables are
//! `(z¹, …, zⁿ, z̄¹, …, z̄ⁿ)` evaluated on the real slice `z̄ = conj(z)`, which
//! makes `∂_i` and `∂_j̄` plain partial derivatives.
//!
//! Multi-indices are laid out degree by degree, and inside one degree in an
//! order that does not depend on the truncation order. The layout of order `D'`
//! is therefore a prefix of the layout of order `D > D'`, and every output
//! coefficient of a product is accumulated over the same pairs in the same
//! order at every truncation order.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::point::Point;
use crate::scalar::Real;

/// Largest supported truncation order.
pub const MAX_ORDER: usize = 8;

pub(crate) struct Layout {
    nvars: usize,
    order: usize,
    exps: Vec<u8>,
    degrees: Vec<usize>,
    lookup: HashMap<Box<[u8]>, usize>,
    conv: Vec<(u32, u32)>,
    conv_start: Vec<usize>,
}

impl Layout {
    fn build(nvars: usize, order: usize) -> Self {
        let mut exps = Vec::new();
        let mut degrees = Vec::new();
        let mut scratch = vec![0u8; nvars];
        for d in 0..=order {
            push_degree(&mut scratch, 0, d, &mut exps, &mut degrees);
        }
        let count = degrees.len();
        let mut lookup = HashMap::with_capacity(count);
        for k in 0..count {
            lookup.insert(exps[k * nvars..(k + 1) * nvars].into(), k);
        }

        let mut conv = Vec::new();
        let mut conv_start = Vec::with_capacity(count + 1);
        let mut alpha = vec![0u8; nvars];
        let mut beta = vec![0u8; nvars];
        for k in 0..count {
            conv_start.push(conv.len());
            let gamma = &exps[k * nvars..(k + 1) * nvars];
            alpha.iter_mut().for_each(|a| *a = 0);
            loop {
                for v in 0..nvars {
                    beta[v] = gamma[v] - alpha[v];
                }
                conv.push((lookup[&alpha[..]] as u32, lookup[&beta[..]] as u32));
                // odometer over alpha <= gamma, last variable fastest
                let mut v = nvars;
                loop {
                    if v == 0 {
                        break;
                    }
                    v -= 1;
                    if alpha[v] < gamma[v] {
                        alpha[v] += 1;
                        break;
                    }
                    alpha[v] = 0;
                    if v == 0 {
                        v = usize::MAX;
                        break;
                    }
                }
                if v == usize::MAX || (alpha.iter().all(|&a| a == 0)) {
                    break;
                }
            }
        }
        conv_start.push(conv.len());

        Self {
            nvars,
            order,
            exps,
            degrees,
            lookup,
            conv,
            conv_start,
        }
    }

    #[inline]
    fn len(&self) -> usize {
        self.degrees.len()
    }

    #[inline]
    fn exps_of(&self, k: usize) -> &[u8] {
        &self.exps[k * self.nvars..(k + 1) * self.nvars]
    }

    #[inline]
    fn index_of(&self, exps: &[u8]) -> Option<usize> {
        self.lookup.get(exps).copied()
    }
}

fn push_degree(scratch: &mut [u8], pos: usize, remaining: usize, exps: &mut Vec<u8>, degrees: &mut Vec<usize>) {
    let n = scratch.len();
    if pos + 1 == n {
        scratch[pos] = remaining as u8;
        exps.extend_from_slice(scratch);
        degrees.push(scratch.iter().map(|&e| e as usize).sum());
        return;
    }
    for e in (0..=remaining).rev() {
        scratch[pos] = e as u8;
        push_degree(scratch, pos + 1, remaining - e, exps, degrees);
    }
    scratch[pos] = 0;
}

pub(crate) fn layout(nvars: usize, order: usize) -> Arc<Layout> {
    type Cache = Mutex<HashMap<(usize, usize), Arc<Layout>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("layout cache poisoned");
    guard
        .entry((nvars, order))
        .or_insert_with(|| Arc::new(Layout::build(nvars, order)))
        .clone()
}

/// Orders of a mixed partial derivative `∂^α ∂̄^β`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndexPair {
    pub hol: Vec<u8>,
    pub antihol: Vec<u8>,
}

impl MultiIndexPair {
    pub fn new(hol: Vec<u8>, antihol: Vec<u8>) -> Self {
        assert_eq!(
            hol.len(),
            antihol.len(),
            "holomorphic and antiholomorphic parts differ in length"
        );
        Self { hol, antihol }
    }

    pub fn zero(n: usize) -> Self {
        Self::new(vec![0; n], vec![0; n])
    }

    /// `∂_i ∂_j̄`.
    pub fn mixed(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zero(n);
        m.hol[i] += 1;
        m.antihol[j] += 1;
        m
    }

    /// `∂_i`.
    pub fn hol(n: usize, i: usize) -> Self {
        let mut m = Self::zero(n);
        m.hol[i] += 1;
        m
    }

    /// `∂_j̄`.
    pub fn antihol(n: usize, j: usize) -> Self {
        let mut m = Self::zero(n);
        m.antihol[j] += 1;
        m
    }

    pub fn dim(&self) -> usize {
        self.hol.len()
    }

    pub fn total_degree(&self) -> usize {
        self.hol.iter().chain(&self.antihol).map(|&e| e as usize).sum()
    }

    /// Exponents over the 2n formal variables `(z, z̄)`.
    pub fn flat(&self) -> Vec<u8> {
        self.hol.iter().chain(&self.antihol).copied().collect()
    }

    /// Swaps the holomorphic and antiholomorphic orders.
    pub fn swapped(&self) -> Self {
        Self::new(self.antihol.clone(), self.hol.clone())
    }

    /// All pairs in `n` complex variables with total degree `<= order`.
    pub fn all(n: usize, order: usize) -> Vec<Self> {
        let lay = layout(2 * n, order);
        (0..lay.len())
            .map(|k| {
                let e = lay.exps_of(k);
                Self::new(e[..n].to_vec(), e[n..].to_vec())
            })
            .collect()
    }
}

fn factorial_product<T: Real>(exps: &[u8]) -> T {
    let mut acc = T::one();
    for &e in exps {
        for k in 2..=e as u32 {
            acc *= T::lit(k as f64);
        }
    }
    acc
}

/// Truncated Taylor series in `nvars` variables at a base point.
#[derive(Clone)]
pub struct Jet<T> {
    layout: Arc<Layout>,
    base: Arc<[Complex<T>]>,
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> fmt::Debug for Jet<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("nvars", &self.layout.nvars)
            .field("order", &self.layout.order)
            .field("value", &self.coeffs[0])
            .finish()
    }
}

impl<T: Real> PartialEq for Jet<T> {
    fn eq(&self, other: &Self) -> bool {
        self.same_frame(other) && self.coeffs == other.coeffs
    }
}

impl<T: Real> Jet<T> {
    fn with_coeffs(&self, coeffs: Vec<Complex<T>>) -> Self {
        Self {
            layout: self.layout.clone(),
            base: self.base.clone(),
            coeffs,
        }
    }

    /// Constant function at `base` (values of the formal variables).
    pub fn constant(base: Arc<[Complex<T>]>, order: usize, c: Complex<T>) -> Self {
        assert!(order <= MAX_ORDER, "jet order {order} above {MAX_ORDER}");
        let layout = layout(base.len(), order);
        let mut coeffs = vec![Complex::zero(); layout.len()];
        coeffs[0] = c;
        Self { layout, base, coeffs }
    }

    /// The coordinate function of variable `var`.
    pub fn variable(base: Arc<[Complex<T>]>, order: usize, var: usize) -> Self {
        assert!(var < base.len(), "variable index out of range");
        let mut jet = Self::constant(base.clone(), order, base[var]);
        if order >= 1 {
            let mut e = vec![0u8; base.len()];
            e[var] = 1;
            let k = jet.layout.index_of(&e).expect("first-order index present");
            jet.coeffs[k] = Complex::one();
        }
        jet
    }

    /// Coordinate jets `z¹…zⁿ, z̄¹…z̄ⁿ` at `point`.
    pub fn seed(point: &Point<T>, order: usize) -> Vec<Self> {
        let base: Arc<[Complex<T>]> = point.slice_values().into();
        (0..base.len())
            .map(|v| Self::variable(base.clone(), order, v))
            .collect()
    }

    /// Jet of the identity in one real variable at `x`.
    pub fn univariate(x: T, order: usize) -> Self {
        Self::variable(vec![Complex::new(x, T::zero())].into(), order, 0)
    }

    /// A constant sharing this jet's base and order.
    pub fn constant_like(&self, c: Complex<T>) -> Self {
        let mut coeffs = vec![Complex::zero(); self.coeffs.len()];
        coeffs[0] = c;
        self.with_coeffs(coeffs)
    }

    pub fn zero_like(&self) -> Self {
        self.with_coeffs(vec![Complex::zero(); self.coeffs.len()])
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.layout.order
    }

    #[inline]
    pub fn nvars(&self) -> usize {
        self.layout.nvars
    }

    #[inline]
    pub fn base(&self) -> &[Complex<T>] {
        &self.base
    }

    #[inline]
    pub fn value(&self) -> Complex<T> {
        self.coeffs[0]
    }

    /// Number of stored coefficients.
    #[inline]
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    /// Iterates over `(exponents, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (&[u8], Complex<T>)> + '_ {
        (0..self.coeffs.len()).map(move |k| (self.layout.exps_of(k), self.coeffs[k]))
    }

    /// Taylor coefficient for the given exponent vector, `None` if above the order.
    pub fn coeff(&self, exps: &[u8]) -> Option<Complex<T>> {
        self.layout.index_of(exps).map(|k| self.coeffs[k])
    }

    /// The actual mixed partial `∂^α f` at the base point (`α! · coeff`).
    pub fn partial(&self, exps: &[u8]) -> Result<Complex<T>> {
        if exps.len() != self.nvars() {
            return Err(Error::InvalidParams(format!(
                "multi-index has {} entries, jet has {} variables",
                exps.len(),
                self.nvars()
            )));
        }
        let needed: usize = exps.iter().map(|&e| e as usize).sum();
        match self.layout.index_of(exps) {
            Some(k) => Ok(self.coeffs[k] * factorial_product::<T>(exps)),
            None => Err(Error::OrderExceeded {
                needed,
                available: self.order(),
            }),
        }
    }

    /// `∂^α ∂̄^β f` at the base point for a jet over `(z, z̄)`.
    pub fn derivative(&self, idx: &MultiIndexPair) -> Result<Complex<T>> {
        self.partial(&idx.flat())
    }

    /// Jet of `∂f/∂x_var`, one order lower.
    pub fn differentiate(&self, var: usize) -> Result<Self> {
        let order = self.order();
        if order == 0 {
            return Err(Error::OrderExceeded {
                needed: 1,
                available: 0,
            });
        }
        let lower = layout(self.nvars(), order - 1);
        let mut shifted = vec![0u8; self.nvars()];
        let coeffs = (0..lower.len())
            .map(|k| {
                shifted.copy_from_slice(lower.exps_of(k));
                shifted[var] += 1;
                let src = self.layout.index_of(&shifted).expect("shifted index within order");
                self.coeffs[src] * T::lit(shifted[var] as f64)
            })
            .collect();
        Ok(Self {
            layout: lower,
            base: self.base.clone(),
            coeffs,
        })
    }

    /// Applies `differentiate` for every variable listed in `vars`.
    pub fn differentiate_many(&self, vars: &[usize]) -> Result<Self> {
        let mut jet = self.clone();
        for &v in vars {
            jet = jet.differentiate(v)?;
        }
        Ok(jet)
    }

    /// Drops every coefficient above `order`.
    pub fn truncate(&self, order: usize) -> Self {
        if order >= self.order() {
            return self.clone();
        }
        let lower = layout(self.nvars(), order);
        Self {
            coeffs: self.coeffs[..lower.len()].to_vec(),
            layout: lower,
            base: self.base.clone(),
        }
    }

    /// Complex conjugate function on the real slice: swaps `z ↔ z̄` slots and
    /// conjugates every coefficient.
    pub fn conjugate(&self) -> Self {
        let nv = self.nvars();
        assert!(nv.is_multiple_of(2), "conjugation needs paired (z, z̄) variables");
        let n = nv / 2;
        let mut swapped = vec![0u8; nv];
        let mut coeffs = vec![Complex::zero(); self.coeffs.len()];
        for k in 0..self.coeffs.len() {
            let e = self.layout.exps_of(k);
            swapped[..n].copy_from_slice(&e[n..]);
            swapped[n..].copy_from_slice(&e[..n]);
            let dst = self.layout.index_of(&swapped).expect("swap preserves degree");
            coeffs[dst] = self.coeffs[k].conj();
        }
        self.with_coeffs(coeffs)
    }

    /// Largest violation of `coeff(α,β) = conj(coeff(β,α))`.
    pub fn hermitian_defect(&self) -> T {
        let other = self.conjugate();
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max)
    }

    fn same_frame(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.layout, &other.layout)
            || self.layout.order == other.layout.order && self.layout.nvars == other.layout.nvars)
            && (Arc::ptr_eq(&self.base, &other.base) || self.base[..] == other.base[..])
    }

    fn check_frame(&self, other: &Self) -> Result<()> {
        if self.same_frame(other) {
            Ok(())
        } else {
            Err(Error::BaseMismatch)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_frame(other)?;
        Ok(self.with_coeffs(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect()))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_frame(other)?;
        Ok(self.with_coeffs(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect()))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_frame(other)?;
        let lay = &self.layout;
        let mut out = vec![Complex::zero(); self.coeffs.len()];
        for (k, slot) in out.iter_mut().enumerate() {
            let mut acc = Complex::zero();
            for &(a, b) in &lay.conv[lay.conv_start[k]..lay.conv_start[k + 1]] {
                acc += self.coeffs[a as usize] * other.coeffs[b as usize];
            }
            *slot = acc;
        }
        Ok(self.with_coeffs(out))
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.check_frame(other)?;
        let inv = other.recip().map_err(|e| match e {
            Error::DegenerateValue(v) => Error::DivisionNearZero(v),
            e => e,
        })?;
        self.try_mul(&inv)
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        self.with_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn scale_real(&self, c: T) -> Self {
        self.with_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn add_scalar(&self, c: Complex<T>) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs[0] += c;
        self.with_coeffs(coeffs)
    }

    /// `Σ_k series[k] · (f − f(base))^k`, truncated at the jet order.
    fn compose(&self, series: &[Complex<T>]) -> Self {
        let order = self.order();
        debug_assert_eq!(series.len(), order + 1);
        let mut h = self.clone();
        h.coeffs[0] = Complex::zero();
        let mut acc = self.constant_like(series[order]);
        for k in (0..order).rev() {
            acc = acc.try_mul(&h).expect("same frame").add_scalar(series[k]);
        }
        acc
    }

    fn check_nonzero(&self) -> Result<Complex<T>> {
        let v = self.value();
        let mag = v.norm();
        if !(mag > T::div_eps(mag)) {
            return Err(Error::DegenerateValue(mag.to_f64_lossy()));
        }
        Ok(v)
    }

    fn check_positive_real(&self) -> Result<Complex<T>> {
        let v = self.check_nonzero()?;
        if v.re <= T::zero() || v.im.abs() > T::real_eps() * v.norm() {
            return Err(Error::BranchViolation(format!("{v}")));
        }
        Ok(v)
    }

    /// `1/f`; fails with `DegenerateValue` when `f(base)` is numerically zero.
    pub fn recip(&self) -> Result<Self> {
        let v = self.check_nonzero()?;
        let inv = Complex::<T>::one() / v;
        let mut series = Vec::with_capacity(self.order() + 1);
        let mut term = inv;
        for _ in 0..=self.order() {
            series.push(term);
            term = -term * inv;
        }
        Ok(self.compose(&series))
    }

    /// Natural logarithm on the positive real axis.
    pub fn ln(&self) -> Result<Self> {
        let v = self.check_positive_real()?;
        let inv = Complex::<T>::one() / v;
        let mut series: Vec<Complex<T>> = vec![v.ln()];
        let mut p = inv;
        for k in 1..=self.order() {
            let sign = if k % 2 == 1 { T::one() } else { -T::one() };
            series.push(p * (sign / T::lit(k as f64)));
            p *= inv;
        }
        Ok(self.compose(&series))
    }

    pub fn exp(&self) -> Result<Self> {
        let e = self.value().exp();
        let mut series = Vec::with_capacity(self.order() + 1);
        let mut fact = T::one();
        for k in 0..=self.order() {
            if k > 1 {
                fact *= T::lit(k as f64);
            }
            series.push(e / fact);
        }
        Ok(self.compose(&series))
    }

    /// Integer power by repeated squaring; negative powers go through `recip`.
    pub fn powi(&self, k: i32) -> Result<Self> {
        if k < 0 {
            return self.recip()?.powi(-k);
        }
        let mut result = self.constant_like(Complex::one());
        let mut base = self.clone();
        let mut e = k as u32;
        while e > 0 {
            if e & 1 == 1 {
                result = result.try_mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.try_mul(&base)?;
            }
        }
        Ok(result)
    }

    /// Real power. Integer exponents use `powi`; other exponents need a
    /// positive real value (principal branch).
    pub fn powf(&self, p: T) -> Result<Self> {
        if p == p.round() && p.abs() <= T::lit(64.0) {
            return self.powi(p.to_i32().expect("small integer exponent"));
        }
        if p < T::zero() {
            self.check_nonzero()?;
        }
        let v = self.check_positive_real()?;
        let inv = Complex::<T>::one() / v;
        let mut series = Vec::with_capacity(self.order() + 1);
        let mut binom = T::one();
        let mut vp = v.powf(p);
        for k in 0..=self.order() {
            if k > 0 {
                binom = binom * (p - T::lit((k - 1) as f64)) / T::lit(k as f64);
                vp *= inv;
            }
            series.push(vp * binom);
        }
        Ok(self.compose(&series))
    }

    pub fn sqrt(&self) -> Result<Self> {
        self.powf(T::lit(0.5))
    }
}

impl<'a, T: Real> Add<&'a Jet<T>> for &'a Jet<T> {
    type Output = Jet<T>;
    fn add(self, rhs: &'a Jet<T>) -> Jet<T> {
        self.try_add(rhs).expect("jet operands share base and order")
    }
}

impl<'a, T: Real> Sub<&'a Jet<T>> for &'a Jet<T> {
    type Output = Jet<T>;
    fn sub(self, rhs: &'a Jet<T>) -> Jet<T> {
        self.try_sub(rhs).expect("jet operands share base and order")
    }
}

impl<'a, T: Real> Mul<&'a Jet<T>> for &'a Jet<T> {
    type Output = Jet<T>;
    fn mul(self, rhs: &'a Jet<T>) -> Jet<T> {
        self.try_mul(rhs).expect("jet operands share base and order")
    }
}

impl<T: Real> Neg for &Jet<T> {
    type Output = Jet<T>;
    fn neg(self) -> Jet<T> {
        self.with_coeffs(self.coeffs.iter().map(|a| -a).collect())
    }
}

impl<T: Real> Neg for Jet<T> {
    type Output = Jet<T>;
    fn neg(self) -> Jet<T> {
        -&self
    }
}

/// Binary and unary arithmetic selectable at runtime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Scale,
}

/// Second operand of [`jet_arith`].
#[derive(Clone, Copy)]
pub enum Operand<'a, T> {
    Jet(&'a Jet<T>),
    Scalar(Complex<T>),
    None,
}

pub fn jet_arith<T: Real>(op: ArithOp, a: &Jet<T>, b: Operand<'_, T>) -> Result<Jet<T>> {
    let lift = |b: Operand<'_, T>| -> Result<Jet<T>> {
        match b {
            Operand::Jet(j) => Ok(j.clone()),
            Operand::Scalar(c) => Ok(a.constant_like(c)),
            Operand::None => Err(Error::InvalidParams("binary operation needs a second operand".into())),
        }
    };
    match op {
        ArithOp::Add => a.try_add(&lift(b)?),
        ArithOp::Sub => a.try_sub(&lift(b)?),
        ArithOp::Mul => a.try_mul(&lift(b)?),
        ArithOp::Div => a.try_div(&lift(b)?),
        ArithOp::Neg => Ok(-a),
        ArithOp::Scale => match b {
            Operand::Scalar(c) => Ok(a.scale(c)),
            _ => Err(Error::InvalidParams("scale needs a scalar operand".into())),
        },
    }
}

/// Elementary functions available for composition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ElemFn<T> {
    Log,
    Exp,
    PowReal(T),
    Sqrt,
}

pub fn jet_elem<T: Real>(f: ElemFn<T>, a: &Jet<T>) -> Result<Jet<T>> {
    match f {
        ElemFn::Log => a.ln(),
        ElemFn::Exp => a.exp(),
        ElemFn::PowReal(p) => a.powf(p),
        ElemFn::Sqrt => a.sqrt(),
    }
}

/// `|z|² = Σ zᵢ z̄ᵢ` over the given coordinate slots of a seed vector.
pub fn norm_sqr_of<T: Real>(vars: &[Jet<T>], slots: impl IntoIterator<Item = usize>) -> Jet<T> {
    let n = vars.len() / 2;
    let mut acc = vars[0].zero_like();
    for i in slots {
        acc = &acc + &(&vars[i] * &vars[n + i]);
    }
    acc
}
