//! Small dense complex matrices, plus Gaussian elimination over jets.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::scalar::Real;

/// Row-major n×n complex matrix.
#[derive(Clone, PartialEq)]
pub struct CMatrix<T> {
    n: usize,
    data: Vec<Complex<T>>,
}

impl<T: fmt::Debug> fmt::Debug for CMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<_> = (0..self.n).map(|i| &self.data[i * self.n..(i + 1) * self.n]).collect();
        f.debug_list().entries(rows).finish()
    }
}

impl<T> Index<(usize, usize)> for CMatrix<T> {
    type Output = Complex<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.n + j]
    }
}

impl<T> IndexMut<(usize, usize)> for CMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.n + j]
    }
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex::one();
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex<T>>]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        Self::from_fn(n, |i, j| rows[i][j])
    }

    pub fn diag(values: &[T]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex::new(v, T::zero());
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn to_rows(&self) -> Vec<Vec<Complex<T>>> {
        (0..self.n)
            .map(|i| self.data[i * self.n..(i + 1) * self.n].to_vec())
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn hermitian_part(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.n, |i, j| (self[(i, j)] + self[(j, i)].conj()) * half)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_fn(self.n, |i, j| self[(i, j)] + other[(i, j)])
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::from_fn(self.n, |i, j| self[(i, j)] - other[(i, j)])
    }

    pub fn scale(&self, c: T) -> Self {
        Self::from_fn(self.n, |i, j| self[(i, j)] * c)
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let n = self.n;
        Self::from_fn(n, |i, j| (0..n).map(|k| self[(i, k)] * other[(k, j)]).sum())
    }

    pub fn matvec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|k| self[(i, k)] * v[k]).sum())
            .collect()
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|c| c.norm()).fold(T::zero(), T::max)
    }

    /// Largest entry of `|A − A^H|`.
    pub fn hermitian_defect(&self) -> T {
        self.sub(&self.adjoint()).max_abs()
    }

    fn norm1(&self) -> T {
        (0..self.n)
            .map(|j| (0..self.n).fold(T::zero(), |acc, i| acc + self[(i, j)].norm()))
            .fold(T::zero(), T::max)
    }

    /// Lower-triangular `L` with `A = L L^H`; requires a Hermitian positive
    /// definite input.
    pub fn cholesky(&self) -> Result<Self> {
        let n = self.n;
        let mut l = Self::zeros(n);
        for j in 0..n {
            let mut d = self[(j, j)].re;
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            if !(d > T::zero()) {
                return Err(Error::NotPositiveDefinite);
            }
            let djj = d.sqrt();
            l[(j, j)] = Complex::new(djj, T::zero());
            for i in j + 1..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / djj;
            }
        }
        Ok(l)
    }

    /// All leading principal minors strictly positive.
    pub fn is_positive_definite(&self) -> bool {
        self.cholesky().is_ok()
    }

    /// LU with partial pivoting; returns `(lu, perm, sign)` or `None` when singular.
    fn lu(&self) -> Option<(Self, Vec<usize>, T)> {
        let n = self.n;
        let mut a = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = T::one();
        for k in 0..n {
            let (p, best) =
                (k..n)
                    .map(|i| (i, a[(i, k)].norm()))
                    .fold((k, -T::one()), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best == T::zero() {
                return None;
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = a[(k, k)];
            for i in k + 1..n {
                let f = a[(i, k)] / pivot;
                a[(i, k)] = f;
                for j in k + 1..n {
                    let t = a[(k, j)];
                    a[(i, j)] -= f * t;
                }
            }
        }
        Some((a, perm, sign))
    }

    pub fn det(&self) -> Complex<T> {
        match self.lu() {
            Some((lu, _, sign)) => (0..self.n)
                .map(|i| lu[(i, i)])
                .fold(Complex::new(sign, T::zero()), |a, b| a * b),
            None => Complex::zero(),
        }
    }

    /// Inverse by LU; fails with `IllConditioned` on exact singularity.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.n;
        let (lu, perm, _) = self.lu().ok_or(Error::IllConditioned(f64::INFINITY))?;
        let mut inv = Self::zeros(n);
        for col in 0..n {
            let mut x: Vec<Complex<T>> = (0..n)
                .map(|i| {
                    if perm[i] == col {
                        Complex::one()
                    } else {
                        Complex::zero()
                    }
                })
                .collect();
            for i in 0..n {
                for k in 0..i {
                    let t = lu[(i, k)] * x[k];
                    x[i] -= t;
                }
            }
            for i in (0..n).rev() {
                for k in i + 1..n {
                    let t = lu[(i, k)] * x[k];
                    x[i] -= t;
                }
                x[i] /= lu[(i, i)];
            }
            for i in 0..n {
                inv[(i, col)] = x[i];
            }
        }
        Ok(inv)
    }

    /// 1-norm condition number `‖A‖₁‖A⁻¹‖₁` given a precomputed inverse.
    pub fn condition_with(&self, inverse: &Self) -> T {
        self.norm1() * inverse.norm1()
    }

    /// `v^H A w`.
    pub fn sesquilinear(&self, v: &[Complex<T>], w: &[Complex<T>]) -> Complex<T> {
        let aw = self.matvec(w);
        v.iter().zip(&aw).map(|(a, b)| a.conj() * b).sum()
    }
}

/// Determinant of a matrix of jets by elimination without pivoting.
///
/// Intended for Hermitian positive definite values, where every pivot is
/// positive; a vanishing pivot is reported as `DegenerateValue`.
pub fn jet_det<T: Real>(m: &[Vec<Jet<T>>]) -> Result<Jet<T>> {
    let n = m.len();
    let mut a: Vec<Vec<Jet<T>>> = m.to_vec();
    let mut det = a[0][0].constant_like(Complex::one());
    for k in 0..n {
        let pivot = a[k][k].clone();
        det = det.try_mul(&pivot)?;
        if k + 1 == n {
            break;
        }
        let inv = pivot.recip()?;
        for i in k + 1..n {
            let f = a[i][k].try_mul(&inv)?;
            for j in k + 1..n {
                let t = f.try_mul(&a[k][j])?;
                a[i][j] = a[i][j].try_sub(&t)?;
            }
        }
    }
    Ok(det)
}

/// Inverse of a matrix of jets by Gauss–Jordan without pivoting (same
/// positivity assumption as [`jet_det`]).
pub fn jet_inverse<T: Real>(m: &[Vec<Jet<T>>]) -> Result<Vec<Vec<Jet<T>>>> {
    let n = m.len();
    let zero = m[0][0].zero_like();
    let one = m[0][0].constant_like(Complex::one());
    let mut a: Vec<Vec<Jet<T>>> = m.to_vec();
    let mut inv: Vec<Vec<Jet<T>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { one.clone() } else { zero.clone() })
                .collect()
        })
        .collect();
    for k in 0..n {
        let p = a[k][k].recip()?;
        for j in 0..n {
            a[k][j] = a[k][j].try_mul(&p)?;
            inv[k][j] = inv[k][j].try_mul(&p)?;
        }
        for i in 0..n {
            if i == k {
                continue;
            }
            let f = a[i][k].clone();
            for j in 0..n {
                let t = f.try_mul(&a[k][j])?;
                a[i][j] = a[i][j].try_sub(&t)?;
                let t = f.try_mul(&inv[k][j])?;
                inv[i][j] = inv[i][j].try_sub(&t)?;
            }
        }
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::Point;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn sample() -> CMatrix<f64> {
        CMatrix::from_rows(&[
            vec![c(2.0, 0.0), c(0.5, 0.3), c(0.1, -0.2)],
            vec![c(0.5, -0.3), c(3.0, 0.0), c(-0.4, 0.1)],
            vec![c(0.1, 0.2), c(-0.4, -0.1), c(1.5, 0.0)],
        ])
    }

    #[test]
    fn inverse_roundtrip() {
        let a = sample();
        let inv = a.inverse().unwrap();
        let e = a.matmul(&inv).sub(&CMatrix::identity(3)).max_abs();
        assert!(e < 1e-14);
        assert!(a.condition_with(&inv) >= 1.0);
    }

    #[test]
    fn det_matches_cholesky() {
        let a = sample();
        let l = a.cholesky().unwrap();
        let d: f64 = (0..3).map(|i| l[(i, i)].re.powi(2)).product::<f64>();
        assert!((a.det().re - d).abs() < 1e-13);
        assert!(a.det().im.abs() < 1e-14);
        let llh = l.matmul(&l.adjoint());
        assert!(llh.sub(&a).max_abs() < 1e-14);
    }

    #[test]
    fn indefinite_rejected() {
        let a = CMatrix::<f64>::diag(&[1.0, -1.0]);
        assert_eq!(a.cholesky().unwrap_err(), Error::NotPositiveDefinite);
        assert!((a.det().re + 1.0).abs() < 1e-15);
    }

    #[test]
    fn singular_inverse_fails() {
        let a = CMatrix::<f64>::zeros(2);
        assert!(a.inverse().is_err());
        assert_eq!(a.det(), c(0.0, 0.0));
    }

    #[test]
    fn jet_det_and_inverse_match_values() {
        let p = Point::<f64>::from_pairs(&[(0.1, 0.2), (-0.2, 0.05)]).unwrap();
        let v = Jet::seed(&p, 3);
        let one = v[0].constant_like(c(1.0, 0.0));
        let m = vec![
            vec![&one + &(&v[0] * &v[2]), &v[0] * &v[3]],
            vec![&v[1] * &v[2], (&one + &(&v[1] * &v[3])).scale_real(2.0)],
        ];
        let vals = CMatrix::from_fn(2, |i, j| m[i][j].value());
        let d = jet_det(&m).unwrap();
        assert!((d.value() - vals.det()).norm() < 1e-14);
        let inv = jet_inverse(&m).unwrap();
        let vinv = vals.inverse().unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((inv[i][j].value() - vinv[(i, j)]).norm() < 1e-14);
            }
        }
        // the product of jet matrices is the identity jet
        for i in 0..2 {
            for j in 0..2 {
                let s = &(&m[i][0] * &inv[0][j]) + &(&m[i][1] * &inv[1][j]);
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((s.value() - c(target, 0.0)).norm() < 1e-14);
                assert!(s.coeffs()[1..].iter().all(|x| x.norm() < 1e-13));
            }
        }
    }
}
