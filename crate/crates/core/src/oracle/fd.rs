//! Central finite differences in real coordinates, assembled into Wirtinger
//! derivatives.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::jet::MultiIndexPair;
use crate::point::Point;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdConfig {
    /// Base step `h`, in `[1e-6, 1e-1]`.
    pub step: f64,
    pub richardson: bool,
    /// Number of Richardson halvings when `richardson` is on.
    pub levels: usize,
    pub max_order: usize,
}

impl Default for FdConfig {
    fn default() -> Self {
        Self {
            step: 1e-3,
            richardson: true,
            levels: 1,
            max_order: 4,
        }
    }
}

impl FdConfig {
    /// Fixed step schedule by total derivative order: `h = 1e-3` with one
    /// Richardson level, `h = 3e-3` for order 4.
    pub fn for_order(order: usize) -> Self {
        match order {
            0..=3 => Self::default(),
            _ => Self {
                step: 3e-3,
                ..Self::default()
            },
        }
    }

    /// Step proportional to a local length scale, for points whose distance to
    /// a singularity is known (for catalog domains, the defining-function slack).
    ///
    /// Near the boundary a fixed step is too coarse for the truncation error
    /// and far inside it is too fine for roundoff. The factors below were
    /// tuned on the catalog potentials; the step is clamped to `[1e-6, 1e-1]`.
    pub fn for_order_scaled(order: usize, length: f64) -> Self {
        let (factor, levels) = match order {
            0..=2 => (1e-2, 2),
            3 => (4e-2, 3),
            _ => (2e-2, 2),
        };
        Self {
            step: (factor * length).clamp(1e-6, 1e-1),
            levels,
            ..Self::default()
        }
    }

    fn validate(&self, order: usize) -> Result<()> {
        if !(1e-6..=1e-1).contains(&self.step) {
            return Err(Error::InvalidParams(format!(
                "fd step {} outside [1e-6, 1e-1]",
                self.step
            )));
        }
        if self.max_order > 4 || order > self.max_order {
            return Err(Error::InvalidParams(format!(
                "fd derivative of order {order} exceeds max_order {}",
                self.max_order.min(4)
            )));
        }
        Ok(())
    }
}

/// Offsets (in units of h) and weights of the 1-D central stencil for a
/// derivative of the given order; second-order accurate.
fn stencil(order: usize) -> &'static [(i32, f64)] {
    match order {
        0 => &[(0, 1.0)],
        1 => &[(-1, -0.5), (1, 0.5)],
        2 => &[(-1, 1.0), (0, -2.0), (1, 1.0)],
        3 => &[(-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)],
        4 => &[(-2, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)],
        _ => unreachable!("stencil order above 4"),
    }
}

/// `(∂_x − i∂_y)^a (∂_x + i∂_y)^b` as `Σ c_p ∂_x^p ∂_y^{a+b−p}`, without the `2^{−a−b}` factor.
fn wirtinger_expansion<T: Real>(a: usize, b: usize) -> Vec<Complex<T>> {
    let mut poly = vec![Complex::new(T::one(), T::zero())];
    let mul = |poly: &mut Vec<Complex<T>>, y: Complex<T>| {
        // multiply by (X + y·Y) where the index counts powers of X
        let mut out = vec![Complex::zero(); poly.len() + 1];
        for (p, c) in poly.iter().enumerate() {
            out[p + 1] += c;
            out[p] += c * y;
        }
        *poly = out;
    };
    for _ in 0..a {
        mul(&mut poly, Complex::new(T::zero(), -T::one()));
    }
    for _ in 0..b {
        mul(&mut poly, Complex::new(T::zero(), T::one()));
    }
    poly
}

/// Real mixed partial `Π ∂_{x_k}^{o_k}` over 2n real coordinates
/// `(x₁, y₁, …, xₙ, yₙ)`, central differences with step `h`.
fn real_partial<T: Real>(
    f: &dyn Fn(&Point<T>) -> Result<Complex<T>>,
    p: &Point<T>,
    orders: &[usize],
    h: T,
) -> Result<Complex<T>> {
    let dirs: Vec<usize> = (0..orders.len()).filter(|&k| orders[k] > 0).collect();
    let stencils: Vec<&[(i32, f64)]> = dirs.iter().map(|&k| stencil(orders[k])).collect();
    let total: usize = orders.iter().sum();
    let mut counters = vec![0usize; dirs.len()];
    let mut acc = Complex::<T>::zero();
    let base = p.coords();
    loop {
        let mut coords = base.to_vec();
        let mut weight = T::one();
        for (d, &k) in dirs.iter().enumerate() {
            let (off, w) = stencils[d][counters[d]];
            weight *= T::lit(w);
            let delta = T::lit(off as f64) * h;
            if k % 2 == 0 {
                coords[k / 2].re += delta;
            } else {
                coords[k / 2].im += delta;
            }
        }
        if weight != T::zero() {
            let q = Point::new(coords).map_err(|_| Error::StencilOutsideDomain)?;
            let v = f(&q).map_err(|_| Error::StencilOutsideDomain)?;
            acc += v * weight;
        }
        // odometer
        let mut d = 0;
        loop {
            if d == dirs.len() {
                return Ok(acc / h.powi(total as i32));
            }
            counters[d] += 1;
            if counters[d] < stencils[d].len() {
                break;
            }
            counters[d] = 0;
            d += 1;
        }
    }
}

/// Wirtinger derivative `∂^α ∂̄^β f(p)` by finite differences.
///
/// Every evaluation failure inside the stencil is reported as
/// `StencilOutsideDomain`.
pub fn fd_partial<T: Real>(
    f: &dyn Fn(&Point<T>) -> Result<Complex<T>>,
    p: &Point<T>,
    idx: &MultiIndexPair,
    cfg: &FdConfig,
) -> Result<Complex<T>> {
    let n = p.dim();
    if idx.dim() != n {
        return Err(Error::InvalidParams("multi-index dimension differs from point".into()));
    }
    let order = idx.total_degree();
    cfg.validate(order)?;

    // expand each complex variable into real partial orders
    let per_var: Vec<Vec<Complex<T>>> = (0..n)
        .map(|j| wirtinger_expansion(idx.hol[j] as usize, idx.antihol[j] as usize))
        .collect();
    let scale = T::lit(0.5).powi(order as i32);

    let estimate = |h: T| -> Result<Complex<T>> {
        let mut total = Complex::<T>::zero();
        let mut choice = vec![0usize; n];
        loop {
            let mut coeff = Complex::new(scale, T::zero());
            let mut orders = vec![0usize; 2 * n];
            for j in 0..n {
                let deg = idx.hol[j] as usize + idx.antihol[j] as usize;
                coeff *= per_var[j][choice[j]];
                orders[2 * j] = choice[j];
                orders[2 * j + 1] = deg - choice[j];
            }
            if coeff != Complex::zero() {
                total += coeff * real_partial(f, p, &orders, h)?;
            }
            let mut j = 0;
            loop {
                if j == n {
                    return Ok(total);
                }
                choice[j] += 1;
                if choice[j] < per_var[j].len() {
                    break;
                }
                choice[j] = 0;
                j += 1;
            }
        }
    };

    let value = if cfg.richardson && order > 0 {
        let levels = cfg.levels.max(1);
        let mut table: Vec<Complex<T>> = Vec::with_capacity(levels + 1);
        for i in 0..=levels {
            let mut row = estimate(T::lit(cfg.step / 2f64.powi(i as i32)))?;
            // Neville-style update of the previous diagonal
            let mut prev_row = table.clone();
            table.clear();
            table.push(row);
            for (k, prev) in prev_row.drain(..).enumerate() {
                let factor = T::lit(4f64.powi(k as i32 + 1));
                row = (row * factor - prev) / (factor - T::one());
                table.push(row);
            }
        }
        *table.last().expect("non-empty table")
    } else {
        estimate(T::lit(cfg.step))?
    };
    Ok(value)
}
