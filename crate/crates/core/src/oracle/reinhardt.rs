//! Truncated Bergman kernel of the Reinhardt domain `|z|² + |w|^{2m} < 1` from
//! monomial norms.
//!
//! Monomials are orthogonal on a complete Reinhardt domain, so the kernel on
//! the diagonal is `Σ |z|^{2a}|w|^{2b} / ‖z^a w^b‖²`. The norms are
//!
//! ```text
//! ‖z^a w^b‖² = (2π)² ∫∫_{r² + s^{2m} < 1} r^{2a+1} s^{2b+1} dr ds.
//! ```
//!
//! With `u = r²` and `1 − u = v^m` the region becomes `0 < v < 1`,
//! `0 < s < √v`, and both iterated integrands are polynomial, so Gauss–Legendre
//! converges exactly once the node count passes the degree.

use std::fmt::Write as _;
use std::path::Path;

use gauss_quad::GaussLegendre;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::point::Point;
use crate::scalar::Real;

const TABLE_MAGIC: &str = "# kahlerlab reinhardt-norms v1";
const REL_CHANGE: f64 = 1e-9;
const MAX_NODES: usize = 1024;
/// Tail bound relative to the partial sum above which the kernel is rejected.
pub const TAIL_LIMIT: f64 = 1e-8;

/// `‖z^a w^b‖²` for all `a + b ≤ cap`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialNormTable {
    m: u32,
    cap: usize,
    /// shell-major: all pairs with `a + b = d`, `a` descending, for d = 0..=cap
    norms: Vec<f64>,
}

#[inline]
fn shell_offset(d: usize) -> usize {
    d * (d + 1) / 2
}

impl MonomialNormTable {
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn len(&self) -> usize {
        self.norms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.norms.is_empty()
    }

    pub fn get(&self, a: usize, b: usize) -> Option<f64> {
        let d = a + b;
        (d <= self.cap).then(|| self.norms[shell_offset(d) + b])
    }

    /// `(a, b, ‖z^a w^b‖²)` in table order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..=self.cap).flat_map(move |d| (0..=d).map(move |b| (d - b, b, self.norms[shell_offset(d) + b])))
    }

    /// Versioned text form, one `a b norm` line per entry, 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(32 * self.norms.len() + 64);
        let _ = writeln!(out, "{TABLE_MAGIC}");
        let _ = writeln!(out, "m {}", self.m);
        let _ = writeln!(out, "cap {}", self.cap);
        for (a, b, v) in self.entries() {
            let _ = writeln!(out, "{a} {b} {v:.16e}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |msg: &str| Error::TableFormat(msg.to_string());
        let mut lines = text.lines();
        if lines.next() != Some(TABLE_MAGIC) {
            return Err(bad("missing or unsupported header"));
        }
        let mut header = |key: &str| -> Result<usize> {
            let line = lines.next().ok_or_else(|| bad("truncated header"))?;
            let rest = line
                .strip_prefix(key)
                .and_then(|r| r.strip_prefix(' '))
                .ok_or_else(|| bad(&format!("expected `{key}` line")))?;
            rest.trim().parse().map_err(|_| bad(&format!("bad `{key}` value")))
        };
        let m = header("m")? as u32;
        let cap = header("cap")?;
        if m == 0 {
            return Err(bad("m must be positive"));
        }
        let mut norms = vec![f64::NAN; shell_offset(cap + 1)];
        let mut seen = 0usize;
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(bad(&format!("expected `a b norm`, got `{line}`")));
            }
            let a: usize = parts[0].parse().map_err(|_| bad("bad exponent"))?;
            let b: usize = parts[1].parse().map_err(|_| bad("bad exponent"))?;
            let v: f64 = parts[2].parse().map_err(|_| bad("bad norm"))?;
            if a + b > cap {
                return Err(bad("entry above cap"));
            }
            if !(v > 0.0 && v.is_finite()) {
                return Err(bad("norms must be positive"));
            }
            let slot = &mut norms[shell_offset(a + b) + b];
            if !slot.is_nan() {
                return Err(bad("duplicate entry"));
            }
            *slot = v;
            seen += 1;
        }
        if seen != norms.len() {
            return Err(bad("table incomplete"));
        }
        Ok(Self { m, cap, norms })
    }

    pub fn write_to(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read_from(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

struct Rule {
    nodes: usize,
    /// nodes and weights mapped to [0, 1]
    pairs: Vec<(f64, f64)>,
}

impl Rule {
    fn new(nodes: usize) -> Self {
        let gl = GaussLegendre::new(nodes).expect("at least two nodes");
        let pairs = gl
            .as_node_weight_pairs()
            .iter()
            .map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w))
            .collect();
        Self { nodes, pairs }
    }

    /// `∫₀¹ s^{2b+1} ds` by the rule.
    fn inner(&self, b: usize) -> f64 {
        self.pairs.iter().map(|&(s, w)| w * s.powi(2 * b as i32 + 1)).sum()
    }

    /// `(2π)² · ½ ∫₀¹ (1−v^m)^a · m v^{m−1} · [∫₀^{√v} s^{2b+1} ds] dv`; the inner
    /// integral over `[0, √v]` is the unit-interval rule scaled, `v^{b+1} · inner(b)`.
    fn norm(&self, m: u32, a: usize, b: usize, inner_b: f64) -> f64 {
        let mf = m as f64;
        let outer: f64 = self
            .pairs
            .iter()
            .map(|&(v, w)| {
                let vm = v.powi(m as i32);
                w * (1.0 - vm).powi(a as i32) * mf * v.powi(m as i32 - 1) * v.powi(b as i32 + 1)
            })
            .sum();
        4.0 * std::f64::consts::PI.powi(2) * 0.5 * outer * inner_b
    }
}

/// Builds the norm table by iterated Gauss–Legendre quadrature, doubling the
/// node count from `quadrature_points` until every entry changes by less than
/// `1e-9` relative.
pub fn reinhardt_norms(m: u32, cap: usize, quadrature_points: usize) -> Result<MonomialNormTable> {
    if m == 0 {
        return Err(Error::InvalidParams("m must be at least 1".into()));
    }
    if quadrature_points < 64 {
        return Err(Error::InvalidParams(format!(
            "quadrature_points must be at least 64, got {quadrature_points}"
        )));
    }
    let pairs: Vec<(usize, usize)> = (0..=cap).flat_map(|d| (0..=d).map(move |b| (d - b, b))).collect();
    let limit = MAX_NODES.max(quadrature_points);

    let evaluate = |rule: &Rule| -> Vec<f64> {
        let inner: Vec<f64> = (0..=cap).map(|b| rule.inner(b)).collect();
        pairs.par_iter().map(|&(a, b)| rule.norm(m, a, b, inner[b])).collect()
    };

    let mut nodes = quadrature_points;
    let mut prev = evaluate(&Rule::new(nodes));
    loop {
        let next_nodes = nodes * 2;
        if next_nodes > limit {
            let worst = pairs[0];
            return Err(Error::QuadratureNotConverged {
                a: worst.0,
                b: worst.1,
                nodes,
            });
        }
        let rule = Rule::new(next_nodes);
        debug_assert_eq!(rule.nodes, next_nodes);
        let next = evaluate(&rule);
        let worst = pairs
            .iter()
            .zip(prev.iter().zip(&next))
            .map(|(&ab, (p, q))| (ab, ((q - p) / q).abs()))
            .fold(((0, 0), 0.0f64), |acc, x| if x.1 > acc.1 { x } else { acc });
        if worst.1 < REL_CHANGE {
            return Ok(MonomialNormTable { m, cap, norms: next });
        }
        prev = next;
        nodes = next_nodes;
        if nodes * 2 > limit {
            return Err(Error::QuadratureNotConverged {
                a: worst.0 .0,
                b: worst.0 .1,
                nodes,
            });
        }
    }
}

/// Diagonal kernel value from the truncated series.
///
/// The neglected tail is bounded geometrically from the last three shell sums
/// `S_d = Σ_{a+b=d} |z|^{2a}|w|^{2b}/‖z^a w^b‖²`: with `q` the larger of the
/// last two shell ratios, the tail is at most `S_cap · q/(1−q)`.
pub fn reinhardt_kernel_at<T: Real>(table: &MonomialNormTable, p: &Point<T>) -> Result<f64> {
    if p.dim() != 2 {
        return Err(Error::InvalidParams("Reinhardt kernel lives on C^2".into()));
    }
    let (x, y) = (
        p.coord(0).norm_sqr().to_f64_lossy(),
        p.coord(1).norm_sqr().to_f64_lossy(),
    );
    if !(x + y.powi(table.m as i32) < 1.0) {
        return Err(Error::DomainViolation(format!(
            "{:?} outside the Reinhardt domain",
            p.to_f64_pairs()
        )));
    }
    let cap = table.cap;
    let mut shells = Vec::with_capacity(cap + 1);
    for d in 0..=cap {
        let s: f64 = (0..=d)
            .map(|b| x.powi((d - b) as i32) * y.powi(b as i32) / table.norms[shell_offset(d) + b])
            .sum();
        shells.push(s);
    }
    let sum: f64 = shells.iter().sum();
    if cap >= 2 {
        let ratio = |i: usize| {
            if shells[i - 1] > 0.0 {
                shells[i] / shells[i - 1]
            } else {
                0.0
            }
        };
        let q = ratio(cap).max(ratio(cap - 1));
        let tail = if q >= 1.0 {
            f64::INFINITY
        } else {
            shells[cap] * q / (1.0 - q)
        };
        if tail > TAIL_LIMIT * sum {
            return Err(Error::TailTooLarge { tail, sum });
        }
    }
    Ok(sum)
}
