//! Kähler geometry on bounded domains in ℂⁿ, evaluated with truncated Taylor jets.
//!
//! Everything is generic over the real scalar (`f32` or `f64`); the aliases
//! below fix it to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod catalog;
pub mod error;
pub mod field;
pub mod jet;
pub mod kahler;
pub mod linalg;
pub mod oracle;
pub mod point;
pub mod potential;
pub mod sampling;
pub mod scalar;

pub use error::{Error, Result};
pub use kahler::KahlerEngine;
pub use scalar::Real;

pub type C64 = num_complex::Complex<f64>;
pub type Jet64 = jet::Jet<f64>;
pub type Point64 = point::Point<f64>;
pub type CMatrix64 = linalg::CMatrix<f64>;
pub type MetricTensor64 = kahler::MetricTensor<f64>;
pub type CurvatureBundle64 = kahler::CurvatureBundle<f64>;
pub type PolyField64 = field::PolyField<f64>;
pub type Jet32 = jet::Jet<f32>;
pub type Point32 = point::Point<f32>;
