use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar the geometry is generic over (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + NumAssign + Default + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Division guard: values with `|v| <= div_eps(|v|)` are treated as zero.
    #[inline]
    fn div_eps(magnitude: Self) -> Self {
        let floor = Self::lit(1e-14).max(Self::lit(10.0) * Self::epsilon());
        floor * (Self::one() + magnitude)
    }

    /// Relative tolerance on the imaginary part of a value that must be positive real.
    #[inline]
    fn real_eps() -> Self {
        Self::lit(1e-10).max(Self::lit(1e3) * Self::epsilon())
    }
}

impl Real for f32 {}
impl Real for f64 {}
