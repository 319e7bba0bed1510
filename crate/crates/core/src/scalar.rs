//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type the geometry, covers and routing are computed in.
///
/// Implemented for `f32` and `f64`. Tolerances that matter for the stretch and
/// progress checks are stated relative to `S::epsilon()`, so `f32` works but
/// experiments at large `R / r_0` should use `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal. Never fails for finite input.
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("finite literal")
    }

    fn from_count(value: usize) -> Self {
        Self::from_usize(value).expect("count fits in scalar")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }

    /// Relative slack used for inclusive geometric comparisons.
    fn slack() -> Self {
        Self::epsilon() * Self::lit(64.0)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
