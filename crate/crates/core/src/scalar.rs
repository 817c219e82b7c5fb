//! Floating-point abstraction shared by the numerical routines.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real scalar the centrality code is generic over.
///
/// Implemented for `f32` and `f64`. The associated tolerances are the
/// defaults used when the caller does not pick one; they sit a few orders of
/// magnitude above the type's epsilon so the iterations can actually reach
/// them.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Default successive-iterate tolerance for the Katz fixed point.
    const KATZ_TOL: Self;
    /// Default Rayleigh-quotient tolerance for power iteration.
    const SPECTRAL_TOL: Self;

    /// Lossless for the small counts and literals this crate converts.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }
}

impl Scalar for f32 {
    const KATZ_TOL: Self = 1e-5;
    const SPECTRAL_TOL: Self = 1e-5;
}

impl Scalar for f64 {
    const KATZ_TOL: Self = 1e-10;
    const SPECTRAL_TOL: Self = 1e-8;
}
