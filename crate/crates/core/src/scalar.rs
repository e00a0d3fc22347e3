//! Scalar abstraction: every numeric routine in this crate is generic over a
//! floating-point type implementing [`Scalar`].

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, NumAssign, NumCast};

/// Floating-point scalar the solver stack is generic over.
///
/// The associated tolerance constants are per-type: the `f64` values are the
/// contract this crate is validated against; the `f32` values are scaled up
/// to sit the same number of decades above that type's epsilon.
pub trait Scalar:
    Float + FloatConst + NumAssign + Sum<Self> + Debug + Display + Send + Sync + 'static
{
    /// Cast from an `f64` literal. Panics only if the target type cannot
    /// represent any value near `v` (never happens for f32/f64 literals).
    fn from_f64(v: f64) -> Self {
        <Self as NumCast>::from(v).expect("literal not representable in scalar type")
    }

    /// Relative floor under which a closed-form denominator counts as a
    /// degenerate point and the caller should fall back to the linear solver.
    fn degenerate_floor() -> Self;

    /// Largest tolerated |T_a + R_a + T_b + R_b - 1| before a conservation
    /// violation is reported.
    fn conservation_tol() -> Self;

    /// Pivot floor, relative to the matrix infinity norm, below which the
    /// elimination declares the system singular.
    fn pivot_floor() -> Self;

    /// Below this, a contrast-ratio denominator T + T~ counts as 0/0.
    fn contrast_zero() -> Self;
}

impl Scalar for f64 {
    fn degenerate_floor() -> Self {
        1e-12
    }
    fn conservation_tol() -> Self {
        1e-8
    }
    fn pivot_floor() -> Self {
        1e-14
    }
    fn contrast_zero() -> Self {
        1e-30
    }
}

impl Scalar for f32 {
    fn degenerate_floor() -> Self {
        1e-4
    }
    fn conservation_tol() -> Self {
        1e-3
    }
    fn pivot_floor() -> Self {
        1e-6
    }
    fn contrast_zero() -> Self {
        1e-15
    }
}
