//! Scalar abstraction: every numerical routine in the crate is generic over
//! the real floating-point type through [`Real`]. Concrete `f64` aliases for
//! the main types live at the crate root.

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 literal converts to Real")
    }

    /// Uniform value in `[0, 1)` from the top 53 bits of a `u64`.
    fn from_unit_u64(u: u64) -> Self {
        Self::lit((u >> 11) as f64 * (1.0 / (1u64 << 53) as f64))
    }

    fn two_pi() -> Self {
        Self::PI() + Self::PI()
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over the crate's scalar.
pub type C<F> = Complex<F>;

pub fn c<F: Real>(re: F, im: F) -> C<F> {
    Complex::new(re, im)
}

/// `e^{i·angle}` for a real angle.
pub fn cis<F: Real>(angle: F) -> C<F> {
    Complex::new(angle.cos(), angle.sin())
}

/// Reduce an angle to the torus representative in `(−π, π]`.
pub fn wrap_angle<F: Real>(x: F) -> F {
    let tau = F::two_pi();
    let mut y = x - tau * (x / tau).floor();
    if y > F::PI() {
        y -= tau;
    }
    // Guard against -π from rounding of the subtraction above.
    if y <= -F::PI() {
        y += tau;
    }
    y
}
