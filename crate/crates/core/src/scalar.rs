//! Numeric traits the crate is generic over.
//!
//! Scores, visibilities and metric values use a [`Real`] (`f32` or `f64`);
//! flow capacities use a signed integer [`Capacity`] (`i32` or `i64`).

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, PrimInt, Signed, ToPrimitive};
use serde::Serialize;

/// Floating point scalar used for scores and metrics.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Serialize + Send + Sync + 'static
{
    /// Lossless-enough conversion from `f64`, used for parsing and constants.
    fn of(value: f64) -> Self {
        Self::from_f64(value).expect("f64 converts into every Real")
    }

    /// Conversion from a count.
    fn of_usize(value: usize) -> Self {
        Self::from_usize(value).expect("usize converts into every Real")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Integer capacity used on flow network arcs.
pub trait Capacity: PrimInt + Signed + Debug + Display + Default + Sum + Send + Sync + 'static {
    fn of_i64(value: i64) -> Option<Self> {
        Self::from(value)
    }
}

impl Capacity for i32 {}
impl Capacity for i64 {}

/// Greatest common divisor of two non-negative integers; `gcd(0, 0) = 0`.
pub fn gcd<C: Capacity>(a: C, b: C) -> C {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != C::zero() {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Ceiling division for positive divisors and non-negative numerators.
pub fn div_ceil<C: Capacity>(num: C, den: C) -> C {
    debug_assert!(den > C::zero());
    let q = num / den;
    if q * den == num {
        q
    } else {
        q + C::one()
    }
}
