//! Scalar abstraction for the statistics kernels: f32 or f64.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use rand::distributions::uniform::SampleUniform;

/// Floating-point scalar the analytics kernels are written against.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + SampleUniform
    + Sum
    + Display
    + Debug
    + Send
    + Sync
    + 'static
{
    fn from_usize_(n: usize) -> Self {
        Self::from_usize(n).expect("usize fits in scalar")
    }

    fn from_f64_(x: f64) -> Self {
        Self::from_f64(x).expect("f64 fits in scalar")
    }

    fn to_f64_(self) -> f64 {
        self.to_f64().expect("scalar fits in f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Standard normal CDF (Abramowitz-Stegun 7.1.26 via erf, |err| < 1.5e-7).
pub fn std_normal_cdf<R: Real>(x: R) -> R {
    R::from_f64_(0.5 * (1.0 + erf(x.to_f64_() / std::f64::consts::SQRT_2)))
}

/// Standard normal survival function, 1 - CDF.
pub fn std_normal_sf<R: Real>(x: R) -> R {
    R::from_f64_(0.5 * (1.0 - erf(x.to_f64_() / std::f64::consts::SQRT_2)))
}

/// Standard normal density.
pub fn std_normal_pdf<R: Real>(x: R) -> R {
    let x = x.to_f64_();
    R::from_f64_((-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt())
}

fn erf(x: f64) -> f64 {
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    let x = x.abs();
    let t = 1.0 / (1.0 + 0.3275911 * x);
    let y = 1.0
        - (((((1.061405429 * t - 1.453152027) * t) + 1.421413741) * t - 0.284496736) * t
            + 0.254829592)
            * t
            * (-x * x).exp();
    sign * y
}
