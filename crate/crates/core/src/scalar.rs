//! Floating-point abstraction for the numeric core.
//!
//! Everything downstream (models, likelihood kernels, the sampler) is generic
//! over [`Scalar`] so the same code runs in `f32` or `f64`. The crate root
//! exports `f64`-backed aliases, which is what the file formats and the CLI
//! use.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{de::DeserializeOwned, Serialize};

/// Scalar type the numeric core is generic over: `f32` or `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + NumAssign
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Complementary error function, accurate to ~1 ulp over the full range.
    fn erfc(self) -> Self;

    /// One standard-normal draw.
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// One draw uniform on [0, 1).
    fn unit_uniform<R: Rng + ?Sized>(rng: &mut R) -> Self;
}

impl Scalar for f64 {
    fn erfc(self) -> Self {
        libm::erfc(self)
    }

    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }

    fn unit_uniform<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.random::<f64>()
    }
}

impl Scalar for f32 {
    fn erfc(self) -> Self {
        libm::erfcf(self)
    }

    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }

    fn unit_uniform<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.random::<f32>()
    }
}

/// Convert an `f64` constant into the working scalar type.
///
/// Panics only if the target type cannot represent any `f64` (never for
/// `f32`/`f64`; overflow saturates to infinity through `as`-style casts
/// inside `FromPrimitive` for these types).
#[inline]
pub fn cast<F: Scalar>(value: f64) -> F {
    F::from_f64(value).expect("f64 constant must convert into the scalar type")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn erfc_matches_known_values() {
        // erfc(0) = 1, erfc(inf) = 0, erfc(-x) = 2 - erfc(x)
        assert_eq!(1.0f64.min(Scalar::erfc(0.0f64)), 1.0);
        assert!((Scalar::erfc(1.0f64) - 0.15729920705028513).abs() < 1e-15);
        let x = 0.7f64;
        assert!((Scalar::erfc(-x) - (2.0 - Scalar::erfc(x))).abs() < 1e-15);
    }

    #[test]
    fn cast_round_trips_f32_and_f64() {
        assert_eq!(cast::<f64>(0.125), 0.125);
        assert_eq!(cast::<f32>(0.125), 0.125f32);
    }
}
