//! Scalar abstraction for the numeric kernels.
//!
//! Everything numeric in this crate is generic over [`Scalar`] so the same
//! code runs in `f32` or `f64`; the crate root exports `f64` aliases, which
//! is what the CLI and the simulators use.

use std::fmt;
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use rand::Rng;
use rand_distr::StandardNormal;

/// Floating-point scalar usable by the matrix kernels, estimators, and
/// policies. `of` panics on unrepresentable constants, which cannot happen
/// for the literals this crate feeds it.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("constant not representable in scalar type")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// One draw from N(0, 1) using the caller's stream.
    fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// One draw from U[0, 1) using the caller's stream.
    fn unit_uniform<R: Rng + ?Sized>(rng: &mut R) -> Self;
}

impl Scalar for f64 {
    fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(StandardNormal)
    }

    fn unit_uniform<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.random()
    }
}

impl Scalar for f32 {
    fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(StandardNormal)
    }

    fn unit_uniform<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.random()
    }
}
