//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::rng::RngState;

/// Floating point type the toolkit can run on (`f32` or `f64`).
///
/// Besides the usual `num-traits` arithmetic this carries the two primitive
/// draws the simulator needs, so that generic code never has to name the
/// concrete distribution types.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// One draw from N(0, 1).
    fn standard_normal(rng: &mut RngState) -> Self;

    /// One draw from the half-open unit interval `[0, 1)`.
    fn unit_uniform(rng: &mut RngState) -> Self;

    /// Converts a literal; panics only if the literal is not representable,
    /// which cannot happen for the finite constants used in this crate.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    fn count(n: u64) -> Self {
        Self::from_u64(n).expect("count representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

macro_rules! impl_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            #[inline]
            fn standard_normal(rng: &mut RngState) -> Self {
                StandardNormal.sample(rng)
            }

            #[inline]
            fn unit_uniform(rng: &mut RngState) -> Self {
                rng.random::<$t>()
            }
        }
    };
}

impl_scalar!(f32);
impl_scalar!(f64);
