//! Outcome distributions for the two arms.
//!
//! Two families are supported: the Gaussian location-shift family (fixed
//! variance, free mean) and the Bernoulli family. Bernoulli arms do not belong
//! to a fixed-variance class because their variance is tied to their mean;
//! comparing a Bernoulli instance against bounds stated for a fixed variance
//! vector is a cross-class comparison and should be read as such.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngState;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Gaussian,
    Bernoulli,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Gaussian => f.write_str("gaussian"),
            Family::Bernoulli => f.write_str("bernoulli"),
        }
    }
}

/// Arm label. Arms are numbered 1 and 2 everywhere user-facing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Arm {
    One,
    Two,
}

impl Arm {
    pub const BOTH: [Arm; 2] = [Arm::One, Arm::Two];

    /// Zero-based slot for per-arm arrays.
    #[inline]
    pub fn index(self) -> usize {
        match self {
            Arm::One => 0,
            Arm::Two => 1,
        }
    }

    #[inline]
    pub fn other(self) -> Arm {
        match self {
            Arm::One => Arm::Two,
            Arm::Two => Arm::One,
        }
    }

    pub fn number(self) -> u8 {
        self.index() as u8 + 1
    }

    pub fn from_number(n: u8) -> Option<Arm> {
        match n {
            1 => Some(Arm::One),
            2 => Some(Arm::Two),
            _ => None,
        }
    }
}

impl fmt::Display for Arm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

impl Serialize for Arm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u8(self.number())
    }
}

impl<'de> Deserialize<'de> for Arm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let n = u8::deserialize(d)?;
        Arm::from_number(n).ok_or_else(|| serde::de::Error::custom(format!("arm must be 1 or 2, got {n}")))
    }
}

/// Outcome distribution of one arm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Marginal<F> {
    family: Family,
    mean: F,
    variance: F,
    std_dev: F,
}

impl<F: Scalar> Marginal<F> {
    /// Gaussian with the given mean and strictly positive variance.
    pub fn gaussian(mean: F, variance: F) -> Result<Self> {
        if !mean.is_finite() {
            return Err(Error::invalid("mean", "must be finite"));
        }
        if !(variance > F::zero()) || !variance.is_finite() {
            return Err(Error::invalid("variance", format!("must be finite and > 0, got {variance}")));
        }
        Ok(Self {
            family: Family::Gaussian,
            mean,
            variance,
            std_dev: variance.sqrt(),
        })
    }

    /// Bernoulli with success probability strictly inside (0, 1).
    pub fn bernoulli(p: F) -> Result<Self> {
        if !(p > F::zero() && p < F::one()) {
            return Err(Error::invalid("mean", format!("Bernoulli mean must lie in (0, 1), got {p}")));
        }
        let variance = p * (F::one() - p);
        Ok(Self {
            family: Family::Bernoulli,
            mean: p,
            variance,
            std_dev: variance.sqrt(),
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn mean(&self) -> F {
        self.mean
    }

    pub fn variance(&self) -> F {
        self.variance
    }

    pub fn std_dev(&self) -> F {
        self.std_dev
    }

    /// Same family and variance, different mean. For Bernoulli the variance
    /// follows the new mean.
    pub fn with_mean(&self, mean: F) -> Result<Self> {
        match self.family {
            Family::Gaussian => Self::gaussian(mean, self.variance),
            Family::Bernoulli => Self::bernoulli(mean),
        }
    }

    /// One outcome draw.
    #[inline]
    pub fn sample(&self, rng: &mut RngState) -> F {
        match self.family {
            Family::Gaussian => self.mean + self.std_dev * F::standard_normal(rng),
            Family::Bernoulli => {
                if F::unit_uniform(rng) < self.mean {
                    F::one()
                } else {
                    F::zero()
                }
            }
        }
    }

    /// Fisher information of the mean parameter.
    ///
    /// Gaussian: `1/σ²`. Bernoulli: `1/(p(1-p))`, which is again the inverse
    /// of the (mean-dependent) variance.
    pub fn fisher_information(&self) -> F {
        self.variance.recip()
    }
}

/// Closed-form KL divergence `KL(p ‖ q)` between two marginals of the same family.
pub fn kl_divergence<F: Scalar>(p: &Marginal<F>, q: &Marginal<F>) -> Result<F> {
    if p.family != q.family {
        return Err(Error::FamilyMismatch {
            left: p.family,
            right: q.family,
        });
    }
    let kl = match p.family {
        Family::Gaussian => {
            let d = q.mean - p.mean;
            if p.variance == q.variance {
                d * d / (F::lit(2.0) * p.variance)
            } else {
                let half = F::lit(0.5);
                -(half * (p.variance / q.variance).ln())
                    + (p.variance + d * d) / (F::lit(2.0) * q.variance)
                    - half
            }
        }
        Family::Bernoulli => {
            let (a, b) = (p.mean, q.mean);
            let one = F::one();
            // a ln(a/b) + (1-a) ln((1-a)/(1-b)) via ln_1p, which keeps the
            // small-gap regime accurate.
            -(a * ((b - a) / a).ln_1p()) - (one - a) * ((a - b) / (one - a)).ln_1p()
        }
    };
    Ok(kl.max(F::zero()))
}

/// Two-armed bandit model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Instance<F> {
    arms: [Marginal<F>; 2],
}

impl<F: Scalar> Instance<F> {
    pub fn new(arm1: Marginal<F>, arm2: Marginal<F>) -> Self {
        Self { arms: [arm1, arm2] }
    }

    pub fn gaussian(means: [F; 2], variances: [F; 2]) -> Result<Self> {
        Ok(Self::new(
            Marginal::gaussian(means[0], variances[0])?,
            Marginal::gaussian(means[1], variances[1])?,
        ))
    }

    pub fn bernoulli(means: [F; 2]) -> Result<Self> {
        Ok(Self::new(Marginal::bernoulli(means[0])?, Marginal::bernoulli(means[1])?))
    }

    #[inline]
    pub fn arm(&self, arm: Arm) -> &Marginal<F> {
        &self.arms[arm.index()]
    }

    pub fn means(&self) -> [F; 2] {
        [self.arms[0].mean, self.arms[1].mean]
    }

    pub fn std_devs(&self) -> [F; 2] {
        [self.arms[0].std_dev, self.arms[1].std_dev]
    }

    /// Arm with the larger mean; a tie goes to arm 1.
    pub fn best_arm(&self) -> Arm {
        if self.arms[1].mean > self.arms[0].mean {
            Arm::Two
        } else {
            Arm::One
        }
    }

    /// `|μ(1) − μ(2)|`.
    pub fn gap(&self) -> F {
        (self.arms[0].mean - self.arms[1].mean).abs()
    }

    /// Expected simple regret of recommending `arm`.
    pub fn regret_of(&self, arm: Arm) -> F {
        self.arm(self.best_arm()).mean - self.arm(arm).mean
    }
}

/// Gaussian alternative used in the lower-bound argument: means
/// `(−σ₁/√T, +σ₂/√T)` with variances `(σ₁², σ₂²)`, so arm 2 is best and the
/// gap is `(σ₁+σ₂)/√T`.
pub fn lower_bound_alternative<F: Scalar>(sigma1: F, sigma2: F, budget: u64) -> Result<Instance<F>> {
    if !(sigma1 > F::zero()) {
        return Err(Error::invalid("sigma1", "must be > 0"));
    }
    if !(sigma2 > F::zero()) {
        return Err(Error::invalid("sigma2", "must be > 0"));
    }
    if budget == 0 {
        return Err(Error::invalid("T", "must be >= 1"));
    }
    let root_t = F::count(budget).sqrt();
    Instance::gaussian(
        [-(sigma1 / root_t), sigma2 / root_t],
        [sigma1 * sigma1, sigma2 * sigma2],
    )
}
