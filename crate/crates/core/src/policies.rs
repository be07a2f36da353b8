//! Allocation-phase policies.
//!
//! * [`PolicyConfig::AdaptiveNeyman`] samples arm 1 with probability
//!   `σ̂(1)/(σ̂(1)+σ̂(2))`, where `σ̂²` is the running population variance of the
//!   arm floored at `eta`, and the probability is clamped to
//!   `[w_min, 1 − w_min]`. Round 1 uses probability 1/2.
//! * [`PolicyConfig::OracleNeyman`] knows the standard deviations and plays arm
//!   1 for the first `round(T·w*(1))` rounds, arm 2 afterwards.
//! * [`PolicyConfig::Uniform`] plays arm 1 for the first `⌈T/2⌉` rounds.

use crate::distributions::Arm;
use crate::error::{Error, Result};
use crate::rng::RngState;
use crate::scalar::Scalar;

pub const DEFAULT_ETA: f64 = 1e-3;
pub const DEFAULT_W_MIN: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PolicyConfig<F> {
    AdaptiveNeyman { eta: F, w_min: F },
    OracleNeyman { sigma1: F, sigma2: F },
    Uniform,
}

impl<F: Scalar> PolicyConfig<F> {
    pub fn adaptive_neyman(eta: F) -> Result<Self> {
        Self::adaptive_neyman_clamped(eta, F::lit(DEFAULT_W_MIN))
    }

    pub fn adaptive_neyman_clamped(eta: F, w_min: F) -> Result<Self> {
        let cfg = PolicyConfig::AdaptiveNeyman { eta, w_min };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn oracle_neyman(sigma1: F, sigma2: F) -> Result<Self> {
        let cfg = PolicyConfig::OracleNeyman { sigma1, sigma2 };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            PolicyConfig::AdaptiveNeyman { eta, w_min } => {
                if !(eta > F::zero() && eta < F::one()) {
                    return Err(Error::invalid("eta", format!("must lie in (0, 1), got {eta}")));
                }
                if !(w_min > F::zero() && w_min < F::lit(0.5)) {
                    return Err(Error::invalid("w_min", format!("must lie in (0, 0.5), got {w_min}")));
                }
            }
            PolicyConfig::OracleNeyman { sigma1, sigma2 } => {
                if !(sigma1 > F::zero() && sigma1.is_finite()) {
                    return Err(Error::invalid("sigma1", "must be finite and > 0"));
                }
                if !(sigma2 > F::zero() && sigma2.is_finite()) {
                    return Err(Error::invalid("sigma2", "must be finite and > 0"));
                }
            }
            PolicyConfig::Uniform => {}
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            PolicyConfig::AdaptiveNeyman { .. } => "adaptive_neyman",
            PolicyConfig::OracleNeyman { .. } => "oracle_neyman",
            PolicyConfig::Uniform => "uniform",
        }
    }

    /// Whether arms are chosen by a fixed block schedule rather than a coin.
    pub fn is_deterministic(&self) -> bool {
        !matches!(self, PolicyConfig::AdaptiveNeyman { .. })
    }

    /// Number of leading rounds given to arm 1 by a block schedule.
    ///
    /// Clamped to `[1, T−1]` so both arms are observed. The clamp only binds
    /// when `round(T·w(1))` is 0 or T, so the count stays within one of it.
    pub fn arm1_block(&self, budget: u64) -> Option<u64> {
        let w1 = match *self {
            PolicyConfig::OracleNeyman { sigma1, sigma2 } => sigma1 / (sigma1 + sigma2),
            PolicyConfig::Uniform => F::lit(0.5),
            PolicyConfig::AdaptiveNeyman { .. } => return None,
        };
        let raw = (F::count(budget) * w1).round().to_u64().unwrap_or(0);
        Some(raw.clamp(1.min(budget), budget.saturating_sub(1).max(1)))
    }
}

/// Single-pass running statistics for one arm.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ArmStats<F> {
    count: u64,
    mean: F,
    m2: F,
}

impl<F: Scalar> ArmStats<F> {
    pub fn count(&self) -> u64 {
        self.count
    }

    /// Running mean; 0 before the first observation.
    pub fn mean(&self) -> F {
        self.mean
    }

    /// Sum of squared deviations from the running mean.
    pub fn m2(&self) -> F {
        self.m2
    }

    /// Population variance `m2/n`, or `None` when nothing was observed.
    pub fn population_variance(&self) -> Option<F> {
        (self.count > 0).then(|| self.m2 / F::count(self.count))
    }

    #[inline]
    pub fn push(&mut self, y: F) {
        self.count += 1;
        let delta = y - self.mean;
        self.mean = self.mean + delta / F::count(self.count);
        self.m2 = self.m2 + delta * (y - self.mean);
    }
}

/// What the allocation rule knows at the start of a round.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AllocationState<F> {
    arms: [ArmStats<F>; 2],
    round: u64,
}

impl<F: Scalar> Default for AllocationState<F> {
    fn default() -> Self {
        Self::new()
    }
}

/// Arm chosen for a round and the probability with which it was chosen.
///
/// For block schedules the probability is the schedule's target fraction for
/// that arm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Selection<F> {
    pub arm: Arm,
    pub probability: F,
}

impl<F: Scalar> AllocationState<F> {
    pub fn new() -> Self {
        Self {
            arms: [ArmStats::default(); 2],
            round: 1,
        }
    }

    /// Index of the round about to be played (1-based).
    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn stats(&self, arm: Arm) -> &ArmStats<F> {
        &self.arms[arm.index()]
    }

    pub fn counts(&self) -> [u64; 2] {
        [self.arms[0].count, self.arms[1].count]
    }

    pub fn running_means(&self) -> [F; 2] {
        [self.arms[0].mean, self.arms[1].mean]
    }

    /// `σ̂²(a)`: running population variance, or `eta` when the arm is
    /// unobserved or its running variance is exactly zero.
    pub fn variance_estimate(&self, arm: Arm, eta: F) -> F {
        match self.arms[arm.index()].population_variance() {
            Some(v) if v > F::zero() => v,
            _ => eta,
        }
    }

    /// Probability of selecting arm 1 in the current round.
    pub fn allocation_probability(&self, cfg: &PolicyConfig<F>) -> F {
        match *cfg {
            PolicyConfig::AdaptiveNeyman { eta, w_min } => {
                if self.round <= 1 {
                    return F::lit(0.5);
                }
                let s1 = self.variance_estimate(Arm::One, eta).sqrt();
                let s2 = self.variance_estimate(Arm::Two, eta).sqrt();
                (s1 / (s1 + s2)).max(w_min).min(F::one() - w_min)
            }
            PolicyConfig::OracleNeyman { sigma1, sigma2 } => sigma1 / (sigma1 + sigma2),
            PolicyConfig::Uniform => F::lit(0.5),
        }
    }

    /// Chooses the arm for the current round. Only the adaptive policy
    /// consumes randomness.
    pub fn select_arm(&self, cfg: &PolicyConfig<F>, budget: u64, rng: &mut RngState) -> Selection<F> {
        let w1 = self.allocation_probability(cfg);
        let arm = match cfg.arm1_block(budget) {
            Some(block) => {
                if self.round <= block {
                    Arm::One
                } else {
                    Arm::Two
                }
            }
            None => {
                if F::unit_uniform(rng) < w1 {
                    Arm::One
                } else {
                    Arm::Two
                }
            }
        };
        let probability = match arm {
            Arm::One => w1,
            Arm::Two => F::one() - w1,
        };
        Selection { arm, probability }
    }

    /// Records outcome `y` on `arm` and advances to the next round.
    #[inline]
    pub fn update(&mut self, arm: Arm, y: F) {
        self.arms[arm.index()].push(y);
        self.round += 1;
    }
}
