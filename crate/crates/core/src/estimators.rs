//! Recommendation-phase mean estimators and the argmax rule.
//!
//! All estimators read a sequence of [`RoundRecord`]s. Each record carries
//! the probability with which its arm was chosen and the running means as
//! they stood *before* the round's outcome was observed, so the AIPW terms
//! are built only from predictable quantities.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::distributions::{Arm, Instance};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RoundRecord<F> {
    pub round: u64,
    pub arm: Arm,
    pub outcome: F,
    /// Probability of the arm actually chosen; the other arm had `1 − w_used`.
    pub w_used: F,
    /// Running means of both arms before this round (0 for an unobserved arm).
    pub mu_tilde_pre: [F; 2],
}

impl<F: Scalar> RoundRecord<F> {
    /// AIPW summand for `arm`:
    /// `1[A_t=a](Y_t − μ̃_t(a))/ŵ_t(a) + μ̃_t(a)`.
    #[inline]
    pub fn aipw_term(&self, arm: Arm) -> F {
        let plug_in = self.mu_tilde_pre[arm.index()];
        if self.arm == arm {
            (self.outcome - plug_in) / self.w_used + plug_in
        } else {
            plug_in
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    Aipw,
    Ipw,
    SampleMean,
}

impl EstimatorKind {
    pub fn name(&self) -> &'static str {
        match self {
            EstimatorKind::Aipw => "aipw",
            EstimatorKind::Ipw => "ipw",
            EstimatorKind::SampleMean => "sample_mean",
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimatorOutput<F> {
    pub mu_hat: [F; 2],
    pub kind: EstimatorKind,
}

fn check_len<F>(records: &[RoundRecord<F>], budget: u64) -> Result<()> {
    if records.is_empty() {
        return Err(Error::EmptyRecords);
    }
    if records.len() as u64 != budget {
        return Err(Error::RecordLength {
            expected: budget,
            actual: records.len(),
        });
    }
    Ok(())
}

pub fn aipw_estimate<F: Scalar>(records: &[RoundRecord<F>], budget: u64) -> Result<EstimatorOutput<F>> {
    check_len(records, budget)?;
    let mut sums = [F::zero(); 2];
    for r in records {
        for arm in Arm::BOTH {
            sums[arm.index()] = sums[arm.index()] + r.aipw_term(arm);
        }
    }
    let t = F::count(budget);
    Ok(EstimatorOutput {
        mu_hat: [sums[0] / t, sums[1] / t],
        kind: EstimatorKind::Aipw,
    })
}

pub fn ipw_estimate<F: Scalar>(records: &[RoundRecord<F>], budget: u64) -> Result<EstimatorOutput<F>> {
    check_len(records, budget)?;
    let mut sums = [F::zero(); 2];
    for r in records {
        let i = r.arm.index();
        sums[i] = sums[i] + r.outcome / r.w_used;
    }
    let t = F::count(budget);
    Ok(EstimatorOutput {
        mu_hat: [sums[0] / t, sums[1] / t],
        kind: EstimatorKind::Ipw,
    })
}

/// Final per-arm arithmetic means. Fails if an arm was never played.
pub fn sample_mean_estimate<F: Scalar>(records: &[RoundRecord<F>], budget: u64) -> Result<EstimatorOutput<F>> {
    check_len(records, budget)?;
    let mut sums = [F::zero(); 2];
    let mut counts = [0u64; 2];
    for r in records {
        let i = r.arm.index();
        sums[i] = sums[i] + r.outcome;
        counts[i] += 1;
    }
    for arm in Arm::BOTH {
        if counts[arm.index()] == 0 {
            return Err(Error::UnobservedArm(arm));
        }
    }
    Ok(EstimatorOutput {
        mu_hat: [sums[0] / F::count(counts[0]), sums[1] / F::count(counts[1])],
        kind: EstimatorKind::SampleMean,
    })
}

pub fn estimate<F: Scalar>(kind: EstimatorKind, records: &[RoundRecord<F>], budget: u64) -> Result<EstimatorOutput<F>> {
    match kind {
        EstimatorKind::Aipw => aipw_estimate(records, budget),
        EstimatorKind::Ipw => ipw_estimate(records, budget),
        EstimatorKind::SampleMean => sample_mean_estimate(records, budget),
    }
}

/// Argmax of the estimated means, ties to arm 1.
pub fn recommend<F: Scalar>(est: &EstimatorOutput<F>) -> Arm {
    if est.mu_hat[1] > est.mu_hat[0] {
        Arm::Two
    } else {
        Arm::One
    }
}

/// `Z_t(a) = AIPW term − μ₀(a)` for every round, both arms.
pub fn martingale_residuals<F: Scalar>(records: &[RoundRecord<F>], instance: &Instance<F>) -> Vec<[F; 2]> {
    let mu = instance.means();
    records
        .iter()
        .map(|r| [r.aipw_term(Arm::One) - mu[0], r.aipw_term(Arm::Two) - mu[1]])
        .collect()
}
