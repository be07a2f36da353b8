//! Closed-form regret and misidentification bounds, and an empirical checker
//! for the change-of-measure (transportation) inequality.
//!
//! Variance-dependent formulas take the arm standard deviations `σ₁, σ₂`:
//!
//! * minimax constant: `(σ₁+σ₂)/√e`
//! * misidentification bound: `exp(−TΔ²/(2(σ₁+σ₂)²))`, clipped at 1
//! * regret curve: `Δ · exp(−TΔ²/(2(σ₁+σ₂)²))`, maximized at `Δ* = (σ₁+σ₂)/√T`

use crate::distributions::{kl_divergence, Arm, Instance};
use crate::engine::{Experiment, MonteCarlo, TrialResult};
use crate::error::{Error, Result};
use crate::estimators::EstimatorKind;
use crate::policies::PolicyConfig;
use crate::scalar::Scalar;

/// A named bound value together with the inputs that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport<F> {
    pub name: &'static str,
    pub value: F,
    pub inputs: Vec<(&'static str, F)>,
    pub formula: &'static str,
}

fn check_sigmas<F: Scalar>(sigma1: F, sigma2: F) -> Result<()> {
    if !(sigma1 > F::zero() && sigma1.is_finite()) {
        return Err(Error::invalid("sigma1", format!("must be finite and > 0, got {sigma1}")));
    }
    if !(sigma2 > F::zero() && sigma2.is_finite()) {
        return Err(Error::invalid("sigma2", format!("must be finite and > 0, got {sigma2}")));
    }
    Ok(())
}

fn check_gap_budget<F: Scalar>(gap: F, budget: u64) -> Result<()> {
    if !(gap >= F::zero()) {
        return Err(Error::invalid("gap", format!("must be >= 0, got {gap}")));
    }
    if budget == 0 {
        return Err(Error::invalid("T", "must be >= 1"));
    }
    Ok(())
}

/// `(σ₁+σ₂)·e^{−1/2}`.
pub fn minimax_lower_bound_constant<F: Scalar>(sigma1: F, sigma2: F) -> Result<F> {
    check_sigmas(sigma1, sigma2)?;
    Ok((sigma1 + sigma2) * F::lit(-0.5).exp())
}

/// Exponent `TΔ²/(2(σ₁+σ₂)²)` of the misidentification bound.
pub fn misid_exponent<F: Scalar>(sigma1: F, sigma2: F, gap: F, budget: u64) -> Result<F> {
    check_sigmas(sigma1, sigma2)?;
    check_gap_budget(gap, budget)?;
    let s = sigma1 + sigma2;
    Ok(F::count(budget) * gap * gap / (F::lit(2.0) * s * s))
}

/// Unclipped `exp(−exponent)`.
pub fn misid_upper_bound_raw<F: Scalar>(sigma1: F, sigma2: F, gap: F, budget: u64) -> Result<F> {
    Ok((-misid_exponent(sigma1, sigma2, gap, budget)?).exp())
}

pub fn misid_upper_bound<F: Scalar>(sigma1: F, sigma2: F, gap: F, budget: u64) -> Result<F> {
    Ok(misid_upper_bound_raw(sigma1, sigma2, gap, budget)?.min(F::one()))
}

/// `Δ · misid_upper_bound(σ, Δ, T)`.
pub fn regret_upper_bound_curve<F: Scalar>(sigma1: F, sigma2: F, budget: u64, gap: F) -> Result<F> {
    Ok(gap * misid_upper_bound(sigma1, sigma2, gap, budget)?)
}

/// `(σ₁+σ₂)/√T`.
pub fn worst_case_gap<F: Scalar>(sigma1: F, sigma2: F, budget: u64) -> Result<F> {
    check_sigmas(sigma1, sigma2)?;
    if budget == 0 {
        return Err(Error::invalid("T", "must be >= 1"));
    }
    Ok((sigma1 + sigma2) / F::count(budget).sqrt())
}

/// `d(x, y) = x ln(x/y) + (1−x) ln((1−x)/(1−y))` with `0·ln 0 = 0`,
/// `d(0,0) = d(1,1) = 0`, and `+∞` when `y ∈ {0,1}` differs from `x`.
pub fn binary_relative_entropy<F: Scalar>(x: F, y: F) -> Result<F> {
    let unit = |v: F| v >= F::zero() && v <= F::one();
    if !unit(x) {
        return Err(Error::invalid("x", format!("must lie in [0, 1], got {x}")));
    }
    if !unit(y) {
        return Err(Error::invalid("y", format!("must lie in [0, 1], got {y}")));
    }
    if x == y {
        return Ok(F::zero());
    }
    let one = F::one();
    let term = |a: F, b: F| {
        if a == F::zero() {
            F::zero()
        } else if b == F::zero() {
            F::infinity()
        } else {
            a * (a / b).ln()
        }
    };
    Ok((term(x, y) + term(one - x, one - y)).max(F::zero()))
}

/// Outcome of an empirical transportation-inequality check.
#[derive(Clone, Debug, PartialEq)]
pub struct TransportationReport<F> {
    /// `Σ_a E_P[N_T(a)]·KL(P(a), Q(a))`, with `E_P[N_T(a)]` estimated.
    pub lhs: F,
    pub lhs_se: F,
    /// `d(P_P(E), P_Q(E))` from event frequencies.
    pub rhs: F,
    pub rhs_se: F,
    pub p_baseline: F,
    pub p_alternative: F,
    pub kl: [F; 2],
    pub satisfied: bool,
    /// `lhs + 3·SE − rhs`.
    pub margin: F,
}

/// Monte Carlo check of `Σ_a E_P[N_T(a)] KL(P(a),Q(a)) ≥ d(P_P(E), P_Q(E))`.
///
/// The inequality counts as satisfied when `lhs + 3·SE ≥ rhs`, where SE
/// combines the replication SE of the left side and a delta-method SE of the
/// right side.
pub fn check_transportation<F, E>(
    baseline: &Instance<F>,
    alternative: &Instance<F>,
    policy: PolicyConfig<F>,
    estimator: EstimatorKind,
    budget: u64,
    mc: &MonteCarlo,
    event: E,
) -> Result<TransportationReport<F>>
where
    F: Scalar,
    E: Fn(&TrialResult<F>) -> bool,
{
    let kl = [
        kl_divergence(baseline.arm(Arm::One), alternative.arm(Arm::One))?,
        kl_divergence(baseline.arm(Arm::Two), alternative.arm(Arm::Two))?,
    ];
    let base_exp = Experiment::new(*baseline, budget, policy, estimator)?;
    let alt_exp = Experiment::new(*alternative, budget, policy, estimator)?;
    let base = mc.trials(&base_exp)?;
    let alt = mc.trials(&alt_exp)?;

    let r = F::count(mc.replications);
    let per_rep: Vec<F> = base
        .iter()
        .map(|t| F::count(t.counts[0]) * kl[0] + F::count(t.counts[1]) * kl[1])
        .collect();
    let lhs = per_rep.iter().fold(F::zero(), |acc, &v| acc + v) / r;
    let lhs_var = if mc.replications > 1 {
        per_rep.iter().fold(F::zero(), |acc, &v| acc + (v - lhs) * (v - lhs)) / F::count(mc.replications - 1)
    } else {
        F::zero()
    };
    let lhs_se = (lhs_var / r).sqrt();

    let freq = |ts: &[TrialResult<F>]| F::count(ts.iter().filter(|t| event(t)).count() as u64) / r;
    let (px, py) = (freq(&base), freq(&alt));
    let rhs = binary_relative_entropy(px, py)?;
    let se = |p: F| (p * (F::one() - p) / r).sqrt();
    let one = F::one();
    // ∂d/∂x = ln(x/y) − ln((1−x)/(1−y)), ∂d/∂y = (1−x)/(1−y) − x/y
    let contrib = |deriv: F, s: F| if s == F::zero() { F::zero() } else { deriv * s };
    let dx = (px / py).ln() - ((one - px) / (one - py)).ln();
    let dy = (one - px) / (one - py) - px / py;
    let rhs_se = contrib(dx, se(px)).hypot(contrib(dy, se(py)));
    let total_se = lhs_se.hypot(rhs_se);

    let slack = F::lit(3.0) * total_se;
    let satisfied = if rhs.is_infinite() { lhs.is_infinite() } else { lhs + slack >= rhs };
    Ok(TransportationReport {
        lhs,
        lhs_se,
        rhs,
        rhs_se,
        p_baseline: px,
        p_alternative: py,
        kl,
        satisfied,
        margin: lhs + slack - rhs,
    })
}

/// Two candidate minimax constants for Bernoulli arms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BernoulliConstants<F> {
    /// `2·√(5/e)`, the constant stated for the Bernoulli class.
    pub two_root_five_e: F,
    /// `(0.5 + 0.5)/√e`: the Gaussian constant at the largest Bernoulli
    /// standard deviation. The two values disagree; both are reported.
    pub variance_cap_value: F,
}

pub fn bernoulli_constants<F: Scalar>() -> BernoulliConstants<F> {
    let half = F::lit(0.5);
    BernoulliConstants {
        two_root_five_e: F::lit(2.0) * (F::lit(5.0) / F::E()).sqrt(),
        variance_cap_value: minimax_lower_bound_constant(half, half).expect("positive sigmas"),
    }
}

/// Every closed-form quantity for one `(σ₁, σ₂, Δ, T)` point.
pub fn bound_reports<F: Scalar>(sigma1: F, sigma2: F, gap: F, budget: u64) -> Result<Vec<BoundReport<F>>> {
    let sig = vec![("sigma1", sigma1), ("sigma2", sigma2)];
    let full = vec![("sigma1", sigma1), ("sigma2", sigma2), ("gap", gap), ("T", F::count(budget))];
    let bern = bernoulli_constants::<F>();
    let wc = worst_case_gap(sigma1, sigma2, budget)?;
    Ok(vec![
        BoundReport {
            name: "minimax_lower_bound_constant",
            value: minimax_lower_bound_constant(sigma1, sigma2)?,
            inputs: sig.clone(),
            formula: "(sigma1+sigma2)/sqrt(e)",
        },
        BoundReport {
            name: "worst_case_gap",
            value: wc,
            inputs: vec![("sigma1", sigma1), ("sigma2", sigma2), ("T", F::count(budget))],
            formula: "(sigma1+sigma2)/sqrt(T)",
        },
        BoundReport {
            name: "misid_exponent",
            value: misid_exponent(sigma1, sigma2, gap, budget)?,
            inputs: full.clone(),
            formula: "T*gap^2/(2*(sigma1+sigma2)^2)",
        },
        BoundReport {
            name: "misid_upper_bound",
            value: misid_upper_bound(sigma1, sigma2, gap, budget)?,
            inputs: full.clone(),
            formula: "min(1, exp(-T*gap^2/(2*(sigma1+sigma2)^2)))",
        },
        BoundReport {
            name: "scaled_regret_upper_bound",
            value: F::count(budget).sqrt() * regret_upper_bound_curve(sigma1, sigma2, budget, gap)?,
            inputs: full,
            formula: "sqrt(T)*gap*min(1, exp(-T*gap^2/(2*(sigma1+sigma2)^2)))",
        },
        BoundReport {
            name: "bernoulli_two_root_five_e",
            value: bern.two_root_five_e,
            inputs: vec![],
            formula: "2*sqrt(5/e)",
        },
        BoundReport {
            name: "bernoulli_variance_cap_value",
            value: bern.variance_cap_value,
            inputs: vec![],
            formula: "(0.5+0.5)/sqrt(e)",
        },
    ])
}
