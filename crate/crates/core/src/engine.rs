//! Trial runner and Monte Carlo aggregation.
//!
//! A trial plays the allocation phase for `T` rounds and then applies the
//! configured estimator and the argmax recommendation. Replication `i` of a
//! Monte Carlo run draws from stream `i` of the master seed, and results are
//! reduced in replication order, so reports do not depend on the number of
//! worker threads.

use rayon::prelude::*;

use crate::distributions::{Arm, Instance, Marginal};
use crate::error::{Error, Result};
use crate::estimators::{estimate, recommend, EstimatorKind, RoundRecord};
use crate::policies::{AllocationState, PolicyConfig};
use crate::rng::RngState;
use crate::scalar::Scalar;

/// Default multipliers of the worst-case gap `(σ₁+σ₂)/√T` for sweeps.
pub const DEFAULT_SWEEP_GRID: [f64; 8] = [0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 3.0];

/// Everything that defines a trial except its random stream.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Experiment<F> {
    pub instance: Instance<F>,
    pub budget: u64,
    pub policy: PolicyConfig<F>,
    pub estimator: EstimatorKind,
}

impl<F: Scalar> Experiment<F> {
    pub fn new(instance: Instance<F>, budget: u64, policy: PolicyConfig<F>, estimator: EstimatorKind) -> Result<Self> {
        let exp = Self {
            instance,
            budget,
            policy,
            estimator,
        };
        exp.validate()?;
        Ok(exp)
    }

    pub fn validate(&self) -> Result<()> {
        if self.budget < 2 {
            return Err(Error::invalid("T", format!("budget must be >= 2, got {}", self.budget)));
        }
        self.policy.validate()
    }

    pub fn trial(&self, seed: u64, replication: u64) -> TrialConfig<F> {
        TrialConfig {
            experiment: *self,
            seed,
            replication,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialConfig<F> {
    pub experiment: Experiment<F>,
    pub seed: u64,
    pub replication: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialResult<F> {
    pub recommended: Arm,
    pub counts: [u64; 2],
    pub mu_hat: [F; 2],
    pub correct: bool,
    pub regret: F,
}

/// Runs one trial and returns its summary.
pub fn run_trial<F: Scalar>(cfg: &TrialConfig<F>) -> Result<TrialResult<F>> {
    simulate_trial(cfg, |_, _, y| y).map(|(res, _)| res)
}

/// Runs one trial, keeping the round records. `outcome_hook(round, arm, y)`
/// may replace each drawn outcome before anything else sees it; the random
/// stream is consumed identically whatever the hook returns.
pub fn simulate_trial<F, H>(cfg: &TrialConfig<F>, mut outcome_hook: H) -> Result<(TrialResult<F>, Vec<RoundRecord<F>>)>
where
    F: Scalar,
    H: FnMut(u64, Arm, F) -> F,
{
    let exp = &cfg.experiment;
    exp.validate()?;
    let mut rng = RngState::for_replication(cfg.seed, cfg.replication);
    let mut state = AllocationState::<F>::new();
    let mut records = Vec::with_capacity(exp.budget as usize);
    let arms: [Marginal<F>; 2] = [*exp.instance.arm(Arm::One), *exp.instance.arm(Arm::Two)];

    for round in 1..=exp.budget {
        let mu_tilde_pre = state.running_means();
        let sel = state.select_arm(&exp.policy, exp.budget, &mut rng);
        let drawn = arms[sel.arm.index()].sample(&mut rng);
        let y = outcome_hook(round, sel.arm, drawn);
        records.push(RoundRecord {
            round,
            arm: sel.arm,
            outcome: y,
            w_used: sel.probability,
            mu_tilde_pre,
        });
        state.update(sel.arm, y);
    }

    let est = estimate(exp.estimator, &records, exp.budget)?;
    let recommended = recommend(&est);
    let best = exp.instance.best_arm();
    // regret is exactly 0 or the gap
    let regret = if recommended == best { F::zero() } else { exp.instance.gap() };
    Ok((
        TrialResult {
            recommended,
            counts: state.counts(),
            mu_hat: est.mu_hat,
            correct: recommended == best,
            regret,
        },
        records,
    ))
}

/// Aggregate over `R` replications.
#[derive(Clone, Debug, PartialEq)]
pub struct MCReport<F> {
    pub replications: u64,
    pub budget: u64,
    pub gap: F,
    pub misid_prob: F,
    pub misid_se: F,
    pub mean_regret: F,
    pub regret_se: F,
    /// `√T · mean_regret`.
    pub scaled_regret: F,
    pub scaled_regret_se: F,
    /// Mean of `N_T(a)/T`.
    pub mean_alloc_frac: [F; 2],
    /// Replication mean of the estimated means.
    pub mean_mu_hat: [F; 2],
    /// Sample variance (divisor `R−1`, 0 when `R = 1`) of the estimated means.
    pub mu_hat_var: [F; 2],
}

impl<F: Scalar> MCReport<F> {
    /// Fixed-order reduction over replication results.
    pub fn from_trials(exp: &Experiment<F>, trials: &[TrialResult<F>]) -> Self {
        let r = trials.len() as u64;
        let rf = F::count(r.max(1));
        let misses = trials.iter().filter(|t| !t.correct).count() as u64;
        let misid_prob = F::count(misses) / rf;
        let misid_se = (misid_prob * (F::one() - misid_prob) / rf).sqrt();
        let gap = exp.instance.gap();
        let root_t = F::count(exp.budget).sqrt();

        let n1: u64 = trials.iter().map(|t| t.counts[0]).sum();
        let frac1 = F::count(n1) / (rf * F::count(exp.budget));

        let mut sums = [F::zero(); 2];
        for t in trials {
            sums[0] = sums[0] + t.mu_hat[0];
            sums[1] = sums[1] + t.mu_hat[1];
        }
        let means = [sums[0] / rf, sums[1] / rf];
        let mut ss = [F::zero(); 2];
        for t in trials {
            for a in 0..2 {
                let d = t.mu_hat[a] - means[a];
                ss[a] = ss[a] + d * d;
            }
        }
        let var = if r > 1 {
            let denom = F::count(r - 1);
            [ss[0] / denom, ss[1] / denom]
        } else {
            [F::zero(); 2]
        };

        let mean_regret = gap * misid_prob;
        let regret_se = gap * misid_se;
        MCReport {
            replications: r,
            budget: exp.budget,
            gap,
            misid_prob,
            misid_se,
            mean_regret,
            regret_se,
            scaled_regret: root_t * mean_regret,
            scaled_regret_se: root_t * regret_se,
            mean_alloc_frac: [frac1, F::one() - frac1],
            mean_mu_hat: means,
            mu_hat_var: var,
        }
    }

    /// Standard error of the replication mean of `μ̂(a)`.
    pub fn mu_hat_se(&self) -> [F; 2] {
        let r = F::count(self.replications.max(1));
        [(self.mu_hat_var[0] / r).sqrt(), (self.mu_hat_var[1] / r).sqrt()]
    }
}

/// Monte Carlo driver: replication count, master seed and a thread hint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MonteCarlo {
    pub replications: u64,
    pub master_seed: u64,
    /// `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl MonteCarlo {
    pub fn new(replications: u64, master_seed: u64) -> Self {
        Self {
            replications,
            master_seed,
            threads: None,
        }
    }

    pub fn threads(mut self, threads: usize) -> Self {
        self.threads = Some(threads.max(1));
        self
    }

    /// Per-replication results, in replication order.
    pub fn trials<F: Scalar>(&self, exp: &Experiment<F>) -> Result<Vec<TrialResult<F>>> {
        if self.replications == 0 {
            return Err(Error::invalid("R", "need at least one replication"));
        }
        exp.validate()?;
        let seed = self.master_seed;
        let job = || {
            (0..self.replications)
                .into_par_iter()
                .map(|i| run_trial(&exp.trial(seed, i)))
                .collect::<Result<Vec<_>>>()
        };
        match self.threads {
            None => job(),
            Some(n) => rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::invalid("threads", e.to_string()))?
                .install(job),
        }
    }

    pub fn run<F: Scalar>(&self, exp: &Experiment<F>) -> Result<MCReport<F>> {
        let trials = self.trials(exp)?;
        Ok(MCReport::from_trials(exp, &trials))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow<F> {
    pub multiplier: F,
    pub gap: F,
    pub report: MCReport<F>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepTable<F> {
    pub sigma: [F; 2],
    pub rows: Vec<SweepRow<F>>,
    /// Index of the row with the largest scaled regret (first on ties).
    pub argmax: usize,
}

impl<F: Scalar> SweepTable<F> {
    pub fn max_row(&self) -> &SweepRow<F> {
        &self.rows[self.argmax]
    }
}

/// Gaussian instances with means `(x·(σ₁+σ₂)/√T, 0)` for each multiplier `x`.
pub fn sweep_worst_case<F: Scalar>(
    sigma: [F; 2],
    budget: u64,
    policy: PolicyConfig<F>,
    estimator: EstimatorKind,
    grid: &[F],
    mc: &MonteCarlo,
) -> Result<SweepTable<F>> {
    if grid.is_empty() {
        return Err(Error::invalid("grid", "must not be empty"));
    }
    if let Some(x) = grid.iter().find(|x| !(**x > F::zero())) {
        return Err(Error::invalid("grid", format!("multipliers must be > 0, got {x}")));
    }
    let worst = (sigma[0] + sigma[1]) / F::count(budget).sqrt();
    let mut rows = Vec::with_capacity(grid.len());
    for &x in grid {
        let gap = x * worst;
        let instance = Instance::gaussian([gap, F::zero()], [sigma[0] * sigma[0], sigma[1] * sigma[1]])?;
        let exp = Experiment::new(instance, budget, policy, estimator)?;
        let report = mc.run(&exp)?;
        rows.push(SweepRow {
            multiplier: x,
            gap,
            report,
        });
    }
    let mut argmax = 0;
    for (i, row) in rows.iter().enumerate() {
        if row.report.scaled_regret > rows[argmax].report.scaled_regret {
            argmax = i;
        }
    }
    Ok(SweepTable { sigma, rows, argmax })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConsistencyRow<F> {
    pub budget: u64,
    pub report: MCReport<F>,
}

/// Misidentification probability of a fixed instance across budgets.
pub fn consistency_curve<F: Scalar>(
    instance: &Instance<F>,
    budgets: &[u64],
    policy: PolicyConfig<F>,
    estimator: EstimatorKind,
    mc: &MonteCarlo,
) -> Result<Vec<ConsistencyRow<F>>> {
    if budgets.is_empty() {
        return Err(Error::invalid("budgets", "must not be empty"));
    }
    budgets
        .iter()
        .map(|&budget| {
            let exp = Experiment::new(*instance, budget, policy, estimator)?;
            Ok(ConsistencyRow {
                budget,
                report: mc.run(&exp)?,
            })
        })
        .collect()
}
