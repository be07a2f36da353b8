//! Built-in verification suite.
//!
//! Nine checks at fixed scales. Each records its measurement, its pass/fail
//! status and the wall time it took; a check also fails when it runs over its
//! time limit.

use std::fmt;
use std::time::{Duration, Instant};

use crate::distributions::{kl_divergence, lower_bound_alternative, Arm, Instance, Marginal};
use crate::engine::{consistency_curve, sweep_worst_case, Experiment, MonteCarlo, SweepTable, DEFAULT_SWEEP_GRID};
use crate::error::Result;
use crate::estimators::EstimatorKind;
use crate::policies::{PolicyConfig, DEFAULT_ETA};
use crate::theory::{check_transportation, minimax_lower_bound_constant, regret_upper_bound_curve, worst_case_gap};

pub const DEFAULT_SEED: u64 = 42;

/// `Φ(−1)`.
pub const STD_NORMAL_CDF_AT_MINUS_ONE: f64 = 0.158_655_253_931_457_07;
/// Maximizer of `x·Φ(−x)` over `x > 0`.
pub const GAUSSIAN_TAIL_REGRET_ARGMAX: f64 = 0.751_791_524_693_559;

pub const ALL_CHECKS: [u8; 9] = [1, 2, 3, 4, 5, 6, 7, 8, 9];

// Allocation convergence window, centred as stated for the check.
const ALLOC_CENTER: f64 = 0.3133;
const ALLOC_HALF_WIDTH: f64 = 0.02;
const ORACLE_TAIL_TOL: f64 = 0.01;
const ANALYTIC_TOL: f64 = 1e-12;
const ARGMAX_WINDOW: (f64, f64) = (0.5, 1.25);
const CONSISTENCY_MAX_P: f64 = 0.01;
const BERNOULLI_KL_TOL: f64 = 1e-2;
const SE_SLACK: f64 = 3.0;

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    pub threads: Option<usize>,
    /// Subset of check ids; `None` runs everything.
    pub only: Option<Vec<u8>>,
    /// Replaces every Monte Carlo replication count (smoke runs).
    pub reps_override: Option<u64>,
    /// Test hook: shrinks the minimax constant so bound checks must fail.
    pub corrupt_bound: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            threads: None,
            only: None,
            reps_override: None,
            corrupt_bound: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub time_limit: Option<Duration>,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}. {}: {} ({:.2} s",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.elapsed.as_secs_f64()
        )?;
        match self.time_limit {
            Some(limit) => write!(f, ", limit {} s)", limit.as_secs()),
            None => write!(f, ")"),
        }
    }
}

/// Runs the checks selected by `opts`, in id order.
pub fn run(opts: &VerifyOptions) -> Result<Vec<CheckOutcome>> {
    let mut suite = Suite::new(opts.clone());
    let ids: Vec<u8> = match &opts.only {
        Some(ids) => ALL_CHECKS.iter().copied().filter(|id| ids.contains(id)).collect(),
        None => ALL_CHECKS.to_vec(),
    };
    ids.into_iter().map(|id| suite.check(id)).collect()
}

pub fn all_passed(outcomes: &[CheckOutcome]) -> bool {
    outcomes.iter().all(|o| o.passed)
}

/// Holds the options and the worst-case sweep, which checks 3 and 5 share.
pub struct Suite {
    opts: VerifyOptions,
    sweep: Option<(SweepTable<f64>, Duration)>,
}

impl Suite {
    pub fn new(opts: VerifyOptions) -> Self {
        Self { opts, sweep: None }
    }

    fn mc(&self, reps: u64) -> MonteCarlo {
        let mc = MonteCarlo::new(self.opts.reps_override.unwrap_or(reps), self.opts.seed);
        match self.opts.threads {
            Some(n) => mc.threads(n),
            None => mc,
        }
    }

    fn minimax(&self, s1: f64, s2: f64) -> Result<f64> {
        let c = minimax_lower_bound_constant(s1, s2)?;
        Ok(if self.opts.corrupt_bound { 0.01 * c } else { c })
    }

    fn adaptive() -> PolicyConfig<f64> {
        PolicyConfig::adaptive_neyman(DEFAULT_ETA).expect("default eta is valid")
    }

    fn sweep(&mut self) -> Result<(&SweepTable<f64>, Duration)> {
        if self.sweep.is_none() {
            let start = Instant::now();
            let table = sweep_worst_case(
                [1.0, 1.0],
                10_000,
                Self::adaptive(),
                EstimatorKind::Aipw,
                &DEFAULT_SWEEP_GRID,
                &self.mc(10_000),
            )?;
            self.sweep = Some((table, start.elapsed()));
        }
        let (t, d) = self.sweep.as_ref().expect("sweep just computed");
        Ok((t, *d))
    }

    pub fn check(&mut self, id: u8) -> Result<CheckOutcome> {
        let start = Instant::now();
        let (name, limit, passed, detail, extra) = match id {
            1 => {
                let inst = Instance::gaussian([0.0, 0.0], [1.0, 4.0])?;
                let exp = Experiment::new(inst, 20_000, Self::adaptive(), EstimatorKind::Aipw)?;
                let rep = self.mc(200).run(&exp)?;
                let frac = rep.mean_alloc_frac[0];
                let (lo, hi) = (ALLOC_CENTER - ALLOC_HALF_WIDTH, ALLOC_CENTER + ALLOC_HALF_WIDTH);
                let ok = (lo..=hi).contains(&frac);
                ("allocation convergence", 30, ok, format!("mean N_T(1)/T = {frac:.5}, window [{lo:.4}, {hi:.4}], target 1/3"), Duration::ZERO)
            }
            2 => {
                let inst = Instance::gaussian([0.3, 0.0], [1.0, 1.0])?;
                let exp = Experiment::new(inst, 2_000, Self::adaptive(), EstimatorKind::Aipw)?;
                let rep = self.mc(10_000).run(&exp)?;
                let se = rep.mu_hat_se();
                let mu = inst.means();
                let dev = [rep.mean_mu_hat[0] - mu[0], rep.mean_mu_hat[1] - mu[1]];
                let ok = (0..2).all(|a| dev[a].abs() <= SE_SLACK * se[a]);
                (
                    "AIPW unbiasedness",
                    120,
                    ok,
                    format!(
                        "bias arm1 {:+.5} (3SE {:.5}), arm2 {:+.5} (3SE {:.5})",
                        dev[0],
                        SE_SLACK * se[0],
                        dev[1],
                        SE_SLACK * se[1]
                    ),
                    Duration::ZERO,
                )
            }
            3 => {
                let bound = self.minimax(1.0, 1.0)?;
                let (table, took) = self.sweep()?;
                let worst = table
                    .rows
                    .iter()
                    .map(|r| r.report.scaled_regret - (bound + SE_SLACK * r.report.scaled_regret_se))
                    .fold(f64::NEG_INFINITY, f64::max);
                let max = table.max_row();
                let ok = worst <= 0.0;
                (
                    "upper-bound non-violation",
                    600,
                    ok,
                    format!(
                        "max scaled regret {:.4} at x={} vs bound {:.4} (+3SE), worst margin {:+.4}",
                        max.report.scaled_regret, max.multiplier, bound, worst
                    ),
                    took,
                )
            }
            4 => {
                let inst = Instance::gaussian([0.02, 0.0], [1.0, 1.0])?;
                let exp = Experiment::new(inst, 10_000, PolicyConfig::oracle_neyman(1.0, 1.0)?, EstimatorKind::SampleMean)?;
                let rep = self.mc(100_000).run(&exp)?;
                let dev = rep.misid_prob - STD_NORMAL_CDF_AT_MINUS_ONE;
                let ok = dev.abs() <= ORACLE_TAIL_TOL;
                (
                    "oracle tail probability",
                    300,
                    ok,
                    format!("misid {:.5} vs Phi(-1) {:.5} (tol {ORACLE_TAIL_TOL})", rep.misid_prob, STD_NORMAL_CDF_AT_MINUS_ONE),
                    Duration::ZERO,
                )
            }
            5 => {
                let mut analytic_err = 0.0f64;
                for &(s1, s2, t) in &[(1.0, 1.0, 10_000u64), (2.0, 1.0, 900), (0.5, 3.0, 12_345)] {
                    let g = worst_case_gap(s1, s2, t)?;
                    let scaled = (t as f64).sqrt() * regret_upper_bound_curve(s1, s2, t, g)?;
                    analytic_err = analytic_err.max((scaled - self.minimax(s1, s2)?).abs());
                }
                let (table, took) = self.sweep()?;
                let x = table.max_row().multiplier;
                let ok = analytic_err <= ANALYTIC_TOL && (ARGMAX_WINDOW.0..=ARGMAX_WINDOW.1).contains(&x);
                (
                    "worst-case maximizer",
                    600,
                    ok,
                    format!(
                        "analytic |err| {analytic_err:.2e} (tol {ANALYTIC_TOL:e}); empirical argmax x={x} in [{}, {}], tail argmax {:.4}",
                        ARGMAX_WINDOW.0, ARGMAX_WINDOW.1, GAUSSIAN_TAIL_REGRET_ARGMAX
                    ),
                    took,
                )
            }
            6 => {
                let inst = Instance::gaussian([0.5, 0.0], [1.0, 1.0])?;
                let rows = consistency_curve(&inst, &[200, 2_000], Self::adaptive(), EstimatorKind::Aipw, &self.mc(10_000))?;
                let (small, large) = (&rows[0].report, &rows[1].report);
                let sep = SE_SLACK * small.misid_se.hypot(large.misid_se);
                let ok = small.misid_prob - large.misid_prob > sep && large.misid_prob < CONSISTENCY_MAX_P;
                (
                    "consistency",
                    120,
                    ok,
                    format!(
                        "misid T=200 {:.5}, T=2000 {:.5}; gap {:.5} vs 3SE {:.5}",
                        small.misid_prob,
                        large.misid_prob,
                        small.misid_prob - large.misid_prob,
                        sep
                    ),
                    Duration::ZERO,
                )
            }
            7 => {
                let base = Instance::gaussian([0.01, 0.0], [1.0, 1.0])?;
                let alt = lower_bound_alternative(1.0, 1.0, 50)?;
                let rep = check_transportation(
                    &base,
                    &alt,
                    PolicyConfig::Uniform,
                    EstimatorKind::SampleMean,
                    50,
                    &self.mc(100_000),
                    |t| t.recommended == Arm::One,
                )?;
                (
                    "transportation inequality",
                    60,
                    rep.satisfied,
                    format!(
                        "lhs {:.5} >= rhs {:.5} (P_base {:.4}, P_alt {:.4}, margin {:+.5})",
                        rep.lhs, rep.rhs, rep.p_baseline, rep.p_alternative, rep.margin
                    ),
                    Duration::ZERO,
                )
            }
            8 => {
                let mut gaussian_exact = true;
                for &var in &[1.0f64, 4.0] {
                    for &xi in &[1e-2, 1e-3] {
                        let p = Marginal::gaussian(0.0, var)?;
                        let q = Marginal::gaussian(xi, var)?;
                        gaussian_exact &= kl_divergence(&p, &q)? * 2.0 * var / (xi * xi) == 1.0;
                    }
                }
                let (pr, xi) = (0.3f64, 1e-3f64);
                let kb = kl_divergence(&Marginal::bernoulli(pr)?, &Marginal::bernoulli(pr + xi)?)?;
                let bern_err = (kb * 2.0 * pr * (1.0 - pr) / (xi * xi) - 1.0).abs();
                let ok = gaussian_exact && bern_err <= BERNOULLI_KL_TOL;
                (
                    "KL-Fisher approximation",
                    1,
                    ok,
                    format!("gaussian ratio exact: {gaussian_exact}; bernoulli |ratio-1| {bern_err:.2e} (tol {BERNOULLI_KL_TOL:e})"),
                    Duration::ZERO,
                )
            }
            9 => {
                let inst = Instance::bernoulli([0.52, 0.48])?;
                let mc = self.mc(10_000);
                let neyman = mc.run(&Experiment::new(inst, 10_000, Self::adaptive(), EstimatorKind::Aipw)?)?;
                let uniform = mc.run(&Experiment::new(inst, 10_000, PolicyConfig::Uniform, EstimatorKind::SampleMean)?)?;
                let diff = (neyman.scaled_regret - uniform.scaled_regret).abs();
                let tol = SE_SLACK * neyman.scaled_regret_se.hypot(uniform.scaled_regret_se);
                (
                    "Bernoulli Neyman vs uniform",
                    300,
                    diff <= tol,
                    format!(
                        "scaled regret neyman {:.5}, uniform {:.5}; |diff| {diff:.5} vs 3SE {tol:.5}",
                        neyman.scaled_regret, uniform.scaled_regret
                    ),
                    Duration::ZERO,
                )
            }
            other => {
                return Err(crate::error::Error::invalid("check", format!("unknown check id {other}")));
            }
        };
        // checks reusing the cached sweep are charged its full cost
        let elapsed = start.elapsed().max(extra);
        let limit = Duration::from_secs(limit);
        Ok(CheckOutcome {
            id,
            name,
            passed: passed && elapsed < limit,
            detail,
            elapsed,
            time_limit: Some(limit),
        })
    }
}
