//! Monte Carlo properties of the allocation engine and the estimators.

use neyman_bai::theory::misid_upper_bound;
use neyman_bai::*;
use statrs::distribution::{ContinuousCDF, Normal};

fn adaptive() -> PolicyConfig64 {
    PolicyConfig::adaptive_neyman(1e-3).unwrap()
}

#[test]
fn allocation_uses_only_past_outcomes() {
    let inst = Instance::gaussian([0.2, 0.0], [1.0, 4.0]).unwrap();
    let exp = Experiment::new(inst, 300, adaptive(), EstimatorKind::Aipw).unwrap();
    let cfg = exp.trial(11, 3);
    let (_, base) = simulate_trial(&cfg, |_, _, y| y).unwrap();
    for k in [1u64, 17, 150, 299] {
        let (_, bumped) = simulate_trial(&cfg, |t, _, y| if t == k { y + 50.0 } else { y }).unwrap();
        let k = k as usize - 1;
        for t in 0..=k {
            assert_eq!(base[t].arm, bumped[t].arm, "round {}", t + 1);
            assert_eq!(base[t].w_used, bumped[t].w_used);
            assert_eq!(base[t].mu_tilde_pre, bumped[t].mu_tilde_pre);
        }
        assert_ne!(base[k].outcome, bumped[k].outcome);
        let i = base[k].arm.index();
        assert_ne!(base[k + 1].mu_tilde_pre[i], bumped[k + 1].mu_tilde_pre[i]);
    }
}

#[test]
fn recorded_probabilities_match_state_replay() {
    let inst = Instance::gaussian([0.0, 0.3], [2.0, 0.5]).unwrap();
    let exp = Experiment::new(inst, 500, adaptive(), EstimatorKind::Aipw).unwrap();
    let (res, recs) = simulate_trial(&exp.trial(5, 0), |_, _, y| y).unwrap();
    let mut state = AllocationState64::new();
    for r in &recs {
        assert_eq!(state.running_means(), r.mu_tilde_pre);
        let p1 = state.allocation_probability(&exp.policy);
        let expected = if r.arm == Arm::One { p1 } else { 1.0 - p1 };
        assert_eq!(r.w_used, expected);
        state.update(r.arm, r.outcome);
    }
    assert_eq!(state.counts(), res.counts);
}

#[test]
fn aipw_unbiased_and_ipw_noisier_for_large_means() {
    let cases = [([1.0, 0.5], [1.0, 1.0]), ([2.0, -1.0], [1.0, 4.0]), ([0.3, 1.2], [0.5, 2.0])];
    let mc = MonteCarlo::new(2000, 7);
    for (means, vars) in cases {
        let inst = Instance::gaussian(means, vars).unwrap();
        let aipw = mc.run(&Experiment::new(inst, 2000, adaptive(), EstimatorKind::Aipw).unwrap()).unwrap();
        let ipw = mc.run(&Experiment::new(inst, 2000, adaptive(), EstimatorKind::Ipw).unwrap()).unwrap();
        let se = aipw.mu_hat_se();
        for a in 0..2 {
            let bias = aipw.mean_mu_hat[a] - means[a];
            assert!(bias.abs() <= 4.0 * se[a], "{means:?} arm {a}: bias {bias} se {}", se[a]);
            // the plug-in removes a μ²(1−w)/w term
            if means[a].abs() >= vars[a].sqrt() {
                assert!(ipw.mu_hat_var[a] > aipw.mu_hat_var[a], "{means:?} arm {a}");
            }
        }
        let ise = ipw.mu_hat_se();
        for a in 0..2 {
            assert!((ipw.mean_mu_hat[a] - means[a]).abs() <= 4.0 * ise[a]);
        }
    }
}

#[test]
fn martingale_residuals_have_zero_mean_each_round() {
    let inst = Instance::gaussian([0.4, -0.2], [1.0, 4.0]).unwrap();
    let exp = Experiment::new(inst, 200, adaptive(), EstimatorKind::Aipw).unwrap();
    let reps = 4000u64;
    let checkpoints = [0usize, 4, 49, 199];
    let mut sum = [[0.0f64; 2]; 4];
    let mut sq = [[0.0f64; 2]; 4];
    for rep in 0..reps {
        let (_, recs) = simulate_trial(&exp.trial(99, rep), |_, _, y| y).unwrap();
        let z = martingale_residuals(&recs, &inst);
        for (j, &t) in checkpoints.iter().enumerate() {
            for a in 0..2 {
                sum[j][a] += z[t][a];
                sq[j][a] += z[t][a] * z[t][a];
            }
        }
    }
    let r = reps as f64;
    for j in 0..checkpoints.len() {
        for a in 0..2 {
            let mean = sum[j][a] / r;
            let se = ((sq[j][a] / r - mean * mean) / (r - 1.0)).sqrt();
            assert!(mean.abs() <= 4.0 * se, "round {} arm {a}: {mean} (se {se})", checkpoints[j] + 1);
        }
    }
}

#[test]
fn oracle_misid_below_exponential_bound() {
    let (s1, s2, t) = (1.0, 1.0, 1000u64);
    let mc = MonteCarlo::new(4000, 21);
    let policy = PolicyConfig::oracle_neyman(s1, s2).unwrap();
    let table = sweep_worst_case([s1, s2], t, policy, EstimatorKind::SampleMean, &engine::DEFAULT_SWEEP_GRID, &mc).unwrap();
    let normal = Normal::standard();
    for row in &table.rows {
        let bound = misid_upper_bound(s1, s2, row.gap, t).unwrap();
        let p = row.report.misid_prob;
        assert!(p <= bound + 3.0 * row.report.misid_se, "x={}: {p} > {bound}", row.multiplier);
        // exact tail under the block schedule
        let exact = normal.cdf(-row.gap * (t as f64).sqrt() / (s1 + s2));
        let se = (exact * (1.0 - exact) / 4000.0).sqrt();
        assert!((p - exact).abs() <= 4.0 * se + 1e-12, "x={}: {p} vs {exact}", row.multiplier);
    }
}

#[test]
fn uniform_sample_mean_tail_matches_normal_cdf() {
    // block schedule with T/2 per arm: error is N(Δ, 4σ²/T) in the difference
    let (gap, t) = (0.1, 400u64);
    let inst = Instance::gaussian([gap, 0.0], [1.0, 1.0]).unwrap();
    let exp = Experiment::new(inst, t, PolicyConfig::Uniform, EstimatorKind::SampleMean).unwrap();
    let rep = MonteCarlo::new(20_000, 3).run(&exp).unwrap();
    let exact = Normal::standard().cdf(-gap / (4.0 / t as f64).sqrt());
    assert!((rep.misid_prob - exact).abs() <= 4.0 * rep.misid_se, "{} vs {exact}", rep.misid_prob);
}
