use neyman_bai::theory::{binary_relative_entropy, check_transportation};
use neyman_bai::*;
use serde_json::Value;

fn pair(v: &Value) -> [f64; 2] {
    let a = v.as_array().expect("pair");
    [a[0].as_f64().unwrap(), a[1].as_f64().unwrap()]
}

fn instance(family: &str, means: [f64; 2], vars: Option<[f64; 2]>) -> Instance64 {
    match family {
        "gaussian" => Instance::gaussian(means, vars.expect("variances")).unwrap(),
        "bernoulli" => Instance::bernoulli(means).unwrap(),
        f => panic!("family {f}"),
    }
}

#[test]
fn fixture_scenarios_satisfy_inequality() {
    let all: Value = serde_json::from_str(include_str!("../fixtures/scenarios.json")).unwrap();
    for s in all.as_array().unwrap() {
        let name = s["name"].as_str().unwrap();
        let family = s["family"].as_str().unwrap();
        let vars = s.get("variances").map(pair);
        let t = s["T"].as_u64().unwrap();
        let base = instance(family, pair(&s["baseline"]), vars);
        let alt = match &s["alternative"] {
            Value::String(k) if k == "lower_bound" => {
                let sd = base.std_devs();
                lower_bound_alternative(sd[0], sd[1], t).unwrap()
            }
            v => instance(family, pair(v), vars),
        };
        let policy = match s["policy"].as_str().unwrap() {
            "uniform" => PolicyConfig::Uniform,
            "adaptive_neyman" => PolicyConfig::adaptive_neyman(1e-3).unwrap(),
            "oracle_neyman" => {
                let sd = base.std_devs();
                PolicyConfig::oracle_neyman(sd[0], sd[1]).unwrap()
            }
            p => panic!("policy {p}"),
        };
        let estimator: EstimatorKind = serde_json::from_value(s["estimator"].clone()).unwrap();
        let mc = MonteCarlo::new(s["R"].as_u64().unwrap(), 1234);
        let rep = match s["event"].as_str().unwrap() {
            "recommend_arm1" => check_transportation(&base, &alt, policy, estimator, t, &mc, |r| r.recommended == Arm::One),
            "recommend_arm2" => check_transportation(&base, &alt, policy, estimator, t, &mc, |r| r.recommended == Arm::Two),
            "arm1_majority" => check_transportation(&base, &alt, policy, estimator, t, &mc, |r| 2 * r.counts[0] > t),
            e => panic!("event {e}"),
        }
        .unwrap();
        assert!(rep.satisfied, "{name}: {rep:?}");
        assert!(rep.lhs >= 0.0 && rep.rhs >= 0.0, "{name}");
        let d = binary_relative_entropy(rep.p_baseline, rep.p_alternative).unwrap();
        assert_eq!(d, rep.rhs, "{name}");
    }
}

#[test]
fn identical_instances_give_zero_sides() {
    let inst = Instance::gaussian([0.1, 0.0], [1.0, 1.0]).unwrap();
    let mc = MonteCarlo::new(500, 8);
    let rep = check_transportation(&inst, &inst, PolicyConfig::Uniform, EstimatorKind::SampleMean, 40, &mc, |r| {
        r.recommended == Arm::One
    })
    .unwrap();
    assert_eq!(rep.lhs, 0.0);
    assert_eq!(rep.rhs, 0.0);
    assert!(rep.satisfied);
}
